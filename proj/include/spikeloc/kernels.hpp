#ifndef SPIKELOC_KERNELS_HPP
#define SPIKELOC_KERNELS_HPP

// Gaussian smoothing kernel on the real line, its Fourier transform, and its
// 1-periodization. The periodization is evaluated three independent ways:
//
//   lattice sum      phi_p(x) = sum_j phi(x + j)
//   Fourier series   phi_p(x) = sum_k phihat(k) exp(2 pi i k x)
//   theta product    phi_p(x) = prod_n (1 - q^2n)(1 + 2 q^(2n-1) cos(2 pi x) + q^(4n-2))
//
// with q = exp(-pi sigma^2 / K^2). The first two agree by Poisson summation,
// the third is the Jacobi triple product for theta_3(pi x, q). The lattice sum
// is the production path; it converges in a handful of terms once K >= 3 sigma.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>

namespace spikeloc {

struct KernelParams {
    double sigma = 1.0;
    double K     = 1.0;

    KernelParams() = default;
    KernelParams(double sigma_, double K_) : sigma(sigma_), K(K_) {
        if (!(sigma > 0.0) || !(K > 0.0)) throw std::invalid_argument("kernel requires sigma > 0 and K > 0");
    }

    /// Width of phi in x units.
    [[nodiscard]] double width() const { return sigma / K; }
    /// pi sigma^2 / K^2, so that q = exp(-log_nome()).
    [[nodiscard]] double log_nome() const { return std::numbers::pi * (sigma / K) * (sigma / K); }
    [[nodiscard]] double nome() const { return std::exp(-log_nome()); }
};

/// Relative cutoff for the truncated series.
inline constexpr double kSeriesCutoff = 1e-18;

/// phi(x) = (K/sigma) exp(-pi x^2 K^2 / sigma^2), unit mass.
[[nodiscard]] inline double gaussian(const KernelParams& kp, double x) {
    const double z = x / kp.width();
    return std::exp(-std::numbers::pi * z * z) / kp.width();
}

/// phihat(k) = exp(-pi (k sigma / K)^2).
[[nodiscard]] inline double gaussian_hat(const KernelParams& kp, double k) {
    const double z = k * kp.width();
    return std::exp(-std::numbers::pi * z * z);
}

/// Folds x into [0, 1/2] as the distance to the nearest integer. Symmetric in
/// x, which makes every even function built on it exactly even.
[[nodiscard]] inline double fold_half(double x) {
    const double r = x - std::nearbyint(x);
    return std::fabs(r);
}

[[nodiscard]] inline double periodic_gaussian(const KernelParams& kp, double x) {
    const double u = fold_half(x);
    double sum     = gaussian(kp, u);
    for (int j = 1;; ++j) {
        const double pair = gaussian(kp, j - u) + gaussian(kp, u + j);
        sum += pair;
        if (pair <= kSeriesCutoff * sum) break;
    }
    return sum;
}

/// Jacobi triple product. Each factor is evaluated in a cancellation-free form,
///   1 + 2 r cos(2 pi x) + r^2 = (1 - r)^2 + 4 r cos^2(pi x),
/// and the product is accumulated as a sum of logarithms.
[[nodiscard]] inline double periodic_gaussian_theta(const KernelParams& kp, double x) {
    const double u     = fold_half(x);
    // Accumulated in extended precision: thousands of factors when sigma / K is small.
    const long double c  = std::sin(std::numbers::pi_v<long double> * (0.5L - u)); // cos(pi u), accurate near u = 1/2
    const long double c2 = c * c;
    const long double a  = static_cast<long double>(kp.log_nome());
    long double log_product = 0.0L;
    for (std::size_t n = 1;; ++n) {
        const long double e_odd  = static_cast<long double>(2 * n - 1) * a;
        const long double e_even = static_cast<long double>(2 * n) * a;
        const long double r      = std::exp(-e_odd);
        const long double one_minus_r = -std::expm1(-e_odd);
        log_product += std::log(-std::expm1(-e_even));
        log_product += std::log(one_minus_r * one_minus_r + 4.0L * r * c2);
        if (r < kSeriesCutoff) break;
    }
    return static_cast<double>(std::exp(log_product));
}

/// Fourier-side evaluation sum_k phihat(k) cos(2 pi k x), summed in extended
/// precision from the smallest terms outward. Its absolute error is of order
/// ulp * phi_p(0), so it is only accurate relative to phi_p(0).
[[nodiscard]] inline double periodic_gaussian_fourier(const KernelParams& kp, double x) {
    const long double w  = static_cast<long double>(kp.width());
    const long double pi = std::numbers::pi_v<long double>;
    const long double u  = static_cast<long double>(fold_half(x));
    std::size_t kmax     = 1;
    while (std::exp(-pi * (kmax * w) * (kmax * w)) > kSeriesCutoff) ++kmax;
    long double sum = 0.0L;
    for (std::size_t k = kmax; k >= 1; --k) {
        const long double z = static_cast<long double>(k) * w;
        sum += 2.0L * std::exp(-pi * z * z) * std::cos(2.0L * pi * static_cast<long double>(k) * u);
    }
    return static_cast<double>(1.0L + sum);
}

[[nodiscard]] inline double phi_p_zero(const KernelParams& kp) { return periodic_gaussian(kp, 0.0); }

[[nodiscard]] inline double phi_p_zero_for(double sigma, double K) { return phi_p_zero(KernelParams(sigma, K)); }

/// sum_{k in Z} phihat(k), truncated at the series cutoff. Equals phi_p(0).
[[nodiscard]] inline double fourier_mass(const KernelParams& kp) { return periodic_gaussian_fourier(kp, 0.0); }

/// sum_{|k| <= K} phihat(k) over the integers, the gain of worst-case noise.
[[nodiscard]] inline double truncated_fourier_mass(const KernelParams& kp, int K) {
    double sum = 0.0;
    for (int k = K; k >= 1; --k) sum += 2.0 * gaussian_hat(kp, k);
    return 1.0 + sum;
}

/// sum_{|k| > K, k in Z} phihat(k).
[[nodiscard]] inline double fourier_tail(const KernelParams& kp, int K) {
    double sum = 0.0;
    for (long k = K + 1;; ++k) {
        const double t = 2.0 * gaussian_hat(kp, static_cast<double>(k));
        sum += t;
        if (t <= kSeriesCutoff * sum || t == 0.0) break;
    }
    return sum;
}

/// Mass of phi on [a, b].
[[nodiscard]] inline double gaussian_integral(const KernelParams& kp, double a, double b) {
    const double s = std::sqrt(std::numbers::pi) / kp.width();
    if (a >= 0.0) return 0.5 * (std::erfc(s * a) - std::erfc(s * b));
    if (b <= 0.0) return 0.5 * (std::erfc(-s * b) - std::erfc(-s * a));
    return 0.5 * (std::erf(s * b) - std::erf(s * a));
}

/// Mass of phi_p on the arc [a, b] (b - a <= 1), i.e. sum_j of the Gaussian mass on [a + j, b + j].
[[nodiscard]] inline double periodic_gaussian_integral(const KernelParams& kp, double a, double b) {
    // erf saturates beyond 6 widths; j in [-J, J] with J = 2 + ceil(6 width) covers it for |a|, |b| <= 3/2
    const int J = 2 + static_cast<int>(std::ceil(6.0 * kp.width()));
    double sum  = 0.0;
    for (int j = -J; j <= J; ++j) sum += gaussian_integral(kp, a + j, b + j);
    return sum;
}

} // namespace spikeloc

#endif
