#ifndef SPIKELOC_ACQUISITION_HPP
#define SPIKELOC_ACQUISITION_HPP

// Observed spectrum data: exact Fourier samples of a measure plus a bounded
// perturbation. Random draws are addressed by (seed, frequency index) so the
// result is independent of evaluation order.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <variant>
#include <vector>

#include "spikeloc/kernels.hpp"
#include "spikeloc/measures.hpp"
#include "spikeloc/rng.hpp"

namespace spikeloc {

/// y(k) for k = -K..K.
struct PeriodicSignal {
    int K = 0;
    std::vector<complex> values;

    PeriodicSignal() = default;
    explicit PeriodicSignal(int K_) : K(K_), values(static_cast<std::size_t>(2 * K_ + 1)) {
        if (K_ < 0) throw std::invalid_argument("K must be nonnegative");
    }

    [[nodiscard]] std::size_t size() const { return values.size(); }
    [[nodiscard]] complex& at(int k) { return values.at(static_cast<std::size_t>(k + K)); }
    [[nodiscard]] const complex& at(int k) const { return values.at(static_cast<std::size_t>(k + K)); }
    [[nodiscard]] double frequency(std::size_t i) const { return static_cast<double>(static_cast<int>(i) - K); }
    friend bool operator==(const PeriodicSignal&, const PeriodicSignal&) = default;
};

/// y(k) on the uniform grid k_j = -K + j h, j = 0..n, with n even and k_n = K.
struct RealSignal {
    double K = 0.0;
    double h = 0.0;
    std::vector<complex> values;

    RealSignal() = default;

    /// Grid with spacing at most h_max; the spacing is shrunk so that the grid
    /// lands on +K exactly and has an even number of panels.
    RealSignal(double K_, double h_max) : K(K_) {
        if (!(K_ > 0.0) || !(h_max > 0.0)) throw std::invalid_argument("real-line grid requires K > 0 and h > 0");
        auto n = static_cast<std::size_t>(std::ceil(2.0 * K_ / h_max));
        if (n % 2 == 1) ++n;
        if (n < 2) n = 2;
        h = 2.0 * K_ / static_cast<double>(n);
        values.resize(n + 1);
    }

    [[nodiscard]] std::size_t size() const { return values.size(); }
    [[nodiscard]] std::size_t panels() const { return values.size() - 1; }
    [[nodiscard]] double frequency(std::size_t j) const { return j + 1 == values.size() ? K : -K + static_cast<double>(j) * h; }
    friend bool operator==(const RealSignal&, const RealSignal&) = default;
};

/// Default real-line spacing: at least 16 samples per period of exp(2 pi i k x)
/// over a window of half-width x_max, and never coarser than K/1024.
[[nodiscard]] inline double default_spacing(double K, double x_max) { return std::min(1.0 / (32.0 * x_max), K / 1024.0); }

// ---------------------------------------------------------------------------
// noise models

struct NoNoise {};
/// Independent draws, uniform on the closed disk of radius eps.
struct UniformDisk {
    double eps = 0.0;
    std::uint64_t seed = 0;
};
/// |noise(k)| = eps with phases aligned so the indicator at target grows by eps * sum phihat.
struct WorstCaseBoost {
    double eps = 0.0;
    double target = 0.0;
};
/// Same magnitude, anti-aligned: the indicator at target shrinks by eps * sum phihat.
struct WorstCaseSuppress {
    double eps = 0.0;
    double target = 0.0;
};
/// Hadamard-test shot noise: Re and Im each estimated from N draws of +-1.
struct Shots {
    std::uint64_t N = 1;
    std::uint64_t seed = 0;
    double delta = 0.01;
};

using NoiseSpec = std::variant<NoNoise, UniformDisk, WorstCaseBoost, WorstCaseSuppress, Shots>;

/// Nominal eps of a bounded noise spec; shots report 0 (their radius is eps_hat).
[[nodiscard]] inline double noise_eps(const NoiseSpec& spec) {
    if (const auto* u = std::get_if<UniformDisk>(&spec)) return u->eps;
    if (const auto* b = std::get_if<WorstCaseBoost>(&spec)) return b->eps;
    if (const auto* s = std::get_if<WorstCaseSuppress>(&spec)) return s->eps;
    return 0.0;
}

// ---------------------------------------------------------------------------
// shot-noise constants
//
// Each of the 2(2K+1) real components is a mean of N variables in [-1, 1], so
// Hoeffding gives P(|err| >= t) <= 2 exp(-N t^2 / 2). A union bound at total
// failure probability delta gives t = sqrt(2 ln(4(2K+1)/delta) / N), and
// combining Re and Im in quadrature gives the complex radius
//   eps_hat = sqrt(2) t = 2 sqrt(ln(4(2K+1)/delta) / N).

[[nodiscard]] inline double shots_radius(int K, std::uint64_t N, double delta) {
    if (N < 1) throw std::invalid_argument("shot count must be at least 1");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
    return 2.0 * std::sqrt(std::log(4.0 * (2.0 * K + 1.0) / delta) / static_cast<double>(N));
}

/// Smallest N with shots_radius(K, N, delta) <= eps_target.
[[nodiscard]] inline std::uint64_t shots_budget(int K, double eps_target, double delta) {
    if (!(eps_target > 0.0)) throw std::invalid_argument("eps_target must be positive");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
    const double L = std::log(4.0 * (2.0 * K + 1.0) / delta);
    auto N         = static_cast<std::uint64_t>(std::ceil(4.0 * L / (eps_target * eps_target)));
    N              = std::max<std::uint64_t>(N, 1);
    while (N > 1 && shots_radius(K, N - 1, delta) <= eps_target) --N;
    while (shots_radius(K, N, delta) > eps_target) ++N;
    return N;
}

// ---------------------------------------------------------------------------
// sampling

[[nodiscard]] inline PeriodicSignal sample_periodic(const SpikeMeasure& m, int K) {
    PeriodicSignal sig(K);
    for (int k = -K; k <= K; ++k) sig.at(k) = fourier_periodic(m, k);
    return sig;
}

[[nodiscard]] inline RealSignal sample_real(const SpikeMeasure& m, double K, double h_max) {
    RealSignal sig(K, h_max);
    for (std::size_t j = 0; j < sig.size(); ++j) sig.values[j] = fourier_real(m, sig.frequency(j));
    return sig;
}

namespace detail {

enum : std::uint64_t { kStreamDisk = 0xd15c, kStreamShotRe = 0x5407e, kStreamShotIm = 0x5407f };

[[nodiscard]] inline complex disk_draw(double eps, std::uint64_t seed, std::int64_t index) {
    SplitMix64 rng(substream_seed(seed, kStreamDisk, index));
    // shrink by a few ulps so |draw| <= eps survives rounding of the polar form
    const double r     = eps * std::sqrt(rng.uniform()) * (1.0 - 4.0 * std::numeric_limits<double>::epsilon());
    const double theta = 2.0 * std::numbers::pi * rng.uniform();
    return std::polar(r, theta);
}

/// Mean of N independent +-1 draws with expectation mu.
[[nodiscard]] inline double pm_one_mean(double mu, std::uint64_t N, std::uint64_t seed) {
    SplitMix64 rng(seed);
    const double p = std::clamp(0.5 * (1.0 + mu), 0.0, 1.0);
    std::binomial_distribution<std::uint64_t> dist(N, p);
    const auto plus = dist(rng);
    return (2.0 * static_cast<double>(plus) - static_cast<double>(N)) / static_cast<double>(N);
}

/// Unit complex number aligned with the smoothed sum sum_j w_j y_j phihat_j exp(2 pi i k_j x).
template<typename Freq, typename Weight>
[[nodiscard]] complex indicator_phase(const std::vector<complex>& y, Freq freq, Weight weight, const KernelParams& kp, double x) {
    complex s{0.0, 0.0};
    for (std::size_t j = 0; j < y.size(); ++j) {
        const double k = freq(j);
        s += weight(j) * gaussian_hat(kp, k) * y[j] * std::polar(1.0, 2.0 * std::numbers::pi * k * x);
    }
    const double a = std::abs(s);
    return a > 0.0 ? s / a : complex{1.0, 0.0};
}

} // namespace detail

/// Adds noise to a periodic signal. The worst-case modes need the smoothing
/// kernel to orient their phases.
[[nodiscard]] inline PeriodicSignal add_noise(PeriodicSignal sig, const NoiseSpec& spec, const KernelParams& kp) {
    if (std::holds_alternative<NoNoise>(spec)) return sig;
    if (const auto* u = std::get_if<UniformDisk>(&spec)) {
        for (int k = -sig.K; k <= sig.K; ++k) sig.at(k) += detail::disk_draw(u->eps, u->seed, k);
        return sig;
    }
    if (const auto* sh = std::get_if<Shots>(&spec)) {
        for (int k = -sig.K; k <= sig.K; ++k) {
            const complex mu = sig.at(k);
            const double re  = detail::pm_one_mean(mu.real(), sh->N, substream_seed(sh->seed, detail::kStreamShotRe, k));
            const double im  = detail::pm_one_mean(mu.imag(), sh->N, substream_seed(sh->seed, detail::kStreamShotIm, k));
            sig.at(k)        = {re, im};
        }
        return sig;
    }
    double eps = 0.0, target = 0.0, sign = 1.0;
    if (const auto* b = std::get_if<WorstCaseBoost>(&spec)) {
        eps = b->eps, target = b->target;
    } else {
        const auto& s = std::get<WorstCaseSuppress>(spec);
        eps = s.eps, target = s.target, sign = -1.0;
    }
    const complex u = detail::indicator_phase(
        sig.values, [&](std::size_t i) { return sig.frequency(i); }, [](std::size_t) { return 1.0; }, kp, target);
    for (int k = -sig.K; k <= sig.K; ++k) sig.at(k) += sign * eps * u * std::polar(1.0, -2.0 * std::numbers::pi * k * target);
    return sig;
}

/// Real-line counterpart. Disk noise is drawn at integer frequency knots and
/// interpolated linearly, which keeps |noise| <= eps while leaving the data a
/// continuous function of k that the quadrature can resolve.
[[nodiscard]] inline RealSignal add_noise(RealSignal sig, const NoiseSpec& spec, const KernelParams& kp) {
    if (std::holds_alternative<NoNoise>(spec)) return sig;
    if (std::holds_alternative<Shots>(spec)) throw std::invalid_argument("shot noise is defined for the periodic setting only");
    if (const auto* u = std::get_if<UniformDisk>(&spec)) {
        for (std::size_t j = 0; j < sig.size(); ++j) {
            const double k  = sig.frequency(j);
            const double k0 = std::floor(k);
            const double t  = k - k0;
            const auto i0   = static_cast<std::int64_t>(k0);
            sig.values[j] += (1.0 - t) * detail::disk_draw(u->eps, u->seed, i0) + t * detail::disk_draw(u->eps, u->seed, i0 + 1);
        }
        return sig;
    }
    double eps = 0.0, target = 0.0, sign = 1.0;
    if (const auto* b = std::get_if<WorstCaseBoost>(&spec)) {
        eps = b->eps, target = b->target;
    } else {
        const auto& s = std::get<WorstCaseSuppress>(spec);
        eps = s.eps, target = s.target, sign = -1.0;
    }
    const std::size_t last = sig.size() - 1;
    const complex u        = detail::indicator_phase(
        sig.values, [&](std::size_t j) { return sig.frequency(j); }, [&](std::size_t j) { return (j == 0 || j == last) ? 0.5 * sig.h : sig.h; }, kp,
        target);
    for (std::size_t j = 0; j < sig.size(); ++j) sig.values[j] += sign * eps * u * std::polar(1.0, -2.0 * std::numbers::pi * sig.frequency(j) * target);
    return sig;
}

struct ShotSample {
    PeriodicSignal signal;
    double eps_hat = 0.0;
};

/// QPE-style acquisition: Hadamard-test estimates of f^(k) from N shots per component.
[[nodiscard]] inline ShotSample shots_periodic(const SpikeMeasure& m, int K, std::uint64_t N, std::uint64_t seed, double delta = 0.01) {
    ShotSample out;
    out.eps_hat = shots_radius(K, N, delta);
    out.signal  = add_noise(sample_periodic(m, K), Shots{N, seed, delta}, KernelParams{});
    return out;
}

/// max_k |a(k) - b(k)|.
template<typename Signal>
[[nodiscard]] double max_deviation(const Signal& a, const Signal& b) {
    if (a.values.size() != b.values.size()) throw std::invalid_argument("signals differ in length");
    double d = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) d = std::max(d, std::abs(a.values[i] - b.values[i]));
    return d;
}

} // namespace spikeloc

#endif
