#include <cmath>
#include <complex>
#include <numbers>

#include <gtest/gtest.h>

#include "spikeloc/kernels.hpp"
#include "spikeloc/params.hpp"
#include "spikeloc/rng.hpp"

using namespace spikeloc;

namespace {

constexpr double kPi = std::numbers::pi;

// Direct lattice sum over a fixed symmetric range, the test-side oracle.
double lattice_oracle(double sigma, double K, double x, int J) {
    double s = 0.0;
    for (int j = -J; j <= J; ++j) {
        const double z = (x + j) * K / sigma;
        s += (K / sigma) * std::exp(-kPi * z * z);
    }
    return s;
}

struct Draw {
    KernelParams kp;
    double x;
};

// sigma in [0.5, 2], K / sigma in [3, 20]
Draw draw(SplitMix64& rng, double x_lo = -0.5, double x_hi = 0.5) {
    const double sigma = rng.uniform(0.5, 2.0);
    const double ratio = rng.uniform(3.0, 20.0);
    return {KernelParams(sigma, sigma * ratio), rng.uniform(x_lo, x_hi)};
}

} // namespace

TEST(Gaussian, PeakAndRadiusValues) {
    const auto d = derive_real({16.0, 0.4, 0.2, 0.0});
    const auto kp = d.kernel();
    EXPECT_DOUBLE_EQ(gaussian(kp, 0.0), 16.0 / d.sigma);
    // at x = tau/K with tau = sigma^2 the value is (K/sigma) exp(-pi sigma^2) = (K/sigma) (beta - omega)/6
    EXPECT_NEAR(gaussian(kp, d.tau / 16.0), 16.0 / d.sigma * 0.2 / 6.0, 1e-13);
    EXPECT_EQ(gaussian(kp, 0.037), gaussian(kp, -0.037));
}

TEST(Gaussian, HatValues) {
    const auto d = derive_periodic({12.0, 0.5, 0.1, 0.0});
    const auto kp = d.kernel();
    EXPECT_EQ(gaussian_hat(kp, 0.0), 1.0);
    EXPECT_NEAR(gaussian_hat(kp, 12.0), 0.4 / 12.0, 1e-15);
}

TEST(Gaussian, FourierPairByQuadrature) {
    const KernelParams kp(1.3, 10.0);
    const double L   = 12.0 * kp.width();
    const int n      = 6000;
    const double dx  = 2.0 * L / n;
    for (double k = -20.0; k <= 20.0; k += 0.5) {
        std::complex<double> s{0.0, 0.0};
        for (int i = 0; i <= n; ++i) {
            const double x = -L + i * dx;
            const double w = (i == 0 || i == n) ? 0.5 : 1.0;
            s += w * gaussian(kp, x) * std::polar(1.0, -2.0 * kPi * k * x);
        }
        s *= dx;
        EXPECT_NEAR(s.real(), gaussian_hat(kp, k), 1e-10) << "k = " << k;
        EXPECT_NEAR(s.imag(), 0.0, 1e-10);
    }
}

TEST(PeriodicGaussian, LatticeValueAtZero) {
    const KernelParams kp(2.0, 12.0);
    EXPECT_NEAR(periodic_gaussian(kp, 0.0), lattice_oracle(2.0, 12.0, 0.0, 3), 1e-14);
    EXPECT_NEAR(periodic_gaussian(kp, 0.0), 6.0, 1e-12);
    EXPECT_NEAR(phi_p_zero(kp), 6.0, 1e-12);
}

TEST(PeriodicGaussian, UnitMassRiemannSum) {
    for (const auto& kp : {KernelParams(1.0, 4.0), KernelParams(1.04, 12.0), KernelParams(2.0, 12.0)}) {
        const int n = 1 << 16;
        double s    = 0.0;
        for (int i = 0; i < n; ++i) s += periodic_gaussian(kp, -0.5 + static_cast<double>(i) / n);
        EXPECT_NEAR(s / n, 1.0, 1e-10);
    }
}

TEST(PeriodicGaussian, DecreasesAwayFromZero) {
    const KernelParams kp(1.2, 3.6);
    EXPECT_LT(periodic_gaussian(kp, 0.5), periodic_gaussian(kp, 0.25));
    EXPECT_LT(periodic_gaussian(kp, 0.25), periodic_gaussian(kp, 0.0));
}

TEST(PeriodicGaussian, ExactlyEvenAndPeriodic) {
    SplitMix64 rng(7);
    for (int i = 0; i < 1000; ++i) {
        const auto d = draw(rng, -3.0, 3.0);
        EXPECT_EQ(periodic_gaussian(d.kp, d.x), periodic_gaussian(d.kp, -d.x));
        EXPECT_NEAR(periodic_gaussian(d.kp, d.x + 1.0), periodic_gaussian(d.kp, d.x), 1e-12 * periodic_gaussian(d.kp, d.x));
    }
}

TEST(PeriodicGaussian, MatchesWideLatticeOracle) {
    SplitMix64 rng(11);
    for (int i = 0; i < 500; ++i) {
        const auto d = draw(rng);
        const double ref = lattice_oracle(d.kp.sigma, d.kp.K, d.x, 8);
        EXPECT_NEAR(periodic_gaussian(d.kp, d.x), ref, 1e-12 * ref);
    }
}

TEST(ThetaProduct, AgreesWithLatticeSum) {
    SplitMix64 rng(13);
    for (int i = 0; i < 2000; ++i) {
        const auto d = draw(rng);
        const double a = periodic_gaussian(d.kp, d.x);
        const double b = periodic_gaussian_theta(d.kp, d.x);
        EXPECT_LE(std::fabs(a - b), 1e-12 * a) << "sigma=" << d.kp.sigma << " K=" << d.kp.K << " x=" << d.x;
    }
}

TEST(ThetaProduct, SmallNomeLeadingTerm) {
    // sigma / K = 3 gives q = exp(-9 pi) ~ 5e-13
    const KernelParams kp(3.0, 1.0);
    const double q = kp.nome();
    for (double x : {0.0, 0.1, 0.3, 0.5}) {
        EXPECT_NEAR(periodic_gaussian_theta(kp, x), 1.0 + 2.0 * q * std::cos(2.0 * kPi * x), 1e-20 + 10.0 * q * q);
    }
}

TEST(ThetaProduct, PositiveAtHalf) {
    for (double ratio : {3.0, 5.0, 10.0, 20.0}) {
        const KernelParams kp(1.0, ratio);
        EXPECT_GT(periodic_gaussian_theta(kp, 0.5), 0.0);
    }
}

TEST(PhiPZero, SandwichAtKEqualsThreeSigma) {
    for (double sigma : {0.8, 1.0, 1.3, 2.0}) {
        const KernelParams kp(sigma, 3.0 * sigma);
        const double v = phi_p_zero(kp);
        EXPECT_GE(v, kp.K / kp.sigma);
        EXPECT_LE(v, (1.0 + 1e-4) * kp.K / kp.sigma);
    }
}

TEST(PhiPZero, FourierMassMatchesLattice) {
    for (double ratio : {3.0, 4.5, 8.0, 15.0, 40.0}) {
        const KernelParams kp(1.1, 1.1 * ratio);
        EXPECT_NEAR(fourier_mass(kp), phi_p_zero(kp), 1e-12 * phi_p_zero(kp));
    }
}

// Poisson summation: lattice and Fourier series agree. The Fourier series is an
// alternating sum whose rounding error scales with sum |phihat| = phi_p(0), so
// the comparison is made relative to that scale.
TEST(PoissonIdentity, LatticeEqualsFourierSeries) {
    SplitMix64 rng(17);
    for (int i = 0; i < 1000; ++i) {
        const double sigma = rng.uniform(0.5, 2.0);
        const KernelParams kp(sigma, sigma * rng.uniform(3.0, 20.0));
        const double scale = phi_p_zero(kp);
        for (int j = 0; j < 100; ++j) {
            const double x = rng.uniform(-0.5, 0.5);
            ASSERT_LE(std::fabs(periodic_gaussian(kp, x) - periodic_gaussian_fourier(kp, x)), 1e-12 * scale);
        }
    }
}

TEST(KernelBounds, SandwichOnInnerThird) {
    SplitMix64 rng(19);
    for (int i = 0; i < 20; ++i) {
        const double sigma = rng.uniform(0.5, 2.0);
        const KernelParams kp(sigma, sigma * rng.uniform(3.0, 20.0));
        for (int g = 0; g <= 10000; ++g) {
            const double x  = -1.0 / 3.0 + (2.0 / 3.0) * g / 10000.0;
            const double p  = periodic_gaussian(kp, x);
            const double ph = gaussian(kp, x);
            ASSERT_LE(ph, p);
            ASSERT_LE(p, (1.0 + 1e-4) * ph);
        }
    }
}

TEST(KernelBounds, StrictlyDecreasingOnHalfPeriod) {
    SplitMix64 rng(23);
    for (int i = 0; i < 20; ++i) {
        const double sigma = rng.uniform(0.5, 2.0);
        const KernelParams kp(sigma, sigma * rng.uniform(3.0, 20.0));
        double prev = periodic_gaussian(kp, 0.0);
        for (int g = 1; g <= 10000; ++g) {
            const double v = periodic_gaussian(kp, 0.5 * g / 10000.0);
            ASSERT_LT(v, prev) << "g=" << g;
            prev = v;
        }
    }
}

TEST(TailBound, IntegerTailBelowGaussianTailConstant) {
    for (double gap : {0.05, 0.1, 0.2, 0.4, 0.8}) {
        for (double C : {6.0, 12.0}) {
            const double sigma = std::sqrt(std::log(C / gap) / kPi);
            for (int K : {4, 8, 16, 64}) {
                const KernelParams kp(sigma, K);
                EXPECT_LE(fourier_tail(kp, K), K / sigma * std::exp(-kPi * sigma * sigma));
            }
        }
    }
}

TEST(GaussianIntegral, MatchesClosedFormAndTotalMass) {
    const KernelParams kp(1.0, 10.0);
    EXPECT_NEAR(gaussian_integral(kp, -1.0, 1.0), 1.0, 1e-15);
    EXPECT_NEAR(gaussian_integral(kp, 0.0, 1.0), 0.5, 1e-15);
    EXPECT_NEAR(periodic_gaussian_integral(kp, -0.5, 0.5), 1.0, 1e-14);
    // shifted arc of full length still carries unit mass
    EXPECT_NEAR(periodic_gaussian_integral(kp, 0.2, 1.2), 1.0, 1e-14);
}
