#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "spikeloc/params.hpp"
#include "spikeloc/rng.hpp"

using namespace spikeloc;

// Expected values below were computed with 40-digit mpmath from the closed forms.

TEST(DeriveReal, MatchesClosedForms) {
    const auto d = derive_real({16.0, 0.4, 0.2, 0.0});
    EXPECT_EQ(d.setting, Setting::RealLine);
    EXPECT_NEAR(d.sigma, 1.0404973577311417, 1e-13);
    EXPECT_NEAR(d.tau, 1.0826347514454875, 1e-13);
    EXPECT_NEAR(d.threshold, 5.1257538461826970, 1e-12);
    EXPECT_NEAR(d.eps_max, 0.2 / 6.0, 1e-15);
    EXPECT_EQ(d.k_min, 0.0);
}

TEST(DeriveReal, UnitMassSingleSpikeLimit) {
    const auto d = derive_real({1.0, 1.0, 0.0, 0.0});
    EXPECT_DOUBLE_EQ(d.sigma, std::sqrt(std::log(6.0) / std::numbers::pi));
    EXPECT_DOUBLE_EQ(d.tau, std::log(6.0) / std::numbers::pi);
    EXPECT_DOUBLE_EQ(d.threshold, 2.0 / (3.0 * d.sigma));
    EXPECT_DOUBLE_EQ(d.eps_max, 1.0 / 6.0);
}

TEST(DeriveReal, RejectsOmegaNotBelowBeta) {
    EXPECT_THROW((void)derive_real({16.0, 0.4, 0.4, 0.0}), ParameterError);
    EXPECT_THROW((void)derive_real({16.0, 0.4, 0.5, 0.0}), ParameterError);
}

TEST(DeriveReal, AcceptsNonIntegerK) { EXPECT_NO_THROW((void)derive_real({7.5, 0.4, 0.2, 0.0})); }

TEST(DeriveReal, RejectsDegenerateGapAndBadInputs) {
    EXPECT_THROW((void)derive_real({16.0, 0.4, 0.4 - 1e-10, 0.0}), ParameterError);
    EXPECT_THROW((void)derive_real({0.0, 0.4, 0.2, 0.0}), ParameterError);
    EXPECT_THROW((void)derive_real({16.0, 1.5, 0.2, 0.0}), ParameterError);
    EXPECT_THROW((void)derive_real({16.0, 0.4, -0.1, 0.0}), ParameterError);
    EXPECT_THROW((void)derive_real({16.0, 0.4, 0.2, -1.0}), ParameterError);
}

TEST(DerivePeriodic, MatchesClosedForms) {
    const auto d = derive_periodic({12.0, 0.5, 0.1, 0.0});
    EXPECT_EQ(d.setting, Setting::Periodic);
    EXPECT_NEAR(d.sigma, 1.0404973577311417, 1e-13);
    EXPECT_NEAR(d.tau, 1.0826347514454875, 1e-13);
    EXPECT_NEAR(d.k_min, 3.2479042543364626, 1e-12);
    EXPECT_NEAR(d.eps_max, 0.4 / 3.0, 1e-15);
    // (6 beta + 5 omega) / 11 = 0.318181..., phi_p(0) = 11.532946153911068 from the lattice-sum oracle
    EXPECT_NEAR(d.threshold, 3.6695737762444308, 1e-12);
    EXPECT_NEAR(d.threshold / phi_p_zero_for(d.sigma, 12.0), 3.5 / 11.0, 1e-15);
}

TEST(DerivePeriodic, RejectsKBelowMinimumWithHint) {
    try {
        (void)derive_periodic({3.0, 0.5, 0.1, 0.0});
        FAIL() << "expected ParameterError";
    } catch (const ParameterError& e) {
        EXPECT_NE(std::string(e.what()).find("3.247"), std::string::npos) << e.what();
        EXPECT_NE(std::string(e.what()).find("K >= 4"), std::string::npos) << e.what();
    }
    EXPECT_NO_THROW((void)derive_periodic_unchecked({3.0, 0.5, 0.1, 0.0}));
}

TEST(DerivePeriodic, RejectsOmegaEqualBetaAndFractionalK) {
    EXPECT_THROW((void)derive_periodic({12.0, 0.5, 0.5, 0.0}), ParameterError);
    EXPECT_THROW((void)derive_periodic({12.5, 0.5, 0.1, 0.0}), ParameterError);
}

TEST(DerivePeriodic, AdmitsKEqualToMinimum) {
    // gap chosen so that 3 tau = 4 exactly up to rounding: tau = 4/3, gap = 12 exp(-4 pi / 3)
    const double gap = 12.0 * std::exp(-4.0 * std::numbers::pi / 3.0);
    const auto d     = derive_periodic_unchecked({4.0, gap + 0.01, 0.01, 0.0});
    EXPECT_NEAR(d.k_min, 4.0, 1e-12);
    if (d.k_min <= 4.0) {
        EXPECT_NO_THROW((void)derive_periodic({4.0, gap + 0.01, 0.01, 0.0}));
    }
}

TEST(RegimeWarnings, EpsAboveMaxWarnsWithoutFailing) {
    const ProblemParams p{12.0, 0.5, 0.1, 0.5};
    const auto d = derive_periodic(p);
    const auto w = check_regime(p, d);
    EXPECT_TRUE(w.eps_above_max);
    EXPECT_FALSE(w.k_below_3sigma);
}

TEST(RegimeWarnings, KBelowThreeSigma) {
    // large gap: sigma < 1, tau = sigma^2 < sigma, so 3 tau <= K < 3 sigma is possible
    const ProblemParams p{2.0, 1.0, 0.0, 0.0};
    const auto d = derive_periodic_unchecked(p);
    ASSERT_LT(d.sigma, 1.0);
    EXPECT_EQ(check_regime(p, d).k_below_3sigma, p.K < 3.0 * d.sigma);
}

// Property: tau == sigma^2 and exp(-pi sigma^2) C == beta - omega across the admissible range.
TEST(DeriveProperty, ClosedFormConsistency) {
    SplitMix64 rng(2024);
    for (int i = 0; i < 2000; ++i) {
        const double beta  = rng.uniform(1e-3, 1.0);
        const double omega = rng.uniform(0.0, beta * 0.999);
        const double K     = std::floor(rng.uniform(10.0, 200.0));
        for (const auto setting : {Setting::RealLine, Setting::Periodic}) {
            const ProblemParams p{K, beta, omega, 0.0};
            const auto d = setting == Setting::Periodic ? derive_periodic_unchecked(p) : derive_real(p);
            EXPECT_NEAR(d.sigma * d.sigma, d.tau, 1e-15 * d.tau);
            EXPECT_NEAR(std::exp(-std::numbers::pi * d.sigma * d.sigma) * d.tail_constant(), beta - omega, 1e-12 * (beta - omega));
            const auto again = setting == Setting::Periodic ? derive_periodic_unchecked(p) : derive_real(p);
            EXPECT_EQ(d.sigma, again.sigma);
            EXPECT_EQ(d.threshold, again.threshold);
        }
    }
}
