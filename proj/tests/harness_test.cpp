#include <cmath>

#include <gtest/gtest.h>

#include "spikeloc/harness.hpp"

using namespace spikeloc;

namespace {

const SpikeMeasure kTwo{{{0.1, 0.45}, {-0.25, 0.45}}, SpikeCluster{{{0.4, 0.05}, {0.0, 0.05}}}};
const ProblemParams kParams{16.0, 0.3, 0.1, 0.0};

} // namespace

TEST(VerifyOnce, NoiselessPeriodicPasses) {
    const auto r = verify_once(kParams, kTwo, NoNoise{}, Setting::Periodic);
    EXPECT_TRUE(r.pass);
    EXPECT_TRUE(r.contained);
    EXPECT_FALSE(r.premises_violated);
    EXPECT_EQ(r.noise_kind, "none");
    EXPECT_EQ(r.realized_noise, 0.0);
    EXPECT_EQ(r.num_spikes, 2u);
    EXPECT_EQ(r.residue, ResidueKind::Cluster);
    EXPECT_NEAR(r.residue_mass, 0.1, 1e-15);
    EXPECT_DOUBLE_EQ(r.bound, r.derived.tau / 16.0);
    EXPECT_GT(r.margin_step1, 0.0);
    EXPECT_GE(r.margin_step2, 0.0);
    EXPECT_DOUBLE_EQ(r.margin_step2, r.bound - r.max_dev_e_to_star);
    EXPECT_EQ(r.max_dev_star_to_e, 0.0);
}

TEST(VerifyOnce, NoiselessRealLinePasses) {
    const auto r = verify_once(kParams, kTwo, NoNoise{}, Setting::RealLine);
    EXPECT_TRUE(r.pass);
    EXPECT_EQ(r.setting, Setting::RealLine);
}

TEST(VerifyOnce, WorstCaseAtEpsMaxPasses) {
    const auto dp = derive_periodic(kParams);
    for (auto mode : {AdversaryMode::Boost, AdversaryMode::Suppress}) {
        for (std::uint64_t seed = 0; seed < 6; ++seed) {
            const auto noise = adversarial_noise(kTwo, dp, mode, dp.eps_max, seed);
            const auto r     = verify_once(kParams, kTwo, noise, Setting::Periodic);
            EXPECT_TRUE(r.pass) << noise_kind_name(noise) << " seed " << seed;
            EXPECT_TRUE(r.noise_bound_held);
            EXPECT_NEAR(r.realized_noise, dp.eps_max, 1e-15);
        }
    }
}

TEST(VerifyOnce, OutOfRegimeRunsAreFlagged) {
    const auto dp = derive_periodic(kParams);
    const auto r  = verify_once(kParams, kTwo, UniformDisk{2.0 * dp.eps_max, 1}, Setting::Periodic);
    EXPECT_FALSE(r.eps_in_regime);
    EXPECT_TRUE(r.premises_violated);

    const SpikeMeasure bad{{{0.1, 0.2}, {-0.25, 0.8}}, NoResidue{}};
    const auto v = verify_once(kParams, bad, NoNoise{}, Setting::Periodic);
    EXPECT_FALSE(v.measure_valid);
    EXPECT_TRUE(v.premises_violated);
    EXPECT_FALSE(v.premise_messages.empty());

    const auto k = verify_once({3.0, 0.5, 0.1, 0.0}, SpikeMeasure{{{0.0, 1.0}}, NoResidue{}}, NoNoise{}, Setting::Periodic);
    EXPECT_FALSE(k.k_in_regime);
    EXPECT_TRUE(k.premises_violated);
}

TEST(VerifyOnce, RejectsEmptyMeasureAndRealShots) {
    EXPECT_THROW((void)verify_once(kParams, SpikeMeasure{}, NoNoise{}, Setting::Periodic), std::invalid_argument);
    EXPECT_THROW((void)verify_once(kParams, kTwo, Shots{100, 1, 0.01}, Setting::RealLine), std::invalid_argument);
}

TEST(Adversary, PlacementAndDeterminism) {
    const auto dp = derive_periodic(kParams);
    const auto s  = adversarial_noise(kTwo, dp, AdversaryMode::Suppress, 0.01, 3);
    const auto* sup = std::get_if<WorstCaseSuppress>(&s);
    ASSERT_NE(sup, nullptr);
    EXPECT_TRUE(sup->target == 0.1 || sup->target == -0.25);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto b     = adversarial_noise(kTwo, dp, AdversaryMode::Boost, 0.01, seed);
        const auto* boost = std::get_if<WorstCaseBoost>(&b);
        ASSERT_NE(boost, nullptr);
        const double d = std::min(domain_distance(boost->target, 0.1, Setting::Periodic), domain_distance(boost->target, -0.25, Setting::Periodic));
        EXPECT_NEAR(d, 1.05 * dp.radius(), 1e-12);
        const auto again = adversarial_noise(kTwo, dp, AdversaryMode::Boost, 0.01, seed);
        EXPECT_EQ(std::get<WorstCaseBoost>(again).target, boost->target);
    }
}

TEST(Sweep, FlagsInadmissibleRowsAndPassesTheRest) {
    SweepConfig cfg;
    cfg.base       = {16.0, 0.3, 0.0, 0.0};
    cfg.gaps       = {0.05, 0.1, 0.2, 0.6};
    cfg.trials     = 4;
    cfg.seed       = 9;
    cfg.instance.S = 2;
    const auto rows = sweep(cfg);
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_TRUE(rows[0].admissible);
    EXPECT_NEAR(rows[0].beta, 0.3, 1e-15);
    EXPECT_NEAR(rows[0].omega, 0.25, 1e-15);
    EXPECT_FALSE(rows[3].admissible); // beta = 0.6 with S = 2
    EXPECT_EQ(rows[3].note, "S beta exceeds 1");
    for (const auto& r : rows) {
        if (!r.admissible) continue;
        EXPECT_EQ(r.trials, 4);
        EXPECT_EQ(r.passes, 4) << "gap " << r.gap;
        EXPECT_LE(r.max_dev_units, 1.0);
    }
}

TEST(Sweep, KBelowMinimumIsInadmissible) {
    SweepConfig cfg;
    cfg.base   = {4.0, 0.3, 0.0, 0.0};
    cfg.gaps   = {0.01};
    cfg.trials = 2;
    const auto rows = sweep(cfg);
    EXPECT_FALSE(rows[0].admissible);
    EXPECT_EQ(rows[0].note, "K below 3 tau");
    EXPECT_EQ(rows[0].trials, 0);
}

TEST(Qpe, MeasureRejectsBadInput) {
    QpeConfig cfg;
    cfg.eigenvalues = {0.1, 0.2};
    cfg.amplitudes  = {0.7, 0.7};
    EXPECT_THROW((void)qpe_measure(cfg), std::invalid_argument);
    cfg.amplitudes = {std::sqrt(0.5), std::sqrt(0.5)};
    EXPECT_NO_THROW((void)qpe_measure(cfg));
    cfg.eigenvalues = {0.1, 0.5};
    EXPECT_THROW((void)qpe_measure(cfg), std::invalid_argument);
    cfg.eigenvalues = {0.1};
    EXPECT_THROW((void)qpe_measure(cfg), std::invalid_argument);
}

TEST(Qpe, DefaultBudgetMeetsEpsMaxAndLocalizes) {
    QpeConfig cfg;
    cfg.eigenvalues       = {0.12, -0.3};
    cfg.amplitudes        = {std::sqrt(0.45), std::sqrt(0.45)};
    cfg.residue_amplitude = std::sqrt(0.1);
    cfg.K                 = 16;
    cfg.seed              = 4;
    const auto rep        = qpe_scenario(cfg);
    const auto& v         = rep.verification;
    EXPECT_NEAR(v.params.beta, 0.45, 1e-12);
    EXPECT_NEAR(v.params.omega, 0.1, 1e-12);
    EXPECT_EQ(rep.shots, shots_budget(16, v.derived.eps_max, 0.01));
    EXPECT_LE(rep.eps_hat, v.derived.eps_max);
    EXPECT_TRUE(v.eps_in_regime);
    EXPECT_TRUE(v.measure_valid);
    EXPECT_TRUE(rep.conditional_pass());
    EXPECT_EQ(v.noise_kind, "shots");
}

TEST(Qpe, BoxResidueAndExplicitShots) {
    QpeConfig cfg;
    cfg.eigenvalues       = {0.2};
    cfg.amplitudes        = {std::sqrt(0.9)};
    cfg.residue_amplitude = std::sqrt(0.1);
    cfg.residue_model     = ResidueKind::Box;
    cfg.shots             = 500;
    const auto m          = qpe_measure(cfg);
    EXPECT_EQ(residue_kind(m.residue), ResidueKind::Box);
    const auto rep = qpe_scenario(cfg);
    EXPECT_EQ(rep.shots, 500u);
    EXPECT_DOUBLE_EQ(rep.eps_hat, shots_radius(12, 500, 0.01));
}
