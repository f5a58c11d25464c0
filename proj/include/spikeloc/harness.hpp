#ifndef SPIKELOC_HARNESS_HPP
#define SPIKELOC_HARNESS_HPP

// Verification experiments: single runs scored against the localization
// guarantee, parameter sweeps over beta - omega, and the phase-estimation
// scenario with Hadamard-test shot noise.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "spikeloc/acquisition.hpp"
#include "spikeloc/localizer.hpp"
#include "spikeloc/measures.hpp"
#include "spikeloc/params.hpp"
#include "spikeloc/rng.hpp"
#include "spikeloc/supportgeom.hpp"

namespace spikeloc {

struct VerifyOptions {
    double grid_density = kDefaultGridDensity; ///< periodic trace points per frequency
    double real_density = kDefaultRealDensity; ///< real-line trace points per kernel width
    Window window{};
    std::optional<double> h; ///< real-line signal spacing; default_spacing() when unset
    std::uint64_t seed = 0;  ///< recorded in the report
};

struct VerificationReport {
    // instance
    Setting setting = Setting::Periodic;
    ProblemParams params{};
    DerivedParams derived{};
    std::size_t num_spikes = 0;
    ResidueKind residue    = ResidueKind::None;
    double residue_mass    = 0.0;
    std::string noise_kind;
    double noise_target = 0.0;
    std::uint64_t seed  = 0;

    // premises
    double eps_used        = 0.0; ///< nominal noise bound (eps_hat for shots)
    double realized_noise  = 0.0; ///< max_k |y(k) - f^(k)|
    bool measure_valid     = true;
    bool eps_in_regime     = true;
    bool k_in_regime       = true;
    bool premises_violated = false;
    std::vector<std::string> premise_messages;
    bool noise_bound_held = true; ///< realized_noise <= eps_used

    // outcome
    IntervalSet support;
    bool empty_estimate       = false;
    bool contained            = false;
    double max_dev_e_to_star  = 0.0;
    double max_dev_star_to_e  = 0.0;
    double bound              = 0.0; ///< tau / K
    double margin_step1       = 0.0; ///< min over spikes of indicator - threshold
    double margin_step2       = 0.0; ///< bound - max_dev_e_to_star
    bool pass                 = false;
    std::vector<std::string> warnings;

    double elapsed_ms = 0.0;
};

[[nodiscard]] inline std::string noise_kind_name(const NoiseSpec& n) {
    switch (n.index()) {
    case 0: return "none";
    case 1: return "uniform_disk";
    case 2: return "boost";
    case 3: return "suppress";
    default: return "shots";
    }
}

namespace detail {

[[nodiscard]] inline double noise_target(const NoiseSpec& n) {
    if (const auto* b = std::get_if<WorstCaseBoost>(&n)) return b->target;
    if (const auto* s = std::get_if<WorstCaseSuppress>(&n)) return s->target;
    return 0.0;
}

template<typename Signal, typename Indicator>
void score(VerificationReport& r, const SpikeMeasure& m, const Signal& clean, const Signal& noisy, const Indicator& ind, const LocalizationResult& loc) {
    r.realized_noise   = max_deviation(clean, noisy);
    // |y| <= 1 + eps, so forming y - f^ can add a few ulps to noise that is exactly eps by construction
    r.noise_bound_held = r.realized_noise <= r.eps_used + 8.0 * std::numeric_limits<double>::epsilon() * (1.0 + r.eps_used);
    r.support          = loc.support;
    r.warnings         = loc.warnings;
    r.bound            = r.derived.radius();
    const PointSet truth = m.support(r.setting);
    r.contained          = contains(truth, loc.support);
    const auto e_to_star = max_dev_set_to_points(loc.support, truth);
    r.empty_estimate     = e_to_star.vacuous;
    r.max_dev_e_to_star  = e_to_star.value;
    r.max_dev_star_to_e  = max_dev_points_to_set(truth, loc.support).value;
    double m1            = std::numeric_limits<double>::infinity();
    for (const auto& s : m.spikes) m1 = std::min(m1, ind(s.location) - r.derived.threshold);
    r.margin_step1 = m1;
    r.margin_step2 = r.bound - r.max_dev_e_to_star;
    r.pass         = r.contained && r.max_dev_e_to_star <= r.bound;
}

} // namespace detail

/// Runs the full pipeline on one instance and scores it. Out-of-regime inputs
/// (invalid measure, eps > eps_max, K < 3 tau) still run and are flagged.
[[nodiscard]] inline VerificationReport verify_once(const ProblemParams& p, const SpikeMeasure& m, const NoiseSpec& noise, Setting setting,
                                                    const VerifyOptions& opt = {}) {
    if (m.spikes.empty()) throw std::invalid_argument("measure has no dominant spikes");
    const auto t0 = std::chrono::steady_clock::now();
    VerificationReport r;
    r.setting      = setting;
    r.params       = p;
    r.num_spikes   = m.spikes.size();
    r.residue      = residue_kind(m.residue);
    r.residue_mass = residue_mass(m.residue);
    r.noise_kind   = noise_kind_name(noise);
    r.noise_target = detail::noise_target(noise);
    r.seed         = opt.seed;

    const auto validation = validate(m, p, setting);
    r.measure_valid       = validation.ok();
    r.premise_messages    = validation.messages;

    r.derived = setting == Setting::Periodic ? derive_periodic_unchecked(p) : derive_real(p);
    if (setting == Setting::Periodic && p.K < r.derived.k_min) {
        r.k_in_regime = false;
        r.premise_messages.push_back("K below 3 tau");
    }
    if (const auto* sh = std::get_if<Shots>(&noise)) {
        if (setting != Setting::Periodic) throw std::invalid_argument("shot noise is defined for the periodic setting only");
        r.eps_used = shots_radius(static_cast<int>(p.K), sh->N, sh->delta);
    } else {
        r.eps_used = noise_eps(noise);
    }
    r.eps_in_regime = r.eps_used <= r.derived.eps_max;
    if (!r.eps_in_regime) r.premise_messages.push_back("noise level exceeds eps_max");
    r.premises_violated = !(r.measure_valid && r.eps_in_regime && r.k_in_regime);

    const KernelParams kp = r.derived.kernel();
    if (setting == Setting::Periodic) {
        const auto clean = sample_periodic(m, static_cast<int>(p.K));
        const auto noisy = add_noise(clean, noise, kp);
        const auto loc   = localize_periodic(noisy, r.derived, opt.grid_density);
        detail::score(r, m, clean, noisy, PeriodicIndicator(noisy, r.derived), loc);
    } else {
        const double x_max = std::max(std::fabs(opt.window.lo), std::fabs(opt.window.hi));
        const auto clean   = sample_real(m, p.K, opt.h.value_or(default_spacing(p.K, x_max)));
        const auto noisy   = add_noise(clean, noise, kp);
        const auto loc     = localize_real(noisy, r.derived, opt.window, opt.real_density);
        detail::score(r, m, clean, noisy, RealIndicator(noisy, r.derived), loc);
    }
    r.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

// ---------------------------------------------------------------------------
// adversarial noise placement

enum class AdversaryMode { Boost, Suppress };

/// Worst-case noise aimed at the guarantee: Suppress sits on a dominant spike
/// (attacks containment), Boost sits just outside the tau/K neighbourhood of a
/// spike (attacks localization).
[[nodiscard]] inline NoiseSpec adversarial_noise(const SpikeMeasure& m, const DerivedParams& dp, AdversaryMode mode, double eps, std::uint64_t seed,
                                                 Window window = {}) {
    SplitMix64 rng(substream_seed(seed, 0xadd5, 0));
    const auto idx  = static_cast<std::size_t>(rng() % m.spikes.size());
    const double x0 = m.spikes[idx].location;
    if (mode == AdversaryMode::Suppress) return WorstCaseSuppress{eps, x0};
    const double side = (rng() & 1U) ? 1.0 : -1.0;
    double target     = x0 + side * 1.05 * dp.radius();
    if (dp.setting == Setting::Periodic) {
        target = wrap_unit(target);
    } else {
        target = std::clamp(target, window.lo, window.hi);
    }
    return WorstCaseBoost{eps, target};
}

// ---------------------------------------------------------------------------
// sweeps

struct SweepConfig {
    ProblemParams base{};
    Setting setting = Setting::Periodic;
    std::vector<double> gaps;
    int trials = 20;
    std::uint64_t seed = 0;
    InstanceSpec instance{};
    VerifyOptions options{};
};

struct SweepRow {
    double gap = 0.0, beta = 0.0, omega = 0.0, K = 0.0, tau = 0.0, k_min = 0.0, eps = 0.0;
    bool admissible = false;
    std::string note;
    int trials = 0, passes = 0;
    double pass_rate = 0.0;
    double mean_dev_units = 0.0; ///< max_dev_e_to_star in units of tau/K
    double max_dev_units  = 0.0;
    double mean_margin_step1 = 0.0;
    double mean_margin_step2 = 0.0;
};

/// For each gap: beta = max(base.beta, gap), omega = beta - gap, eps = eps_max,
/// noise alternating worst-case suppress/boost. Rows whose constants are not
/// admissible (beta > 1, K < 3 tau, S beta > 1) are flagged and skipped.
[[nodiscard]] inline std::vector<SweepRow> sweep(const SweepConfig& cfg) {
    std::vector<SweepRow> rows;
    for (std::size_t g = 0; g < cfg.gaps.size(); ++g) {
        SweepRow row;
        row.gap   = cfg.gaps[g];
        row.beta  = std::max(cfg.base.beta, row.gap);
        row.omega = row.beta - row.gap;
        row.K     = cfg.base.K;
        ProblemParams p{cfg.base.K, row.beta, row.omega, 0.0};
        try {
            const DerivedParams dp = cfg.setting == Setting::Periodic ? derive_periodic_unchecked(p) : derive_real(p);
            row.tau   = dp.tau;
            row.k_min = dp.k_min;
            row.eps   = dp.eps_max;
            row.admissible = true;
            if (cfg.setting == Setting::Periodic && p.K < dp.k_min) {
                row.admissible = false;
                row.note       = "K below 3 tau";
            }
            if (row.admissible && cfg.instance.S * row.beta > 1.0 + 1e-12) {
                row.admissible = false;
                row.note       = "S beta exceeds 1";
            }
        } catch (const ParameterError& e) {
            row.note = e.what();
        }
        if (row.admissible) {
            p.eps            = row.eps;
            const auto dp    = derive(p, cfg.setting);
            InstanceSpec ispec = cfg.instance;
            ispec.setting      = cfg.setting;
            double dev_sum = 0.0, m1_sum = 0.0, m2_sum = 0.0;
            for (int t = 0; t < cfg.trials; ++t) {
                const std::uint64_t s = substream_seed(cfg.seed, g, t);
                const auto m          = random_instance(p, ispec, s);
                const auto mode       = t % 2 == 0 ? AdversaryMode::Suppress : AdversaryMode::Boost;
                const auto noise      = adversarial_noise(m, dp, mode, row.eps, s, cfg.options.window);
                VerifyOptions opt     = cfg.options;
                opt.seed              = s;
                const auto rep        = verify_once(p, m, noise, cfg.setting, opt);
                ++row.trials;
                row.passes += rep.pass ? 1 : 0;
                const double units = rep.max_dev_e_to_star / rep.bound;
                dev_sum += units;
                row.max_dev_units = std::max(row.max_dev_units, units);
                m1_sum += rep.margin_step1;
                m2_sum += rep.margin_step2;
            }
            if (row.trials > 0) {
                row.pass_rate         = static_cast<double>(row.passes) / row.trials;
                row.mean_dev_units    = dev_sum / row.trials;
                row.mean_margin_step1 = m1_sum / row.trials;
                row.mean_margin_step2 = m2_sum / row.trials;
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

// ---------------------------------------------------------------------------
// phase estimation

struct QpeConfig {
    std::vector<double> eigenvalues;
    std::vector<double> amplitudes;
    double residue_amplitude = 0.0;
    ResidueKind residue_model = ResidueKind::Cluster;
    int residue_count        = 4;
    double box_width         = 0.1;
    int K                    = 12;
    std::optional<std::uint64_t> shots;
    std::optional<double> eps_target; ///< defaults to eps_max when shots is unset
    double delta = 0.01;
    std::uint64_t seed = 0;
    std::optional<double> beta;  ///< defaults to min |c_s|^2
    std::optional<double> omega; ///< defaults to |c_res|^2
    double grid_density = kDefaultGridDensity;
};

struct QpeReport {
    VerificationReport verification;
    std::vector<double> eigenvalues;
    std::uint64_t shots = 0;
    double eps_hat      = 0.0;
    double delta        = 0.0;
    /// localization held given that the realized noise stayed within eps_hat
    [[nodiscard]] bool conditional_pass() const { return !verification.noise_bound_held || verification.pass; }
};

/// Builds f = sum |c_s|^2 delta_{lambda_s} + residue of mass |c_res|^2,
/// acquires Hadamard-test data and localizes the eigenvalues.
[[nodiscard]] inline SpikeMeasure qpe_measure(const QpeConfig& cfg) {
    if (cfg.eigenvalues.empty() || cfg.eigenvalues.size() != cfg.amplitudes.size()) {
        throw std::invalid_argument("eigenvalues and amplitudes must be nonempty and of equal length");
    }
    double norm = cfg.residue_amplitude * cfg.residue_amplitude;
    for (double a : cfg.amplitudes) norm += a * a;
    if (std::fabs(norm - 1.0) > 1e-12) throw std::invalid_argument("amplitudes are not normalized: sum |c|^2 = " + std::to_string(norm));
    SpikeMeasure m;
    for (std::size_t i = 0; i < cfg.eigenvalues.size(); ++i) {
        const double lambda = cfg.eigenvalues[i];
        if (!(lambda >= -0.5 && lambda < 0.5)) throw std::invalid_argument("eigenvalues must lie in [-1/2, 1/2)");
        m.spikes.push_back({lambda, cfg.amplitudes[i] * cfg.amplitudes[i]});
    }
    const double r_mass = cfg.residue_amplitude * cfg.residue_amplitude;
    if (r_mass > 0.0) {
        SplitMix64 rng(substream_seed(cfg.seed, 0x9e5, 0));
        if (cfg.residue_model == ResidueKind::Box) {
            m.residue = UniformBox{rng.uniform(-0.5, 0.5), cfg.box_width, r_mass};
        } else {
            SpikeCluster c;
            const int n = std::max(1, cfg.residue_count);
            for (int i = 0; i < n; ++i) c.spikes.push_back({rng.uniform(-0.5, 0.5), r_mass / n});
            m.residue = std::move(c);
        }
    }
    return m;
}

[[nodiscard]] inline QpeReport qpe_scenario(const QpeConfig& cfg) {
    const SpikeMeasure m = qpe_measure(cfg);
    double wmin          = std::numeric_limits<double>::infinity();
    for (const auto& s : m.spikes) wmin = std::min(wmin, s.weight);
    ProblemParams p;
    p.K     = cfg.K;
    p.beta  = cfg.beta.value_or(wmin);
    p.omega = cfg.omega.value_or(residue_mass(m.residue));
    const DerivedParams dp = derive_periodic_unchecked(p);

    QpeReport out;
    out.eigenvalues = cfg.eigenvalues;
    out.delta       = cfg.delta;
    out.shots       = cfg.shots.value_or(0);
    if (!cfg.shots) out.shots = shots_budget(cfg.K, cfg.eps_target.value_or(dp.eps_max), cfg.delta);
    out.eps_hat = shots_radius(cfg.K, out.shots, cfg.delta);
    p.eps       = out.eps_hat;

    VerifyOptions opt;
    opt.grid_density = cfg.grid_density;
    opt.seed         = cfg.seed;
    out.verification = verify_once(p, m, Shots{out.shots, cfg.seed, cfg.delta}, Setting::Periodic, opt);
    return out;
}

} // namespace spikeloc

#endif
