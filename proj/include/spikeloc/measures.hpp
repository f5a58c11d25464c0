#ifndef SPIKELOC_MEASURES_HPP
#define SPIKELOC_MEASURES_HPP

// Ground-truth probability measures: a nonempty set of dominant spikes plus a
// residue with closed-form Fourier data, so that the observed spectrum can be
// generated exactly.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "spikeloc/kernels.hpp"
#include "spikeloc/params.hpp"
#include "spikeloc/rng.hpp"
#include "spikeloc/supportgeom.hpp"

namespace spikeloc {

using complex = std::complex<double>;

struct Spike {
    double location = 0.0;
    double weight   = 0.0;
    friend bool operator==(const Spike&, const Spike&) = default;
};

struct NoResidue {
    friend bool operator==(const NoResidue&, const NoResidue&) = default;
};

/// Residue made of small spikes, each below the dominant-weight floor.
struct SpikeCluster {
    std::vector<Spike> spikes;
    friend bool operator==(const SpikeCluster&, const SpikeCluster&) = default;
};

/// Uniform density of total `mass` on [center - width/2, center + width/2].
struct UniformBox {
    double center = 0.0;
    double width  = 0.0;
    double mass   = 0.0;
    friend bool operator==(const UniformBox&, const UniformBox&) = default;
};

using ResidueModel = std::variant<NoResidue, SpikeCluster, UniformBox>;

enum class ResidueKind { None, Cluster, Box };

[[nodiscard]] inline ResidueKind residue_kind(const ResidueModel& r) { return static_cast<ResidueKind>(r.index()); }

[[nodiscard]] inline double residue_mass(const ResidueModel& r) {
    struct Visitor {
        double operator()(const NoResidue&) const { return 0.0; }
        double operator()(const SpikeCluster& c) const {
            double m = 0.0;
            for (const auto& s : c.spikes) m += s.weight;
            return m;
        }
        double operator()(const UniformBox& b) const { return b.mass; }
    };
    return std::visit(Visitor{}, r);
}

struct SpikeMeasure {
    std::vector<Spike> spikes; ///< dominant spikes
    ResidueModel residue = NoResidue{};

    [[nodiscard]] double dominant_mass() const {
        double m = 0.0;
        for (const auto& s : spikes) m += s.weight;
        return m;
    }
    [[nodiscard]] double total_mass() const { return dominant_mass() + residue_mass(residue); }

    [[nodiscard]] PointSet support(Setting domain) const {
        std::vector<double> xs;
        xs.reserve(spikes.size());
        for (const auto& s : spikes) xs.push_back(s.location);
        return PointSet(domain, std::move(xs));
    }

    /// Translate every component by delta (wrapped on the circle).
    [[nodiscard]] SpikeMeasure shifted(double delta, Setting domain) const;

    friend bool operator==(const SpikeMeasure&, const SpikeMeasure&) = default;
};

// ---------------------------------------------------------------------------
// validation

enum class Violation {
    EmptyDominantSet,
    NonPositiveWeight,
    WeightBelowBeta,
    ClusterWeightNotBelowBeta,
    InvalidBox,
    ResidueMassAboveOmega,
    NotUnitMass,
    LocationOutOfDomain,
};

[[nodiscard]] inline const char* to_string(Violation v) {
    switch (v) {
    case Violation::EmptyDominantSet: return "empty-dominant-set";
    case Violation::NonPositiveWeight: return "non-positive-weight";
    case Violation::WeightBelowBeta: return "weight-below-beta";
    case Violation::ClusterWeightNotBelowBeta: return "cluster-weight-not-below-beta";
    case Violation::InvalidBox: return "invalid-box";
    case Violation::ResidueMassAboveOmega: return "residue-mass-above-omega";
    case Violation::NotUnitMass: return "not-unit-mass";
    case Violation::LocationOutOfDomain: return "location-out-of-domain";
    }
    return "unknown";
}

struct ValidationResult {
    std::vector<Violation> violations;
    std::vector<std::string> messages;

    [[nodiscard]] bool ok() const { return violations.empty(); }
    [[nodiscard]] bool has(Violation v) const { return std::find(violations.begin(), violations.end(), v) != violations.end(); }

    void add(Violation v, std::string msg) {
        violations.push_back(v);
        messages.push_back(std::move(msg));
    }
};

inline constexpr double kUnitMassTolerance = 1e-12;

/// Checks the structural conditions on a measure; never throws.
[[nodiscard]] inline ValidationResult validate(const SpikeMeasure& m, const ProblemParams& p, Setting domain) {
    ValidationResult r;
    const auto in_domain = [&](double x) { return std::isfinite(x) && (domain == Setting::RealLine || (x >= -0.5 && x < 0.5)); };

    if (m.spikes.empty()) r.add(Violation::EmptyDominantSet, "at least one dominant spike is required");
    for (const auto& s : m.spikes) {
        if (!(s.weight > 0.0)) {
            r.add(Violation::NonPositiveWeight, "dominant spike at " + std::to_string(s.location) + " has non-positive weight");
        } else if (s.weight < p.beta - kUnitMassTolerance) {
            r.add(Violation::WeightBelowBeta, "dominant spike at " + std::to_string(s.location) + " has weight " + std::to_string(s.weight) + " < beta");
        }
        if (!in_domain(s.location)) r.add(Violation::LocationOutOfDomain, "spike location " + std::to_string(s.location) + " outside [-1/2, 1/2)");
    }
    if (const auto* c = std::get_if<SpikeCluster>(&m.residue)) {
        for (const auto& s : c->spikes) {
            if (!(s.weight > 0.0)) r.add(Violation::NonPositiveWeight, "residue spike has non-positive weight");
            if (s.weight >= p.beta) r.add(Violation::ClusterWeightNotBelowBeta, "residue spike weight " + std::to_string(s.weight) + " >= beta");
            if (!in_domain(s.location)) r.add(Violation::LocationOutOfDomain, "residue spike location " + std::to_string(s.location) + " outside [-1/2, 1/2)");
        }
    } else if (const auto* b = std::get_if<UniformBox>(&m.residue)) {
        if (!(b->width > 0.0) || !(b->mass > 0.0) || (domain == Setting::Periodic && b->width > 1.0)) {
            r.add(Violation::InvalidBox, "box residue needs positive width (at most 1 on the circle) and positive mass");
        }
        if (!in_domain(b->center)) r.add(Violation::LocationOutOfDomain, "box center outside [-1/2, 1/2)");
    }
    const double rm = residue_mass(m.residue);
    if (rm > p.omega + kUnitMassTolerance) r.add(Violation::ResidueMassAboveOmega, "residue mass " + std::to_string(rm) + " exceeds omega " + std::to_string(p.omega));
    if (std::fabs(m.total_mass() - 1.0) > kUnitMassTolerance) r.add(Violation::NotUnitMass, "total mass " + std::to_string(m.total_mass()) + " differs from 1");
    return r;
}

// ---------------------------------------------------------------------------
// Fourier data

/// sin(t)/t with sinc(0) = 1.
[[nodiscard]] inline double sinc(double t) { return t == 0.0 ? 1.0 : std::sin(t) / t; }

namespace detail {

[[nodiscard]] inline complex dirac_transform(double x, double k) {
    const double a = 2.0 * std::numbers::pi * k * x;
    return {std::cos(a), -std::sin(a)};
}

} // namespace detail

/// f^(k) = integral exp(-2 pi i k x) df(x), exact for both residue models.
[[nodiscard]] inline complex fourier_transform(const SpikeMeasure& m, double k) {
    complex sum{0.0, 0.0};
    for (const auto& s : m.spikes) sum += s.weight * detail::dirac_transform(s.location, k);
    if (const auto* c = std::get_if<SpikeCluster>(&m.residue)) {
        for (const auto& s : c->spikes) sum += s.weight * detail::dirac_transform(s.location, k);
    } else if (const auto* b = std::get_if<UniformBox>(&m.residue)) {
        sum += b->mass * sinc(std::numbers::pi * k * b->width) * detail::dirac_transform(b->center, k);
    }
    return sum;
}

/// Fourier series coefficient on the circle.
[[nodiscard]] inline complex fourier_periodic(const SpikeMeasure& m, int k) { return fourier_transform(m, static_cast<double>(k)); }

/// Fourier transform on the line.
[[nodiscard]] inline complex fourier_real(const SpikeMeasure& m, double k) { return fourier_transform(m, k); }

/// Closed form of the smoothed measure (phi * f)(x) on the line, or
/// (phi_p * f)(x) on the circle.
[[nodiscard]] inline double smoothed_measure(const SpikeMeasure& m, const KernelParams& kp, double x, Setting domain) {
    const auto kernel = [&](double u) { return domain == Setting::Periodic ? periodic_gaussian(kp, u) : gaussian(kp, u); };
    double sum = 0.0;
    for (const auto& s : m.spikes) sum += s.weight * kernel(x - s.location);
    if (const auto* c = std::get_if<SpikeCluster>(&m.residue)) {
        for (const auto& s : c->spikes) sum += s.weight * kernel(x - s.location);
    } else if (const auto* b = std::get_if<UniformBox>(&m.residue)) {
        double d = x - b->center;
        if (domain == Setting::Periodic) d = wrap_unit(d);
        const double a  = d - 0.5 * b->width;
        const double bb = d + 0.5 * b->width;
        const double mass = domain == Setting::Periodic ? periodic_gaussian_integral(kp, a, bb) : gaussian_integral(kp, a, bb);
        sum += b->mass / b->width * mass;
    }
    return sum;
}

inline SpikeMeasure SpikeMeasure::shifted(double delta, Setting domain) const {
    const auto move = [&](double x) { return domain == Setting::Periodic ? wrap_unit(x + delta) : x + delta; };
    SpikeMeasure out = *this;
    for (auto& s : out.spikes) s.location = move(s.location);
    if (auto* c = std::get_if<SpikeCluster>(&out.residue)) {
        for (auto& s : c->spikes) s.location = move(s.location);
    } else if (auto* b = std::get_if<UniformBox>(&out.residue)) {
        b->center = move(b->center);
    }
    return out;
}

// ---------------------------------------------------------------------------
// random instances

struct InstanceSpec {
    int S                    = 1;
    ResidueKind residue      = ResidueKind::None;
    Setting setting          = Setting::Periodic;
    double cluster_width     = 0.0; ///< > 0 draws all dominant spikes inside one window of this width
    double place_lo          = -0.8; ///< real-line placement range
    double place_hi          = 0.8;
    int residue_count        = 3; ///< spikes in a SpikeCluster residue
    double box_width_min     = 0.01;
    double box_width_max     = 0.2;
};

/// Thrown for instance specs that admit no valid measure.
class InfeasibleInstance : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Draws a measure that passes validate(., p, spec.setting). Dominant weights
/// are beta plus a Dirichlet share of the slack 1 - S beta - residue mass, so
/// the unit-mass, weight-floor and residue-cap conditions hold by construction.
[[nodiscard]] inline SpikeMeasure random_instance(const ProblemParams& p, const InstanceSpec& spec, std::uint64_t seed) {
    if (spec.S < 1) throw InfeasibleInstance("S must be at least 1");
    if (!(p.beta > 0.0) || !(p.omega >= 0.0) || !(p.omega < p.beta)) throw InfeasibleInstance("requires 0 <= omega < beta");
    const double floor_mass = spec.S * p.beta;
    if (floor_mass > 1.0 + 1e-12) throw InfeasibleInstance("S * beta = " + std::to_string(floor_mass) + " exceeds the unit total mass");
    if (spec.setting == Setting::RealLine && !(spec.place_lo < spec.place_hi)) throw InfeasibleInstance("empty placement range");

    SplitMix64 rng(substream_seed(seed, 0x1257a0ceULL, 0));
    const bool periodic  = spec.setting == Setting::Periodic;
    const auto draw_location = [&] { return periodic ? rng.uniform(-0.5, 0.5) : rng.uniform(spec.place_lo, spec.place_hi); };

    const double slack = std::max(0.0, 1.0 - floor_mass);
    double r_mass      = 0.0;
    ResidueKind kind   = spec.residue;
    if (kind != ResidueKind::None) {
        const double cap = std::min(p.omega, slack);
        if (cap > 0.0) {
            r_mass = cap * rng.uniform(0.25, 1.0);
        } else {
            kind = ResidueKind::None;
        }
    }

    SpikeMeasure m;
    const double share = std::max(0.0, (1.0 - r_mass) - floor_mass);
    std::vector<double> e(static_cast<std::size_t>(spec.S));
    double esum = 0.0;
    for (auto& v : e) {
        v = -std::log1p(-rng.uniform());
        esum += v;
    }
    double center = draw_location();
    double assigned = 0.0;
    for (int s = 0; s < spec.S; ++s) {
        double w;
        if (s + 1 == spec.S) {
            w = std::max(p.beta, (1.0 - r_mass) - assigned);
        } else {
            w = p.beta + share * (esum > 0.0 ? e[static_cast<std::size_t>(s)] / esum : 1.0 / spec.S);
        }
        assigned += w;
        double x;
        if (spec.cluster_width > 0.0) {
            x = center + rng.uniform(-0.5, 0.5) * spec.cluster_width;
            if (periodic) x = wrap_unit(x);
            else x = std::clamp(x, spec.place_lo, spec.place_hi);
        } else {
            x = draw_location();
        }
        m.spikes.push_back({x, w});
    }

    if (kind == ResidueKind::Cluster) {
        SpikeCluster c;
        const int n = std::max(1, spec.residue_count);
        for (int i = 0; i < n; ++i) c.spikes.push_back({draw_location(), r_mass / n});
        m.residue = std::move(c);
    } else if (kind == ResidueKind::Box) {
        UniformBox b;
        b.center = draw_location();
        b.width  = rng.uniform(spec.box_width_min, spec.box_width_max);
        if (periodic) b.width = std::min(b.width, 1.0);
        b.mass    = r_mass;
        m.residue = b;
    }
    return m;
}

} // namespace spikeloc

#endif
