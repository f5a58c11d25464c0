#ifndef SPIKELOC_CONFIG_HPP
#define SPIKELOC_CONFIG_HPP

// Run configuration: one JSON document per run, validated against a fixed
// schema before any computation. Unknown keys are errors.
//
//   {
//     "setting": "periodic" | "real",
//     "K": 12, "beta": 0.5, "omega": 0.1, "eps": 0.0,
//     "seed": 1,
//     "instance": {"S": 2, "residue": "none"|"cluster"|"box", "cluster_width": 0,
//                  "residue_count": 3, "place": [-0.8, 0.8], "box_width": [0.01, 0.2]},
//     "measure": {...} | "measure_file": "path.json",
//     "signal_file": "path.csv",
//     "noise": {"kind": "none"|"uniform_disk"|"boost"|"suppress"|"shots",
//               "eps": 0.1, "target": 0.25, "seed": 3, "shots": 1000, "delta": 0.01},
//     "grid_density": 64, "real_density": 32, "window": [-1, 1], "h": 0.01,
//     "sweep": {"gaps": [0.1, 0.2], "trials": 20},
//     "qpe": {"eigenvalues": [...], "amplitudes": [...], "residue_amplitude": 0.3,
//             "residue_model": "cluster"|"box", "residue_count": 4, "box_width": 0.1,
//             "shots": 10000, "eps_target": 0.1, "delta": 0.01}
//   }

#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "json.hpp"

#include "spikeloc/acquisition.hpp"
#include "spikeloc/harness.hpp"
#include "spikeloc/io.hpp"
#include "spikeloc/measures.hpp"
#include "spikeloc/params.hpp"

namespace spikeloc::config {

using json = nlohmann::json;

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class NoiseKind { None, UniformDisk, Boost, Suppress, Shots };

struct NoiseConfig {
    NoiseKind kind = NoiseKind::None;
    std::optional<double> eps;    ///< falls back to the top-level eps
    std::optional<double> target; ///< worst-case modes pick an adversarial target when unset
    std::optional<std::uint64_t> seed;
    std::uint64_t shots = 1000;
    double delta        = 0.01;
};

struct SweepSection {
    std::vector<double> gaps;
    int trials = 20;
};

struct RunConfig {
    Setting setting = Setting::Periodic;
    ProblemParams params{12.0, 0.5, 0.1, 0.0};
    std::uint64_t seed = 0;
    InstanceSpec instance{};
    std::optional<SpikeMeasure> measure;
    std::optional<std::string> signal_file;
    NoiseConfig noise{};
    double grid_density = kDefaultGridDensity;
    double real_density = kDefaultRealDensity;
    Window window{};
    std::optional<double> h;
    SweepSection sweep{};
    std::optional<QpeConfig> qpe;
};

namespace detail {

inline void only_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
    for (const auto& [key, _] : j.items()) {
        if (!allowed.contains(key)) throw ConfigError("unknown key '" + key + "' in " + where);
    }
}

template<typename T>
T get(const json& j, const char* key, const std::string& where) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError("bad value for '" + std::string(key) + "' in " + where + ": " + e.what());
    }
}

inline std::pair<double, double> get_pair(const json& j, const char* key, const std::string& where) {
    const auto v = get<std::vector<double>>(j, key, where);
    if (v.size() != 2 || !(v[0] < v[1])) throw ConfigError("'" + std::string(key) + "' in " + where + " must be [lo, hi] with lo < hi");
    return {v[0], v[1]};
}

inline ResidueKind residue_kind_from(const std::string& s, const std::string& where) {
    if (s == "none") return ResidueKind::None;
    if (s == "cluster") return ResidueKind::Cluster;
    if (s == "box") return ResidueKind::Box;
    throw ConfigError("unknown residue kind '" + s + "' in " + where);
}

inline NoiseKind noise_kind_from(const std::string& s) {
    if (s == "none") return NoiseKind::None;
    if (s == "uniform_disk") return NoiseKind::UniformDisk;
    if (s == "boost") return NoiseKind::Boost;
    if (s == "suppress") return NoiseKind::Suppress;
    if (s == "shots") return NoiseKind::Shots;
    throw ConfigError("unknown noise kind '" + s + "'");
}

} // namespace detail

/// Applies "a.b.c=value"; value is parsed as JSON, or taken as a string if that fails.
inline void apply_override(json& doc, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "' must look like key=value");
    const std::string path = assignment.substr(0, eq);
    const std::string raw  = assignment.substr(eq + 1);
    json value;
    try {
        value = json::parse(raw);
    } catch (const json::parse_error&) {
        value = raw;
    }
    json* node        = &doc;
    std::size_t start = 0;
    while (true) {
        const auto dot         = path.find('.', start);
        const std::string part = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (part.empty()) throw ConfigError("empty key segment in override '" + assignment + "'");
        if (!node->is_object()) {
            if (!node->is_null()) throw ConfigError("override '" + assignment + "' descends into a non-object");
            *node = json::object();
        }
        if (dot == std::string::npos) {
            (*node)[part] = value;
            return;
        }
        node  = &(*node)[part];
        start = dot + 1;
    }
}

[[nodiscard]] inline RunConfig parse(const json& j) {
    using detail::get;
    detail::only_keys(j,
                      {"setting", "K", "beta", "omega", "eps", "seed", "instance", "measure", "measure_file", "signal_file", "noise", "grid_density",
                       "real_density", "window", "h", "sweep", "qpe"},
                      "config");
    RunConfig c;
    try {
        if (j.contains("setting")) c.setting = setting_from_string(get<std::string>(j, "setting", "config"));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (j.contains("K")) c.params.K = get<double>(j, "K", "config");
    if (j.contains("beta")) c.params.beta = get<double>(j, "beta", "config");
    if (j.contains("omega")) c.params.omega = get<double>(j, "omega", "config");
    if (j.contains("eps")) c.params.eps = get<double>(j, "eps", "config");
    if (j.contains("seed")) c.seed = get<std::uint64_t>(j, "seed", "config");
    if (j.contains("grid_density")) c.grid_density = get<double>(j, "grid_density", "config");
    if (j.contains("real_density")) c.real_density = get<double>(j, "real_density", "config");
    if (j.contains("h")) c.h = get<double>(j, "h", "config");
    if (j.contains("window")) {
        const auto [lo, hi] = detail::get_pair(j, "window", "config");
        c.window            = {lo, hi};
    }
    if (c.setting == Setting::Periodic && c.params.K != std::floor(c.params.K)) throw ConfigError("periodic setting requires an integer K");
    if (!(c.grid_density > 0.0) || !(c.real_density > 0.0)) throw ConfigError("grid densities must be positive");
    if (c.h && !(*c.h > 0.0)) throw ConfigError("h must be positive");

    c.instance.setting = c.setting;
    if (j.contains("instance")) {
        const auto& s = j.at("instance");
        detail::only_keys(s, {"S", "residue", "cluster_width", "residue_count", "place", "box_width"}, "instance");
        if (s.contains("S")) c.instance.S = get<int>(s, "S", "instance");
        if (s.contains("residue")) c.instance.residue = detail::residue_kind_from(get<std::string>(s, "residue", "instance"), "instance");
        if (s.contains("cluster_width")) c.instance.cluster_width = get<double>(s, "cluster_width", "instance");
        if (s.contains("residue_count")) c.instance.residue_count = get<int>(s, "residue_count", "instance");
        if (s.contains("place")) std::tie(c.instance.place_lo, c.instance.place_hi) = detail::get_pair(s, "place", "instance");
        if (s.contains("box_width")) std::tie(c.instance.box_width_min, c.instance.box_width_max) = detail::get_pair(s, "box_width", "instance");
    }
    if (j.contains("measure") && j.contains("measure_file")) throw ConfigError("give either 'measure' or 'measure_file', not both");
    try {
        if (j.contains("measure")) c.measure = io::measure_from_json(j.at("measure"));
        if (j.contains("measure_file")) c.measure = io::measure_from_json(json::parse(io::read_file(get<std::string>(j, "measure_file", "config"))));
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("invalid measure: ") + e.what());
    }
    if (j.contains("signal_file")) c.signal_file = get<std::string>(j, "signal_file", "config");

    if (j.contains("noise")) {
        const auto& n = j.at("noise");
        detail::only_keys(n, {"kind", "eps", "target", "seed", "shots", "delta"}, "noise");
        c.noise.kind = detail::noise_kind_from(get<std::string>(n, "kind", "noise"));
        if (n.contains("eps")) c.noise.eps = get<double>(n, "eps", "noise");
        if (n.contains("target")) c.noise.target = get<double>(n, "target", "noise");
        if (n.contains("seed")) c.noise.seed = get<std::uint64_t>(n, "seed", "noise");
        if (n.contains("shots")) c.noise.shots = get<std::uint64_t>(n, "shots", "noise");
        if (n.contains("delta")) c.noise.delta = get<double>(n, "delta", "noise");
        if (c.noise.shots < 1) throw ConfigError("noise.shots must be at least 1");
        if (!(c.noise.delta > 0.0 && c.noise.delta < 1.0)) throw ConfigError("noise.delta must lie in (0, 1)");
        if (c.noise.eps && !(*c.noise.eps >= 0.0)) throw ConfigError("noise.eps must be nonnegative");
    }

    if (j.contains("sweep")) {
        const auto& s = j.at("sweep");
        detail::only_keys(s, {"gaps", "trials"}, "sweep");
        c.sweep.gaps = get<std::vector<double>>(s, "gaps", "sweep");
        if (s.contains("trials")) c.sweep.trials = get<int>(s, "trials", "sweep");
        if (c.sweep.trials < 1) throw ConfigError("sweep.trials must be at least 1");
    }

    if (j.contains("qpe")) {
        const auto& q = j.at("qpe");
        detail::only_keys(q, {"eigenvalues", "amplitudes", "residue_amplitude", "residue_model", "residue_count", "box_width", "shots", "eps_target", "delta"}, "qpe");
        QpeConfig qc;
        qc.eigenvalues = get<std::vector<double>>(q, "eigenvalues", "qpe");
        qc.amplitudes  = get<std::vector<double>>(q, "amplitudes", "qpe");
        if (q.contains("residue_amplitude")) qc.residue_amplitude = get<double>(q, "residue_amplitude", "qpe");
        if (q.contains("residue_model")) qc.residue_model = detail::residue_kind_from(get<std::string>(q, "residue_model", "qpe"), "qpe");
        if (q.contains("residue_count")) qc.residue_count = get<int>(q, "residue_count", "qpe");
        if (q.contains("box_width")) qc.box_width = get<double>(q, "box_width", "qpe");
        if (q.contains("shots")) qc.shots = get<std::uint64_t>(q, "shots", "qpe");
        if (q.contains("eps_target")) qc.eps_target = get<double>(q, "eps_target", "qpe");
        if (q.contains("delta")) qc.delta = get<double>(q, "delta", "qpe");
        if (qc.residue_model == ResidueKind::None) qc.residue_model = ResidueKind::Cluster;
        qc.K            = static_cast<int>(c.params.K);
        qc.seed         = c.seed;
        qc.grid_density = c.grid_density;
        if (j.contains("beta")) qc.beta = c.params.beta;
        if (j.contains("omega")) qc.omega = c.params.omega;
        c.qpe = std::move(qc);
    }
    return c;
}

/// Noise spec for a concrete measure. Worst-case modes without an explicit
/// target are aimed adversarially (suppress on a spike, boost just outside tau/K).
[[nodiscard]] inline NoiseSpec make_noise(const RunConfig& c, const SpikeMeasure* m, const DerivedParams& dp) {
    const double eps         = c.noise.eps.value_or(c.params.eps);
    const std::uint64_t seed = c.noise.seed.value_or(c.seed);
    switch (c.noise.kind) {
    case NoiseKind::None: return NoNoise{};
    case NoiseKind::UniformDisk: return UniformDisk{eps, seed};
    case NoiseKind::Shots: return Shots{c.noise.shots, seed, c.noise.delta};
    case NoiseKind::Boost:
    case NoiseKind::Suppress: {
        const auto mode = c.noise.kind == NoiseKind::Boost ? AdversaryMode::Boost : AdversaryMode::Suppress;
        if (c.noise.target) {
            if (mode == AdversaryMode::Boost) return WorstCaseBoost{eps, *c.noise.target};
            return WorstCaseSuppress{eps, *c.noise.target};
        }
        if (m == nullptr || m->spikes.empty()) throw ConfigError("worst-case noise without a measure needs an explicit noise.target");
        return adversarial_noise(*m, dp, mode, eps, seed, c.window);
    }
    }
    return NoNoise{};
}

} // namespace spikeloc::config

#endif
