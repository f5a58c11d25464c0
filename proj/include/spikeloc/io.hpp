#ifndef SPIKELOC_IO_HPP
#define SPIKELOC_IO_HPP

// JSON and CSV encodings of measures, signals, interval sets, traces and
// reports. Decimal output uses 17 significant digits so values round-trip.

#include <cmath>
#include <cstdio>
#include <initializer_list>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "spikeloc/acquisition.hpp"
#include "spikeloc/harness.hpp"
#include "spikeloc/localizer.hpp"
#include "spikeloc/measures.hpp"
#include "spikeloc/supportgeom.hpp"

namespace spikeloc::io {

using json = nlohmann::json;

[[nodiscard]] inline std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// ---------------------------------------------------------------------------
// measures

[[nodiscard]] inline json to_json(const Spike& s) { return {{"location", s.location}, {"weight", s.weight}}; }

[[nodiscard]] inline Spike spike_from_json(const json& j) {
    for (const auto& [key, _] : j.items()) {
        if (key != "location" && key != "weight") throw std::invalid_argument("unknown spike key '" + key + "'");
    }
    return {j.at("location").get<double>(), j.at("weight").get<double>()};
}

[[nodiscard]] inline json to_json(const ResidueModel& r) {
    struct Visitor {
        json operator()(const NoResidue&) const { return {{"kind", "none"}}; }
        json operator()(const SpikeCluster& c) const {
            json arr = json::array();
            for (const auto& s : c.spikes) arr.push_back(to_json(s));
            return {{"kind", "cluster"}, {"spikes", arr}};
        }
        json operator()(const UniformBox& b) const { return {{"kind", "box"}, {"center", b.center}, {"width", b.width}, {"mass", b.mass}}; }
    };
    return std::visit(Visitor{}, r);
}

[[nodiscard]] inline ResidueModel residue_from_json(const json& j) {
    const auto kind = j.at("kind").get<std::string>();
    const auto only = [&](std::initializer_list<const char*> allowed) {
        for (const auto& [key, _] : j.items()) {
            bool ok = false;
            for (const char* a : allowed) ok = ok || key == a;
            if (!ok) throw std::invalid_argument("unknown residue key '" + key + "'");
        }
    };
    if (kind == "none") {
        only({"kind"});
        return NoResidue{};
    }
    if (kind == "cluster") {
        only({"kind", "spikes"});
        SpikeCluster c;
        for (const auto& s : j.at("spikes")) c.spikes.push_back(spike_from_json(s));
        return c;
    }
    if (kind == "box") {
        only({"kind", "center", "width", "mass"});
        return UniformBox{j.at("center").get<double>(), j.at("width").get<double>(), j.at("mass").get<double>()};
    }
    throw std::invalid_argument("unknown residue kind '" + kind + "'");
}

[[nodiscard]] inline json to_json(const SpikeMeasure& m) {
    json spikes = json::array();
    for (const auto& s : m.spikes) spikes.push_back(to_json(s));
    return {{"spikes", spikes}, {"residue", to_json(m.residue)}};
}

[[nodiscard]] inline SpikeMeasure measure_from_json(const json& j) {
    for (const auto& [key, _] : j.items()) {
        if (key != "spikes" && key != "residue") throw std::invalid_argument("unknown measure key '" + key + "'");
    }
    SpikeMeasure m;
    for (const auto& s : j.at("spikes")) m.spikes.push_back(spike_from_json(s));
    if (j.contains("residue")) m.residue = residue_from_json(j.at("residue"));
    return m;
}

// ---------------------------------------------------------------------------
// geometry

/// {"domain": "periodic"|"real", "intervals": [[lo, hi], ...], "wrap": bool}.
/// A wrapping arc is written with both ends in [-1/2, 1/2), so lo > hi.
[[nodiscard]] inline json to_json(const IntervalSet& E) {
    json arr = json::array();
    for (const auto& iv : E.intervals()) {
        const double hi = (E.domain() == Setting::Periodic && iv.hi > 0.5 && !E.full_circle()) ? iv.hi - 1.0 : iv.hi;
        arr.push_back(json::array({iv.lo, hi}));
    }
    return {{"domain", std::string(to_string(E.domain()))}, {"intervals", arr}, {"wrap", E.wraps()}};
}

[[nodiscard]] inline IntervalSet interval_set_from_json(const json& j) {
    const Setting domain = setting_from_string(j.at("domain").get<std::string>());
    std::vector<Interval> raw;
    for (const auto& pair : j.at("intervals")) {
        Interval iv{pair.at(0).get<double>(), pair.at(1).get<double>()};
        if (domain == Setting::Periodic && iv.lo > iv.hi) iv.hi += 1.0;
        raw.push_back(iv);
    }
    return IntervalSet(domain, std::move(raw));
}

[[nodiscard]] inline json to_json(const PointSet& P) { return {{"domain", std::string(to_string(P.domain()))}, {"points", P.points()}}; }

[[nodiscard]] inline PointSet point_set_from_json(const json& j) {
    return PointSet(setting_from_string(j.at("domain").get<std::string>()), j.at("points").get<std::vector<double>>());
}

// ---------------------------------------------------------------------------
// signals and traces

/// CSV with header "k,re,im".
[[nodiscard]] inline std::string signal_csv(const std::vector<double>& freqs, const std::vector<complex>& values) {
    std::ostringstream os;
    os << "k,re,im\n";
    for (std::size_t i = 0; i < values.size(); ++i) os << format_double(freqs[i]) << ',' << format_double(values[i].real()) << ',' << format_double(values[i].imag()) << '\n';
    return os.str();
}

[[nodiscard]] inline std::string to_csv(const PeriodicSignal& s) {
    std::vector<double> f(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) f[i] = s.frequency(i);
    return signal_csv(f, s.values);
}

[[nodiscard]] inline std::string to_csv(const RealSignal& s) {
    std::vector<double> f(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) f[i] = s.frequency(i);
    return signal_csv(f, s.values);
}

[[nodiscard]] inline json to_json(const PeriodicSignal& s) {
    json re = json::array(), im = json::array();
    for (const auto& v : s.values) {
        re.push_back(v.real());
        im.push_back(v.imag());
    }
    return {{"K", s.K}, {"re", re}, {"im", im}};
}

[[nodiscard]] inline PeriodicSignal periodic_signal_from_json(const json& j) {
    PeriodicSignal s(j.at("K").get<int>());
    const auto re = j.at("re").get<std::vector<double>>();
    const auto im = j.at("im").get<std::vector<double>>();
    if (re.size() != s.size() || im.size() != s.size()) throw std::invalid_argument("signal JSON needs 2K+1 values");
    for (std::size_t i = 0; i < s.size(); ++i) s.values[i] = {re[i], im[i]};
    return s;
}

/// Parses "k,re,im" CSV into a periodic signal; rows must cover k = -K..K once.
[[nodiscard]] inline PeriodicSignal periodic_signal_from_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("k,re,im", 0) != 0) throw std::invalid_argument("signal CSV must start with header k,re,im");
    std::vector<std::pair<long, complex>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string a, b, c;
        if (!std::getline(ls, a, ',') || !std::getline(ls, b, ',') || !std::getline(ls, c)) throw std::invalid_argument("malformed signal CSV row: " + line);
        const double k = std::stod(a);
        if (k != std::floor(k)) throw std::invalid_argument("periodic signal CSV needs integer frequencies");
        rows.emplace_back(static_cast<long>(k), complex{std::stod(b), std::stod(c)});
    }
    if (rows.empty() || rows.size() % 2 == 0) throw std::invalid_argument("periodic signal CSV needs 2K+1 rows");
    const int K = static_cast<int>(rows.size() / 2);
    PeriodicSignal s(K);
    std::vector<char> seen(s.size(), 0);
    for (const auto& [k, v] : rows) {
        if (k < -K || k > K || seen[static_cast<std::size_t>(k + K)]) throw std::invalid_argument("signal CSV rows must cover k = -K..K exactly once");
        seen[static_cast<std::size_t>(k + K)] = 1;
        s.at(static_cast<int>(k))             = v;
    }
    return s;
}

/// CSV with header "x,indicator,threshold".
[[nodiscard]] inline std::string to_csv(const IndicatorTrace& t) {
    std::ostringstream os;
    os << "x,indicator,threshold\n";
    const std::string thr = format_double(t.threshold);
    for (std::size_t i = 0; i < t.size(); ++i) os << format_double(t.grid[i]) << ',' << format_double(t.values[i]) << ',' << thr << '\n';
    return os.str();
}

// ---------------------------------------------------------------------------
// reports

[[nodiscard]] inline const char* residue_name(ResidueKind k) {
    switch (k) {
    case ResidueKind::None: return "none";
    case ResidueKind::Cluster: return "cluster";
    case ResidueKind::Box: return "box";
    }
    return "none";
}

[[nodiscard]] inline json to_json(const DerivedParams& d) {
    return {{"setting", std::string(to_string(d.setting))}, {"sigma", d.sigma}, {"tau", d.tau}, {"threshold", d.threshold}, {"eps_max", d.eps_max}, {"k_min", d.k_min}};
}

/// Report JSON. Timings are wall-clock and excluded unless requested, so the
/// default encoding is byte-stable for a given configuration and seed.
[[nodiscard]] inline json to_json(const VerificationReport& r, bool with_timings = false) {
    json j;
    j["setting"]  = std::string(to_string(r.setting));
    j["params"]   = {{"K", r.params.K}, {"beta", r.params.beta}, {"omega", r.params.omega}, {"eps", r.params.eps}};
    j["derived"]  = to_json(r.derived);
    j["instance"] = {{"num_spikes", r.num_spikes}, {"residue", residue_name(r.residue)}, {"residue_mass", r.residue_mass}};
    j["noise"]    = {{"kind", r.noise_kind}, {"target", r.noise_target}, {"eps_used", r.eps_used}, {"realized", r.realized_noise}, {"bound_held", r.noise_bound_held}};
    j["premises"] = {{"measure_valid", r.measure_valid},
                     {"eps_in_regime", r.eps_in_regime},
                     {"k_in_regime", r.k_in_regime},
                     {"premises_violated", r.premises_violated},
                     {"messages", r.premise_messages}};
    j["support"]  = to_json(r.support);
    j["result"]   = {{"contained", r.contained},
                     {"empty_estimate", r.empty_estimate},
                     {"max_dev_e_to_star", r.max_dev_e_to_star},
                     {"max_dev_star_to_e", r.max_dev_star_to_e},
                     {"bound", r.bound},
                     {"margin_step1", r.margin_step1},
                     {"margin_step2", r.margin_step2},
                     {"pass", r.pass}};
    j["warnings"] = r.warnings;
    j["seed"]     = r.seed;
    if (with_timings) j["timings"] = {{"elapsed_ms", r.elapsed_ms}};
    return j;
}

[[nodiscard]] inline json to_json(const QpeReport& q, bool with_timings = false) {
    json j           = to_json(q.verification, with_timings);
    j["qpe"]         = {{"eigenvalues", q.eigenvalues},
                        {"shots", q.shots},
                        {"eps_hat", q.eps_hat},
                        {"delta", q.delta},
                        {"measurement_model", "hadamard-test +-1 shots, Hoeffding radius 2*sqrt(ln(4(2K+1)/delta)/N)"},
                        {"conditional_pass", q.conditional_pass()}};
    return j;
}

[[nodiscard]] inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream os;
    os << "gap,beta,omega,K,tau,k_min,eps,admissible,trials,passes,pass_rate,mean_dev_tau_units,max_dev_tau_units,mean_margin_step1,mean_margin_step2,note\n";
    for (const auto& r : rows) {
        os << format_double(r.gap) << ',' << format_double(r.beta) << ',' << format_double(r.omega) << ',' << format_double(r.K) << ',' << format_double(r.tau) << ','
           << format_double(r.k_min) << ',' << format_double(r.eps) << ',' << (r.admissible ? 1 : 0) << ',' << r.trials << ',' << r.passes << ','
           << format_double(r.pass_rate) << ',' << format_double(r.mean_dev_units) << ',' << format_double(r.max_dev_units) << ','
           << format_double(r.mean_margin_step1) << ',' << format_double(r.mean_margin_step2) << ',' << '"' << r.note << '"' << '\n';
    }
    return os.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << content;
}

[[nodiscard]] inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

} // namespace spikeloc::io

#endif
