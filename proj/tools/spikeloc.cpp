// spikeloc: command-line front end.
//
//   spikeloc synth    --config run.json [--set k=v]... [--out dir] [--seed n]
//   spikeloc localize --config run.json ...
//   spikeloc verify   --config run.json ...
//   spikeloc sweep    --config run.json ...
//   spikeloc qpe      --config run.json ...
//
// Exit codes: 0 success/pass, 1 localization failure, 2 premise violation,
// 64 configuration error.

#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "spikeloc/config.hpp"
#include "spikeloc/harness.hpp"
#include "spikeloc/io.hpp"
#include "spikeloc/localizer.hpp"
#include "spikeloc/measures.hpp"

namespace {

using namespace spikeloc;
using json = nlohmann::json;

enum Exit : int { kOk = 0, kLocalizationFailure = 1, kPremiseViolation = 2, kConfigError = 64 };

struct CommonArgs {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::optional<std::string> stamp;
    bool timings = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "JSON run configuration")->required();
    cmd->add_option("--set", args.overrides, "override a config key, e.g. --set noise.eps=0.05 (repeatable)");
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_option("--seed", args.seed, "override the config seed");
    cmd->add_option("--stamp", args.stamp, "label used in output file names instead of the UTC timestamp");
    cmd->add_flag("--timings", args.timings, "include wall-clock timings in reports");
}

config::RunConfig load_config(const CommonArgs& args) {
    json doc;
    try {
        doc = json::parse(io::read_file(args.config_path));
    } catch (const json::parse_error& e) {
        throw config::ConfigError(std::string("malformed JSON in config: ") + e.what());
    } catch (const std::runtime_error& e) {
        throw config::ConfigError(e.what());
    }
    for (const auto& o : args.overrides) config::apply_override(doc, o);
    if (args.seed) doc["seed"] = *args.seed;
    return config::parse(doc);
}

std::string utc_stamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
    return buf;
}

std::string output_path(const CommonArgs& args, const config::RunConfig& cfg, const std::string& experiment, const std::string& suffix) {
    std::filesystem::create_directories(args.out_dir);
    const std::string name = experiment + "-" + args.stamp.value_or(utc_stamp()) + "-" + std::to_string(cfg.seed) + suffix;
    return (std::filesystem::path(args.out_dir) / name).string();
}

void emit(const std::string& path, const std::string& content) {
    io::write_file(path, content);
    std::cout << path << '\n';
}

SpikeMeasure measure_for(const config::RunConfig& cfg) {
    if (cfg.measure) return *cfg.measure;
    return random_instance(cfg.params, cfg.instance, cfg.seed);
}

DerivedParams derived_for(const config::RunConfig& cfg) {
    return cfg.setting == Setting::Periodic ? derive_periodic_unchecked(cfg.params) : derive_real(cfg.params);
}

void report_validation(const ValidationResult& v) {
    for (const auto& m : v.messages) std::cerr << "invalid measure: " << m << '\n';
}

int cmd_synth(const CommonArgs& args) {
    const auto cfg = load_config(args);
    const auto m   = measure_for(cfg);
    const auto v   = validate(m, cfg.params, cfg.setting);
    if (!v.ok()) {
        report_validation(v);
        return kPremiseViolation;
    }
    emit(output_path(args, cfg, "synth", ".json"), io::to_json(m).dump(2) + "\n");
    return kOk;
}

int cmd_localize(const CommonArgs& args) {
    const auto cfg = load_config(args);
    LocalizationResult loc;
    if (cfg.signal_file) {
        if (cfg.setting != Setting::Periodic) throw config::ConfigError("signal_file is supported for the periodic setting");
        std::istringstream in(io::read_file(*cfg.signal_file));
        const auto sig = io::periodic_signal_from_csv(in);
        if (static_cast<double>(sig.K) != cfg.params.K) throw config::ConfigError("signal file K does not match config K");
        loc = localize_periodic(sig, cfg.params, cfg.grid_density);
    } else {
        const auto m  = measure_for(cfg);
        const auto v  = validate(m, cfg.params, cfg.setting);
        if (!v.ok()) report_validation(v);
        const auto dp    = derived_for(cfg);
        const auto noise = config::make_noise(cfg, &m, dp);
        if (cfg.setting == Setting::Periodic) {
            loc = localize_periodic(m, cfg.params, noise, cfg.grid_density);
        } else {
            loc = localize_real(m, cfg.params, noise, cfg.window, cfg.h, cfg.real_density);
        }
    }
    for (const auto& w : loc.warnings) std::cerr << "warning: " << w << '\n';
    emit(output_path(args, cfg, "localize", "-support.json"), io::to_json(loc.support).dump(2) + "\n");
    emit(output_path(args, cfg, "localize", "-trace.csv"), io::to_csv(loc.trace));
    return kOk;
}

int verdict(const VerificationReport& r) {
    if (!r.measure_valid || !r.k_in_regime) return kPremiseViolation;
    return r.pass ? kOk : kLocalizationFailure;
}

int cmd_verify(const CommonArgs& args) {
    const auto cfg   = load_config(args);
    const auto m     = measure_for(cfg);
    const auto dp    = derived_for(cfg);
    const auto noise = config::make_noise(cfg, &m, dp);
    VerifyOptions opt;
    opt.grid_density = cfg.grid_density;
    opt.real_density = cfg.real_density;
    opt.window       = cfg.window;
    opt.h            = cfg.h;
    opt.seed         = cfg.seed;
    const auto rep   = verify_once(cfg.params, m, noise, cfg.setting, opt);
    emit(output_path(args, cfg, "verify", ".json"), io::to_json(rep, args.timings).dump(2) + "\n");
    for (const auto& msg : rep.premise_messages) std::cerr << "premise: " << msg << '\n';
    return verdict(rep);
}

int cmd_sweep(const CommonArgs& args) {
    const auto cfg = load_config(args);
    if (cfg.sweep.gaps.empty()) throw config::ConfigError("sweep needs a nonempty sweep.gaps list");
    SweepConfig sc;
    sc.base                 = cfg.params;
    sc.setting              = cfg.setting;
    sc.gaps                 = cfg.sweep.gaps;
    sc.trials               = cfg.sweep.trials;
    sc.seed                 = cfg.seed;
    sc.instance             = cfg.instance;
    sc.options.grid_density = cfg.grid_density;
    sc.options.real_density = cfg.real_density;
    sc.options.window       = cfg.window;
    sc.options.h            = cfg.h;
    const auto rows         = sweep(sc);
    emit(output_path(args, cfg, "sweep", ".csv"), io::sweep_csv(rows));
    bool all_pass = true;
    for (const auto& r : rows) all_pass = all_pass && (!r.admissible || r.passes == r.trials);
    return all_pass ? kOk : kLocalizationFailure;
}

int cmd_qpe(const CommonArgs& args) {
    const auto cfg = load_config(args);
    if (!cfg.qpe) throw config::ConfigError("qpe command needs a 'qpe' section");
    if (cfg.setting != Setting::Periodic) throw config::ConfigError("qpe runs in the periodic setting");
    const auto rep = qpe_scenario(*cfg.qpe);
    emit(output_path(args, cfg, "qpe", ".json"), io::to_json(rep, args.timings).dump(2) + "\n");
    for (const auto& msg : rep.verification.premise_messages) std::cerr << "premise: " << msg << '\n';
    if (!rep.verification.measure_valid || !rep.verification.k_in_regime) return kPremiseViolation;
    return rep.conditional_pass() && rep.verification.pass ? kOk : kLocalizationFailure;
}

template<typename F>
int guarded(F&& f) {
    try {
        return f();
    } catch (const config::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const ParameterError& e) {
        std::cerr << "parameter error: " << e.what() << '\n';
        return kPremiseViolation;
    } catch (const InfeasibleInstance& e) {
        std::cerr << "infeasible instance: " << e.what() << '\n';
        return kPremiseViolation;
    } catch (const QuadratureError& e) {
        std::cerr << "quadrature error: " << e.what() << '\n';
        return kLocalizationFailure;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kConfigError;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spike localization by thresholding the Gaussian-smoothed inverse Fourier transform"};
    app.require_subcommand(1);
    CommonArgs args;
    auto* synth    = app.add_subcommand("synth", "write a validated random or explicit measure");
    auto* localize = app.add_subcommand("localize", "estimate the support; writes interval JSON and an indicator trace CSV");
    auto* verify   = app.add_subcommand("verify", "run one instance and score it against the localization guarantee");
    auto* sweeps   = app.add_subcommand("sweep", "sweep beta - omega and tabulate pass rates");
    auto* qpe      = app.add_subcommand("qpe", "phase-estimation scenario with Hadamard-test shot noise");
    for (auto* cmd : {synth, localize, verify, sweeps, qpe}) add_common(cmd, args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kConfigError;
    }

    if (synth->parsed()) return guarded([&] { return cmd_synth(args); });
    if (localize->parsed()) return guarded([&] { return cmd_localize(args); });
    if (verify->parsed()) return guarded([&] { return cmd_verify(args); });
    if (sweeps->parsed()) return guarded([&] { return cmd_sweep(args); });
    return guarded([&] { return cmd_qpe(args); });
}
