#ifndef SPIKELOC_PARAMS_HPP
#define SPIKELOC_PARAMS_HPP

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

#include "spikeloc/kernels.hpp"

namespace spikeloc {

enum class Setting { RealLine, Periodic };

inline std::string_view to_string(Setting s) { return s == Setting::Periodic ? "periodic" : "real"; }

inline Setting setting_from_string(std::string_view s) {
    if (s == "periodic") return Setting::Periodic;
    if (s == "real" || s == "real-line") return Setting::RealLine;
    throw std::invalid_argument("unknown setting '" + std::string(s) + "' (expected periodic|real)");
}

/// Thrown when problem constants fall outside the admissible regime.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Problem constants. K is the frequency cutoff, beta the dominant-weight
/// floor, omega the residue-mass cap and eps the assumed noise magnitude.
struct ProblemParams {
    double K     = 1.0;
    double beta  = 1.0;
    double omega = 0.0;
    double eps   = 0.0;
};

/// Closed-form algorithm parameters derived from (beta, omega, K).
struct DerivedParams {
    Setting setting  = Setting::Periodic;
    double sigma     = 0.0; ///< kernel width, the Gaussian has std (sigma/K)/sqrt(2*pi)
    double tau       = 0.0; ///< localization radius is tau/K
    double threshold = 0.0; ///< absolute cutoff on the indicator magnitude
    double eps_max   = 0.0; ///< largest noise level covered by the guarantee
    double k_min     = 0.0; ///< smallest admissible K (periodic), 0 on the real line
    double K         = 0.0;
    double gap       = 0.0; ///< beta - omega

    [[nodiscard]] double radius() const { return tau / K; }
    /// C in exp(-pi sigma^2) = (beta - omega) / C.
    [[nodiscard]] double tail_constant() const { return setting == Setting::Periodic ? 12.0 : 6.0; }
    [[nodiscard]] KernelParams kernel() const { return {sigma, K}; }
};

/// Smallest beta - omega we accept; below it sigma and the K requirement blow up.
inline constexpr double kMinGap = 1e-9;

namespace detail {

inline void check_common(const ProblemParams& p) {
    if (!(p.K > 0.0) || !std::isfinite(p.K)) throw ParameterError("K must be positive and finite");
    if (!(p.beta > 0.0) || p.beta > 1.0) throw ParameterError("beta must lie in (0, 1]");
    if (!(p.omega >= 0.0)) throw ParameterError("omega must be nonnegative");
    if (!(p.omega < p.beta)) throw ParameterError("omega must be strictly smaller than beta");
    if (p.beta - p.omega < kMinGap) throw ParameterError("beta - omega below 1e-9 is outside the supported range");
    if (!(p.eps >= 0.0) || !std::isfinite(p.eps)) throw ParameterError("eps must be finite and nonnegative");
}

// tau = log(C / gap) / pi, sigma = sqrt(tau)
inline void fill_width(DerivedParams& d, const ProblemParams& p, double C) {
    d.tau   = std::log(C / (p.beta - p.omega)) / std::numbers::pi;
    d.sigma = std::sqrt(d.tau);
    d.K     = p.K;
    d.gap   = p.beta - p.omega;
}

} // namespace detail

[[nodiscard]] inline DerivedParams derive_real(const ProblemParams& p) {
    detail::check_common(p);
    DerivedParams d;
    d.setting = Setting::RealLine;
    detail::fill_width(d, p, 6.0);
    d.threshold = (2.0 * p.beta + p.omega) * p.K / (3.0 * d.sigma);
    d.eps_max   = (p.beta - p.omega) / 6.0;
    d.k_min     = 0.0;
    return d;
}

/// Periodic parameters without the K >= 3 tau admissibility check. Used by the
/// harness so out-of-regime runs still execute and get flagged.
[[nodiscard]] inline DerivedParams derive_periodic_unchecked(const ProblemParams& p) {
    detail::check_common(p);
    if (p.K != std::floor(p.K)) throw ParameterError("periodic setting requires an integer K");
    DerivedParams d;
    d.setting = Setting::Periodic;
    detail::fill_width(d, p, 12.0);
    d.eps_max   = (p.beta - p.omega) / 3.0;
    d.k_min     = 3.0 * d.tau;
    d.threshold = (6.0 * p.beta + 5.0 * p.omega) / 11.0 * phi_p_zero_for(d.sigma, p.K);
    return d;
}

[[nodiscard]] inline DerivedParams derive_periodic(const ProblemParams& p) {
    DerivedParams d = derive_periodic_unchecked(p);
    if (p.K < d.k_min) {
        throw ParameterError("K = " + std::to_string(p.K) + " is below the minimum admissible K = 3*tau = " + std::to_string(d.k_min) +
                             " (use K >= " + std::to_string(static_cast<long long>(std::ceil(d.k_min))) + ")");
    }
    return d;
}

[[nodiscard]] inline DerivedParams derive(const ProblemParams& p, Setting s) { return s == Setting::Periodic ? derive_periodic(p) : derive_real(p); }

/// Soft diagnostics that never reject a run.
struct ParamWarnings {
    bool eps_above_max = false; ///< eps > eps_max: outside the guaranteed regime
    bool k_below_3sigma = false; ///< periodic: the kernel sandwich bound needs K >= 3 sigma
    [[nodiscard]] bool any() const { return eps_above_max || k_below_3sigma; }
};

[[nodiscard]] inline ParamWarnings check_regime(const ProblemParams& p, const DerivedParams& d) {
    ParamWarnings w;
    w.eps_above_max  = p.eps > d.eps_max;
    w.k_below_3sigma = d.setting == Setting::Periodic && p.K < 3.0 * d.sigma;
    return w;
}

} // namespace spikeloc

#endif
