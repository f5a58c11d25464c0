#ifndef SPIKELOC_LOCALIZER_HPP
#define SPIKELOC_LOCALIZER_HPP

// Thresholding of the smoothed, truncated inverse Fourier transform
//
//   F(x) = sum_{|k| <= K} y(k) phihat(k) exp(2 pi i k x)        (circle)
//   F(x) = integral_{|k| <= K} y(k) phihat(k) exp(2 pi i k x) dk (line)
//
// The estimated support is {x : |F(x)| > threshold}. It is located on an
// oversampled grid and every boundary is then refined by bisection on |F|
// itself. |F| is band-limited to |k| <= K, so its slope is at most
// 2 pi K sum|y phihat| <= 2 pi K phi_p(0) (1 + eps); a grid step of 1/(32 K)
// or finer keeps the variation between samples well below the threshold
// margin, so no super-level excursion hides between two samples.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "spikeloc/acquisition.hpp"
#include "spikeloc/kernels.hpp"
#include "spikeloc/measures.hpp"
#include "spikeloc/params.hpp"
#include "spikeloc/supportgeom.hpp"

namespace spikeloc {

struct IndicatorTrace {
    std::vector<double> grid;
    std::vector<double> values;
    double threshold = 0.0;
    Setting setting  = Setting::Periodic;

    [[nodiscard]] std::size_t size() const { return grid.size(); }
    friend bool operator==(const IndicatorTrace&, const IndicatorTrace&) = default;
};

/// |F(x)| for a periodic signal; the weighted coefficients are formed once.
class PeriodicIndicator {
public:
    PeriodicIndicator(const PeriodicSignal& sig, const DerivedParams& dp) : K_(sig.K) {
        if (dp.setting != Setting::Periodic) throw std::invalid_argument("periodic indicator needs periodic parameters");
        if (static_cast<double>(sig.K) != dp.K) throw std::invalid_argument("signal K does not match the parameters");
        const KernelParams kp = dp.kernel();
        coeffs_.reserve(sig.size());
        for (int k = -K_; k <= K_; ++k) coeffs_.push_back(sig.at(k) * gaussian_hat(kp, k));
    }

    /// Complex value F(x), summed in k order -K..K.
    [[nodiscard]] complex value(double x) const {
        complex s{0.0, 0.0};
        for (int k = -K_; k <= K_; ++k) s += coeffs_[static_cast<std::size_t>(k + K_)] * std::polar(1.0, 2.0 * std::numbers::pi * k * x);
        return s;
    }

    [[nodiscard]] double operator()(double x) const { return std::abs(value(x)); }

private:
    int K_;
    std::vector<complex> coeffs_;
};

/// Relative trapezoid self-convergence tolerance is 1e-3 (beta - omega), absolute.
inline constexpr double kQuadratureTolerance = 1e-3;

/// Thrown when a real-line signal grid is too coarse for the trapezoid rule.
class QuadratureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// |F(x)| for a real-line signal via the composite trapezoid rule on the signal grid.
class RealIndicator {
public:
    RealIndicator(const RealSignal& sig, const DerivedParams& dp) {
        if (dp.setting != Setting::RealLine) throw std::invalid_argument("real-line indicator needs real-line parameters");
        if (sig.K != dp.K) throw std::invalid_argument("signal K does not match the parameters");
        if (sig.size() < 3 || sig.panels() % 2 != 0) throw std::invalid_argument("real-line signal needs an even number of panels");
        const KernelParams kp = dp.kernel();
        const std::size_t n   = sig.size();
        freqs_.resize(n);
        weighted_.resize(n);
        for (std::size_t j = 0; j < n; ++j) {
            freqs_[j]    = sig.frequency(j);
            weighted_[j] = sig.values[j] * gaussian_hat(kp, freqs_[j]);
        }
        h_ = sig.h;
    }

    [[nodiscard]] complex value(double x) const { return sum(x, 1); }

    /// Trapezoid rule on every `stride`-th sample (stride 2 gives the 2h rule).
    [[nodiscard]] complex sum(double x, std::size_t stride) const {
        complex s{0.0, 0.0};
        const std::size_t last = freqs_.size() - 1;
        for (std::size_t j = 0; j <= last; j += stride) {
            const complex term = weighted_[j] * std::polar(1.0, 2.0 * std::numbers::pi * freqs_[j] * x);
            s += (j == 0 || j == last) ? 0.5 * term : term;
        }
        return s * (h_ * static_cast<double>(stride));
    }

    [[nodiscard]] double operator()(double x) const { return std::abs(value(x)); }

    /// max over xs of |F_h(x) - F_2h(x)|.
    [[nodiscard]] double self_convergence(const std::vector<double>& xs) const {
        double worst = 0.0;
        for (double x : xs) worst = std::max(worst, std::abs(std::abs(sum(x, 1)) - std::abs(sum(x, 2))));
        return worst;
    }

private:
    std::vector<double> freqs_;
    std::vector<complex> weighted_;
    double h_ = 0.0;
};

[[nodiscard]] inline double indicator_periodic(const PeriodicSignal& sig, const DerivedParams& dp, double x) { return PeriodicIndicator(sig, dp)(x); }

[[nodiscard]] inline double indicator_real(const RealSignal& sig, const DerivedParams& dp, double x) { return RealIndicator(sig, dp)(x); }

/// Rejects real-line data whose trapezoid sum has not converged on the window.
inline void check_quadrature(const RealIndicator& ind, const DerivedParams& dp, double lo, double hi, std::size_t probes = 65) {
    std::vector<double> xs(probes);
    for (std::size_t i = 0; i < probes; ++i) xs[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(probes - 1);
    const double err = ind.self_convergence(xs);
    const double tol = kQuadratureTolerance * dp.gap;
    if (err > tol) {
        throw QuadratureError("trapezoid rule not converged: |F_h - F_2h| = " + std::to_string(err) + " > " + std::to_string(tol) +
                              "; refine the signal grid (halve h)");
    }
}

// ---------------------------------------------------------------------------
// support extraction

inline constexpr double kBisectionTolerance = 1e-12;

struct SupportResult {
    IntervalSet set;
    std::vector<std::string> warnings;
};

namespace detail {

/// Boundary of {f > thr} between `below` and `above`; returns a point inside the set.
template<typename F>
[[nodiscard]] double bisect_boundary(const F& f, double thr, double below, double above) {
    while (std::fabs(above - below) > kBisectionTolerance) {
        const double mid = 0.5 * (below + above);
        if (mid == below || mid == above) break;
        if (f(mid) > thr) {
            above = mid;
        } else {
            below = mid;
        }
    }
    return above;
}

} // namespace detail

/// Maximal intervals where the indicator exceeds the threshold (strictly).
/// `indicator` is re-evaluated during boundary refinement. Periodic traces
/// must sample [-1/2, 1/2) uniformly; real-line traces sample the window
/// uniformly including both ends.
template<typename F>
[[nodiscard]] SupportResult extract_support(const IndicatorTrace& trace, const F& indicator) {
    const std::size_t n = trace.size();
    if (n < 2 || trace.values.size() != n) throw std::invalid_argument("trace needs at least two samples and matching values");
    const double thr = trace.threshold;
    std::vector<char> above(n);
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        above[i] = trace.values[i] > thr ? 1 : 0;
        count += static_cast<std::size_t>(above[i]);
    }
    SupportResult out{IntervalSet(trace.setting), {}};
    if (count == 0) return out;

    std::vector<Interval> raw;
    if (trace.setting == Setting::Periodic) {
        if (count == n) {
            out.set = IntervalSet(Setting::Periodic, {{-0.5, 0.5}});
            out.warnings.emplace_back("indicator exceeds the threshold on the whole grid; reporting the full circle");
            return out;
        }
        const double step = 1.0 / static_cast<double>(n);
        const double x0   = trace.grid.front();
        const auto pos    = [&](std::size_t idx) { return x0 + static_cast<double>(idx) * step; };
        std::size_t start = 0;
        while (above[start]) ++start; // a below-threshold sample exists
        std::size_t i = start + 1;
        while (i <= start + n) {
            if (!above[i % n]) {
                ++i;
                continue;
            }
            const std::size_t a = i;
            while (above[i % n]) ++i;
            const std::size_t b = i - 1;
            const double lo     = detail::bisect_boundary(indicator, thr, pos(a - 1), pos(a));
            const double hi     = detail::bisect_boundary(indicator, thr, pos(b + 1), pos(b));
            raw.push_back({lo, hi});
        }
    } else {
        const double lo_w = trace.grid.front();
        const double hi_w = trace.grid.back();
        if (count == n) {
            out.set = IntervalSet(Setting::RealLine, {{lo_w, hi_w}});
            out.warnings.emplace_back("indicator exceeds the threshold on the whole window; reporting the full window");
            return out;
        }
        std::size_t i = 0;
        while (i < n) {
            if (!above[i]) {
                ++i;
                continue;
            }
            const std::size_t a = i;
            while (i < n && above[i]) ++i;
            const std::size_t b = i - 1;
            const double lo     = a == 0 ? lo_w : detail::bisect_boundary(indicator, thr, trace.grid[a - 1], trace.grid[a]);
            const double hi     = b == n - 1 ? hi_w : detail::bisect_boundary(indicator, thr, trace.grid[b + 1], trace.grid[b]);
            raw.push_back({lo, hi});
        }
    }
    out.set = IntervalSet(trace.setting, std::move(raw));
    return out;
}

template<typename F>
[[nodiscard]] IndicatorTrace trace_on_grid(const F& indicator, std::vector<double> grid, double threshold, Setting setting) {
    IndicatorTrace t;
    t.values.reserve(grid.size());
    for (double x : grid) t.values.push_back(indicator(x));
    t.grid      = std::move(grid);
    t.threshold = threshold;
    t.setting   = setting;
    return t;
}

/// n uniform points x_i = -1/2 + i/n.
[[nodiscard]] inline std::vector<double> circle_grid(std::size_t n) {
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = -0.5 + static_cast<double>(i) / static_cast<double>(n);
    return g;
}

/// Uniform grid on [lo, hi] with spacing at most `step`, both ends included.
[[nodiscard]] inline std::vector<double> window_grid(double lo, double hi, double step) {
    const auto panels = static_cast<std::size_t>(std::max(1.0, std::ceil((hi - lo) / step)));
    std::vector<double> g(panels + 1);
    for (std::size_t i = 0; i <= panels; ++i) g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(panels);
    g.back() = hi;
    return g;
}

// ---------------------------------------------------------------------------
// end-to-end pipelines

struct LocalizationResult {
    DerivedParams params;
    IntervalSet support;
    IndicatorTrace trace;
    std::vector<std::string> warnings;
};

inline constexpr double kDefaultGridDensity = 64.0;
/// Real-line trace samples per kernel width sigma/K.
inline constexpr double kDefaultRealDensity = 32.0;

struct Window {
    double lo = -1.0;
    double hi = 1.0;
};

namespace detail {

inline void add_regime_warnings(LocalizationResult& r, const ProblemParams& p) {
    const auto w = check_regime(p, r.params);
    if (w.eps_above_max) r.warnings.emplace_back("eps exceeds eps_max; the localization guarantee does not apply");
    if (w.k_below_3sigma) r.warnings.emplace_back("K < 3 sigma; the periodic kernel bounds do not apply");
}

} // namespace detail

/// Localizes from a periodic signal with already-derived parameters.
[[nodiscard]] inline LocalizationResult localize_periodic(const PeriodicSignal& sig, const DerivedParams& dp, double grid_density = kDefaultGridDensity) {
    if (!(grid_density > 0.0)) throw std::invalid_argument("grid density must be positive");
    LocalizationResult r;
    r.params = dp;
    const PeriodicIndicator ind(sig, dp);
    const auto n = static_cast<std::size_t>(std::ceil(grid_density * (2.0 * sig.K + 1.0)));
    r.trace      = trace_on_grid(ind, circle_grid(std::max<std::size_t>(n, 2)), dp.threshold, Setting::Periodic);
    auto support = extract_support(r.trace, ind);
    r.support    = std::move(support.set);
    r.warnings   = std::move(support.warnings);
    return r;
}

/// Derives parameters (rejecting K < 3 tau) and localizes.
[[nodiscard]] inline LocalizationResult localize_periodic(const PeriodicSignal& sig, const ProblemParams& p, double grid_density = kDefaultGridDensity) {
    if (static_cast<double>(sig.K) != p.K) throw std::invalid_argument("signal K does not match the parameters");
    auto r = localize_periodic(sig, derive_periodic(p), grid_density);
    detail::add_regime_warnings(r, p);
    return r;
}

/// Samples the measure, applies noise, and localizes.
[[nodiscard]] inline LocalizationResult localize_periodic(const SpikeMeasure& m, const ProblemParams& p, const NoiseSpec& noise,
                                                          double grid_density = kDefaultGridDensity) {
    const auto dp  = derive_periodic(p);
    const auto sig = add_noise(sample_periodic(m, static_cast<int>(p.K)), noise, dp.kernel());
    auto r         = localize_periodic(sig, dp, grid_density);
    detail::add_regime_warnings(r, p);
    return r;
}

[[nodiscard]] inline LocalizationResult localize_real(const RealSignal& sig, const DerivedParams& dp, Window window = {},
                                                      double density = kDefaultRealDensity) {
    if (!(window.lo < window.hi)) throw std::invalid_argument("empty search window");
    if (!(density > 0.0)) throw std::invalid_argument("grid density must be positive");
    LocalizationResult r;
    r.params = dp;
    const RealIndicator ind(sig, dp);
    check_quadrature(ind, dp, window.lo, window.hi);
    r.trace      = trace_on_grid(ind, window_grid(window.lo, window.hi, dp.sigma / dp.K / density), dp.threshold, Setting::RealLine);
    auto support = extract_support(r.trace, ind);
    r.support    = std::move(support.set);
    r.warnings   = std::move(support.warnings);
    return r;
}

[[nodiscard]] inline LocalizationResult localize_real(const RealSignal& sig, const ProblemParams& p, Window window = {}, double density = kDefaultRealDensity) {
    auto r = localize_real(sig, derive_real(p), window, density);
    detail::add_regime_warnings(r, p);
    return r;
}

/// Samples on the default grid for the window (or spacing h when given), applies noise, localizes.
[[nodiscard]] inline LocalizationResult localize_real(const SpikeMeasure& m, const ProblemParams& p, const NoiseSpec& noise, Window window = {},
                                                      std::optional<double> h = std::nullopt, double density = kDefaultRealDensity) {
    const auto dp       = derive_real(p);
    const double x_max  = std::max(std::fabs(window.lo), std::fabs(window.hi));
    const auto sig      = add_noise(sample_real(m, p.K, h.value_or(default_spacing(p.K, x_max))), noise, dp.kernel());
    auto r              = localize_real(sig, dp, window, density);
    detail::add_regime_warnings(r, p);
    return r;
}

} // namespace spikeloc

#endif
