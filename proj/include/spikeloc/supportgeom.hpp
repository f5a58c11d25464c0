#ifndef SPIKELOC_SUPPORTGEOM_HPP
#define SPIKELOC_SUPPORTGEOM_HPP

// Interval sets and point sets on a real-line window or on the unit circle
// [-1/2, 1/2), with the two one-sided deviations used to score a support
// estimate against the true support.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "spikeloc/kernels.hpp"
#include "spikeloc/params.hpp"

namespace spikeloc {

/// Representative of x modulo 1 in [-1/2, 1/2).
[[nodiscard]] inline double wrap_unit(double x) {
    double r = x - std::floor(x + 0.5);
    if (r >= 0.5) r -= 1.0;
    return r;
}

/// Distance on the line or on the unit circle.
[[nodiscard]] inline double domain_distance(double x, double y, Setting domain) {
    return domain == Setting::Periodic ? fold_half(x - y) : std::fabs(x - y);
}

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    [[nodiscard]] double length() const { return hi - lo; }
    friend bool operator==(const Interval&, const Interval&) = default;
};

/// Sorted disjoint closed intervals. On the circle every interval has
/// lo in [-1/2, 1/2) and lo <= hi <= lo + 1; hi > 1/2 marks the (at most one)
/// interval that wraps through +-1/2. The full circle is [-1/2, 1/2].
class IntervalSet {
public:
    explicit IntervalSet(Setting domain = Setting::RealLine) : domain_(domain) {}

    IntervalSet(Setting domain, std::vector<Interval> raw) : domain_(domain), intervals_(std::move(raw)) { canonicalize(); }

    [[nodiscard]] Setting domain() const { return domain_; }
    [[nodiscard]] const std::vector<Interval>& intervals() const { return intervals_; }
    [[nodiscard]] bool empty() const { return intervals_.empty(); }
    [[nodiscard]] std::size_t size() const { return intervals_.size(); }
    [[nodiscard]] bool wraps() const {
        return domain_ == Setting::Periodic && std::any_of(intervals_.begin(), intervals_.end(), [](const Interval& i) { return i.hi > 0.5; });
    }
    [[nodiscard]] bool full_circle() const { return domain_ == Setting::Periodic && intervals_.size() == 1 && intervals_[0].length() >= 1.0; }

    /// Closed-interval membership; on the circle x is taken modulo 1.
    [[nodiscard]] bool contains(double x) const {
        for (const auto& iv : intervals_) {
            if (domain_ == Setting::RealLine) {
                if (x >= iv.lo && x <= iv.hi) return true;
            } else {
                const double w = wrap_unit(x);
                for (double c : {w - 1.0, w, w + 1.0}) {
                    if (c >= iv.lo && c <= iv.hi) return true;
                }
            }
        }
        return false;
    }

    /// Distance from x to the set (0 inside).
    [[nodiscard]] double distance(double x) const {
        if (contains(x)) return 0.0;
        double best = std::numeric_limits<double>::infinity();
        for (const auto& iv : intervals_) {
            best = std::min({best, domain_distance(x, iv.lo, domain_), domain_distance(x, iv.hi, domain_)});
        }
        return best;
    }

    [[nodiscard]] double measure() const {
        double m = 0.0;
        for (const auto& iv : intervals_) m += iv.length();
        return m;
    }

    friend bool operator==(const IntervalSet&, const IntervalSet&) = default;

private:
    void canonicalize();

    Setting domain_;
    std::vector<Interval> intervals_;
};

inline void IntervalSet::canonicalize() {
    for (const auto& iv : intervals_) {
        if (!(iv.lo <= iv.hi) || !std::isfinite(iv.lo) || !std::isfinite(iv.hi)) throw std::invalid_argument("interval requires finite lo <= hi");
    }
    if (domain_ == Setting::Periodic) {
        for (auto& iv : intervals_) {
            if (iv.length() >= 1.0) {
                intervals_ = {Interval{-0.5, 0.5}};
                return;
            }
            const double len = iv.length();
            iv.lo            = wrap_unit(iv.lo);
            iv.hi            = iv.lo + len;
        }
    }
    std::sort(intervals_.begin(), intervals_.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo || (a.lo == b.lo && a.hi < b.hi); });
    std::vector<Interval> merged;
    for (const auto& iv : intervals_) {
        if (!merged.empty() && iv.lo <= merged.back().hi) {
            merged.back().hi = std::max(merged.back().hi, iv.hi);
        } else {
            merged.push_back(iv);
        }
    }
    if (domain_ == Setting::Periodic && !merged.empty()) {
        // the last interval may run past +1/2 into the first ones
        while (merged.size() > 1 && merged.back().hi >= merged.front().lo + 1.0) {
            merged.back().hi = std::max(merged.back().hi, merged.front().hi + 1.0);
            merged.erase(merged.begin());
        }
        if (merged.back().length() >= 1.0) merged = {Interval{-0.5, 0.5}};
    }
    intervals_ = std::move(merged);
}

/// Sorted point set; wrapped into [-1/2, 1/2) on the circle, duplicates within 1e-15 removed.
class PointSet {
public:
    explicit PointSet(Setting domain = Setting::RealLine) : domain_(domain) {}

    PointSet(Setting domain, std::vector<double> pts) : domain_(domain), points_(std::move(pts)) {
        for (double& p : points_) {
            if (!std::isfinite(p)) throw std::invalid_argument("point set requires finite coordinates");
            if (domain_ == Setting::Periodic) p = wrap_unit(p);
        }
        std::sort(points_.begin(), points_.end());
        points_.erase(std::unique(points_.begin(), points_.end(), [](double a, double b) { return b - a <= 1e-15; }), points_.end());
        if (domain_ == Setting::Periodic && points_.size() > 1 && points_.front() + 1.0 - points_.back() <= 1e-15) points_.pop_back();
    }

    [[nodiscard]] Setting domain() const { return domain_; }
    [[nodiscard]] const std::vector<double>& points() const { return points_; }
    [[nodiscard]] bool empty() const { return points_.empty(); }
    [[nodiscard]] std::size_t size() const { return points_.size(); }

private:
    Setting domain_;
    std::vector<double> points_;
};

[[nodiscard]] inline double dist_point_to_points(double x, const PointSet& P) {
    double best = std::numeric_limits<double>::infinity();
    for (double p : P.points()) best = std::min(best, domain_distance(x, p, P.domain()));
    return best;
}

/// One-sided deviation with a flag for the vacuous case of an empty estimate.
struct Deviation {
    double value = 0.0;
    bool vacuous = false;
};

/// Exact sup_{x in E} dist(x, P). dist(., P) is piecewise linear with maxima
/// only at interval endpoints or at midpoints between neighbouring points of P,
/// so it suffices to score those candidates.
[[nodiscard]] inline Deviation max_dev_set_to_points(const IntervalSet& E, const PointSet& P) {
    if (P.empty()) throw std::invalid_argument("max_dev_set_to_points requires a nonempty point set");
    if (E.empty()) return {0.0, true};
    const auto& pts = P.points();
    std::vector<double> candidates;
    for (const auto& iv : E.intervals()) {
        candidates.push_back(iv.lo);
        candidates.push_back(iv.hi);
    }
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double mid = 0.5 * (pts[i] + pts[i + 1]);
        if (E.contains(mid)) candidates.push_back(mid);
    }
    if (P.domain() == Setting::Periodic) {
        // gap across +-1/2; with a single point this is its antipode
        const double mid = 0.5 * (pts.back() + pts.front() + 1.0);
        if (E.contains(mid)) candidates.push_back(mid);
    }
    double best = 0.0;
    for (double c : candidates) best = std::max(best, dist_point_to_points(c, P));
    return {best, false};
}

/// max_{p in P} dist(p, E); +inf (flagged vacuous) when E is empty.
[[nodiscard]] inline Deviation max_dev_points_to_set(const PointSet& P, const IntervalSet& E) {
    if (E.empty()) return {std::numeric_limits<double>::infinity(), true};
    double best = 0.0;
    for (double p : P.points()) best = std::max(best, E.distance(p));
    return {best, false};
}

/// True iff every point lies in some closed interval of E.
[[nodiscard]] inline bool contains(const PointSet& P, const IntervalSet& E) {
    return std::all_of(P.points().begin(), P.points().end(), [&](double p) { return E.contains(p); });
}

} // namespace spikeloc

#endif
