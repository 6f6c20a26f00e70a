#ifndef DECOPATH_PATH_HPP
#define DECOPATH_PATH_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "decopath/common.hpp"

namespace decopath {

enum class SegmentMode { Step, Linear };

// Sampled cadlag path on a compact interval. Each grid segment (t_{i-1}, t_i]
// is either Step (value held left-constant, jump at the segment end) or
// Linear (affine, continuous). Immutable after construction.
class CadlagPath {
  public:
    CadlagPath(std::vector<double> times, Vec values, std::size_t dim,
               std::vector<SegmentMode> modes)
        : times_(std::move(times)), values_(std::move(values)), modes_(std::move(modes)), dim_(dim) {
        validate();
    }

    CadlagPath(std::vector<double> times, Vec values, std::size_t dim, SegmentMode mode)
        : times_(std::move(times)), values_(std::move(values)), dim_(dim) {
        modes_.assign(times_.empty() ? 0 : times_.size() - 1, mode);
        validate();
    }

    static CadlagPath scalar(std::vector<double> times, Vec values, SegmentMode mode) {
        return CadlagPath(std::move(times), std::move(values), 1, mode);
    }

    static CadlagPath constant(double a, double b, Vec value) {
        const std::size_t d = value.size();
        Vec vals(2 * d);
        std::copy(value.begin(), value.end(), vals.begin());
        std::copy(value.begin(), value.end(), vals.begin() + d);
        return CadlagPath({a, b}, std::move(vals), d, SegmentMode::Step);
    }

    // The identity path t |-> t on [a,b].
    static CadlagPath identity(double a, double b) {
        return scalar({a, b}, {a, b}, SegmentMode::Linear);
    }

    std::size_t dim() const { return dim_; }
    std::size_t grid_size() const { return times_.size(); }
    std::size_t segments() const { return modes_.size(); }
    double a() const { return times_.front(); }
    double b() const { return times_.back(); }
    const std::vector<double>& times() const { return times_; }
    const std::vector<SegmentMode>& modes() const { return modes_; }
    double time(std::size_t i) const { return times_[i]; }
    SegmentMode mode(std::size_t seg) const { return modes_[seg]; }
    const double* value_ptr(std::size_t i) const { return values_.data() + i * dim_; }

    Vec value(std::size_t i) const {
        return Vec(values_.begin() + static_cast<std::ptrdiff_t>(i * dim_),
                   values_.begin() + static_cast<std::ptrdiff_t>((i + 1) * dim_));
    }

    Vec front_value() const { return value(0); }
    Vec back_value() const { return value(grid_size() - 1); }

    Vec eval(double t) const {
        Vec out(dim_);
        eval_into(t, out.data());
        return out;
    }

    void eval_into(double t, double* out) const {
        check_domain(t);
        const std::size_t i = segment_of(t);
        if (t == times_[i + 1] || modes_[i] == SegmentMode::Step) {
            const std::size_t k = (t == times_[i + 1]) ? i + 1 : i;
            std::copy(value_ptr(k), value_ptr(k) + dim_, out);
            return;
        }
        interp(i, t, out);
    }

    Vec left_limit(double t) const {
        check_domain(t);
        if (t <= times_.front()) throw DomainError("left_limit requires t > a");
        const auto it = std::lower_bound(times_.begin(), times_.end(), t);
        Vec out(dim_);
        if (it != times_.end() && *it == t) {
            const std::size_t k = static_cast<std::size_t>(it - times_.begin());
            // Limit from below at a grid point is set by the incoming segment.
            const std::size_t src = (modes_[k - 1] == SegmentMode::Step) ? k - 1 : k;
            std::copy(value_ptr(src), value_ptr(src) + dim_, out.data());
            return out;
        }
        const std::size_t i = static_cast<std::size_t>(it - times_.begin()) - 1;
        if (modes_[i] == SegmentMode::Step) {
            std::copy(value_ptr(i), value_ptr(i) + dim_, out.data());
        } else {
            interp(i, t, out.data());
        }
        return out;
    }

    // Indices k >= 1 where eval jumps (incoming Step segment with a value change).
    std::vector<std::size_t> jump_indices(double tol = 0.0) const {
        std::vector<std::size_t> out;
        for (std::size_t k = 1; k < grid_size(); ++k) {
            if (modes_[k - 1] != SegmentMode::Step) continue;
            if (dist2(value_ptr(k - 1), value_ptr(k), dim_) > tol) out.push_back(k);
        }
        return out;
    }

    bool has_time_point(double t) const {
        return std::binary_search(times_.begin(), times_.end(), t);
    }

    // Same function represented on a grid refined to contain t.
    CadlagPath with_time_point(double t) const {
        check_domain(t);
        if (has_time_point(t)) return *this;
        const std::size_t i = segment_of(t);
        std::vector<double> ts(times_);
        ts.insert(ts.begin() + static_cast<std::ptrdiff_t>(i) + 1, t);
        Vec vals;
        vals.reserve(values_.size() + dim_);
        vals.insert(vals.end(), values_.begin(), values_.begin() + static_cast<std::ptrdiff_t>((i + 1) * dim_));
        Vec mid(dim_);
        if (modes_[i] == SegmentMode::Step) {
            std::copy(value_ptr(i), value_ptr(i) + dim_, mid.data());
        } else {
            interp(i, t, mid.data());
        }
        vals.insert(vals.end(), mid.begin(), mid.end());
        vals.insert(vals.end(), values_.begin() + static_cast<std::ptrdiff_t>((i + 1) * dim_), values_.end());
        std::vector<SegmentMode> ms(modes_);
        ms.insert(ms.begin() + static_cast<std::ptrdiff_t>(i), modes_[i]);
        return CadlagPath(std::move(ts), std::move(vals), dim_, std::move(ms));
    }

    // Restriction to [u, v] (grid refined to include the endpoints).
    CadlagPath restrict(double u, double v) const {
        if (!(u < v)) throw ParameterError("restrict: need u < v");
        CadlagPath p = with_time_point(u).with_time_point(v);
        const auto lo = std::lower_bound(p.times_.begin(), p.times_.end(), u) - p.times_.begin();
        const auto hi = std::lower_bound(p.times_.begin(), p.times_.end(), v) - p.times_.begin();
        std::vector<double> ts(p.times_.begin() + lo, p.times_.begin() + hi + 1);
        Vec vals(p.values_.begin() + lo * static_cast<std::ptrdiff_t>(dim_),
                 p.values_.begin() + (hi + 1) * static_cast<std::ptrdiff_t>(dim_));
        std::vector<SegmentMode> ms(p.modes_.begin() + lo, p.modes_.begin() + hi);
        return CadlagPath(std::move(ts), std::move(vals), dim_, std::move(ms));
    }

    // Affine time map t |-> c0 + c1 * t (c1 > 0) applied to the grid.
    CadlagPath time_affine(double c0, double c1) const {
        if (!(c1 > 0.0)) throw ParameterError("time_affine: slope must be positive");
        std::vector<double> ts(times_.size());
        for (std::size_t i = 0; i < ts.size(); ++i) ts[i] = c0 + c1 * times_[i];
        return CadlagPath(std::move(ts), values_, dim_, modes_);
    }

    // Coordinate projection.
    CadlagPath component(std::size_t j) const {
        if (j >= dim_) throw ShapeError("component index out of range");
        Vec vals(grid_size());
        for (std::size_t i = 0; i < grid_size(); ++i) vals[i] = values_[i * dim_ + j];
        return CadlagPath(times_, std::move(vals), 1, modes_);
    }

    Vec raw_values() const { return values_; }

  private:
    void validate() const {
        if (times_.size() < 2) throw ParameterError("path needs at least two grid times");
        if (dim_ < 1) throw ShapeError("dimension must be >= 1");
        if (values_.size() != times_.size() * dim_) throw ShapeError("values/grid size mismatch");
        if (modes_.size() + 1 != times_.size()) throw ShapeError("modes/grid size mismatch");
        for (std::size_t i = 1; i < times_.size(); ++i)
            if (!(times_[i] > times_[i - 1])) throw ParameterError("grid times must be strictly increasing");
        for (double v : values_)
            if (!std::isfinite(v)) throw ParameterError("path values must be finite");
    }

    void check_domain(double t) const {
        if (!(t >= times_.front() && t <= times_.back())) throw DomainError("time outside path domain");
    }

    // Segment index i with times_[i] <= t < times_[i+1] (last segment for t == b).
    std::size_t segment_of(double t) const {
        const auto it = std::upper_bound(times_.begin(), times_.end(), t);
        std::size_t i = static_cast<std::size_t>(it - times_.begin());
        if (i == times_.size()) return times_.size() - 2;
        return i - 1;
    }

    void interp(std::size_t i, double t, double* out) const {
        const double w = (t - times_[i]) / (times_[i + 1] - times_[i]);
        const double* lo = value_ptr(i);
        const double* hi = value_ptr(i + 1);
        for (std::size_t j = 0; j < dim_; ++j) out[j] = lo[j] + w * (hi[j] - lo[j]);
    }

    std::vector<double> times_;
    Vec values_;
    std::vector<SegmentMode> modes_;
    std::size_t dim_;
};

// Continuous nondecreasing piecewise-linear map (flat pieces allowed).
struct PiecewiseLinearMap {
    std::vector<double> x, y;

    PiecewiseLinearMap() = default;
    PiecewiseLinearMap(std::vector<double> xs, std::vector<double> ys) : x(std::move(xs)), y(std::move(ys)) {
        if (x.size() != y.size() || x.size() < 2) throw ShapeError("map needs matching breakpoints");
        for (std::size_t i = 1; i < x.size(); ++i) {
            if (!(x[i] > x[i - 1])) throw ParameterError("map breakpoints must increase");
            if (y[i] < y[i - 1]) throw ParameterError("map must be nondecreasing");
        }
    }

    double operator()(double t) const {
        if (t <= x.front()) return y.front();
        if (t >= x.back()) return y.back();
        const auto it = std::upper_bound(x.begin(), x.end(), t);
        const std::size_t i = static_cast<std::size_t>(it - x.begin()) - 1;
        const double w = (t - x[i]) / (x[i + 1] - x[i]);
        return y[i] + w * (y[i + 1] - y[i]);
    }

    bool strictly_increasing() const {
        for (std::size_t i = 1; i < y.size(); ++i)
            if (!(y[i] > y[i - 1])) return false;
        return true;
    }

    double discrepancy() const {
        double m = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(y[i] - x[i]));
        return m;
    }
};

// Continuous increasing bijection between two intervals.
struct TimeChange : PiecewiseLinearMap {
    TimeChange(std::vector<double> xs, std::vector<double> ys) : PiecewiseLinearMap(std::move(xs), std::move(ys)) {
        if (!strictly_increasing()) throw ParameterError("time change must be strictly increasing");
    }

    static TimeChange affine(double a, double b, double c, double d) {
        return TimeChange({a, b}, {c, d});
    }

    TimeChange inverse() const { return TimeChange(y, x); }
};

// h composed with a time change rho: (h o rho)(t) = h(rho(t)). The result's
// grid is the union of rho's breakpoints and the preimages of h's grid, so
// segment modes carry over exactly.
inline CadlagPath time_change(const CadlagPath& h, const TimeChange& rho) {
    if (std::abs(rho.y.front() - h.a()) > 1e-12 || std::abs(rho.y.back() - h.b()) > 1e-12)
        throw ParameterError("time change range must equal path domain");
    const TimeChange inv = rho.inverse();
    std::vector<double> ts(rho.x);
    for (double t : h.times()) ts.push_back(inv(t));
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end(),
                         [](double p, double q) { return std::abs(p - q) < 1e-15; }),
             ts.end());
    ts.front() = rho.x.front();
    ts.back() = rho.x.back();

    const std::size_t d = h.dim();
    Vec vals(ts.size() * d);
    std::vector<SegmentMode> ms(ts.size() - 1);
    for (std::size_t i = 0; i < ts.size(); ++i) {
        double u = std::min(std::max(rho(ts[i]), h.a()), h.b());
        h.eval_into(u, vals.data() + i * d);
    }
    for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
        const double mid = std::min(std::max(rho(0.5 * (ts[i] + ts[i + 1])), h.a()), h.b());
        const auto& times = h.times();
        const auto it = std::upper_bound(times.begin(), times.end(), mid);
        std::size_t seg = (it == times.end()) ? h.segments() - 1
                                              : static_cast<std::size_t>(it - times.begin()) - 1;
        ms[i] = h.mode(seg);
    }
    return CadlagPath(std::move(ts), std::move(vals), d, std::move(ms));
}

// Exact uniform distance. Both paths are affine between points of the union
// grid, so the supremum is attained among grid values and left limits.
inline double sup_dist(const CadlagPath& h1, const CadlagPath& h2) {
    if (h1.dim() != h2.dim()) throw ShapeError("sup_dist: dimension mismatch");
    if (std::abs(h1.a() - h2.a()) > 1e-12 || std::abs(h1.b() - h2.b()) > 1e-12)
        throw ShapeError("sup_dist: domain mismatch");
    std::vector<double> grid(h1.times());
    grid.insert(grid.end(), h2.times().begin(), h2.times().end());
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    const std::size_t d = h1.dim();
    Vec a(d), b(d);
    double m = 0.0;
    for (double t : grid) {
        const double tc = std::min(std::max(t, h1.a()), h1.b());
        h1.eval_into(std::min(std::max(tc, h1.a()), h1.b()), a.data());
        h2.eval_into(std::min(std::max(tc, h2.a()), h2.b()), b.data());
        m = std::max(m, dist2(a.data(), b.data(), d));
        if (t > grid.front()) {
            Vec la = h1.left_limit(std::min(std::max(tc, h1.a()), h1.b()));
            Vec lb = h2.left_limit(std::min(std::max(tc, h2.a()), h2.b()));
            m = std::max(m, dist2(la.data(), lb.data(), d));
        }
    }
    return m;
}

}  // namespace decopath

#endif
