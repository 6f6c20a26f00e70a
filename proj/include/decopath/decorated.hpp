#ifndef DECOPATH_DECORATED_HPP
#define DECOPATH_DECORATED_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "decopath/common.hpp"
#include "decopath/path.hpp"
#include "decopath/pvar.hpp"
#include "decopath/warp.hpp"

namespace decopath {

// Excursion attached at a skeleton time. The excursion lives on [0,1] and its
// endpoint equals the skeleton value at t; excursions whose start differs from
// the skeleton left limit are legal but flagged (they fall outside the
// endpoint-continuous subclass).
struct Decoration {
    double t;
    CadlagPath excursion;
};

class DecoratedPath {
  public:
    DecoratedPath(CadlagPath skeleton, std::vector<Decoration> decorations)
        : skeleton_(std::move(skeleton)), decorations_(std::move(decorations)) {
        std::sort(decorations_.begin(), decorations_.end(),
                  [](const Decoration& x, const Decoration& y) { return x.t < y.t; });
        for (std::size_t i = 1; i < decorations_.size(); ++i)
            if (!(decorations_[i].t > decorations_[i - 1].t))
                throw ParameterError("decoration times must be distinct");
        for (const Decoration& dec : decorations_) {
            if (dec.excursion.dim() != skeleton_.dim())
                throw ShapeError("excursion dimension mismatch");
            if (std::abs(dec.excursion.a()) > 1e-12 || std::abs(dec.excursion.b() - 1.0) > 1e-12)
                throw ParameterError("excursions live on [0,1]");
            if (!(dec.t >= skeleton_.a() && dec.t <= skeleton_.b()))
                throw DomainError("decoration time outside skeleton domain");
            skeleton_ = skeleton_.with_time_point(dec.t);
        }
        endpoint_continuous_.reserve(decorations_.size());
        for (const Decoration& dec : decorations_) {
            const Vec end = dec.excursion.back_value();
            const Vec skel = skeleton_.eval(dec.t);
            if (dist2(end.data(), skel.data(), end.size()) > 1e-9)
                throw ContractError("excursion endpoint must match skeleton value");
            bool cont = true;
            if (dec.t > skeleton_.a()) {
                const Vec start = dec.excursion.front_value();
                const Vec lim = skeleton_.left_limit(dec.t);
                cont = dist2(start.data(), lim.data(), start.size()) <= 1e-9;
            }
            endpoint_continuous_.push_back(cont);
        }
    }

    const CadlagPath& skeleton() const { return skeleton_; }
    const std::vector<Decoration>& decorations() const { return decorations_; }
    std::size_t dim() const { return skeleton_.dim(); }
    double a() const { return skeleton_.a(); }
    double b() const { return skeleton_.b(); }
    bool endpoint_continuous(std::size_t j) const { return endpoint_continuous_[j]; }
    bool endpoint_continuous() const {
        return std::all_of(endpoint_continuous_.begin(), endpoint_continuous_.end(),
                           [](bool f) { return f; });
    }

  private:
    CadlagPath skeleton_;
    std::vector<Decoration> decorations_;
    std::vector<bool> endpoint_continuous_;
};

// Trivial lift: one step excursion per jump, holding h(t^-) and jumping to
// h(t) at the end. This is the canonical representative of iota(h).
inline DecoratedPath trivial_lift(const CadlagPath& h) {
    std::vector<Decoration> decs;
    for (std::size_t k : h.jump_indices()) {
        Vec vals = h.value(k - 1);
        const Vec v1 = h.value(k);
        vals.insert(vals.end(), v1.begin(), v1.end());
        decs.push_back({h.time(k), CadlagPath({0.0, 1.0}, std::move(vals), h.dim(), SegmentMode::Step)});
    }
    return DecoratedPath(h, std::move(decs));
}

// Linear lift: the M1-type embedding, joining h(t^-) to h(t) affinely.
inline DecoratedPath linear_lift(const CadlagPath& h) {
    std::vector<Decoration> decs;
    for (std::size_t k : h.jump_indices()) {
        Vec vals = h.value(k - 1);
        const Vec v1 = h.value(k);
        vals.insert(vals.end(), v1.begin(), v1.end());
        decs.push_back({h.time(k), CadlagPath({0.0, 1.0}, std::move(vals), h.dim(), SegmentMode::Linear)});
    }
    return DecoratedPath(h, std::move(decs));
}

struct FictitiousInterval {
    std::size_t decoration;  // index into the decorated path's list
    double t;                // decoration time on the base interval
    double lo, hi;           // the inserted interval [tau(t^-), tau(t)]
};

// A delta-extension: the cadlag path on [a, b+delta] obtained by inserting a
// fictitious interval of length delta 2^{-j}/r after the j-th decoration and
// playing the excursion there, plus the time change bookkeeping.
struct Extension {
    CadlagPath extended;
    double delta = 0.0;
    double base_a = 0.0, base_b = 0.0;
    std::vector<FictitiousInterval> ledger;
    PiecewiseLinearMap tau_inv;  // continuous left inverse of tau_delta

    double tau(double t) const {
        double s = t;
        for (const auto& f : ledger)
            if (f.t <= t) s += f.hi - f.lo;
        return s;
    }

    double tau_left(double t) const {
        double s = t;
        for (const auto& f : ledger)
            if (f.t < t) s += f.hi - f.lo;
        return s;
    }

    // The extended time component of (iota Id, phi): slope one off the
    // fictitious intervals and frozen on them.
    CadlagPath tau_inv_path() const {
        return CadlagPath(tau_inv.x, Vec(tau_inv.y), 1, SegmentMode::Linear);
    }
};

inline Extension delta_extension(const DecoratedPath& phi, double delta) {
    if (!(delta > 0.0)) throw ParameterError("delta_extension requires delta > 0");
    const CadlagPath& skel = phi.skeleton();
    const std::size_t d = phi.dim();
    const std::size_t kappa = phi.decorations().size();

    Extension ext;
    ext.delta = delta;
    ext.base_a = skel.a();
    ext.base_b = skel.b();

    std::vector<double> ts;
    Vec vals;
    std::vector<SegmentMode> modes;
    auto push = [&](double t, const double* v, std::optional<SegmentMode> inc) {
        if (!ts.empty()) {
            if (t == ts.back() && std::equal(v, v + d, vals.end() - static_cast<std::ptrdiff_t>(d)))
                return;
            modes.push_back(*inc);
        }
        ts.push_back(t);
        vals.insert(vals.end(), v, v + d);
    };

    if (kappa == 0) {
        for (std::size_t i = 0; i < skel.grid_size(); ++i)
            push(skel.time(i), skel.value_ptr(i), i ? std::optional(skel.mode(i - 1)) : std::nullopt);
        push(skel.b() + delta, skel.value_ptr(skel.grid_size() - 1), SegmentMode::Step);
    } else {
        const double r = 1.0 - std::ldexp(1.0, -static_cast<int>(kappa));
        std::size_t j = 0;  // next decoration
        double cum = 0.0;
        for (std::size_t i = 0; i < skel.grid_size(); ++i) {
            const double t = skel.time(i);
            std::optional<SegmentMode> inc = i ? std::optional(skel.mode(i - 1)) : std::nullopt;
            if (j < kappa && phi.decorations()[j].t == t) {
                const CadlagPath& exc = phi.decorations()[j].excursion;
                const double len = delta * std::ldexp(1.0, -static_cast<int>(j) - 1) / r;
                const double lo = t + cum;
                if (i > 0 && skel.mode(i - 1) == SegmentMode::Linear && !phi.endpoint_continuous(j))
                    throw ContractError(
                        "endpoint-discontinuous excursion after a linear segment is not representable");
                for (std::size_t q = 0; q < exc.grid_size(); ++q) {
                    const double u = (q + 1 == exc.grid_size()) ? lo + len : lo + exc.time(q) * len;
                    push(u, exc.value_ptr(q), q ? std::optional(exc.mode(q - 1)) : inc);
                }
                ext.ledger.push_back({j, t, lo, lo + len});
                cum += len;
                ++j;
            } else {
                push(t + cum, skel.value_ptr(i), inc);
            }
        }
    }
    ext.extended = CadlagPath(std::move(ts), std::move(vals), d, std::move(modes));

    // tau_inv breakpoints: slope one outside the ledger intervals, flat inside.
    std::vector<double> xs{ext.extended.a()};
    std::vector<double> ys{ext.base_a};
    for (const auto& f : ext.ledger) {
        xs.push_back(f.lo);
        ys.push_back(f.t);
        xs.push_back(f.hi);
        ys.push_back(f.t);
    }
    if (xs.back() < ext.extended.b()) {
        xs.push_back(ext.extended.b());
        ys.push_back(ext.base_b);
    }
    ext.tau_inv = PiecewiseLinearMap(std::move(xs), std::move(ys));
    return ext;
}

// Inverse of delta_extension up to equivalence: each ledger interval becomes
// an excursion rescaled to [0,1]; everything else maps back to the base
// interval. Works for any path sharing the ledger's grid (in particular the
// solved path of a decorated ODE).
inline DecoratedPath collapse(const CadlagPath& extended,
                              const std::vector<FictitiousInterval>& ledger, double base_a,
                              double base_b) {
    const std::size_t d = extended.dim();
    std::vector<double> sts;
    Vec svals;
    std::vector<SegmentMode> smodes;
    std::vector<Decoration> decs;

    std::size_t j = 0;
    double cum = 0.0;
    std::vector<double> ets;
    Vec evals;
    std::vector<SegmentMode> emodes;
    bool in_exc = false;

    auto skel_push = [&](double t, const double* v, std::optional<SegmentMode> inc) {
        if (!sts.empty()) {
            if (t <= sts.back()) return;  // collapsed interval boundary revisit
            smodes.push_back(*inc);
        }
        sts.push_back(t);
        svals.insert(svals.end(), v, v + d);
    };

    for (std::size_t i = 0; i < extended.grid_size(); ++i) {
        const double u = extended.time(i);
        std::optional<SegmentMode> inc = i ? std::optional(extended.mode(i - 1)) : std::nullopt;
        if (j < ledger.size() && in_exc) {
            const auto& f = ledger[j];
            const double s = std::min((u - f.lo) / (f.hi - f.lo), 1.0);
            ets.push_back(s);
            evals.insert(evals.end(), extended.value_ptr(i), extended.value_ptr(i) + d);
            emodes.push_back(*inc);
            if (u >= f.hi) {
                ets.front() = 0.0;
                ets.back() = 1.0;
                emodes.erase(emodes.begin());
                decs.push_back({f.t, CadlagPath(std::move(ets), std::move(evals), d, std::move(emodes))});
                ets.clear();
                evals.clear();
                emodes.clear();
                in_exc = false;
                cum += f.hi - f.lo;
                ++j;
                skel_push(f.t, extended.value_ptr(i), inc);
            }
            continue;
        }
        if (j < ledger.size() && u >= ledger[j].lo) {
            // entering a fictitious interval
            in_exc = true;
            ets.push_back(0.0);
            evals.insert(evals.end(), extended.value_ptr(i), extended.value_ptr(i) + d);
            emodes.push_back(inc.value_or(SegmentMode::Step));
            // skeleton left side keeps the incoming segment; the decoration
            // time sample is pushed at interval exit
            continue;
        }
        skel_push(u - cum, extended.value_ptr(i), inc);
    }
    if (std::abs(sts.back() - base_b) < 1e-9) sts.back() = base_b;
    sts.front() = base_a;
    CadlagPath skel(std::move(sts), std::move(svals), d, std::move(smodes));
    return DecoratedPath(std::move(skel), std::move(decs));
}

inline DecoratedPath collapse(const Extension& ext) {
    if (ext.ledger.empty() && ext.extended.b() <= ext.base_b)
        throw ContractError("collapse requires an extension ledger");
    CadlagPath body = ext.ledger.empty() || ext.extended.b() > ext.ledger.back().hi
                          ? ext.extended.restrict(ext.extended.a(), ext.base_b + ext.delta)
                          : ext.extended;
    if (ext.ledger.empty()) {
        // pure tail extension: drop the constant tail
        return trivial_lift(ext.extended.restrict(ext.base_a, ext.base_b));
    }
    return collapse(ext.extended, ext.ledger, ext.base_a, ext.base_b);
}

struct MetricBound {
    double value = 0.0;
    double bias_bound = 0.0;  // certified |value - limit| contribution of delta
};

// alpha_infinity: J1 distance of the delta-extensions. The delta bias is at
// most 2*delta, from |sigma(delta2) - sigma(delta1)| <= 2(delta2 - delta1).
inline MetricBound alpha_inf(const DecoratedPath& p1, const DecoratedPath& p2, double delta = 0.01,
                             int resolution = 128) {
    if (p1.dim() != p2.dim()) throw ShapeError("alpha_inf: dimension mismatch");
    const Extension e1 = delta_extension(p1, delta);
    const Extension e2 = delta_extension(p2, delta);
    return {j1_dist(e1.extended, e2.extended, resolution), 2.0 * delta};
}

inline MetricBound alpha_pvar(const DecoratedPath& p1, const DecoratedPath& p2, double p,
                              double delta = 0.01, int resolution = 128) {
    if (p1.dim() != p2.dim()) throw ShapeError("alpha_pvar: dimension mismatch");
    const Extension e1 = delta_extension(p1, delta);
    const Extension e2 = delta_extension(p2, delta);
    return {sigma_pvar(e1.extended, e2.extended, p, resolution), 2.0 * delta};
}

// |phi|_pvar = |phi^delta|_pvar, independent of delta.
inline double pvar_decorated(const DecoratedPath& phi, double p) {
    const double delta = 0.5 * (phi.b() - phi.a());
    return p_variation(delta_extension(phi, delta).extended, p);
}

// Canonical representative: each all-linear excursion resampled proportionally
// to arc length on a fixed grid, making equivalence-class comparisons
// deterministic.
inline CadlagPath canonical_excursion(const CadlagPath& exc, std::size_t n = 257) {
    for (SegmentMode m : exc.modes())
        if (m != SegmentMode::Linear)
            throw ContractError("canonical resampling is defined for linear excursions");
    const std::size_t d = exc.dim();
    std::vector<double> cum(exc.grid_size(), 0.0);
    for (std::size_t i = 1; i < exc.grid_size(); ++i)
        cum[i] = cum[i - 1] + dist2(exc.value_ptr(i - 1), exc.value_ptr(i), d);
    const double total = cum.back();
    std::vector<double> ts(n);
    Vec vals(n * d);
    for (std::size_t k = 0; k < n; ++k) {
        ts[k] = static_cast<double>(k) / (n - 1);
        if (total <= 0.0) {
            std::copy(exc.value_ptr(0), exc.value_ptr(0) + d, vals.begin() + static_cast<std::ptrdiff_t>(k * d));
            continue;
        }
        const double target = ts[k] * total;
        const auto it = std::lower_bound(cum.begin(), cum.end(), target);
        std::size_t i = static_cast<std::size_t>(it - cum.begin());
        if (i == 0) i = 1;
        const double w = (cum[i] > cum[i - 1]) ? (target - cum[i - 1]) / (cum[i] - cum[i - 1]) : 1.0;
        for (std::size_t c = 0; c < d; ++c)
            vals[k * d + c] =
                exc.value_ptr(i - 1)[c] + w * (exc.value_ptr(i)[c] - exc.value_ptr(i - 1)[c]);
    }
    return CadlagPath(std::move(ts), std::move(vals), d, SegmentMode::Linear);
}

}  // namespace decopath

#endif
