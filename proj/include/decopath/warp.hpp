#ifndef DECOPATH_WARP_HPP
#define DECOPATH_WARP_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "decopath/common.hpp"
#include "decopath/path.hpp"
#include "decopath/pvar.hpp"

namespace decopath {

// Vertex sequence of a path viewed as a curve in (time, value) space.
// Affine pieces are subdivided to the requested resolution; a jump appears as
// two consecutive vertices at the same time (a "jump edge"). Interpolation
// between matched vertices is affine on every non-jump edge, so minimax costs
// over vertex matchings certify upper bounds for the continuous infima.
struct WarpCurve {
    std::vector<double> t;
    Vec v;  // flattened, dim per vertex
    std::size_t dim = 1;

    std::size_t size() const { return t.size(); }
    const double* value(std::size_t i) const { return v.data() + i * dim; }
    bool jump_edge(std::size_t i) const { return t[i + 1] == t[i]; }

    double max_edge_value_norm() const {
        double m = 0.0;
        for (std::size_t i = 0; i + 1 < t.size(); ++i)
            if (!jump_edge(i)) m = std::max(m, dist2(value(i), value(i + 1), dim));
        return m;
    }
};

inline WarpCurve build_warp_curve(const CadlagPath& h, int resolution) {
    if (resolution < 2) throw ParameterError("warp resolution must be >= 2");
    WarpCurve c;
    c.dim = h.dim();
    const double span = h.b() - h.a();
    const double target = span / resolution;

    auto push = [&](double t, const double* val) {
        if (!c.t.empty() && c.t.back() == t &&
            std::equal(val, val + c.dim, c.v.end() - static_cast<std::ptrdiff_t>(c.dim)))
            return;
        c.t.push_back(t);
        c.v.insert(c.v.end(), val, val + c.dim);
    };

    push(h.time(0), h.value_ptr(0));
    Vec tmp(c.dim);
    for (std::size_t seg = 0; seg < h.segments(); ++seg) {
        const double t0 = h.time(seg), t1 = h.time(seg + 1);
        const int pieces = std::max(1, static_cast<int>(std::ceil((t1 - t0) / target)));
        const double* lo = h.value_ptr(seg);
        const double* hi = h.value_ptr(seg + 1);
        if (h.mode(seg) == SegmentMode::Step) {
            for (int k = 1; k <= pieces; ++k) push(t0 + (t1 - t0) * k / pieces, lo);
            push(t1, hi);  // jump edge when hi != lo
        } else {
            for (int k = 1; k <= pieces; ++k) {
                const double w = static_cast<double>(k) / pieces;
                for (std::size_t j = 0; j < c.dim; ++j) tmp[j] = lo[j] + w * (hi[j] - lo[j]);
                push(t0 + (t1 - t0) * k / pieces, tmp.data());
            }
        }
    }
    return c;
}

// One matched traversal of two curves: index pairs, monotone in both.
using WarpMatching = std::vector<std::pair<std::uint32_t, std::uint32_t>>;

struct WarpResult {
    double value = 0.0;
    WarpMatching matching;
};

// Minimax dynamic program over monotone vertex matchings. Cell cost is
// max(|value gap|, |time gap|) (time dropped for the Frechet variant).
// A diagonal move may pair two jump edges or two continuous edges, never one
// of each: traversing a jump simultaneously with continuous motion is not
// realizable by a time change.
inline WarpResult warp_dp(const WarpCurve& A, const WarpCurve& B, bool use_time,
                          bool want_matching = false) {
    if (A.dim != B.dim) throw ShapeError("warp_dp: dimension mismatch");
    const std::size_t R = A.size(), C = B.size();
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dp(R * C, inf);

    auto cost = [&](std::size_t i, std::size_t j) {
        double g = dist2(A.value(i), B.value(j), A.dim);
        if (use_time) g = std::max(g, std::abs(A.t[i] - B.t[j]));
        return g;
    };
    auto diag_ok = [&](std::size_t i, std::size_t j) {
        return A.jump_edge(i - 1) == B.jump_edge(j - 1);
    };

    dp[0] = cost(0, 0);
    for (std::size_t j = 1; j < C; ++j) dp[j] = std::max(dp[j - 1], cost(0, j));
    for (std::size_t i = 1; i < R; ++i) {
        dp[i * C] = std::max(dp[(i - 1) * C], cost(i, 0));
        for (std::size_t j = 1; j < C; ++j) {
            double pred = std::min(dp[(i - 1) * C + j], dp[i * C + j - 1]);
            if (diag_ok(i, j)) pred = std::min(pred, dp[(i - 1) * C + j - 1]);
            dp[i * C + j] = std::max(pred, cost(i, j));
        }
    }

    WarpResult res;
    res.value = dp[R * C - 1];
    if (want_matching) {
        res.matching.reserve(R + C);
        std::size_t i = R - 1, j = C - 1;
        res.matching.emplace_back(i, j);
        while (i > 0 || j > 0) {
            // Ties broken toward the predecessor with smaller time discrepancy.
            double best = inf;
            int choice = -1;  // 0 diag, 1 up, 2 left
            double best_tgap = inf;
            auto consider = [&](std::size_t pi, std::size_t pj, int ch) {
                const double val = dp[pi * C + pj];
                const double tgap = std::abs(A.t[pi] - B.t[pj]);
                if (val < best - 1e-300 || (val <= best && tgap < best_tgap)) {
                    best = val;
                    best_tgap = tgap;
                    choice = ch;
                }
            };
            if (i > 0 && j > 0 && diag_ok(i, j)) consider(i - 1, j - 1, 0);
            if (i > 0) consider(i - 1, j, 1);
            if (j > 0) consider(i, j - 1, 2);
            if (choice == 0) {
                --i;
                --j;
            } else if (choice == 1) {
                --i;
            } else {
                --j;
            }
            res.matching.emplace_back(i, j);
        }
        std::reverse(res.matching.begin(), res.matching.end());
    }
    return res;
}

namespace detail {

inline void check_compatible(const CadlagPath& h1, const CadlagPath& h2) {
    if (h1.dim() != h2.dim()) throw ShapeError("dimension mismatch");
    if (std::abs(h1.a() - h2.a()) > 1e-12 || std::abs(h1.b() - h2.b()) > 1e-12)
        throw ShapeError("domain mismatch");
}

}  // namespace detail

struct J1Report {
    double value = 0.0;      // certified upper bound on sigma_infinity
    double sup_bound = 0.0;  // unwarped uniform distance (rho = Id ceiling)
    double tolerance = 0.0;  // refinement slack of the vertex discretisation
};

inline J1Report j1_report(const CadlagPath& h1, const CadlagPath& h2, int resolution = 128) {
    detail::check_compatible(h1, h2);
    const WarpCurve a = build_warp_curve(h1, resolution);
    const WarpCurve b = build_warp_curve(h2, resolution);
    J1Report rep;
    rep.value = warp_dp(a, b, true).value;
    rep.sup_bound = sup_dist(h1, h2);
    rep.tolerance = a.max_edge_value_norm() + b.max_edge_value_norm() +
                    (h1.b() - h1.a()) * 2.0 / resolution;
    return rep;
}

// Upper bound on the Skorokhod J1 distance, non-increasing under grid
// refinement (resolution doubling).
inline double j1_dist(const CadlagPath& h1, const CadlagPath& h2, int resolution = 128) {
    return j1_report(h1, h2, resolution).value;
}

// Upper bound on the Frechet distance between the curves traced by h1 and h2;
// domains may differ.
inline double frechet_dist(const CadlagPath& h1, const CadlagPath& h2, int resolution = 128) {
    if (h1.dim() != h2.dim()) throw ShapeError("frechet_dist: dimension mismatch");
    const WarpCurve a = build_warp_curve(h1, resolution);
    const WarpCurve b = build_warp_curve(h2, resolution);
    return warp_dp(a, b, false).value;
}

namespace detail {

// Evaluate max(disc rho, ||h1 o rho - h2||_pvar) along one matched traversal.
// Mixed steps (jump on one curve while the other moves over a positive-length
// edge) are expanded into two moves so every evaluated traversal is realizable
// as a limit of time changes; the result is a certified upper bound.
inline double matching_sigma_pvar(const WarpCurve& A, const WarpCurve& B,
                                  const WarpMatching& match, double p) {
    const std::size_t d = A.dim;
    Vec diffs;
    diffs.reserve(match.size() * d);
    double disc = 0.0;
    auto push_pair = [&](std::size_t i, std::size_t j) {
        disc = std::max(disc, std::abs(A.t[i] - B.t[j]));
        const double* av = A.value(i);
        const double* bv = B.value(j);
        for (std::size_t c = 0; c < d; ++c) diffs.push_back(av[c] - bv[c]);
    };
    push_pair(match[0].first, match[0].second);
    for (std::size_t k = 1; k < match.size(); ++k) {
        const auto [pi, pj] = match[k - 1];
        const auto [i, j] = match[k];
        if (i > pi && j > pj) {
            const bool ja = A.jump_edge(pi), jb = B.jump_edge(pj);
            if (ja != jb) {
                // split: advance the jumping curve first
                if (ja)
                    push_pair(i, pj);
                else
                    push_pair(pi, j);
            }
        }
        push_pair(i, j);
    }
    const double base = norm2(diffs.data(), d);
    const double pv = pvar_sequence(diffs, d, p);
    return std::max(disc, base + pv);
}

// Straight-through matching approximating rho = Id: advance whichever curve
// has the earlier next vertex time.
inline WarpMatching identity_matching(const WarpCurve& A, const WarpCurve& B) {
    WarpMatching m;
    std::size_t i = 0, j = 0;
    m.emplace_back(i, j);
    while (i + 1 < A.size() || j + 1 < B.size()) {
        const bool canA = i + 1 < A.size();
        const bool canB = j + 1 < B.size();
        if (canA && canB) {
            if (A.t[i + 1] < B.t[j + 1])
                ++i;
            else if (B.t[j + 1] < A.t[i + 1])
                ++j;
            else {
                ++i;
                ++j;
            }
        } else if (canA) {
            ++i;
        } else {
            ++j;
        }
        m.emplace_back(i, j);
    }
    return m;
}

}  // namespace detail

// Upper bound on sigma_{p-var}: the Skorokhod p-variation distance
// inf_rho max(disc rho, ||h1 o rho - h2||_pvar). Candidate warps are the
// J1-optimal matching and the identity; each evaluation is feasible, so the
// minimum is a certified bound.
inline double sigma_pvar(const CadlagPath& h1, const CadlagPath& h2, double p,
                         int resolution = 128) {
    detail::check_compatible(h1, h2);
    if (p < 1.0) throw ParameterError("sigma_pvar requires p >= 1");
    const WarpCurve a = build_warp_curve(h1, resolution);
    const WarpCurve b = build_warp_curve(h2, resolution);
    const WarpResult j1 = warp_dp(a, b, true, true);
    double best = detail::matching_sigma_pvar(a, b, j1.matching, p);
    best = std::min(best, detail::matching_sigma_pvar(a, b, detail::identity_matching(a, b), p));
    return best;
}

}  // namespace decopath

#endif
