#ifndef DECOPATH_PVAR_HPP
#define DECOPATH_PVAR_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "decopath/common.hpp"
#include "decopath/path.hpp"

namespace decopath {

inline bool is_infinite_p(double p) { return std::isinf(p); }

// Exact p-variation of the polyline through the given points, as the sup over
// partitions of sum |x_{i_j} - x_{i_{j-1}}|^p. Interior points of affine
// segments never enter an optimal partition for p >= 1 (|.|^p is convex), so
// evaluating on vertices is exact for Step/Linear paths.
//
// DP over predecessors with a prefix bound: candidates cheaper than the
// running best against the prefix bounding box are skipped wholesale.
inline double pvar_power_sum(const double* xs, std::size_t n, std::size_t d, double p) {
    if (n < 2) return 0.0;
    std::vector<double> v(n, 0.0);       // best partition sum ending exactly at i
    std::vector<double> vmax(n, 0.0);    // prefix max of v
    std::vector<double> lo(d), hi(d);    // prefix bounding box
    std::vector<double> boxlo(n * d), boxhi(n * d);
    for (std::size_t c = 0; c < d; ++c) lo[c] = hi[c] = xs[c];
    std::copy(lo.begin(), lo.end(), boxlo.begin());
    std::copy(hi.begin(), hi.end(), boxhi.begin());
    for (std::size_t i = 1; i < n; ++i) {
        for (std::size_t c = 0; c < d; ++c) {
            lo[c] = std::min(lo[c], xs[i * d + c]);
            hi[c] = std::max(hi[c], xs[i * d + c]);
        }
        std::copy(lo.begin(), lo.end(), boxlo.begin() + static_cast<std::ptrdiff_t>(i * d));
        std::copy(hi.begin(), hi.end(), boxhi.begin() + static_cast<std::ptrdiff_t>(i * d));
    }

    for (std::size_t j = 1; j < n; ++j) {
        double best = -1.0;
        for (std::size_t ii = j; ii-- > 0;) {
            if (best >= 0.0) {
                // Bound for every candidate index <= ii.
                double far2 = 0.0;
                for (std::size_t c = 0; c < d; ++c) {
                    const double dlo = std::abs(xs[j * d + c] - boxlo[ii * d + c]);
                    const double dhi = std::abs(xs[j * d + c] - boxhi[ii * d + c]);
                    const double m = std::max(dlo, dhi);
                    far2 += m * m;
                }
                if (vmax[ii] + std::pow(far2, 0.5 * p) <= best) break;
            }
            const double cand = v[ii] + std::pow(dist2(xs + ii * d, xs + j * d, d), p);
            best = std::max(best, cand);
        }
        v[j] = std::max(best, 0.0);
        vmax[j] = std::max(vmax[j - 1], v[j]);
    }
    return v[n - 1];
}

// Oscillation sup_{s,t} |x_s - x_t| of the point set (the p = infinity case).
inline double oscillation(const double* xs, std::size_t n, std::size_t d) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) m = std::max(m, dist2(xs + i * d, xs + j * d, d));
    return m;
}

// Drop interior points of monotone runs of a scalar sequence; the p-variation
// optimum only uses alternating local extrema.
inline std::vector<double> alternating_extrema(const std::vector<double>& x) {
    std::vector<double> out;
    out.reserve(x.size());
    for (double t : x) {
        if (out.size() >= 2) {
            const double prev = out[out.size() - 1];
            const double prev2 = out[out.size() - 2];
            if ((prev - prev2 >= 0.0 && t >= prev) || (prev - prev2 <= 0.0 && t <= prev)) {
                out.back() = t;
                continue;
            }
        }
        out.push_back(t);
    }
    return out;
}

inline double pvar_sequence(const std::vector<double>& flat, std::size_t d, double p) {
    if (p < 1.0) throw ParameterError("p-variation requires p >= 1");
    const std::size_t n = flat.size() / d;
    if (is_infinite_p(p)) return oscillation(flat.data(), n, d);
    if (d == 1) {
        const std::vector<double> r = alternating_extrema(flat);
        return std::pow(pvar_power_sum(r.data(), r.size(), 1, p), 1.0 / p);
    }
    return std::pow(pvar_power_sum(flat.data(), n, d, p), 1.0 / p);
}

inline double p_variation(const CadlagPath& h, double p) {
    if (p < 1.0) throw ParameterError("p-variation requires p >= 1");
    return pvar_sequence(h.raw_values(), h.dim(), p);
}

}  // namespace decopath

#endif
