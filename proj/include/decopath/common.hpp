#ifndef DECOPATH_COMMON_HPP
#define DECOPATH_COMMON_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace decopath {

using Vec = std::vector<double>;

// Error taxonomy shared by all modules.
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};
struct ShapeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct ParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct ContractError : std::logic_error {
    using std::logic_error::logic_error;
};
struct DivergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct AccuracyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct StatisticsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct GeometryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline double norm2(const double* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * x[i];
    return std::sqrt(s);
}

inline double norm2(const Vec& x) { return norm2(x.data(), x.size()); }

inline double norm_inf(const Vec& x) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    return m;
}

inline double dist2(const double* x, const double* y, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = x[i] - y[i];
        s += d * d;
    }
    return std::sqrt(s);
}

inline Vec sub(const Vec& x, const Vec& y) {
    Vec r(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) r[i] = x[i] - y[i];
    return r;
}

inline Vec add(const Vec& x, const Vec& y) {
    Vec r(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) r[i] = x[i] + y[i];
    return r;
}

inline void axpy(double a, const Vec& x, Vec& y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

inline Vec scaled(const Vec& x, double a) {
    Vec r(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) r[i] = a * x[i];
    return r;
}

// Dense row-major matrix, just enough for vector fields and profile maps.
struct Mat {
    std::size_t rows = 0, cols = 0;
    Vec data;

    Mat() = default;
    Mat(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    static Mat identity(std::size_t n) {
        Mat m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    Vec apply(const Vec& x) const {
        if (x.size() != cols) throw ShapeError("Mat::apply: dimension mismatch");
        Vec y(rows, 0.0);
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j) y[i] += data[i * cols + j] * x[j];
        return y;
    }
};

}  // namespace decopath

#endif
