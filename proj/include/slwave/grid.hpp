#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "slwave/errors.hpp"

namespace slwave {

/// Uniform grid of `count` nodes on [0, length].
///
/// Primary problem grids (built through build_grid) have an odd node count,
/// so the midpoint length/2 and the reflection x -> length - x map nodes onto
/// nodes exactly. Derived grids (half ranges, truncated ranges) may have any
/// count >= 2.
struct Grid {
    double length = 1.0;
    int count = 0;

    double spacing() const { return length / (count - 1); }
    double node(int i) const { return length * i / (count - 1); }

    /// Index of the node at x = length/2. Requires an odd count.
    int midpoint_index() const { return (count - 1) / 2; }
    /// Index of the node at length - node(i).
    int reflect_index(int i) const { return count - 1 - i; }

    bool operator==(const Grid& o) const { return length == o.length && count == o.count; }
    bool operator!=(const Grid& o) const { return !(*this == o); }
};

/// Validated primary grid: length > 0, count odd and >= 3.
inline Grid build_grid(double length, int count) {
    if (!(length > 0.0) || !std::isfinite(length))
        throw parameter_error("build_grid: length must be positive and finite");
    if (count < 3 || count % 2 == 0)
        throw parameter_error("build_grid: node count must be odd and >= 3");
    return Grid{length, count};
}

/// Real-valued samples on the nodes of a Grid. Immutable after construction;
/// all values are checked finite.
class GridFunction {
public:
    GridFunction() = default;

    GridFunction(Grid g, std::vector<double> values) : grid_(g), v_(std::move(values)) {
        if (static_cast<int>(v_.size()) != grid_.count)
            throw parameter_error("GridFunction: value count does not match grid");
        for (double x : v_)
            if (!std::isfinite(x)) throw numeric_error("GridFunction: non-finite value");
    }

    static GridFunction zero(Grid g) {
        return GridFunction(g, std::vector<double>(static_cast<size_t>(g.count), 0.0));
    }

    template <class F>
    static GridFunction sample(Grid g, F&& f) {
        std::vector<double> v(static_cast<size_t>(g.count));
        for (int i = 0; i < g.count; ++i) v[static_cast<size_t>(i)] = f(g.node(i));
        return GridFunction(g, std::move(v));
    }

    const Grid& grid() const { return grid_; }
    int size() const { return grid_.count; }
    double operator[](int i) const { return v_[static_cast<size_t>(i)]; }
    const std::vector<double>& values() const { return v_; }

    double front() const { return v_.front(); }
    double back() const { return v_.back(); }

    double max_abs() const {
        double m = 0.0;
        for (double x : v_) m = std::max(m, std::fabs(x));
        return m;
    }

private:
    Grid grid_;
    std::vector<double> v_;
};

inline void require_same_grid(const Grid& a, const Grid& b, const char* who) {
    if (a != b) throw parameter_error(std::string(who) + ": grid mismatch");
}

inline GridFunction operator+(const GridFunction& a, const GridFunction& b) {
    require_same_grid(a.grid(), b.grid(), "GridFunction+");
    std::vector<double> v(a.values());
    for (int i = 0; i < b.size(); ++i) v[static_cast<size_t>(i)] += b[i];
    return GridFunction(a.grid(), std::move(v));
}

inline GridFunction operator-(const GridFunction& a, const GridFunction& b) {
    require_same_grid(a.grid(), b.grid(), "GridFunction-");
    std::vector<double> v(a.values());
    for (int i = 0; i < b.size(); ++i) v[static_cast<size_t>(i)] -= b[i];
    return GridFunction(a.grid(), std::move(v));
}

inline GridFunction operator*(double c, const GridFunction& a) {
    std::vector<double> v(a.values());
    for (double& x : v) x *= c;
    return GridFunction(a.grid(), std::move(v));
}

inline GridFunction pointwise(const GridFunction& a, const GridFunction& b) {
    require_same_grid(a.grid(), b.grid(), "pointwise");
    std::vector<double> v(a.values());
    for (int i = 0; i < b.size(); ++i) v[static_cast<size_t>(i)] *= b[i];
    return GridFunction(a.grid(), std::move(v));
}

/// Quadrature weights for a uniform grid, O(h^4) accurate.
///
/// Odd node counts use composite Simpson. Even counts use Simpson up to the
/// last three intervals and close with the 3/8 rule; two nodes fall back to
/// the trapezoid.
inline std::vector<double> quadrature_weights(int count, double h) {
    if (count < 2) throw parameter_error("quadrature_weights: need at least 2 nodes");
    std::vector<double> w(static_cast<size_t>(count), 0.0);
    if (count == 2) {
        w[0] = w[1] = h / 2.0;
        return w;
    }
    int simpson_end = (count % 2 == 1) ? count - 1 : count - 4; // last interval index of the Simpson block
    if (simpson_end > 0) {
        w[0] += h / 3.0;
        w[static_cast<size_t>(simpson_end)] += h / 3.0;
        for (int i = 1; i < simpson_end; ++i)
            w[static_cast<size_t>(i)] += (i % 2 == 1 ? 4.0 : 2.0) * h / 3.0;
    }
    if (count % 2 == 0) {
        int a = count - 4; // 3/8 block over nodes a..a+3
        w[static_cast<size_t>(a)] += 3.0 * h / 8.0;
        w[static_cast<size_t>(a + 1)] += 9.0 * h / 8.0;
        w[static_cast<size_t>(a + 2)] += 9.0 * h / 8.0;
        w[static_cast<size_t>(a + 3)] += 3.0 * h / 8.0;
    }
    return w;
}

/// L2 inner product (f, g) by composite Simpson (O(h^4)).
inline double integrate(const GridFunction& f, const GridFunction& g) {
    require_same_grid(f.grid(), g.grid(), "integrate");
    const auto w = quadrature_weights(f.size(), f.grid().spacing());
    double s = 0.0;
    for (int i = 0; i < f.size(); ++i) s += w[static_cast<size_t>(i)] * f[i] * g[i];
    return s;
}

inline double integrate(const GridFunction& f) {
    const auto w = quadrature_weights(f.size(), f.grid().spacing());
    double s = 0.0;
    for (int i = 0; i < f.size(); ++i) s += w[static_cast<size_t>(i)] * f[i];
    return s;
}

/// First or second derivative samples: central differences at interior nodes,
/// one-sided second-order stencils at the endpoints. O(h^2) throughout.
inline GridFunction differentiate(const GridFunction& f, int order) {
    const int n = f.size();
    const double h = f.grid().spacing();
    std::vector<double> d(static_cast<size_t>(n));
    if (order == 1) {
        if (n < 3) throw parameter_error("differentiate: need at least 3 nodes");
        d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
        for (int i = 1; i < n - 1; ++i) d[static_cast<size_t>(i)] = (f[i + 1] - f[i - 1]) / (2.0 * h);
        d[static_cast<size_t>(n - 1)] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    } else if (order == 2) {
        if (n < 4) throw parameter_error("differentiate: need at least 4 nodes");
        d[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / (h * h);
        for (int i = 1; i < n - 1; ++i)
            d[static_cast<size_t>(i)] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / (h * h);
        d[static_cast<size_t>(n - 1)] =
            (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) / (h * h);
    } else {
        throw parameter_error("differentiate: order must be 1 or 2");
    }
    return GridFunction(f.grid(), std::move(d));
}

/// One-sided second-order endpoint derivatives of f: {f'(0), f'(length)}.
inline std::pair<double, double> endpoint_derivatives(const GridFunction& f) {
    const int n = f.size();
    if (n < 3) throw parameter_error("endpoint_derivatives: need at least 3 nodes");
    const double h = f.grid().spacing();
    double d0 = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    double dl = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    return {d0, dl};
}

/// Finite-difference weights on arbitrary nodes (Fornberg's recurrence).
/// Returns w such that f^(m)(x0) ~= sum_i w[i] f(xs[i]).
inline std::vector<double> fd_weights(double x0, const std::vector<double>& xs, int m) {
    const int n = static_cast<int>(xs.size());
    if (n < m + 1) throw parameter_error("fd_weights: not enough nodes for derivative order");
    std::vector<std::vector<double>> c(static_cast<size_t>(n),
                                       std::vector<double>(static_cast<size_t>(m + 1), 0.0));
    double c1 = 1.0;
    c[0][0] = 1.0;
    for (int i = 1; i < n; ++i) {
        double c2 = 1.0;
        int mn = std::min(i, m);
        for (int j = 0; j < i; ++j) {
            double c3 = xs[static_cast<size_t>(i)] - xs[static_cast<size_t>(j)];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    c[static_cast<size_t>(i)][static_cast<size_t>(k)] =
                        c1 * (k * c[static_cast<size_t>(i - 1)][static_cast<size_t>(k - 1)] -
                              (xs[static_cast<size_t>(i - 1)] - x0) *
                                  c[static_cast<size_t>(i - 1)][static_cast<size_t>(k)]) /
                        c2;
                c[static_cast<size_t>(i)][0] = -c1 *
                    (xs[static_cast<size_t>(i - 1)] - x0) * c[static_cast<size_t>(i - 1)][0] / c2;
            }
            for (int k = mn; k >= 1; --k)
                c[static_cast<size_t>(j)][static_cast<size_t>(k)] =
                    ((xs[static_cast<size_t>(i)] - x0) * c[static_cast<size_t>(j)][static_cast<size_t>(k)] -
                     k * c[static_cast<size_t>(j)][static_cast<size_t>(k - 1)]) /
                    c3;
            c[static_cast<size_t>(j)][0] =
                (xs[static_cast<size_t>(i)] - x0) * c[static_cast<size_t>(j)][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) w[static_cast<size_t>(i)] = c[static_cast<size_t>(i)][static_cast<size_t>(m)];
    return w;
}

/// High-order endpoint derivatives {f'(0), f'(length)}: one-sided stencils on
/// up to six nodes, O(h^4) or better. Used where a boundary trace feeds a
/// solve and the second-order stencil would dominate the error budget.
inline std::pair<double, double> endpoint_derivatives4(const GridFunction& f) {
    const int n = f.size();
    if (n < 5) throw parameter_error("endpoint_derivatives4: need at least 5 nodes");
    const double h = f.grid().spacing();
    const int k = std::min(6, n);
    std::vector<double> xs(static_cast<size_t>(k));
    for (int i = 0; i < k; ++i) xs[static_cast<size_t>(i)] = static_cast<double>(i);
    const auto w = fd_weights(0.0, xs, 1);
    double d0 = 0.0, dl = 0.0;
    for (int i = 0; i < k; ++i) {
        d0 += w[static_cast<size_t>(i)] * f[i];
        dl -= w[static_cast<size_t>(i)] * f[n - 1 - i];
    }
    return {d0 / h, dl / h};
}

/// Derivative samples of order m (1 or 2) accurate to O(h^4), using 5-point
/// central stencils inside and skewed 6-point stencils near the ends.
/// Used where second-order endpoint stencils are not accurate enough.
inline GridFunction differentiate4(const GridFunction& f, int m) {
    const int n = f.size();
    if (m != 1 && m != 2) throw parameter_error("differentiate4: order must be 1 or 2");
    if (n < 6) throw parameter_error("differentiate4: need at least 6 nodes");
    const double h = f.grid().spacing();
    std::vector<double> d(static_cast<size_t>(n));
    // offsets in units of h
    static const std::vector<double> edge = {0, 1, 2, 3, 4, 5};
    for (int i = 0; i < n; ++i) {
        if (i >= 2 && i <= n - 3) {
            if (m == 1)
                d[static_cast<size_t>(i)] =
                    (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / (12.0 * h);
            else
                d[static_cast<size_t>(i)] =
                    (-f[i - 2] + 16.0 * f[i - 1] - 30.0 * f[i] + 16.0 * f[i + 1] - f[i + 2]) /
                    (12.0 * h * h);
        } else {
            bool left = i < 2;
            double x0 = left ? static_cast<double>(i) : static_cast<double>(n - 1 - i);
            auto w = fd_weights(x0, edge, m);
            double s = 0.0;
            for (int k = 0; k < 6; ++k) {
                int idx = left ? k : n - 1 - k;
                s += w[static_cast<size_t>(k)] * f[idx];
            }
            if (!left && m == 1) s = -s;
            d[static_cast<size_t>(i)] = s / std::pow(h, m);
        }
    }
    return GridFunction(f.grid(), std::move(d));
}

} // namespace slwave
