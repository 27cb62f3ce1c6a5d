#pragma once

#include <cmath>
#include <vector>

#include "slwave/errors.hpp"
#include "slwave/grid.hpp"

namespace slwave {

struct Vec2 {
    double a = 0.0, b = 0.0;

    Vec2 operator+(Vec2 o) const { return {a + o.a, b + o.b}; }
    Vec2 operator-(Vec2 o) const { return {a - o.a, b - o.b}; }
    Vec2 operator*(double c) const { return {a * c, b * c}; }
    double dot(Vec2 o) const { return a * o.a + b * o.b; }
    double norm() const { return std::hypot(a, b); }
};

/// Dense real 2x2 matrix, row major.
struct Mat2 {
    double m11 = 0.0, m12 = 0.0, m21 = 0.0, m22 = 0.0;

    static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static Mat2 diag(double d1, double d2) { return {d1, 0.0, 0.0, d2}; }

    Mat2 operator+(const Mat2& o) const { return {m11 + o.m11, m12 + o.m12, m21 + o.m21, m22 + o.m22}; }
    Mat2 operator-(const Mat2& o) const { return {m11 - o.m11, m12 - o.m12, m21 - o.m21, m22 - o.m22}; }
    Mat2 operator*(double c) const { return {m11 * c, m12 * c, m21 * c, m22 * c}; }
    Mat2 operator*(const Mat2& o) const {
        return {m11 * o.m11 + m12 * o.m21, m11 * o.m12 + m12 * o.m22,
                m21 * o.m11 + m22 * o.m21, m21 * o.m12 + m22 * o.m22};
    }
    Vec2 operator*(Vec2 v) const { return {m11 * v.a + m12 * v.b, m21 * v.a + m22 * v.b}; }

    Mat2 transpose() const { return {m11, m21, m12, m22}; }
    double det() const { return m11 * m22 - m12 * m21; }
    double trace() const { return m11 + m22; }
    double frobenius() const { return std::sqrt(m11 * m11 + m12 * m12 + m21 * m21 + m22 * m22); }
    double max_abs() const {
        return std::max(std::max(std::fabs(m11), std::fabs(m12)),
                        std::max(std::fabs(m21), std::fabs(m22)));
    }

    Mat2 adjugate() const { return {m22, -m12, -m21, m11}; }

    /// Inverse via the adjugate. `rel_guard` bounds |det| from below relative
    /// to the squared entry scale; crossing it is a conditioning failure.
    Mat2 inverse(double rel_guard = 1e-13) const {
        double d = det();
        double scale = max_abs();
        if (std::fabs(d) <= rel_guard * scale * scale)
            throw numeric_error("Mat2::inverse: matrix is numerically singular");
        return adjugate() * (1.0 / d);
    }

    Vec2 solve(Vec2 rhs, double rel_guard = 1e-13) const { return inverse(rel_guard) * rhs; }
};

inline Mat2 operator*(double c, const Mat2& m) { return m * c; }

/// Pairs (value at x, value at l-x) sampled on a grid; used for transformed
/// images living on the half interval.
class VectorGridFunction {
public:
    VectorGridFunction() = default;
    VectorGridFunction(Grid g, std::vector<Vec2> values) : grid_(g), v_(std::move(values)) {
        if (static_cast<int>(v_.size()) != grid_.count)
            throw parameter_error("VectorGridFunction: value count does not match grid");
        for (const Vec2& x : v_)
            if (!std::isfinite(x.a) || !std::isfinite(x.b))
                throw numeric_error("VectorGridFunction: non-finite value");
    }

    static VectorGridFunction zero(Grid g) {
        return VectorGridFunction(g, std::vector<Vec2>(static_cast<size_t>(g.count)));
    }

    const Grid& grid() const { return grid_; }
    int size() const { return grid_.count; }
    Vec2 operator[](int i) const { return v_[static_cast<size_t>(i)]; }
    const std::vector<Vec2>& values() const { return v_; }

    double max_abs() const {
        double m = 0.0;
        for (const Vec2& x : v_) m = std::max({m, std::fabs(x.a), std::fabs(x.b)});
        return m;
    }

private:
    Grid grid_;
    std::vector<Vec2> v_;
};

/// 2x2 matrix samples on a grid.
class Matrix2Field {
public:
    Matrix2Field() = default;
    Matrix2Field(Grid g, std::vector<Mat2> values) : grid_(g), v_(std::move(values)) {
        if (static_cast<int>(v_.size()) != grid_.count)
            throw parameter_error("Matrix2Field: value count does not match grid");
        for (const Mat2& m : v_)
            if (!std::isfinite(m.m11) || !std::isfinite(m.m12) || !std::isfinite(m.m21) ||
                !std::isfinite(m.m22))
                throw numeric_error("Matrix2Field: non-finite value");
    }

    const Grid& grid() const { return grid_; }
    int size() const { return grid_.count; }
    const Mat2& operator[](int i) const { return v_[static_cast<size_t>(i)]; }
    const std::vector<Mat2>& values() const { return v_; }

private:
    Grid grid_;
    std::vector<Mat2> v_;
};

} // namespace slwave
