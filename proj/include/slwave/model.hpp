#pragma once

#include <array>
#include <cmath>
#include <utility>
#include <vector>

#include "slwave/errors.hpp"
#include "slwave/grid.hpp"
#include "slwave/mat2.hpp"
#include "slwave/slcore.hpp"

namespace slwave {

/// Gauge solution e (normalized by e(length/2) = 1, e'(length/2) = 0,
/// integrated from the midpoint both ways), the Cauchy basis e1, e2 posed at
/// x = 0, and the weight rho(x) = e(x)^2 + e(length-x)^2.
struct GaugeData {
    Potential p;
    CauchySolution e, e1, e2;
    GridFunction rho;
};

inline GaugeData build_gauge(const Potential& p) {
    const Grid& g = p.grid();
    CauchySolution e = detail::integrate_cauchy(p, g.midpoint_index(), 1.0, 0.0);
    KernelBasis kb = kernel_basis(p);
    std::vector<double> rho(static_cast<size_t>(g.count));
    for (int i = 0; i < g.count; ++i) {
        double a = e.u[i], b = e.u[g.reflect_index(i)];
        rho[static_cast<size_t>(i)] = a * a + b * b;
        if (!(rho[static_cast<size_t>(i)] > 0.0))
            throw numeric_error("build_gauge: weight rho vanishes");
    }
    return {p, std::move(e), std::move(kb.e1), std::move(kb.e2),
            GridFunction(g, std::move(rho))};
}

/// Half grid [0, length/2] carrying the transformed fields.
inline Grid half_grid(const Grid& g) { return Grid{0.5 * g.length, g.midpoint_index() + 1}; }

/// Transform matrix T(x) = (1/rho) [[e1(x), e1(l-x)], [e2(x), e2(l-x)]] with
/// its first two derivative fields. Derivatives are assembled analytically
/// from e_i' samples and e_i'' = q e_i; nothing is differenced here.
struct TransformData {
    Matrix2Field T, T1, T2;
};

inline TransformData transform_matrix(const GaugeData& gd) {
    const Grid& g = gd.p.grid();
    const Grid hg = half_grid(g);
    const int m = g.midpoint_index();
    std::vector<Mat2> T(static_cast<size_t>(m + 1)), T1(static_cast<size_t>(m + 1)),
        T2(static_cast<size_t>(m + 1));
    for (int j = 0; j <= m; ++j) {
        const int k = g.reflect_index(j);
        const double qx = gd.p.at(j), qr = gd.p.at(k);
        const double rho = gd.rho[j];
        const double drho = 2.0 * (gd.e.u[j] * gd.e.du[j] - gd.e.u[k] * gd.e.du[k]);
        const double d2rho = 2.0 * (gd.e.du[j] * gd.e.du[j] + qx * gd.e.u[j] * gd.e.u[j] +
                                    gd.e.du[k] * gd.e.du[k] + qr * gd.e.u[k] * gd.e.u[k]);
        const Mat2 N{gd.e1.u[j], gd.e1.u[k], gd.e2.u[j], gd.e2.u[k]};
        const Mat2 N1{gd.e1.du[j], -gd.e1.du[k], gd.e2.du[j], -gd.e2.du[k]};
        const Mat2 N2{qx * gd.e1.u[j], qr * gd.e1.u[k], qx * gd.e2.u[j], qr * gd.e2.u[k]};
        const double ir = 1.0 / rho;
        T[static_cast<size_t>(j)] = N * ir;
        T1[static_cast<size_t>(j)] = N1 * ir - N * (drho * ir * ir);
        T2[static_cast<size_t>(j)] = N2 * ir - N1 * (2.0 * drho * ir * ir) +
                                     N * (2.0 * drho * drho * ir * ir * ir - d2rho * ir * ir);
    }
    return {Matrix2Field(hg, std::move(T)), Matrix2Field(hg, std::move(T1)),
            Matrix2Field(hg, std::move(T2))};
}

/// Gram field G = rho T T^T. Symmetric positive semidefinite; degenerates
/// only at the midpoint node.
inline Matrix2Field gram_matrix(const GaugeData& gd, const Matrix2Field& T) {
    std::vector<Mat2> G(T.values().size());
    for (int j = 0; j < T.size(); ++j)
        G[static_cast<size_t>(j)] = T[j] * T[j].transpose() * gd.rho[j];
    return Matrix2Field(T.grid(), std::move(G));
}

/// Transform image (W u)(x) = T(x) (u(x), u(length-x))^T on the half grid.
inline VectorGridFunction apply_w_c(const Matrix2Field& T, const GridFunction& u) {
    const Grid& g = u.grid();
    if (T.size() != g.midpoint_index() + 1)
        throw parameter_error("apply_w_c: transform and function grids do not match");
    std::vector<Vec2> v(static_cast<size_t>(T.size()));
    for (int j = 0; j < T.size(); ++j)
        v[static_cast<size_t>(j)] = T[j] * Vec2{u[j], u[g.reflect_index(j)]};
    return VectorGridFunction(T.grid(), std::move(v));
}

/// Squared image-space norm: integral over [0, length/2] of (G^{-1} y, y) rho.
/// The integrand at the degenerate midpoint node is filled by cubic
/// extrapolation from the neighboring nodes.
inline double hc_norm_sq(const GaugeData& gd, const Matrix2Field& T, const VectorGridFunction& y) {
    if (y.grid() != T.grid()) throw parameter_error("hc_norm_sq: grid mismatch");
    const int cnt = T.size();
    if (cnt < 5) throw parameter_error("hc_norm_sq: grid too small");
    std::vector<double> integrand(static_cast<size_t>(cnt));
    for (int j = 0; j < cnt - 1; ++j) {
        Mat2 G = T[j] * T[j].transpose() * gd.rho[j];
        double d = G.det();
        double scale = G.max_abs();
        if (std::fabs(d) <= 1e-14 * scale * scale)
            throw numeric_error("hc_norm_sq: Gram matrix singular before the midpoint");
        Vec2 z = G.adjugate() * y[j] * (1.0 / d);
        integrand[static_cast<size_t>(j)] = gd.rho[j] * z.dot(y[j]);
    }
    {
        // cubic extrapolation to the midpoint node
        double f0 = integrand[static_cast<size_t>(cnt - 5)], f1 = integrand[static_cast<size_t>(cnt - 4)],
               f2 = integrand[static_cast<size_t>(cnt - 3)], f3 = integrand[static_cast<size_t>(cnt - 2)];
        integrand[static_cast<size_t>(cnt - 1)] = -f0 + 4.0 * f1 - 6.0 * f2 + 4.0 * f3;
    }
    const auto w = quadrature_weights(cnt, T.grid().spacing());
    double s = 0.0;
    for (int j = 0; j < cnt; ++j) s += w[static_cast<size_t>(j)] * integrand[static_cast<size_t>(j)];
    return s;
}

namespace detail {

inline double lagrange4(const std::array<double, 4>& xs, const std::array<double, 4>& ys, double x) {
    double s = 0.0;
    for (int i = 0; i < 4; ++i) {
        double t = ys[static_cast<size_t>(i)];
        for (int k = 0; k < 4; ++k)
            if (k != i)
                t *= (x - xs[static_cast<size_t>(k)]) /
                     (xs[static_cast<size_t>(i)] - xs[static_cast<size_t>(k)]);
        s += t;
    }
    return s;
}

} // namespace detail

/// Adjoint transform: u(x) from the first component of T^{-1} y for
/// x < length/2 and the second component at the reflected point for
/// x > length/2. Within `delta` of the midpoint T^{-1} is unreliable, so the
/// values there are filled by a cubic through the last direct nodes and the
/// midpoint value, which is pinned by the direction (e1, e2)(length/2).
inline GridFunction apply_w_c_adjoint(const GaugeData& gd, const Matrix2Field& T,
                                      const VectorGridFunction& y, double delta) {
    const Grid& g = gd.p.grid();
    if (T.size() != g.midpoint_index() + 1 || y.grid() != T.grid())
        throw parameter_error("apply_w_c_adjoint: grid mismatch");
    const int m = g.midpoint_index();
    const int n = g.count;
    const double h = g.spacing();
    if (!(delta >= 0.0)) throw parameter_error("apply_w_c_adjoint: delta must be >= 0");
    const int K = std::max(1, static_cast<int>(std::ceil(delta / h - 1e-9)));
    if (m - K < 3) throw parameter_error("apply_w_c_adjoint: delta zone covers the whole range");

    std::vector<double> u(static_cast<size_t>(n), 0.0);
    for (int j = 0; j <= m - K; ++j) {
        Mat2 inv;
        try {
            inv = T[j].inverse();
        } catch (const numeric_error&) {
            throw numeric_error("apply_w_c_adjoint: transform ill-conditioned inside the kept range");
        }
        Vec2 z = inv * y[j];
        u[static_cast<size_t>(j)] = z.a;
        u[static_cast<size_t>(n - 1 - j)] = z.b;
    }
    {
        // midpoint from the pinned image direction
        Vec2 v{gd.e1.u[m], gd.e2.u[m]};
        double vv = v.dot(v);
        if (vv <= 0.0) throw numeric_error("apply_w_c_adjoint: degenerate midpoint direction");
        u[static_cast<size_t>(m)] = gd.rho[m] * v.dot(y[m]) / (2.0 * vv);
    }
    const int a = m - K;
    std::array<double, 4> xsl{g.node(a - 2), g.node(a - 1), g.node(a), g.node(m)};
    std::array<double, 4> ysl{u[static_cast<size_t>(a - 2)], u[static_cast<size_t>(a - 1)],
                              u[static_cast<size_t>(a)], u[static_cast<size_t>(m)]};
    std::array<double, 4> xsr{g.node(m), g.node(n - 1 - a), g.node(n - a), g.node(n + 1 - a)};
    std::array<double, 4> ysr{u[static_cast<size_t>(m)], u[static_cast<size_t>(n - 1 - a)],
                              u[static_cast<size_t>(n - a)], u[static_cast<size_t>(n + 1 - a)]};
    for (int j = a + 1; j < m; ++j) {
        u[static_cast<size_t>(j)] = detail::lagrange4(xsl, ysl, g.node(j));
        u[static_cast<size_t>(n - 1 - j)] = detail::lagrange4(xsr, ysr, g.node(n - 1 - j));
    }
    return GridFunction(g, std::move(u));
}

/// First-order and zero-order model coefficients on the kept range
/// [0, length/2 - delta]. P1 is the analytic derivative of P, available
/// whenever the coefficients were produced by the forward pass.
struct ModelCoefficients {
    Matrix2Field P, Q, P1;
    double delta = 0.0;
};

/// Model coefficients from the transform:
///   N = T^{-1}, N' = -N T' N, N'' = -N T'' N + 2 N T' N T' N,
///   P = -2 T N', Q = T diag(q(x), q(l-x)) N - T N''.
/// Entries grow like 1/(l - 2x) towards the midpoint, hence the delta guard.
inline ModelCoefficients model_coefficients(const GaugeData& gd, const TransformData& td,
                                            double delta) {
    const Grid& g = gd.p.grid();
    const int m = g.midpoint_index();
    const double h = g.spacing();
    if (!(delta > 0.0)) throw parameter_error("model_coefficients: delta must be positive");
    const int K = std::max(1, static_cast<int>(std::ceil(delta / h - 1e-9)));
    const int r = m - K;
    if (r < 7) throw parameter_error("model_coefficients: kept range too small for this delta");
    Grid rg{td.T.grid().node(r), r + 1};
    std::vector<Mat2> P(static_cast<size_t>(r + 1)), Q(static_cast<size_t>(r + 1)),
        P1(static_cast<size_t>(r + 1));
    for (int j = 0; j <= r; ++j) {
        Mat2 N;
        try {
            N = td.T[j].inverse();
        } catch (const numeric_error&) {
            throw numeric_error("model_coefficients: transform singular inside the kept range");
        }
        const Mat2 N1 = (N * td.T1[j] * N) * -1.0;
        const Mat2 N2 = (N * td.T2[j] * N) * -1.0 + (N * td.T1[j] * N * td.T1[j] * N) * 2.0;
        const Mat2 qdiag = Mat2::diag(gd.p.at(j), gd.p.at(g.reflect_index(j)));
        P[static_cast<size_t>(j)] = (td.T[j] * N1) * -2.0;
        Q[static_cast<size_t>(j)] = td.T[j] * qdiag * N - td.T[j] * N2;
        P1[static_cast<size_t>(j)] = (td.T1[j] * N1 + td.T[j] * N2) * -2.0;
    }
    return {Matrix2Field(rg, std::move(P)), Matrix2Field(rg, std::move(Q)),
            Matrix2Field(rg, std::move(P1)), delta};
}

/// Apply the model operator -y'' + P y' + Q y on the kept range by finite
/// differences. Fourth-order stencils: the coefficients are large near the
/// right end (P ~ 1/(l-2x), Q ~ 1/(l-2x)^2) and second-order stencils would
/// lose several digits there.
inline VectorGridFunction apply_model_operator(const ModelCoefficients& mc,
                                               const VectorGridFunction& y) {
    if (y.grid() != mc.P.grid()) throw parameter_error("apply_model_operator: grid mismatch");
    const int cnt = y.size();
    std::vector<double> ya(static_cast<size_t>(cnt)), yb(static_cast<size_t>(cnt));
    for (int j = 0; j < cnt; ++j) {
        ya[static_cast<size_t>(j)] = y[j].a;
        yb[static_cast<size_t>(j)] = y[j].b;
    }
    GridFunction fa(y.grid(), std::move(ya)), fb(y.grid(), std::move(yb));
    GridFunction da1 = differentiate4(fa, 1), db1 = differentiate4(fb, 1);
    GridFunction da2 = differentiate4(fa, 2), db2 = differentiate4(fb, 2);
    std::vector<Vec2> out(static_cast<size_t>(cnt));
    for (int j = 0; j < cnt; ++j) {
        Vec2 d1{da1[j], db1[j]}, d2{da2[j], db2[j]};
        out[static_cast<size_t>(j)] = mc.P[j] * d1 + mc.Q[j] * y[j] - d2;
    }
    return VectorGridFunction(y.grid(), std::move(out));
}

} // namespace slwave
