#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "slwave/errors.hpp"
#include "slwave/grid.hpp"
#include "slwave/mat2.hpp"

namespace slwave {

namespace detail {

/// Coefficient data P sampled on [0, length/2 - delta] with a simple pole at
/// x = length/2. W(x) = (length - 2x) P(x) extends smoothly across the pole,
/// so interpolation and differentiation act on W and restore the pole factor
/// afterwards; plain stencils on P itself lose about three digits at the
/// inner edge of the range.
class PoleAwareField {
public:
    PoleAwareField(const Matrix2Field& P, double length) : grid_(P.grid()), l_(length) {
        w_.reserve(P.values().size());
        for (int j = 0; j < P.size(); ++j) w_.push_back(P[j] * (l_ - 2.0 * grid_.node(j)));
    }

    Mat2 eval(double x) const {
        const int r = grid_.count - 1;
        const double h = grid_.spacing();
        int c = std::clamp(static_cast<int>(std::floor(x / h)), 0, r - 1);
        int j0 = std::clamp(c - 1, 0, r - 3);
        std::array<double, 4> L{};
        for (int i = 0; i < 4; ++i) {
            double t = 1.0;
            for (int k = 0; k < 4; ++k)
                if (k != i)
                    t *= (x - grid_.node(j0 + k)) / (grid_.node(j0 + i) - grid_.node(j0 + k));
            L[static_cast<size_t>(i)] = t;
        }
        Mat2 w = w_[static_cast<size_t>(j0)] * L[0] + w_[static_cast<size_t>(j0 + 1)] * L[1] +
                 w_[static_cast<size_t>(j0 + 2)] * L[2] + w_[static_cast<size_t>(j0 + 3)] * L[3];
        double s = l_ - 2.0 * x;
        if (s <= 0.0) throw numeric_error("PoleAwareField: evaluation at or past the pole");
        return w * (1.0 / s);
    }

private:
    Grid grid_;
    double l_;
    std::vector<Mat2> w_;
};

} // namespace detail

/// Derivative of the coefficient field P on its own grid, fourth-order
/// stencils applied to (length - 2x) P.
inline Matrix2Field coefficient_derivative(const Matrix2Field& P, double length) {
    const Grid& g = P.grid();
    auto entry = [&](int j, int which) {
        const Mat2& m = P[j];
        double s = length - 2.0 * g.node(j);
        switch (which) {
            case 0: return m.m11 * s;
            case 1: return m.m12 * s;
            case 2: return m.m21 * s;
            default: return m.m22 * s;
        }
    };
    std::vector<GridFunction> dw;
    for (int which = 0; which < 4; ++which) {
        std::vector<double> v(static_cast<size_t>(g.count));
        for (int j = 0; j < g.count; ++j) v[static_cast<size_t>(j)] = entry(j, which);
        dw.push_back(differentiate4(GridFunction(g, std::move(v)), 1));
    }
    std::vector<Mat2> out(static_cast<size_t>(g.count));
    for (int j = 0; j < g.count; ++j) {
        double s = length - 2.0 * g.node(j);
        Mat2 wp{dw[0][j], dw[1][j], dw[2][j], dw[3][j]};
        out[static_cast<size_t>(j)] = (wp + P[j] * 2.0) * (1.0 / s);
    }
    return Matrix2Field(g, std::move(out));
}

/// Fundamental matrix of M' = -1/2 M P, M(0) = I, on the grid of P.
/// Classical RK4 with `substeps` sub-intervals per grid cell; off-node values
/// of P come from the pole-aware interpolant. M inherits the 1/(length - 2x)
/// growth of P, so the guard reports the last valid abscissa on blow-up.
inline Matrix2Field fundamental_matrix(const Matrix2Field& P, double length, int substeps = 8) {
    if (substeps < 1) throw parameter_error("fundamental_matrix: substeps must be >= 1");
    const Grid& g = P.grid();
    if (g.count < 4) throw parameter_error("fundamental_matrix: need at least 4 nodes");
    detail::PoleAwareField f(P, length);
    std::vector<Mat2> M(static_cast<size_t>(g.count));
    M[0] = Mat2::identity();
    const double hsub = g.spacing() / substeps;
    auto rhs = [&](const Mat2& m, double x) { return m * f.eval(x) * -0.5; };
    for (int j = 0; j + 1 < g.count; ++j) {
        Mat2 m = M[static_cast<size_t>(j)];
        double x0 = g.node(j);
        for (int k = 0; k < substeps; ++k) {
            double x = x0 + k * hsub;
            Mat2 k1 = rhs(m, x);
            Mat2 k2 = rhs(m + k1 * (0.5 * hsub), x + 0.5 * hsub);
            Mat2 k3 = rhs(m + k2 * (0.5 * hsub), x + 0.5 * hsub);
            Mat2 k4 = rhs(m + k3 * hsub, x + hsub);
            m = m + (k1 + (k2 + k3) * 2.0 + k4) * (hsub / 6.0);
            if (!std::isfinite(m.frobenius()) || m.max_abs() > 1e12)
                throw numeric_error("fundamental_matrix: blow-up near x = " + std::to_string(x));
        }
        M[static_cast<size_t>(j + 1)] = m;
    }
    return Matrix2Field(g, std::move(M));
}

/// Restore the similarity-transported coefficient matrix
///   A = M Q M^{-1} + M'' M^{-1},
/// where the second derivative of M is eliminated through its own equation:
/// M'' = 1/4 M P^2 - 1/2 M P', so A = M (Q + 1/4 P^2 - 1/2 P') M^{-1}.
/// P' is taken analytically when supplied (forward-generated data) and from
/// fourth-order differences of (length - 2x) P otherwise.
inline Matrix2Field similarity_restore(const Matrix2Field& M, const Matrix2Field& P,
                                       const Matrix2Field& Q, double length,
                                       const std::optional<Matrix2Field>& P1 = std::nullopt) {
    if (M.grid() != P.grid() || P.grid() != Q.grid())
        throw parameter_error("similarity_restore: field grids do not match");
    Matrix2Field Pd = P1 ? *P1 : coefficient_derivative(P, length);
    if (Pd.grid() != P.grid()) throw parameter_error("similarity_restore: P1 grid mismatch");
    std::vector<Mat2> A(static_cast<size_t>(M.size()));
    for (int j = 0; j < M.size(); ++j) {
        Mat2 B = Q[j] + P[j] * P[j] * 0.25 - Pd[j] * 0.5;
        Mat2 Minv;
        try {
            Minv = M[j].inverse();
        } catch (const numeric_error&) {
            throw numeric_error("similarity_restore: fundamental matrix singular at node " +
                                std::to_string(j));
        }
        A[static_cast<size_t>(j)] = M[j] * B * Minv;
    }
    return Matrix2Field(M.grid(), std::move(A));
}

/// Eigenvalue branches of the field A with continuity tracking, plus quality
/// diagnostics collected along the way.
struct BranchData {
    Grid grid;
    std::vector<double> b1, b2;
    std::vector<int> swap_nodes;     ///< nodes where the branch order flips
    double min_discriminant = 0.0;   ///< most negative raw discriminant (relative)
    double max_offdiag = 0.0;        ///< worst off-diagonal residual of V^{-1} A V
};

/// Pointwise eigenvalues of A tracked along x. Assignment at each node
/// minimizes the deviation from the linear extrapolation of each branch
/// (equivalently, the second difference), which keeps branches smooth through
/// crossings. Discriminants below -1e-8 relative to the entry scale are a
/// data-inconsistency error; small negative values are clamped to zero.
inline BranchData eigen_branches(const Matrix2Field& A) {
    const int cnt = A.size();
    if (cnt < 3) throw parameter_error("eigen_branches: need at least 3 nodes");
    BranchData out;
    out.grid = A.grid();
    out.b1.resize(static_cast<size_t>(cnt));
    out.b2.resize(static_cast<size_t>(cnt));
    double min_rel_disc = 0.0, max_resid = 0.0;
    for (int j = 0; j < cnt; ++j) {
        const Mat2& a = A[j];
        double tr = a.trace();
        double disc = (a.m11 - a.m22) * (a.m11 - a.m22) + 4.0 * a.m12 * a.m21;
        double scale = std::max(1.0, a.frobenius() * a.frobenius());
        min_rel_disc = std::min(min_rel_disc, disc / scale);
        if (disc < -1e-8 * scale)
            throw numeric_error("eigen_branches: eigenvalues not real at node " + std::to_string(j));
        double root = std::sqrt(std::max(disc, 0.0));
        double big = 0.5 * (tr + std::copysign(root, tr));
        double small = (big != 0.0) ? a.det() / big : 0.5 * (tr - std::copysign(root, tr));
        double lo = std::min(big, small), hi = std::max(big, small);

        if (root * root > 1e-12 * scale) {
            // off-diagonal residual of the closed-form diagonalization
            auto eigvec = [&](double lam) {
                Vec2 v1{a.m12, lam - a.m11}, v2{lam - a.m22, a.m21};
                return v1.norm() >= v2.norm() ? v1 : v2;
            };
            Vec2 v1 = eigvec(hi), v2 = eigvec(lo);
            Mat2 V{v1.a, v2.a, v1.b, v2.b};
            double dv = V.det();
            if (std::fabs(dv) > 1e-12 * std::max(1.0, V.frobenius() * V.frobenius())) {
                Mat2 D = V.adjugate() * (1.0 / dv) * a * V;
                max_resid = std::max(
                    max_resid, std::max(std::fabs(D.m12), std::fabs(D.m21)) / std::sqrt(scale));
            }
        }

        if (j == 0) {
            out.b1[0] = hi;
            out.b2[0] = lo;
            continue;
        }
        double p1, p2; // predicted continuations
        if (j == 1) {
            p1 = out.b1[0];
            p2 = out.b2[0];
        } else {
            p1 = 2.0 * out.b1[static_cast<size_t>(j - 1)] - out.b1[static_cast<size_t>(j - 2)];
            p2 = 2.0 * out.b2[static_cast<size_t>(j - 1)] - out.b2[static_cast<size_t>(j - 2)];
        }
        double keep = std::fabs(hi - p1) + std::fabs(lo - p2);
        double swap = std::fabs(lo - p1) + std::fabs(hi - p2);
        if (swap < keep) {
            out.b1[static_cast<size_t>(j)] = lo;
            out.b2[static_cast<size_t>(j)] = hi;
        } else {
            out.b1[static_cast<size_t>(j)] = hi;
            out.b2[static_cast<size_t>(j)] = lo;
        }
        bool was_flipped = out.b1[static_cast<size_t>(j - 1)] < out.b2[static_cast<size_t>(j - 1)];
        bool is_flipped = out.b1[static_cast<size_t>(j)] < out.b2[static_cast<size_t>(j)];
        if (was_flipped != is_flipped) out.swap_nodes.push_back(j);
    }
    out.min_discriminant = min_rel_disc;
    out.max_offdiag = max_resid;
    return out;
}

struct RecoveryDiagnostics {
    double max_offdiag_residual = 0.0;
    double min_discriminant = 0.0;
    std::vector<int> branch_swaps;
    int kept_nodes = 0;
    double delta = 0.0;
};

/// Candidate potentials on the full grid. The data determine q only up to
/// the reflection x -> length - x, so both candidates are returned.
struct RecoveryResult {
    GridFunction q_plus, q_minus;
    BranchData branches;
    RecoveryDiagnostics diagnostics;
};

/// Glue the branch values into the two reflection-related candidates:
/// q_plus follows b1 on [0, length/2 - delta] and the reflected b2 on the
/// right, with a cubic Hermite bridge across the midpoint gap; q_minus is the
/// reflection of q_plus.
inline RecoveryResult assemble_potential(const BranchData& br, double length, double delta) {
    const int r = br.grid.count - 1;
    if (r < 3) throw parameter_error("assemble_potential: too few branch nodes");
    const double h = br.grid.spacing();
    const double nn = length / h;
    const int n = static_cast<int>(std::lround(nn)) + 1;
    if (std::fabs((n - 1) - nn) > 1e-6 || n < 5 || n % 2 == 0)
        throw parameter_error("assemble_potential: branch grid is not half of a primary grid");
    Grid g = build_grid(length, n);
    const int m = g.midpoint_index();
    if (r >= m) throw parameter_error("assemble_potential: branch grid reaches the midpoint");

    std::vector<double> qp(static_cast<size_t>(n), 0.0);
    for (int j = 0; j <= r; ++j) {
        qp[static_cast<size_t>(j)] = br.b1[static_cast<size_t>(j)];
        qp[static_cast<size_t>(n - 1 - j)] = br.b2[static_cast<size_t>(j)];
    }
    {
        // cubic Hermite bridge over the excluded zone, one-sided slopes
        double xa = g.node(r), xb = g.node(n - 1 - r);
        double va = br.b1[static_cast<size_t>(r)];
        double vb = br.b2[static_cast<size_t>(r)];
        double sa = (3.0 * br.b1[static_cast<size_t>(r)] - 4.0 * br.b1[static_cast<size_t>(r - 1)] +
                     br.b1[static_cast<size_t>(r - 2)]) /
                    (2.0 * h);
        double sb = -(3.0 * br.b2[static_cast<size_t>(r)] - 4.0 * br.b2[static_cast<size_t>(r - 1)] +
                      br.b2[static_cast<size_t>(r - 2)]) /
                    (2.0 * h);
        double w = xb - xa;
        for (int j = r + 1; j < n - 1 - r; ++j) {
            double t = (g.node(j) - xa) / w;
            double h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
            double h10 = t * (1.0 - t) * (1.0 - t);
            double h01 = t * t * (3.0 - 2.0 * t);
            double h11 = t * t * (t - 1.0);
            qp[static_cast<size_t>(j)] = h00 * va + h10 * w * sa + h01 * vb + h11 * w * sb;
        }
    }
    std::vector<double> qm(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j) qm[static_cast<size_t>(j)] = qp[static_cast<size_t>(n - 1 - j)];

    RecoveryResult res{GridFunction(g, std::move(qp)), GridFunction(g, std::move(qm)), br, {}};
    res.diagnostics.max_offdiag_residual = br.max_offdiag;
    res.diagnostics.min_discriminant = br.min_discriminant;
    res.diagnostics.branch_swaps = br.swap_nodes;
    res.diagnostics.kept_nodes = r + 1;
    res.diagnostics.delta = delta;
    return res;
}

/// Full inverse chain from coefficient data to potential candidates.
inline RecoveryResult recover_potential(const Matrix2Field& P, const Matrix2Field& Q, double length,
                                        double delta,
                                        const std::optional<Matrix2Field>& P1 = std::nullopt) {
    Matrix2Field M = fundamental_matrix(P, length);
    Matrix2Field A = similarity_restore(M, P, Q, length, P1);
    BranchData br = eigen_branches(A);
    return assemble_potential(br, length, delta);
}

} // namespace slwave
