#pragma once

#include <cmath>
#include <utility>

#include "slwave/errors.hpp"
#include "slwave/grid.hpp"
#include "slwave/slcore.hpp"

namespace slwave {

/// Element c0 * phi0 + cl * phil of the two-dimensional defect space, in the
/// basis phi0 (vanishing at 0, unit slope there) and phil (vanishing at
/// length, unit slope there).
struct KernelElement {
    double c0 = 0.0, cl = 0.0;

    KernelElement operator+(KernelElement o) const { return {c0 + o.c0, cl + o.cl}; }
    KernelElement operator-() const { return {-c0, -cl}; }
    KernelElement operator*(double s) const { return {c0 * s, cl * s}; }
};

/// Decomposition u = u0 + L^{-1} g + h with u0 in the minimal domain and
/// g, h kernel elements.
struct VishikParts {
    GridFunction u0;
    KernelElement g, h;
};

/// Per-potential solver for the boundary decomposition. Builds the kernel
/// basis phi0, phil, their regularized images eta = L^{-1} phi, and the
/// endpoint-derivative table once; all queries are then read-only.
class GreenSystem {
public:
    explicit GreenSystem(const Potential& p)
        : p_(p),
          phi0_(solve_cauchy(p, 0.0, 0.0, 1.0)),
          phil_(solve_cauchy(p, p.grid().length, 0.0, 1.0)),
          eta0_(apply_l_inverse(p, phi0_.u)),
          etal_(apply_l_inverse(p, phil_.u)) {
        const int n = p_.grid().count;
        phi0_at_l_ = phi0_.u[n - 1];
        phil_at_0_ = phil_.u[0];
        if (std::fabs(phi0_at_l_) < 1e-12 || std::fabs(phil_at_0_) < 1e-12)
            throw numeric_error("GreenSystem: kernel solution vanishes at the far end");
        auto d0 = endpoint_derivatives4(eta0_);
        auto dl = endpoint_derivatives4(etal_);
        deta0_0_ = d0.first;
        deta0_l_ = d0.second;
        detal_0_ = dl.first;
        detal_l_ = dl.second;
        det_ = deta0_0_ * detal_l_ - detal_0_ * deta0_l_;
        double scale = std::fabs(deta0_0_ * detal_l_) + std::fabs(detal_0_ * deta0_l_);
        if (std::fabs(det_) < 1e-10 * std::max(scale, 1e-300))
            throw numeric_error("GreenSystem: endpoint system is numerically singular");
    }

    const Potential& potential() const { return p_; }
    const CauchySolution& phi0() const { return phi0_; }
    const CauchySolution& phil() const { return phil_; }
    const GridFunction& eta0() const { return eta0_; }
    const GridFunction& etal() const { return etal_; }

    /// Representative grid function of a kernel element.
    GridFunction kernel_function(KernelElement k) const {
        return k.c0 * phi0_.u + k.cl * phil_.u;
    }

    /// Inner product of kernel elements as L2 of their representatives.
    double kernel_inner(KernelElement x, KernelElement y) const {
        return integrate(kernel_function(x), kernel_function(y));
    }

    /// Split u into u0 + L^{-1} g + h. The kernel part h matches the boundary
    /// values of u; g is fixed by matching the endpoint derivatives through
    /// the 2x2 system in the eta endpoint slopes.
    VishikParts vishik_decompose(const GridFunction& u) const {
        require_same_grid(u.grid(), p_.grid(), "vishik_decompose");
        auto du = endpoint_derivatives4(u);
        double c0 = u.back() / phi0_at_l_;
        double cl = u.front() / phil_at_0_;
        double r0 = du.first - c0 * phi0_.du[0] - cl * phil_.du[0];
        double rl = du.second - c0 * phi0_.du[phi0_.du.size() - 1] -
                    cl * phil_.du[phil_.du.size() - 1];
        double d0 = (r0 * detal_l_ - rl * detal_0_) / det_;
        double dl = (deta0_0_ * rl - deta0_l_ * r0) / det_;
        KernelElement g{d0, dl}, h{c0, cl};
        GridFunction u0 = u - (d0 * eta0_ + dl * etal_) - kernel_function(h);
        return {std::move(u0), g, h};
    }

    /// Boundary maps: Gamma1 u = -h_u, Gamma2 u = g_u.
    std::pair<KernelElement, KernelElement> boundary_gamma(const GridFunction& u) const {
        VishikParts parts = vishik_decompose(u);
        return {-parts.h, parts.g};
    }

    /// |(Lu, v) - (u, Lv) - [(Gamma1 u, Gamma2 v) - (Gamma2 u, Gamma1 v)]|
    /// with L applied by finite differences; vanishes for the continuum.
    double greens_residual(const GridFunction& u, const GridFunction& v) const {
        GridFunction Lu = apply_operator(u);
        GridFunction Lv = apply_operator(v);
        double lhs = integrate(Lu, v) - integrate(u, Lv);
        auto gu = boundary_gamma(u);
        auto gv = boundary_gamma(v);
        double rhs = kernel_inner(gu.first, gv.second) - kernel_inner(gu.second, gv.first);
        return std::fabs(lhs - rhs);
    }

    /// -u'' + q u by finite differences.
    GridFunction apply_operator(const GridFunction& u) const {
        require_same_grid(u.grid(), p_.grid(), "apply_operator");
        GridFunction d2 = differentiate(u, 2);
        return pointwise(p_.q(), u) - d2;
    }

private:
    Potential p_;
    CauchySolution phi0_, phil_;
    GridFunction eta0_, etal_;
    double phi0_at_l_ = 0.0, phil_at_0_ = 0.0;
    double deta0_0_ = 0.0, deta0_l_ = 0.0, detal_0_ = 0.0, detal_l_ = 0.0;
    double det_ = 0.0;
};

} // namespace slwave
