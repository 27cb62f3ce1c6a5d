#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "slwave/errors.hpp"
#include "slwave/green.hpp"
#include "slwave/grid.hpp"
#include "slwave/inverse.hpp"
#include "slwave/model.hpp"
#include "slwave/pipeline.hpp"
#include "slwave/slcore.hpp"
#include "slwave/spectrum.hpp"
#include "slwave/wave.hpp"

namespace slwave {

/// One self-check: pass means measured <= threshold, or measured >= threshold
/// for checks marked at_least (sign conditions, convergence orders).
struct VerifyCheck {
    std::string name;
    double measured = 0.0;
    double threshold = 0.0;
    bool at_least = false;
    bool pass = false;
};

struct VerifyReport {
    std::vector<VerifyCheck> checks;
    bool ok = true;
};

namespace detail {

inline void push_check(VerifyReport& rep, const std::string& name, double measured,
                       double threshold, bool at_least = false) {
    bool pass = at_least ? (measured >= threshold) : (measured <= threshold);
    rep.checks.push_back({name, measured, threshold, at_least, pass});
    rep.ok = rep.ok && pass;
}

/// Symmetric elementary set with interval endpoints drawn from a fixed
/// lattice of fractions of the length.
inline ElementarySet random_symmetric_set(std::mt19937_64& rng, double l) {
    std::uniform_int_distribution<int> cntd(1, 3), posd(0, 2047);
    std::vector<Interval> iv;
    int k = cntd(rng);
    for (int i = 0; i < k; ++i) {
        int a = posd(rng), b = posd(rng);
        if (a == b) b = a + 1;
        if (a > b) std::swap(a, b);
        double xa = l * a / 4096.0, xb = l * b / 4096.0;
        iv.push_back({xa, xb});
        iv.push_back({l - xb, l - xa});
    }
    return ElementarySet(l, std::move(iv));
}

} // namespace detail

/// Internal consistency suite: every module exercises one or two invariants
/// that hold for any admissible potential. Thresholds are pinned at the
/// default resolution (2001 nodes) and rescaled with the grid spacing; they
/// assume a smooth potential of moderate size (|q| up to about 10).
inline VerifyReport run_verify(const Potential& p, double cfl = 0.95, double delta = 0.0) {
    VerifyReport rep;
    const Grid& g = p.grid();
    const int n = g.count;
    const double l = g.length;
    const double h = g.spacing();
    if (delta <= 0.0) delta = default_delta(g);

    const double href = l / 2000.0;
    const double s2 = std::max((h / href) * (h / href), 0.01);
    const double s4 = std::max(std::pow(h / href, 4), 1e-4);
    const double rscale = std::max(href / h, 1.0); // roundoff grows on finer grids
    const double pi = 3.14159265358979323846;

    // ---- grid: quadrature and differentiation --------------------------
    {
        GridFunction cub = GridFunction::sample(g, [](double x) { return x * x * x; });
        double exact = 0.25 * l * l * l * l;
        detail::push_check(rep, "quadrature: cubic integrated exactly",
                           std::fabs(integrate(cub) - exact) / exact, 2e-14 * rscale);
    }
    {
        GridFunction f = GridFunction::sample(g, [&](double x) { return std::sin(2.0 * pi * x / l); });
        GridFunction d = differentiate(f, 1);
        double err = 0.0;
        for (int i = 0; i < n; ++i)
            err = std::max(err, std::fabs(d[i] - (2.0 * pi / l) * std::cos(2.0 * pi * g.node(i) / l)));
        detail::push_check(rep, "derivative: smooth max error", err / (2.0 * pi / l), 1e-5 * s2);
    }
    if ((n - 1) / 2 + 1 >= 7) {
        Grid gc{l, (n - 1) / 2 + 1};
        auto errof = [&](const Grid& gg) {
            GridFunction f = GridFunction::sample(gg, [&](double x) { return std::sin(2.0 * pi * x / l); });
            GridFunction d = differentiate(f, 1);
            double e = 0.0;
            for (int i = 0; i < gg.count; ++i)
                e = std::max(e, std::fabs(d[i] - (2.0 * pi / l) * std::cos(2.0 * pi * gg.node(i) / l)));
            return e;
        };
        double order = std::log(errof(gc) / errof(g)) / std::log(gc.spacing() / h);
        detail::push_check(rep, "derivative: convergence order", order, 1.9, true);
    }

    // ---- core solver ----------------------------------------------------
    detail::push_check(rep, "operator: lowest eigenvalue positive", p.lambda1(), 0.0, true);
    {
        KernelBasis kb = kernel_basis(p);
        double drift = 0.0;
        for (int i = 0; i < n; ++i)
            drift = std::max(drift, std::fabs(kb.e1.u[i] * kb.e2.du[i] - kb.e2.u[i] * kb.e1.du[i] - 1.0));
        detail::push_check(rep, "cauchy basis: wronskian drift", drift, 1e-9 * s4 * rscale);
    }
    {
        GridFunction f = GridFunction::sample(
            g, [&](double x) { return std::sin(3.0 * pi * x / l) + 0.4 * std::cos(pi * x / l); });
        GridFunction u = apply_l_inverse(p, f);
        GreenSystem gs(p);
        GridFunction r = gs.apply_operator(u) - f;
        double err = 0.0;
        for (int i = 2; i < n - 2; ++i) err = std::max(err, std::fabs(r[i]));
        detail::push_check(rep, "solver: operator inverts the solve", err / f.max_abs(),
                           1e-9 * rscale * rscale);
    }

    // ---- boundary decomposition ----------------------------------------
    {
        GreenSystem gs(p);
        GridFunction u = GridFunction::sample(
            g, [&](double x) { return std::cos(pi * x / l) + (x / l) * (x / l) + 1.0; });
        VishikParts parts = gs.vishik_decompose(u);
        auto du0 = endpoint_derivatives4(parts.u0);
        double worst = std::max(std::max(std::fabs(parts.u0.front()), std::fabs(parts.u0.back())),
                                std::max(std::fabs(du0.first), std::fabs(du0.second)));
        detail::push_check(rep, "decomposition: regular part has zero cauchy data",
                           worst / u.max_abs(), 1e-5 * s2);

        GridFunction v = GridFunction::sample(
            g, [&](double x) { return std::sin(2.0 * pi * x / l) + 0.3 * x / l; });
        detail::push_check(rep, "boundary maps: bilinear identity residual",
                           gs.greens_residual(u, v), 1e-4 * s2);
    }

    // ---- wave evolution --------------------------------------------------
    {
        Potential zero(GridFunction::zero(g));
        const int steps = (n - 1) / 2;
        std::vector<double> f0(static_cast<size_t>(steps) + 1, 0.0), fl(f0);
        for (int k = 4; k <= steps; ++k) {
            double t = static_cast<double>(k - 4) / std::max(1, steps - 4);
            f0[static_cast<size_t>(k)] = std::sin(pi * t) * std::sin(pi * t);
        }
        BoundaryControl c(h, f0, fl);
        WaveField w = simulate_boundary_control(zero, c, steps * h, 1.0);
        double err = 0.0;
        for (int k = 0; k <= steps; ++k)
            for (int i = 0; i < n; ++i) {
                double want = (k - i >= 0) ? f0[static_cast<size_t>(k - i)] : 0.0;
                err = std::max(err, std::fabs(w.at(k, i) - want));
            }
        detail::push_check(rep, "wave: unit-cfl transport is exact", err, 0.0);
    }
    {
        const int steps = static_cast<int>(std::lround(std::floor(0.4 * (n - 1))));
        std::vector<double> f0(static_cast<size_t>(steps) + 1, 0.0), fl(f0);
        for (int k = 4; k <= steps / 2; ++k) {
            double t = static_cast<double>(k - 4) / std::max(1, steps / 2 - 4);
            f0[static_cast<size_t>(k)] = std::sin(pi * t) * std::sin(pi * t);
        }
        double dt = cfl * h;
        BoundaryControl c(dt, f0, fl);
        WaveField w = simulate_boundary_control(p, c, steps * dt, cfl);
        double worst = 0.0; // one cell per step, exactly zero beyond
        for (int i = steps + 1; i < n; ++i) worst = std::max(worst, std::fabs(w.at(steps, i)));
        detail::push_check(rep, "wave: zero beyond the stencil cone", worst, 0.0);
    }
    {
        const double T = 0.5 * l;
        const double dt = cfl * h;
        const int steps = static_cast<int>(std::lround(T / dt));
        const double toff = 0.2 * steps * dt;
        auto src = [&](double x, double t) {
            if (t >= toff) return 0.0;
            double s = std::sin(pi * t / toff);
            double b = std::sin(pi * x / l);
            return 10.0 * s * s * b * b;
        };
        WaveField w = simulate_with_source(p, src, steps * dt, cfl);
        auto energy = [&](int k) {
            GridFunction ut = (1.0 / (2.0 * dt)) * (w.slice(k + 1) - w.slice(k - 1));
            GridFunction ux = differentiate(w.slice(k), 1);
            GridFunction qu = pointwise(p.q(), w.slice(k));
            return 0.5 * (integrate(ut, ut) + integrate(ux, ux) + integrate(qu, w.slice(k)));
        };
        int k0 = static_cast<int>(std::lround(0.5 * steps));
        int k1 = static_cast<int>(std::lround(0.75 * steps));
        int k2 = steps - 1;
        double e0 = energy(k0), e1 = energy(k1), e2 = energy(k2);
        double lo = std::min(e0, std::min(e1, e2)), hi = std::max(e0, std::max(e1, e2));
        double drift = (hi - lo) / std::max(std::fabs(hi), 1e-300);
        detail::push_check(rep, "wave: energy drift after source off", drift, 1e-4 * s2);
    }

    // ---- interval lattice -------------------------------------------------
    {
        std::mt19937_64 rng(0x5eedf00dULL);
        double worst = 0.0;
        for (int trial = 0; trial < 40; ++trial) {
            ElementarySet a = detail::random_symmetric_set(rng, l);
            ElementarySet b = detail::random_symmetric_set(rng, l);
            ElementarySet c = detail::random_symmetric_set(rng, l);
            worst = std::max(worst, symdiff_measure(lattice_join(a, b), lattice_join(b, a)));
            worst = std::max(worst, symdiff_measure(lattice_meet(a, lattice_join(b, c)),
                                                    lattice_join(lattice_meet(a, b), lattice_meet(a, c))));
            worst = std::max(worst, symdiff_measure(lattice_complement(lattice_join(a, b)),
                                                    lattice_meet(lattice_complement(a), lattice_complement(b))));
            worst = std::max(worst, symdiff_measure(lattice_join(a, lattice_meet(a, b)), a));
            worst = std::max(worst, symdiff_measure(lattice_complement(lattice_complement(a)), a));
        }
        detail::push_check(rep, "lattice: boolean identities exact", worst, 0.0);
    }
    {
        std::mt19937_64 rng(0xfeedULL);
        std::uniform_int_distribution<int> posd(0, 1024);
        double worst = 0.0;
        for (int trial = 0; trial < 10; ++trial) {
            Atom a{l * posd(rng) / 2048.0};
            GridFunction f = eikonal_profile(a, g);
            for (int i = 0; i < n; ++i)
                worst = std::max(worst, std::fabs(f[i] - f[g.reflect_index(i)]));
        }
        detail::push_check(rep, "eikonal: reflection symmetry", worst, 1e-12 * std::max(1.0, l));
        double tri = 0.0;
        for (int trial = 0; trial < 20; ++trial) {
            Atom a{l * posd(rng) / 2048.0}, b{l * posd(rng) / 2048.0}, c{l * posd(rng) / 2048.0};
            tri = std::max(tri, spectrum_distance(a, c) - spectrum_distance(a, b) - spectrum_distance(b, c));
        }
        detail::push_check(rep, "atoms: triangle inequality", tri, 4e-16 * std::max(1.0, l));
    }

    // ---- transform --------------------------------------------------------
    GaugeData gd = build_gauge(p);
    TransformData td = transform_matrix(gd);
    {
        detail::push_check(rep, "transform: exact degeneracy at the midpoint",
                           std::fabs(td.T[td.T.size() - 1].det()), 0.0);
        Matrix2Field G = gram_matrix(gd, td.T);
        double asym = 0.0;
        for (int j = 0; j < G.size(); ++j) asym = std::max(asym, std::fabs(G[j].m12 - G[j].m21));
        detail::push_check(rep, "gram field: symmetric by construction", asym, 0.0);
    }
    GridFunction utest = GridFunction::sample(
        g, [&](double x) { return std::sin(pi * x / l) * (1.0 + 0.5 * std::cos(2.0 * pi * x / l)); });
    {
        VectorGridFunction y = apply_w_c(td.T, utest);
        double nrm2 = integrate(utest, utest);
        detail::push_check(rep, "transform: image norm matches source norm",
                           std::fabs(hc_norm_sq(gd, td.T, y) - nrm2) / nrm2, 1e-6 * s2);
        GridFunction back = apply_w_c_adjoint(gd, td.T, y, delta);
        double err = 0.0;
        for (int i = 0; i < n; ++i) {
            double x = g.node(i);
            if (std::fabs(x - 0.5 * l) < delta) continue;
            err = std::max(err, std::fabs(back[i] - utest[i]));
        }
        detail::push_check(rep, "transform: inverse image outside the gap",
                           err / utest.max_abs(), 1e-10 * rscale);
    }

    // ---- model coefficients ------------------------------------------------
    ModelCoefficients mc = model_coefficients(gd, td, delta);
    {
        GreenSystem gs(p);
        GridFunction lu = gs.apply_operator(utest);
        VectorGridFunction left = apply_w_c(td.T, lu);
        VectorGridFunction image = apply_w_c(td.T, utest);
        const Grid kept = mc.P.grid();
        std::vector<Vec2> yv(static_cast<size_t>(kept.count));
        for (int j = 0; j < kept.count; ++j) yv[static_cast<size_t>(j)] = image[j];
        VectorGridFunction right = apply_model_operator(mc, VectorGridFunction(kept, std::move(yv)));
        const int r = kept.count - 1;
        double err = 0.0, scale = 0.0;
        for (int j = 0; j <= r; ++j) scale = std::max(scale, left[j].norm());
        for (int j = 2; j + 2 <= r; ++j) err = std::max(err, (left[j] - right[j]).norm());
        detail::push_check(rep, "model: intertwines with the operator", err / scale, 5e-3 * s2);
    }
    {
        Matrix2Field M = fundamental_matrix(mc.P, l);
        double det0 = td.T[0].det(), worst = 0.0;
        for (int j = 0; j < M.size(); ++j)
            worst = std::max(worst, std::fabs(M[j].det() * td.T[j].det() / det0 - 1.0));
        detail::push_check(rep, "transport: determinant identity", worst, 1e-8 * s4 * rscale);

        Matrix2Field A = similarity_restore(M, mc.P, mc.Q, l, mc.P1);
        BranchData br = eigen_branches(A);
        double worst2 = 0.0;
        for (int j = 0; j < A.size(); ++j) {
            double sc = std::max(1.0, A[j].max_abs());
            worst2 = std::max(worst2, std::fabs(br.b1[static_cast<size_t>(j)] +
                                                br.b2[static_cast<size_t>(j)] - A[j].trace()) / sc);
            worst2 = std::max(worst2, std::fabs(br.b1[static_cast<size_t>(j)] *
                                                    br.b2[static_cast<size_t>(j)] - A[j].det()) /
                                          (sc * sc));
        }
        detail::push_check(rep, "branches: trace and determinant consistent", worst2, 1e-10);
    }
    {
        RecoveryResult rec = run_roundtrip(p, delta);
        double err = roundtrip_error(p.q(), rec) / std::max(1.0, p.q().max_abs());
        detail::push_check(rep, "roundtrip: potential recovered", err, 1e-4 * s2);
    }

    return rep;
}

} // namespace slwave
