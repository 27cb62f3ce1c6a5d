#pragma once

#include <algorithm>
#include <cmath>

#include "slwave/grid.hpp"
#include "slwave/inverse.hpp"
#include "slwave/model.hpp"
#include "slwave/slcore.hpp"

namespace slwave {

/// Everything the forward pass produces for one potential.
struct ForwardModel {
    GaugeData gauge;
    TransformData transform;
    ModelCoefficients coeffs;
};

/// Default width of the excluded zone around the midpoint: five cells.
inline double default_delta(const Grid& g) { return 5.0 * g.spacing(); }

inline ForwardModel run_forward(const Potential& p, double delta) {
    GaugeData gd = build_gauge(p);
    TransformData td = transform_matrix(gd);
    ModelCoefficients mc = model_coefficients(gd, td, delta);
    return {std::move(gd), std::move(td), std::move(mc)};
}

/// Recovery error against a known potential: the better candidate's max-norm
/// deviation over [0.02 l, 0.98 l] minus the zone (l/2 - 5h, l/2 + 5h).
inline double roundtrip_error(const GridFunction& q_true, const RecoveryResult& rec) {
    const Grid& g = q_true.grid();
    require_same_grid(g, rec.q_plus.grid(), "roundtrip_error");
    const double h = g.spacing();
    const double lo = 0.02 * g.length, hi = 0.98 * g.length;
    const double za = 0.5 * g.length - 5.0 * h, zb = 0.5 * g.length + 5.0 * h;
    double ep = 0.0, em = 0.0;
    for (int i = 0; i < g.count; ++i) {
        double x = g.node(i);
        if (x < lo || x > hi) continue;
        if (x > za && x < zb) continue;
        ep = std::max(ep, std::fabs(rec.q_plus[i] - q_true[i]));
        em = std::max(em, std::fabs(rec.q_minus[i] - q_true[i]));
    }
    return std::min(ep, em);
}

/// Forward data followed by the inverse chain, using the analytic coefficient
/// derivative carried by the forward pass.
inline RecoveryResult run_roundtrip(const Potential& p, double delta) {
    ForwardModel fm = run_forward(p, delta);
    return recover_potential(fm.coeffs.P, fm.coeffs.Q, p.grid().length, delta, fm.coeffs.P1);
}

} // namespace slwave
