#pragma once

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "slwave/errors.hpp"
#include "slwave/grid.hpp"
#include "slwave/slcore.hpp"

namespace slwave {

/// Dirichlet boundary controls sampled on a uniform time grid. Controls must
/// vanish identically near t = 0: f(0) = 0 and the first two discrete
/// derivatives at t = 0 are zero (so samples 0..2 are zero up to rounding).
struct BoundaryControl {
    double dt = 0.0;
    std::vector<double> f0, fl;

    BoundaryControl(double dt_, std::vector<double> f0_, std::vector<double> fl_)
        : dt(dt_), f0(std::move(f0_)), fl(std::move(fl_)) {
        if (!(dt > 0.0)) throw parameter_error("BoundaryControl: dt must be positive");
        if (f0.size() != fl.size() || f0.size() < 3)
            throw parameter_error("BoundaryControl: need equal sample counts (>= 3)");
        double m = 0.0;
        for (double x : f0) m = std::max(m, std::fabs(x));
        for (double x : fl) m = std::max(m, std::fabs(x));
        const double tol = 1e-10 * std::max(m, 1e-300);
        for (int k = 0; k < 3; ++k)
            if (std::fabs(f0[static_cast<size_t>(k)]) > tol ||
                std::fabs(fl[static_cast<size_t>(k)]) > tol)
                throw parameter_error("BoundaryControl: controls must vanish identically near t=0");
    }

    int steps() const { return static_cast<int>(f0.size()) - 1; }
};

/// Space-time field u(x_i, t_n), row-major in time.
class WaveField {
public:
    WaveField(Grid g, double dt, int steps, std::vector<double> data)
        : grid_(g), dt_(dt), steps_(steps), data_(std::move(data)) {
        if (data_.size() != static_cast<size_t>(steps_ + 1) * static_cast<size_t>(grid_.count))
            throw parameter_error("WaveField: data size mismatch");
    }

    const Grid& grid() const { return grid_; }
    double dt() const { return dt_; }
    int steps() const { return steps_; }
    double duration() const { return steps_ * dt_; }

    double at(int n, int i) const {
        return data_[static_cast<size_t>(n) * static_cast<size_t>(grid_.count) +
                     static_cast<size_t>(i)];
    }

    /// Nearest time index for t; t must sit on the time grid.
    int time_index(double t) const {
        int n = static_cast<int>(std::lround(t / dt_));
        if (n < 0 || n > steps_ || std::fabs(n * dt_ - t) > 1e-9 * std::max(1.0, std::fabs(t)))
            throw parameter_error("WaveField: time not on the simulation time grid");
        return n;
    }

    GridFunction slice(int n) const {
        if (n < 0 || n > steps_) throw parameter_error("WaveField: time index out of range");
        std::vector<double> v(data_.begin() + static_cast<long>(n) * grid_.count,
                              data_.begin() + static_cast<long>(n + 1) * grid_.count);
        return GridFunction(grid_, std::move(v));
    }

    const std::vector<double>& data() const { return data_; }

private:
    Grid grid_;
    double dt_ = 0.0;
    int steps_ = 0;
    std::vector<double> data_;
};

namespace detail {

inline int resolve_steps(double T, double dt) {
    int steps = static_cast<int>(std::lround(T / dt));
    if (steps < 1 || std::fabs(steps * dt - T) > 1e-9 * std::max(1.0, T))
        throw parameter_error("simulate: final time must be a positive multiple of dt");
    return steps;
}

/// Shared leapfrog core: u_tt - u_xx + q u = g with Dirichlet rows supplied
/// by `boundary(n)` and zero initial data. Exact d'Alembert transport at
/// cfl = 1 with q = 0. The first step is the Taylor start, which reduces to
/// zero interior values for zero initial data and zero initial source.
template <class BoundaryFn, class SourceFn>
WaveField leapfrog(const Potential& p, double T, double cfl, BoundaryFn&& boundary,
                   SourceFn&& source) {
    if (!(cfl > 0.0) || cfl > 1.0) throw parameter_error("simulate: cfl must lie in (0, 1]");
    const Grid& g = p.grid();
    const int n = g.count;
    const double h = g.spacing();
    const double dt = cfl * h;
    const int steps = resolve_steps(T, dt);
    const double r2 = (dt / h) * (dt / h);
    const double dt2 = dt * dt;

    std::vector<double> data(static_cast<size_t>(steps + 1) * static_cast<size_t>(n), 0.0);
    auto row = [&](int k) { return data.data() + static_cast<size_t>(k) * static_cast<size_t>(n); };

    {
        auto [b0, bl] = boundary(0);
        row(0)[0] = b0;
        row(0)[n - 1] = bl;
    }
    {
        auto [b0, bl] = boundary(1);
        row(1)[0] = b0;
        row(1)[n - 1] = bl;
    }
    for (int k = 1; k < steps; ++k) {
        const double* prev = row(k - 1);
        const double* cur = row(k);
        double* next = row(k + 1);
        double tn = k * dt;
        for (int i = 1; i < n - 1; ++i) {
            // grouped so that cfl = 1 with q = 0 transports grid values bitwise
            double lap = (cur[i + 1] - 2.0 * cur[i] + cur[i - 1]);
            next[i] = (cur[i + 1] - prev[i]) + cur[i - 1] + (r2 - 1.0) * lap -
                      dt2 * p.at(i) * cur[i] + dt2 * source(i, tn);
        }
        auto [b0, bl] = boundary(k + 1);
        next[0] = b0;
        next[n - 1] = bl;
        for (int i = 0; i < n; ++i)
            if (!std::isfinite(next[i]) || std::fabs(next[i]) > 1e120)
                throw numeric_error("simulate: field blow-up");
    }
    return WaveField(g, dt, steps, std::move(data));
}

} // namespace detail

/// Forward control problem: u_tt - u_xx + q u = 0, zero initial data,
/// u(0,t) = f0(t), u(length,t) = fl(t). The control time grid must match the
/// simulation grid (dt = cfl * h) and cover all steps.
inline WaveField simulate_boundary_control(const Potential& p, const BoundaryControl& c, double T,
                                           double cfl) {
    const double dt = cfl * p.grid().spacing();
    if (std::fabs(c.dt - dt) > 1e-12 * std::max(dt, c.dt))
        throw parameter_error("simulate_boundary_control: control dt does not match cfl * h");
    const int steps = detail::resolve_steps(T, dt);
    if (c.steps() < steps)
        throw parameter_error("simulate_boundary_control: control shorter than simulation");
    return detail::leapfrog(
        p, T, cfl,
        [&](int k) {
            return std::pair<double, double>(c.f0[static_cast<size_t>(k)],
                                             c.fl[static_cast<size_t>(k)]);
        },
        [](int, double) { return 0.0; });
}

/// Dual source problem: v_tt - v_xx + q v = g with homogeneous Dirichlet
/// boundary and zero initial data; g is sampled at (x_i, t_n).
inline WaveField simulate_with_source(const Potential& p,
                                      const std::function<double(double, double)>& g, double T,
                                      double cfl) {
    const Grid& gr = p.grid();
    return detail::leapfrog(
        p, T, cfl, [](int) { return std::pair<double, double>(0.0, 0.0); },
        [&](int i, double t) { return g(gr.node(i), t); });
}

/// Closed intervals [a, b] of nodes where |u(., t)| >= threshold * max|u|.
/// An identically zero slice has empty support.
inline std::vector<std::pair<double, double>> support_bounds(const WaveField& w, double t,
                                                             double threshold = 1e-8) {
    const GridFunction u = w.slice(w.time_index(t));
    const double m = u.max_abs();
    std::vector<std::pair<double, double>> out;
    if (m == 0.0) return out;
    const double tol = threshold * m;
    const Grid& g = w.grid();
    int start = -1;
    for (int i = 0; i <= g.count; ++i) {
        bool on = i < g.count && std::fabs(u[i]) >= tol;
        if (on && start < 0) start = i;
        if (!on && start >= 0) {
            out.emplace_back(g.node(start), g.node(i - 1));
            start = -1;
        }
    }
    return out;
}

/// Fraction of the slice energy outside [0, a) U (length - b, length].
inline double energy_fraction_outside(const GridFunction& u, double a, double b) {
    const Grid& g = u.grid();
    double total = 0.0, outside = 0.0;
    for (int i = 0; i < g.count; ++i) {
        double e = u[i] * u[i];
        total += e;
        double x = g.node(i);
        if (x >= a && x <= g.length - b) outside += e;
    }
    return total == 0.0 ? 0.0 : outside / total;
}

} // namespace slwave
