#pragma once

#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "slwave/errors.hpp"
#include "slwave/grid.hpp"

namespace slwave {

/// Smallest eigenvalue of the Dirichlet discretization of -u'' + q u,
/// i.e. of the symmetric tridiagonal matrix tridiag(-1/h^2, 2/h^2 + q_i, -1/h^2)
/// over the interior nodes. Computed by bisection on the Sturm sign count,
/// exact for the discrete matrix; O(h^2) against the continuum value.
inline double lowest_dirichlet_eigenvalue(const GridFunction& q) {
    const int n = q.size();
    if (n < 3) throw parameter_error("lowest_dirichlet_eigenvalue: need at least 3 nodes");
    const double h = q.grid().spacing();
    const double off = -1.0 / (h * h);
    const int m = n - 2;
    std::vector<double> diag(static_cast<size_t>(m));
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (int i = 0; i < m; ++i) {
        diag[static_cast<size_t>(i)] = 2.0 / (h * h) + q[i + 1];
        lo = std::min(lo, diag[static_cast<size_t>(i)] - 2.0 / (h * h));
        hi = std::max(hi, diag[static_cast<size_t>(i)] + 2.0 / (h * h));
    }
    auto count_below = [&](double lambda) {
        // number of eigenvalues < lambda via the LDL^T pivot signs
        int cnt = 0;
        double d = 1.0;
        for (int i = 0; i < m; ++i) {
            d = diag[static_cast<size_t>(i)] - lambda - (i > 0 ? off * off / d : 0.0);
            if (d == 0.0) d = -1e-300;
            if (d < 0.0) ++cnt;
        }
        return cnt;
    };
    for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, std::fabs(lo)); ++it) {
        double mid = 0.5 * (lo + hi);
        if (count_below(mid) >= 1)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

/// Potential q on a primary grid. Construction verifies positive
/// definiteness of the Dirichlet operator (lowest eigenvalue > 0) and caches
/// midpoint samples of q for the Cauchy integrator.
class Potential {
public:
    explicit Potential(GridFunction q) : q_(std::move(q)) {
        if (q_.grid().count < 5 || q_.grid().count % 2 == 0)
            throw parameter_error("Potential: grid must be a primary grid (odd count >= 5)");
        lambda1_ = lowest_dirichlet_eigenvalue(q_);
        if (!(lambda1_ > 0.0))
            throw numeric_error("Potential: operator not positive definite (lambda1 <= 0)");
        build_midpoints();
    }

    const GridFunction& q() const { return q_; }
    const Grid& grid() const { return q_.grid(); }
    double lambda1() const { return lambda1_; }

    double at(int i) const { return q_[i]; }
    /// q at the midpoint of cell [x_i, x_{i+1}] (cubic interpolation, O(h^4)).
    double at_mid(int i) const { return qmid_[static_cast<size_t>(i)]; }

private:
    void build_midpoints() {
        const int n = q_.size();
        qmid_.resize(static_cast<size_t>(n - 1));
        for (int i = 0; i + 1 < n; ++i) {
            double v;
            if (i == 0)
                v = (5.0 * q_[0] + 15.0 * q_[1] - 5.0 * q_[2] + q_[3]) / 16.0;
            else if (i == n - 2)
                v = (q_[n - 4] - 5.0 * q_[n - 3] + 15.0 * q_[n - 2] + 5.0 * q_[n - 1]) / 16.0;
            else
                v = (-q_[i - 1] + 9.0 * q_[i] + 9.0 * q_[i + 1] - q_[i + 2]) / 16.0;
            qmid_[static_cast<size_t>(i)] = v;
        }
    }

    GridFunction q_;
    std::vector<double> qmid_;
    double lambda1_ = 0.0;
};

/// Solution of the Cauchy problem -u'' + q u = 0 together with its
/// first-derivative samples.
struct CauchySolution {
    GridFunction u;
    GridFunction du;
};

namespace detail {

/// March -u'' + q u = 0 from node `start` to both interval ends with RK4,
/// step = grid spacing. Values above `overflow` abort.
inline CauchySolution integrate_cauchy(const Potential& p, int start, double u0, double du0) {
    const Grid& g = p.grid();
    const int n = g.count;
    const double h = g.spacing();
    std::vector<double> u(static_cast<size_t>(n)), v(static_cast<size_t>(n));
    u[static_cast<size_t>(start)] = u0;
    v[static_cast<size_t>(start)] = du0;
    const double overflow = 1e150;

    auto step = [&](int i, int dir) {
        // RK4 for (u, v)' = (v, q u); q at the half step from the midpoint cache
        double hh = dir * h;
        int cell = dir > 0 ? i : i - 1;
        double q0 = p.at(i), qm = p.at_mid(cell), q1 = p.at(i + dir);
        double uu = u[static_cast<size_t>(i)], vv = v[static_cast<size_t>(i)];
        double k1u = vv, k1v = q0 * uu;
        double k2u = vv + 0.5 * hh * k1v, k2v = qm * (uu + 0.5 * hh * k1u);
        double k3u = vv + 0.5 * hh * k2v, k3v = qm * (uu + 0.5 * hh * k2u);
        double k4u = vv + hh * k3v, k4v = q1 * (uu + hh * k3u);
        double un = uu + hh / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        double vn = vv + hh / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        if (!std::isfinite(un) || !std::isfinite(vn) || std::fabs(un) > overflow ||
            std::fabs(vn) > overflow)
            throw numeric_error("solve_cauchy: solution overflow");
        u[static_cast<size_t>(i + dir)] = un;
        v[static_cast<size_t>(i + dir)] = vn;
    };

    for (int i = start; i + 1 < n; ++i) step(i, +1);
    for (int i = start; i - 1 >= 0; --i) step(i, -1);
    return {GridFunction(g, std::move(u)), GridFunction(g, std::move(v))};
}

} // namespace detail

/// Cauchy solve of -u'' + q u = 0 with data (u0, du0) posed at x0 = 0 or
/// x0 = length. Classical RK4 on the first-order system, one step per cell.
inline CauchySolution solve_cauchy(const Potential& p, double x0, double u0, double du0) {
    const Grid& g = p.grid();
    int start;
    if (x0 == 0.0)
        start = 0;
    else if (x0 == g.length)
        start = g.count - 1;
    else
        throw parameter_error("solve_cauchy: x0 must be 0 or length");
    return detail::integrate_cauchy(p, start, u0, du0);
}

/// Dirichlet solve u = L^{-1} f: tridiagonal second-order discretization of
/// -u'' + q u = f with u(0) = u(length) = 0, Thomas elimination.
inline GridFunction apply_l_inverse(const Potential& p, const GridFunction& f) {
    require_same_grid(p.grid(), f.grid(), "apply_l_inverse");
    const int n = p.grid().count;
    const double h = p.grid().spacing();
    const double off = -1.0 / (h * h);
    const int m = n - 2;
    std::vector<double> c(static_cast<size_t>(m)), d(static_cast<size_t>(m));
    double piv = 2.0 / (h * h) + p.at(1);
    c[0] = off / piv;
    d[0] = f[1] / piv;
    for (int i = 1; i < m; ++i) {
        piv = 2.0 / (h * h) + p.at(i + 1) - off * c[static_cast<size_t>(i - 1)];
        if (piv == 0.0) throw numeric_error("apply_l_inverse: zero pivot");
        c[static_cast<size_t>(i)] = off / piv;
        d[static_cast<size_t>(i)] = (f[i + 1] - off * d[static_cast<size_t>(i - 1)]) / piv;
    }
    std::vector<double> u(static_cast<size_t>(n), 0.0);
    u[static_cast<size_t>(m)] = d[static_cast<size_t>(m - 1)];
    for (int i = m - 2; i >= 0; --i)
        u[static_cast<size_t>(i + 1)] =
            d[static_cast<size_t>(i)] - c[static_cast<size_t>(i)] * u[static_cast<size_t>(i + 2)];
    return GridFunction(p.grid(), std::move(u));
}

/// Basis of the defect space: e1, e2 with Cauchy data (1,0) and (0,1) at x=0.
struct KernelBasis {
    CauchySolution e1, e2;
};

inline KernelBasis kernel_basis(const Potential& p) {
    return {solve_cauchy(p, 0.0, 1.0, 0.0), solve_cauchy(p, 0.0, 0.0, 1.0)};
}

/// Count zeros of u on [0, length]: node values below 1e-12 * max|u| are
/// zeros (a run of them counts once), plus sign changes between neighboring
/// nonzero nodes. An identically zero u is degenerate and rejected.
inline int count_zeros(const GridFunction& u) {
    double m = u.max_abs();
    if (m == 0.0) throw numeric_error("count_zeros: function is identically zero");
    const double tol = 1e-12 * m;
    int zeros = 0;
    int prev_sign = 0;
    bool zero_run = false;
    for (int i = 0; i < u.size(); ++i) {
        double x = u[i];
        if (std::fabs(x) <= tol) {
            if (!zero_run) {
                ++zeros;
                zero_run = true;
            }
            continue;
        }
        int s = x > 0.0 ? 1 : -1;
        if (prev_sign != 0 && s != prev_sign && !zero_run) ++zeros; // crossing between nodes
        prev_sign = s;
        zero_run = false;
    }
    return zeros;
}

/// Parse a potential specification: "const:c", "poly:a0,a1,...",
/// "trig:a,b,k" meaning a + b*cos(k x). Anything else is a parameter error.
inline GridFunction parse_potential_spec(const std::string& spec, const Grid& g) {
    auto colon = spec.find(':');
    if (colon == std::string::npos)
        throw parameter_error("potential spec: expected kind:args, got '" + spec + "'");
    std::string kind = spec.substr(0, colon);
    std::string args = spec.substr(colon + 1);
    std::vector<double> nums;
    {
        std::stringstream ss(args);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            try {
                size_t pos = 0;
                nums.push_back(std::stod(tok, &pos));
                if (pos != tok.size()) throw std::invalid_argument(tok);
            } catch (const std::exception&) {
                throw parameter_error("potential spec: bad number '" + tok + "'");
            }
        }
    }
    if (kind == "const") {
        if (nums.size() != 1) throw parameter_error("potential spec: const:c takes one number");
        return GridFunction::sample(g, [&](double) { return nums[0]; });
    }
    if (kind == "poly") {
        if (nums.empty()) throw parameter_error("potential spec: poly needs coefficients");
        return GridFunction::sample(g, [&](double x) {
            double s = 0.0;
            for (size_t k = nums.size(); k-- > 0;) s = s * x + nums[k];
            return s;
        });
    }
    if (kind == "trig") {
        if (nums.size() != 3) throw parameter_error("potential spec: trig:a,b,k takes three numbers");
        return GridFunction::sample(g, [&](double x) { return nums[0] + nums[1] * std::cos(nums[2] * x); });
    }
    throw parameter_error("potential spec: unknown kind '" + kind + "'");
}

} // namespace slwave
