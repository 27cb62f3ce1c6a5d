#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include <slwave/model.hpp>

using namespace slwave;

namespace {

constexpr double kPi = 3.14159265358979323846;

Potential zero_potential(int n) { return Potential(GridFunction::zero(build_grid(1.0, n))); }

double mat_diff(const Mat2& a, const Mat2& b) { return (a - b).max_abs(); }

// restriction of a half-grid image to the kept coefficient range
VectorGridFunction restrict_to(const VectorGridFunction& y, const Grid& rg) {
    std::vector<Vec2> v;
    v.reserve(static_cast<size_t>(rg.count));
    for (int j = 0; j < rg.count; ++j) v.push_back(y[j]);
    return VectorGridFunction(rg, std::move(v));
}

} // namespace

TEST_CASE("gauge of the free operator") {
    Potential p = zero_potential(401);
    GaugeData gd = build_gauge(p);
    const Grid& g = p.grid();

    // q = 0: the midpoint-normalized solution is identically 1, the weight 2
    for (int i = 0; i < g.count; ++i) {
        REQUIRE(gd.e.u[i] == 1.0);
        REQUIRE(gd.e.du[i] == 0.0);
        REQUIRE(gd.rho[i] == 2.0);
        REQUIRE(gd.e1.u[i] == 1.0);
    }
    // e2 integrates to x
    double err = 0.0;
    for (int i = 0; i < g.count; ++i) err = std::max(err, std::fabs(gd.e2.u[i] - g.node(i)));
    CHECK(err < 1e-13);
}

TEST_CASE("transform matrix of the free operator") {
    Potential p = zero_potential(401);
    GaugeData gd = build_gauge(p);
    TransformData td = transform_matrix(gd);
    const Grid hg = half_grid(p.grid());
    REQUIRE(td.T.size() == hg.count);
    CHECK(hg.length == 0.5);
    CHECK(std::fabs(hg.spacing() - p.grid().spacing()) < 1e-18);

    double errT = 0.0, errT1 = 0.0, errT2 = 0.0, errDet = 0.0;
    for (int j = 0; j < td.T.size(); ++j) {
        double x = hg.node(j);
        Mat2 wantT{0.5, 0.5, 0.5 * x, 0.5 * (1.0 - x)};
        Mat2 wantT1{0.0, 0.0, 0.5, -0.5};
        errT = std::max(errT, mat_diff(td.T[j], wantT));
        errT1 = std::max(errT1, mat_diff(td.T1[j], wantT1));
        errT2 = std::max(errT2, td.T2[j].max_abs());
        errDet = std::max(errDet, std::fabs(td.T[j].det() - 0.25 * (1.0 - 2.0 * x)));
    }
    CHECK(errT < 1e-13);
    CHECK(errT1 < 1e-13);
    CHECK(errT2 < 1e-13);
    CHECK(errDet < 1e-13);

    // the transform degenerates exactly at the midpoint node
    const int m = td.T.size() - 1;
    REQUIRE(td.T[m].det() == 0.0);
    CHECK_THROWS_AS(td.T[m].inverse(), numeric_error);
}

TEST_CASE("transform midpoint degeneracy holds for any potential") {
    Potential p(GridFunction::sample(build_grid(1.0, 201),
                                     [](double x) { return 2.0 + std::cos(3.0 * x); }));
    TransformData td = transform_matrix(build_gauge(p));
    const int m = td.T.size() - 1;
    // both columns sample the same node, so the determinant cancels bitwise
    REQUIRE(td.T[m].det() == 0.0);
}

TEST_CASE("gram matrix") {
    Potential p = zero_potential(401);
    GaugeData gd = build_gauge(p);
    TransformData td = transform_matrix(gd);
    Matrix2Field G = gram_matrix(gd, td.T);

    Mat2 want{1.0, 0.5, 0.5, 0.5};
    CHECK(mat_diff(G[0], want) < 1e-13);

    // exact symmetry by construction, for any potential
    Potential pt(GridFunction::sample(build_grid(1.0, 201),
                                      [](double x) { return 1.0 + x * x; }));
    GaugeData gdt = build_gauge(pt);
    TransformData tdt = transform_matrix(gdt);
    Matrix2Field Gt = gram_matrix(gdt, tdt.T);
    for (int j = 0; j < Gt.size(); ++j) REQUIRE(Gt[j].m12 == Gt[j].m21);
}

TEST_CASE("transform image of simple functions") {
    Potential p = zero_potential(401);
    GaugeData gd = build_gauge(p);
    TransformData td = transform_matrix(gd);
    const Grid& g = p.grid();

    VectorGridFunction y = apply_w_c(td.T, GridFunction::sample(g, [](double) { return 1.0; }));
    double err = 0.0;
    for (int j = 0; j < y.size(); ++j) {
        err = std::max(err, std::fabs(y[j].a - 1.0));
        err = std::max(err, std::fabs(y[j].b - 0.5));
    }
    CHECK(err < 1e-13);

    // grid mismatch is rejected
    GridFunction half = GridFunction::zero(half_grid(g));
    CHECK_THROWS_AS(apply_w_c(td.T, half), parameter_error);
}

TEST_CASE("image norm equals source norm") {
    Potential p = zero_potential(401);
    GaugeData gd = build_gauge(p);
    TransformData td = transform_matrix(gd);
    const Grid& g = p.grid();

    GridFunction one = GridFunction::sample(g, [](double) { return 1.0; });
    GridFunction lin = GridFunction::sample(g, [](double x) { return x; });
    CHECK(std::fabs(hc_norm_sq(gd, td.T, apply_w_c(td.T, one)) - 1.0) < 1e-8);
    CHECK(std::fabs(hc_norm_sq(gd, td.T, apply_w_c(td.T, lin)) - 1.0 / 3.0) < 1e-8);

    // nonzero potential: the norm identity is structural, not special to q = 0
    Potential pt(GridFunction::sample(build_grid(1.0, 801),
                                      [](double x) { return 2.0 + std::cos(3.0 * x); }));
    GaugeData gdt = build_gauge(pt);
    TransformData tdt = transform_matrix(gdt);
    GridFunction u = GridFunction::sample(pt.grid(), [](double x) {
        return std::sin(kPi * x) * (1.0 + 0.5 * std::cos(2.0 * kPi * x));
    });
    double want = integrate(u, u);
    double got = hc_norm_sq(gdt, tdt.T, apply_w_c(tdt.T, u));
    CHECK(std::fabs(got - want) < 1e-6 * want);
}

TEST_CASE("adjoint transform inverts the image") {
    Potential p(GridFunction::sample(build_grid(1.0, 801),
                                     [](double x) { return 2.0 + std::cos(3.0 * x); }));
    GaugeData gd = build_gauge(p);
    TransformData td = transform_matrix(gd);
    const Grid& g = p.grid();
    const double h = g.spacing();
    const double delta = 5.0 * h;

    GridFunction u = GridFunction::sample(g, [](double x) {
        return std::sin(kPi * x) + 0.3 * std::cos(2.0 * kPi * x);
    });
    GridFunction back = apply_w_c_adjoint(gd, td.T, apply_w_c(td.T, u), delta);

    double err_out = 0.0, err_all = 0.0;
    for (int i = 0; i < g.count; ++i) {
        double d = std::fabs(back[i] - u[i]);
        err_all = std::max(err_all, d);
        if (std::fabs(g.node(i) - 0.5) > delta + 1e-12) err_out = std::max(err_out, d);
    }
    CHECK(err_out < 1e-10);
    CHECK(err_all < 1e-6);

    CHECK_THROWS_AS(apply_w_c_adjoint(gd, td.T, apply_w_c(td.T, u), -1.0), parameter_error);
    CHECK_THROWS_AS(apply_w_c_adjoint(gd, td.T, apply_w_c(td.T, u), 0.4999), parameter_error);
}

TEST_CASE("model coefficients of the free operator") {
    Potential p = zero_potential(401);
    GaugeData gd = build_gauge(p);
    TransformData td = transform_matrix(gd);
    const double h = p.grid().spacing();
    ModelCoefficients mc = model_coefficients(gd, td, 5.0 * h);

    const int m = p.grid().midpoint_index();
    REQUIRE(mc.P.grid().count == m - 5 + 1);
    CHECK(std::fabs(mc.P.grid().spacing() - h) < 1e-18);

    double errP = 0.0, errQ = 0.0, errP1 = 0.0, errB = 0.0;
    for (int j = 0; j < mc.P.size(); ++j) {
        double x = mc.P.grid().node(j);
        double s = 1.0 - 2.0 * x;
        Mat2 wantP{0.0, 0.0, 2.0 / s, -4.0 / s};
        Mat2 wantQ{0.0, 0.0, 4.0 / (s * s), -8.0 / (s * s)};
        double scale = wantQ.max_abs();
        errP = std::max(errP, mat_diff(mc.P[j], wantP) / wantP.max_abs());
        errQ = std::max(errQ, mat_diff(mc.Q[j], wantQ) / scale);
        errP1 = std::max(errP1, mat_diff(mc.P1[j], wantQ) / scale);
        // Liouville normal form: Q + P^2/4 - P'/2 vanishes identically for q = 0
        Mat2 B = mc.Q[j] + mc.P[j] * mc.P[j] * 0.25 - mc.P1[j] * 0.5;
        errB = std::max(errB, B.max_abs());
    }
    CHECK(errP < 1e-9);
    CHECK(errQ < 1e-9);
    CHECK(errP1 < 1e-9);
    CHECK(errB < 1e-7);

    CHECK_THROWS_AS(model_coefficients(gd, td, 0.0), parameter_error);
    CHECK_THROWS_AS(model_coefficients(gd, td, 0.49), parameter_error);
}

TEST_CASE("model operator intertwines with the transform") {
    Potential p = zero_potential(401);
    GaugeData gd = build_gauge(p);
    TransformData td = transform_matrix(gd);
    const Grid& g = p.grid();
    ModelCoefficients mc = model_coefficients(gd, td, 5.0 * g.spacing());

    GridFunction u = GridFunction::sample(g, [](double x) { return std::sin(kPi * x); });
    VectorGridFunction y = restrict_to(apply_w_c(td.T, u), mc.P.grid());
    VectorGridFunction lhs = apply_model_operator(mc, y);

    // L u = pi^2 u, so the image must satisfy the model equation with the
    // same spectral factor
    double err = 0.0, scale = 0.0;
    for (int j = 0; j < y.size(); ++j) {
        Vec2 want = y[j] * (kPi * kPi);
        err = std::max(err, (lhs[j] - want).norm());
        scale = std::max(scale, want.norm());
    }
    CHECK(err < 5e-6 * scale);

    CHECK_THROWS_AS(apply_model_operator(mc, apply_w_c(td.T, u)), parameter_error);
}
