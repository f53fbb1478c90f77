#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ncfsi/verification.hpp"
#include "oracles.hpp"

using namespace ncfsi;

namespace {

MaterialParams mms_params() {
    MaterialParams prm;
    prm.rho_f = 1.0;
    prm.rho_s = 1.0;
    prm.mu = 1.0;
    prm.mu_r = 0.3;
    prm.lambda1 = 0.5;
    prm.micro_inertia = 1.0;
    prm.c1 = 0.0;
    prm.zeta = 1e-10;
    prm.Ubar = 0.0;
    prm.finalize();
    return prm;
}

} // namespace

TEST_CASE("manufactured solution is divergence-free with zero normal trace") {
    const MmsSolution sol;
    oracles::Rng rng(3);
    for (int k = 0; k < 50; ++k) {
        const Vec2 p{rng.uniform(), rng.uniform()};
        const Mat2 g = sol.grad_u(p);
        CHECK(std::fabs(g.a + g.d) < 1e-12); // div u = 0
        // gradient consistency by finite differences
        const double h = 1e-6;
        const Vec2 dx = (sol.u({p.x + h, p.y}) - sol.u({p.x - h, p.y})) / (2 * h);
        const Vec2 dy = (sol.u({p.x, p.y + h}) - sol.u({p.x, p.y - h})) / (2 * h);
        CHECK(g.a == doctest::Approx(dx.x).epsilon(1e-7));
        CHECK(g.b == doctest::Approx(dy.x).epsilon(1e-7));
        CHECK(g.c == doctest::Approx(dx.y).epsilon(1e-7));
        CHECK(g.d == doctest::Approx(dy.y).epsilon(1e-7));
        const Vec2 gw = sol.grad_omega(p);
        CHECK(gw.x ==
              doctest::Approx((sol.omega({p.x + h, p.y}) - sol.omega({p.x - h, p.y})) / (2 * h))
                  .epsilon(1e-7));
        CHECK(gw.y ==
              doctest::Approx((sol.omega({p.x, p.y + h}) - sol.omega({p.x, p.y - h})) / (2 * h))
                  .epsilon(1e-7));
    }
    // zero normal trace on the unit square
    for (double t = 0.0; t <= 1.0; t += 0.1) {
        CHECK(std::fabs(sol.u({0.0, t}).x) < 1e-15);
        CHECK(std::fabs(sol.u({1.0, t}).x) < 1e-15);
        CHECK(std::fabs(sol.u({t, 0.0}).y) < 1e-15);
        CHECK(std::fabs(sol.u({t, 1.0}).y) < 1e-15);
    }
}

TEST_CASE("manufactured sources match finite differences of the strong operator") {
    // The discrete weak form corresponds to the strong operator
    // -(mu+mu_r) lap(u) + grad(p) - 2 mu_r curl(omega) in the momentum
    // equation and -lambda1 lap(w) + 4 mu_r w - 2 mu_r curl(u) in the
    // microrotation equation; verify the closed-form sources against
    // second-order finite differences of the fields.
    const MmsSolution sol;
    const MaterialParams prm = mms_params();
    const double h = 1e-5;
    oracles::Rng rng(13);
    for (int k = 0; k < 30; ++k) {
        const Vec2 p{rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9)};

        const auto lap = [&](const std::function<double(Vec2)>& f) {
            return (f({p.x + h, p.y}) + f({p.x - h, p.y}) + f({p.x, p.y + h}) +
                    f({p.x, p.y - h}) - 4.0 * f(p)) /
                   (h * h);
        };
        const Vec2 lap_u{lap([&](Vec2 q) { return sol.u(q).x; }),
                         lap([&](Vec2 q) { return sol.u(q).y; })};
        const Vec2 grad_p{(sol.pressure({p.x + h, p.y}) - sol.pressure({p.x - h, p.y})) / (2 * h),
                          (sol.pressure({p.x, p.y + h}) - sol.pressure({p.x, p.y - h})) / (2 * h)};
        const Vec2 gw = sol.grad_omega(p);
        const Vec2 curl_w{gw.y, -gw.x};
        const Vec2 f_fd = -(prm.mu + prm.mu_r) * lap_u + grad_p - 2.0 * prm.mu_r * curl_w;
        const Vec2 f = sol.momentum_source(p, prm);
        CHECK(f.x == doctest::Approx(f_fd.x).epsilon(1e-4));
        CHECK(f.y == doctest::Approx(f_fd.y).epsilon(1e-4));

        const double lap_w = lap([&](Vec2 q) { return sol.omega(q); });
        const Mat2 gu = sol.grad_u(p);
        const double curl_u = gu.c - gu.b;
        const double g_fd =
            -prm.lambda1 * lap_w + 4.0 * prm.mu_r * sol.omega(p) - 2.0 * prm.mu_r * curl_u;
        CHECK(sol.microrotation_source(p, prm) == doctest::Approx(g_fd).epsilon(1e-4));
    }
}

TEST_CASE("MMS converges at second order between two levels (smoke)") {
    const MmsResult r = mms_cosserat_fixed_domain({8, 16});
    REQUIRE(r.levels.size() == 2);
    CHECK(r.levels[1].err_u_h1 < r.levels[0].err_u_h1);
    CHECK(r.levels[1].err_w_h1 < r.levels[0].err_w_h1);
    CHECK(r.levels[1].err_p_l2 < r.levels[0].err_p_l2);
    CHECK(r.order_u_h1 >= 1.8);
    CHECK(r.order_w_h1 >= 1.8);
    CHECK(r.order_p_l2 >= 1.5);
    CHECK(!r.csv().empty());
    CHECK(r.csv().substr(0, 2) == "h,");
}

TEST_CASE("MMS: with mu_r = 0 the omega errors are independent of the velocity problem") {
    MaterialParams a = mms_params();
    a.mu_r = 0.0;
    MaterialParams b = a;
    b.mu = 7.0; // perturbs only the velocity block
    const MmsResult ra = mms_cosserat_fixed_domain({8}, a);
    const MmsResult rb = mms_cosserat_fixed_domain({8}, b);
    CHECK(ra.levels[0].err_w_l2 == doctest::Approx(rb.levels[0].err_w_l2).epsilon(1e-12));
    CHECK(ra.levels[0].err_w_h1 == doctest::Approx(rb.levels[0].err_w_h1).epsilon(1e-12));
    // while the velocity errors do change (the viscous balance shifts)
    CHECK(ra.levels[0].err_u_h1 != rb.levels[0].err_u_h1);
}

TEST_CASE("Mooney-Rivlin chain check operation") {
    const ChainCheckResult r = mooney_rivlin_chain_check(100);
    CHECK(r.trials == 100);
    CHECK(r.pass);
    CHECK(r.max_rel_discrepancy <= 1e-10);
    CHECK(r.worst_case.empty());
}

TEST_CASE("classical regression on a coarse benchmark (10 steps)") {
    const RegressionResult r = classical_regression(BenchmarkGeometry{}, 600, 10, 0.005);
    CHECK(r.steps == 10);
    CHECK(r.max_u_deviation <= 1e-12);
    CHECK(r.coupled_deviation > 1e-6);
    CHECK(r.pass);
}
