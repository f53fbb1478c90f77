#include "ncfsi/verification.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "ncfsi/assembly.hpp"
#include "ncfsi/stepper.hpp"

namespace ncfsi {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

Vec2 MmsSolution::u(Vec2 p) const {
    return {std::sin(kPi * p.x) * std::cos(kPi * p.y),
            -std::cos(kPi * p.x) * std::sin(kPi * p.y)};
}

double MmsSolution::omega(Vec2 p) const { return std::sin(kPi * p.x) * std::sin(kPi * p.y); }

double MmsSolution::pressure(Vec2 p) const { return std::cos(kPi * p.x) * std::sin(kPi * p.y); }

Vec2 MmsSolution::grad_omega(Vec2 p) const {
    return {kPi * std::cos(kPi * p.x) * std::sin(kPi * p.y),
            kPi * std::sin(kPi * p.x) * std::cos(kPi * p.y)};
}

Mat2 MmsSolution::grad_u(Vec2 p) const {
    const double sx = std::sin(kPi * p.x), cx = std::cos(kPi * p.x);
    const double sy = std::sin(kPi * p.y), cy = std::cos(kPi * p.y);
    return {kPi * cx * cy, -kPi * sx * sy, kPi * sx * sy, -kPi * cx * cy};
}

Vec2 MmsSolution::momentum_source(Vec2 p, const MaterialParams& prm) const {
    const double sx = std::sin(kPi * p.x), cx = std::cos(kPi * p.x);
    const double sy = std::sin(kPi * p.y), cy = std::cos(kPi * p.y);
    // lap(u) = -2 pi^2 u; grad p = (-pi sx sy, pi cx cy);
    // curl(omega) = (pi sx cy, -pi cx sy).
    const Vec2 lap_u{-2.0 * kPi * kPi * sx * cy, 2.0 * kPi * kPi * cx * sy};
    const Vec2 grad_p{-kPi * sx * sy, kPi * cx * cy};
    const Vec2 curl_w{kPi * sx * cy, -kPi * cx * sy};
    return -(prm.mu + prm.mu_r) * lap_u + grad_p - 2.0 * prm.mu_r * curl_w;
}

double MmsSolution::microrotation_source(Vec2 p, const MaterialParams& prm) const {
    const double w = omega(p);
    // lap(omega) = -2 pi^2 omega; curl(u) = 2 pi sin sin = 2 pi omega.
    return (2.0 * kPi * kPi * prm.lambda1 + 4.0 * prm.mu_r - 4.0 * kPi * prm.mu_r) * w;
}

std::string MmsResult::csv() const {
    std::ostringstream os;
    os << "h,err_u_L2,err_u_H1,err_w_L2,err_w_H1,err_p_L2,order_u_H1,order_w_H1,order_p_L2\n";
    char buf[256];
    for (std::size_t k = 0; k < levels.size(); ++k) {
        const auto& l = levels[k];
        if (k == 0) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,,,\n", l.h,
                          l.err_u_l2, l.err_u_h1, l.err_w_l2, l.err_w_h1, l.err_p_l2);
        } else {
            const auto& p = levels[k - 1];
            const double r = std::log2(p.h / l.h);
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.3f,%.3f,%.3f\n",
                          l.h, l.err_u_l2, l.err_u_h1, l.err_w_l2, l.err_w_h1, l.err_p_l2,
                          std::log2(p.err_u_h1 / l.err_u_h1) / r,
                          std::log2(p.err_w_h1 / l.err_w_h1) / r,
                          std::log2(p.err_p_l2 / l.err_p_l2) / r);
        }
        os << buf;
    }
    return os.str();
}

namespace {

/// Gauss-Legendre on [0,1] (Newton iteration), for the error quadrature.
void gauss01(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double t = std::cos(kPi * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = t;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const double dp = n * (t * p1 - p0) / (t * t - 1.0);
            const double dt = p1 / dp;
            t -= dt;
            if (std::fabs(dt) < 1e-15) break;
        }
        double p0 = 1.0, p1 = t;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        const double dp = n * (t * p1 - p0) / (t * t - 1.0);
        x[i] = 0.5 * (t + 1.0);
        w[i] = 1.0 / ((1.0 - t * t) * dp * dp);
    }
}

/// Error quadrature on the reference triangle via the Duffy transform;
/// independent of the production rule by construction.
struct ErrorQuadrature {
    std::vector<std::array<double, 3>> bary;
    std::vector<double> weight; // sums to 1/2
    ErrorQuadrature() {
        std::vector<double> x, w;
        gauss01(6, x, w);
        for (std::size_t i = 0; i < x.size(); ++i) {
            for (std::size_t j = 0; j < x.size(); ++j) {
                const double xi = x[i], eta = x[j] * (1.0 - xi);
                bary.push_back({1.0 - xi - eta, xi, eta});
                weight.push_back(w[i] * w[j] * (1.0 - xi));
            }
        }
    }
};

struct Errors {
    double u_l2 = 0, u_h1 = 0, w_l2 = 0, w_h1 = 0, p_l2 = 0;
};

Errors measure_errors(const State& s, const MmsSolution& sol) {
    static const ErrorQuadrature eq;
    Errors e;
    const TriMesh& mesh = *s.mesh;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const double detJ = mesh.jacobian(t).det();
        const auto& tri = mesh.tri(t);
        for (std::size_t q = 0; q < eq.bary.size(); ++q) {
            const auto& l = eq.bary[q];
            const Vec2 p = mesh.vertex(tri[0]) * l[0] + mesh.vertex(tri[1]) * l[1] +
                           mesh.vertex(tri[2]) * l[2];
            const double w = eq.weight[q] * detJ;
            const Vec2 du = s.u.eval_vector_in(t, l) - sol.u(p);
            const Mat2 dgu = s.u.grad_vector_in(t, l) - sol.grad_u(p);
            const double dw = s.omega.eval_scalar_in(t, l) - sol.omega(p);
            const Vec2 dgw = s.omega.grad_scalar_in(t, l) - sol.grad_omega(p);
            const double dp = s.p.eval_scalar_in(t, l) - sol.pressure(p);
            e.u_l2 += w * du.norm2();
            e.u_h1 += w * (du.norm2() + dgu.ddot(dgu));
            e.w_l2 += w * dw * dw;
            e.w_h1 += w * (dw * dw + dgw.norm2());
            e.p_l2 += w * dp * dp;
        }
    }
    e.u_l2 = std::sqrt(e.u_l2);
    e.u_h1 = std::sqrt(e.u_h1);
    e.w_l2 = std::sqrt(e.w_l2);
    e.w_h1 = std::sqrt(e.w_h1);
    e.p_l2 = std::sqrt(e.p_l2);
    return e;
}

State solve_mms_level(int cells, const MaterialParams& prm, const MmsSolution& sol) {
    auto mesh = std::make_shared<TriMesh>(build_rectangle_mesh(0, 0, 1, 1, cells, cells));
    State s = make_initial_state(mesh);

    AssemblyOptions opts;
    opts.blocks = BlockSet::full;
    opts.include_time_terms = false;
    opts.include_solid = false;
    opts.body_force = [&sol, &prm](Vec2 p) { return sol.momentum_source(p, prm); };
    opts.body_couple = [&sol, &prm](Vec2 p) { return sol.microrotation_source(p, prm); };
    MonolithicAssembler assembler(s.space, opts);
    auto [A, b] = assembler.assemble(*mesh, prm, 1.0, nullptr, nullptr, nullptr);

    // Dirichlet data from the exact solution on the entire boundary.
    std::vector<DirichletConstraint> cons;
    for (int node = 0; node < s.space->n_p2_nodes(); ++node) {
        bool bdry = false;
        for (const EdgeLabel l : {EdgeLabel::inlet, EdgeLabel::outlet, EdgeLabel::wall})
            bdry = bdry || s.space->p2_node_on_label(*mesh, node, l);
        if (!bdry) continue;
        const Vec2 p = s.space->p2_node_pos(*mesh, node);
        const Vec2 uex = sol.u(p);
        cons.push_back({assembler.gu(node, 0), uex.x});
        cons.push_back({assembler.gu(node, 1), uex.y});
        cons.push_back({assembler.gw(node), sol.omega(p)});
    }
    apply_dirichlet_in_place(A, b, cons);
    std::vector<double> x = factor_solve(A, b);
    for (const auto& [dof, v] : cons) x[dof] = v;

    std::vector<double> uc(2 * s.space->n_p2_nodes());
    std::vector<double> wc(s.space->n_p2_nodes());
    std::vector<double> pc(s.space->n_pressure_dofs());
    for (int n = 0; n < s.space->n_p2_nodes(); ++n) {
        uc[2 * n] = x[assembler.gu(n, 0)];
        uc[2 * n + 1] = x[assembler.gu(n, 1)];
        wc[n] = x[assembler.gw(n)];
    }
    for (int k = 0; k < s.space->n_pressure_dofs(); ++k) pc[k] = x[assembler.gp(k)];
    return State{0.0,
                 mesh,
                 s.space,
                 Field(s.space, mesh, SpaceTag::p2_vec, std::move(uc)),
                 Field(s.space, mesh, SpaceTag::p2, std::move(wc)),
                 Field(s.space, mesh, SpaceTag::p1_broken, std::move(pc)),
                 Field::zeros(s.space, mesh, SpaceTag::p2_vec)};
}

} // namespace

MmsResult mms_cosserat_fixed_domain(const std::vector<int>& cells_per_level,
                                    const MaterialParams& prm) {
    const MmsSolution sol;
    MmsResult result;
    for (const int cells : cells_per_level) {
        const State s = solve_mms_level(cells, prm, sol);
        const Errors e = measure_errors(s, sol);
        result.levels.push_back({1.0 / cells, e.u_l2, e.u_h1, e.w_l2, e.w_h1, e.p_l2});
    }
    if (result.levels.size() >= 2) {
        const auto& a = result.levels[result.levels.size() - 2];
        const auto& b = result.levels.back();
        const double r = std::log2(a.h / b.h);
        result.order_u_h1 = std::log2(a.err_u_h1 / b.err_u_h1) / r;
        result.order_w_h1 = std::log2(a.err_w_h1 / b.err_w_h1) / r;
        result.order_p_l2 = std::log2(a.err_p_l2 / b.err_p_l2) / r;
    }
    result.monotone = true;
    for (std::size_t k = 1; k < result.levels.size(); ++k) {
        const auto& p = result.levels[k - 1];
        const auto& l = result.levels[k];
        if (!(l.err_u_l2 < p.err_u_l2 && l.err_u_h1 < p.err_u_h1 && l.err_w_l2 < p.err_w_l2 &&
              l.err_w_h1 < p.err_w_h1 && l.err_p_l2 < p.err_p_l2))
            result.monotone = false;
    }
    result.pass = result.monotone && result.order_u_h1 >= 1.8 && result.order_w_h1 >= 1.8 &&
                  result.order_p_l2 >= 1.5;
    return result;
}

MmsResult mms_cosserat_fixed_domain(const std::vector<int>& cells_per_level) {
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
    return mms_cosserat_fixed_domain(cells_per_level, prm);
}

ChainCheckResult mooney_rivlin_chain_check(int trials) {
    ChainCheckResult out;
    out.trials = trials;
    const double c1 = 1e6, c2 = 3e5;
    std::uint64_t state = 0x2545F4914F6CDD1DULL;
    const auto rnd = [&state]() {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        return 0.6 * (static_cast<double>(state >> 11) * 0x1.0p-53) - 0.3;
    };
    for (int trial = 0; trial < trials; ++trial) {
        Mat2 gd{rnd(), rnd(), rnd(), rnd()};
        while (gd.max_abs() >= 0.3) gd = gd * 0.5;
        const Mat2 F = (Mat2::identity() - gd).inverse().transpose();
        const Mat2 B = F.matmul(F.transpose());
        const Mat2 lhs = 2.0 * c1 * B - 4.0 * c2 * B.det() * Mat2::identity();
        const double bdet = B.det(), btr = B.trace();
        const Mat2 dev = sym2(gd) - gd.matmul(gd.transpose());
        const Mat2 rhs =
            2.0 * c1 * bdet * dev +
            (2.0 * c1 * (btr - bdet) - 4.0 * c2 * bdet) * Mat2::identity();
        const double rel = (lhs - rhs).max_abs() / std::max(1.0, lhs.max_abs());
        if (rel > out.max_rel_discrepancy) {
            out.max_rel_discrepancy = rel;
            if (rel > 1e-10) {
                char buf[160];
                std::snprintf(buf, sizeof buf, "grad d = [[%.17g, %.17g], [%.17g, %.17g]]", gd.a,
                              gd.b, gd.c, gd.d);
                out.worst_case = buf;
            }
        }
    }
    out.pass = out.max_rel_discrepancy <= 1e-10;
    return out;
}

RegressionResult classical_regression(const BenchmarkGeometry& geom, int target_vertices,
                                      int n_steps, double dt) {
    RegressionResult out;
    out.steps = n_steps;
    auto mesh = std::make_shared<TriMesh>(build_benchmark_mesh(geom, target_vertices));

    MaterialParams classical;
    classical.mu_r = 0.0;
    classical.lambda1 = 0.0;
    classical.lambda2 = 0.0;
    classical.finalize();

    State with_w = make_initial_state(mesh);
    State without_w = make_initial_state(mesh);
    StepperOptions with_opts, without_opts;
    without_opts.with_omega_block = false;
    Stepper stepper_with(with_w.space, classical, with_opts);
    Stepper stepper_without(without_w.space, classical, without_opts);
    for (int k = 0; k < n_steps; ++k) {
        with_w = stepper_with.advance(with_w, dt);
        without_w = stepper_without.advance(without_w, dt);
        for (std::size_t i = 0; i < with_w.u.coeffs().size(); ++i)
            out.max_u_deviation = std::max(
                out.max_u_deviation, std::fabs(with_w.u.coeffs()[i] - without_w.u.coeffs()[i]));
    }

    // Sanity that the coupling is live: a Cosserat run must differ from the
    // classical one measurably.
    MaterialParams cosserat = classical;
    cosserat.mu_r = 0.5 * cosserat.mu;
    cosserat.lambda1 = 1e-3;
    cosserat.finalize();
    State coupled = make_initial_state(mesh);
    Stepper stepper_coupled(coupled.space, cosserat);
    for (int k = 0; k < n_steps; ++k) coupled = stepper_coupled.advance(coupled, dt);
    for (std::size_t i = 0; i < coupled.u.coeffs().size(); ++i)
        out.coupled_deviation = std::max(
            out.coupled_deviation, std::fabs(coupled.u.coeffs()[i] - with_w.u.coeffs()[i]));

    out.pass = out.max_u_deviation <= 1e-12 && out.coupled_deviation > 1e-6;
    return out;
}

} // namespace ncfsi
