#include "ncfsi/stepper.hpp"

#include <cmath>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ncfsi {

State make_initial_state(std::shared_ptr<const TriMesh> mesh) {
    auto space = std::make_shared<MixedSpace>(mesh);
    return State{0.0,
                 mesh,
                 space,
                 Field::zeros(space, mesh, SpaceTag::p2_vec),
                 Field::zeros(space, mesh, SpaceTag::p2),
                 Field::zeros(space, mesh, SpaceTag::p1_broken),
                 Field::zeros(space, mesh, SpaceTag::p2_vec)};
}

Vec2 characteristic_foot(Vec2 x, const Field& u_n, double dt) {
    const Vec2 u = interpolate_vector(u_n, x);
    const Vec2 foot = x - dt * u;
    if (u_n.mesh().locate(foot).found()) return foot;
    return u_n.mesh().project_to_boundary(foot).point;
}

Field convect(const Field& field, const Field& u_n, double dt) {
    if (field.space_ptr() != u_n.space_ptr() || field.mesh_ptr() != u_n.mesh_ptr())
        throw std::invalid_argument("convect: fields must share mesh and space");
    if (u_n.tag() != SpaceTag::p2_vec)
        throw std::invalid_argument("convect: transport velocity must be a P2 vector field");
    const bool vector = field.tag() == SpaceTag::p2_vec;
    if (!vector && field.tag() != SpaceTag::p2)
        throw std::invalid_argument("convect: only P2 fields are transported");

    const MixedSpace& space = field.space();
    const TriMesh& mesh = field.mesh();
    const int n = space.n_p2_nodes();
    std::vector<double> out(field.coeffs().size());
    const auto& uc = u_n.coeffs();

#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int node = 0; node < n; ++node) {
        const Vec2 x = space.p2_node_pos(mesh, node);
        const Vec2 un{uc[2 * node], uc[2 * node + 1]};
        const Vec2 foot = x - dt * un;
        LocateResult loc = mesh.locate_from(foot, space.p2_node_seed(node));
        if (!loc.found()) {
            const BoundaryProjection proj = mesh.project_to_boundary(foot);
            loc.tri = proj.tri;
            loc.bary = proj.bary;
        }
        if (vector) {
            const Vec2 v = field.eval_vector_in(loc.tri, loc.bary);
            out[2 * node] = v.x;
            out[2 * node + 1] = v.y;
        } else {
            out[node] = field.eval_scalar_in(loc.tri, loc.bary);
        }
    }
    return Field(field.space_ptr(), field.mesh_ptr(), field.tag(), std::move(out));
}

Stepper::Stepper(std::shared_ptr<const MixedSpace> space, MaterialParams params,
                 StepperOptions opts)
    : space_(std::move(space)), params_(params), opts_(std::move(opts)) {
    params_.finalize();
    split_ = params_.mu_r == 0.0;
    AssemblyOptions base;
    base.mode = opts_.mode;
    base.body_force = opts_.body_force;
    base.body_couple = opts_.body_couple;
    if (split_) {
        AssemblyOptions up = base;
        up.blocks = BlockSet::velocity_pressure;
        asm_up_ = std::make_unique<MonolithicAssembler>(space_, up);
        if (opts_.with_omega_block) {
            AssemblyOptions w = base;
            w.blocks = BlockSet::omega_only;
            w.body_force = nullptr;
            asm_w_ = std::make_unique<MonolithicAssembler>(space_, w);
        }
    } else {
        if (!opts_.with_omega_block)
            throw std::invalid_argument(
                "Stepper: dropping the microrotation block requires mu_r = 0");
        AssemblyOptions full = base;
        full.blocks = BlockSet::full;
        asm_full_ = std::make_unique<MonolithicAssembler>(space_, full);
    }
}

double Stepper::ramp_scale(double t) const {
    if (!(opts_.ramp_time > 0.0) || t >= opts_.ramp_time) return 1.0;
    return 0.5 * (1.0 - std::cos(M_PI * t / opts_.ramp_time));
}

std::vector<DirichletConstraint>
boundary_constraints(const TriMesh& mesh, const MixedSpace& space,
                     const MonolithicAssembler& assembler, const MaterialParams& params,
                     double scale) {
    std::vector<DirichletConstraint> cons;
    // Inlet extent for the parabolic profile.
    double ylo = std::numeric_limits<double>::infinity(), yhi = -ylo;
    bool has_inlet = false;
    for (int e : mesh.labeled_edges()) {
        if (mesh.edge_label(e) != EdgeLabel::inlet) continue;
        has_inlet = true;
        for (const int v : mesh.edges()[e]) {
            ylo = std::min(ylo, mesh.vertex(v).y);
            yhi = std::max(yhi, mesh.vertex(v).y);
        }
    }
    for (int node = 0; node < space.n_p2_nodes(); ++node) {
        const bool wall = space.p2_node_on_label(mesh, node, EdgeLabel::wall) ||
                          space.p2_node_on_label(mesh, node, EdgeLabel::cylinder);
        const bool inlet = has_inlet && space.p2_node_on_label(mesh, node, EdgeLabel::inlet);
        if (assembler.has_velocity()) {
            if (wall) {
                cons.push_back({assembler.gu(node, 0), 0.0});
                cons.push_back({assembler.gu(node, 1), 0.0});
            } else if (inlet) {
                const double y = space.p2_node_pos(mesh, node).y;
                const Vec2 v = inflow_profile(std::clamp(y - ylo, 0.0, yhi - ylo), params.Ubar,
                                              yhi - ylo) *
                               scale;
                cons.push_back({assembler.gu(node, 0), v.x});
                cons.push_back({assembler.gu(node, 1), v.y});
            }
        }
        if (assembler.has_omega() && (wall || inlet)) cons.push_back({assembler.gw(node), 0.0});
    }
    return cons;
}

State Stepper::advance(const State& state, double dt) const {
    if (state.space != space_) throw std::invalid_argument("Stepper: state from another space");
    if (!(dt > 0.0)) throw std::invalid_argument("Stepper: dt must be positive");
    const TriMesh& mesh = *state.mesh;
    const double scale = ramp_scale(state.t + dt);

    const Field u_conv = convect(state.u, state.u, dt);
    std::optional<Field> w_conv;
    if (opts_.with_omega_block) w_conv = convect(state.omega, state.u, dt);

    const int np2 = space_->n_p2_nodes();
    std::vector<double> unew(2 * np2, 0.0), wnew(np2, 0.0), pnew(space_->n_pressure_dofs(), 0.0);

    const auto enforce = [](std::vector<double>& x, const std::vector<DirichletConstraint>& cons) {
        for (const auto& [dof, v] : cons) x[dof] = v;
    };

    if (split_) {
        auto [A, b] = asm_up_->assemble(mesh, params_, dt, &u_conv, nullptr, &state.d);
        const auto cons = boundary_constraints(mesh, *space_, *asm_up_, params_, scale);
        apply_dirichlet_in_place(A, b, cons);
        std::vector<double> x = solve_checked(factor_up_, A, b);
        enforce(x, cons);
        for (int n = 0; n < np2; ++n) {
            unew[2 * n] = x[asm_up_->gu(n, 0)];
            unew[2 * n + 1] = x[asm_up_->gu(n, 1)];
        }
        for (int k = 0; k < space_->n_pressure_dofs(); ++k) pnew[k] = x[asm_up_->gp(k)];
        if (opts_.with_omega_block) {
            auto [Aw, bw] = asm_w_->assemble(mesh, params_, dt, nullptr, &*w_conv, nullptr);
            const auto cons_w = boundary_constraints(mesh, *space_, *asm_w_, params_, scale);
            apply_dirichlet_in_place(Aw, bw, cons_w);
            std::vector<double> xw = solve_checked(factor_w_, Aw, bw);
            enforce(xw, cons_w);
            for (int n = 0; n < np2; ++n) wnew[n] = xw[asm_w_->gw(n)];
        }
    } else {
        auto [A, b] = asm_full_->assemble(mesh, params_, dt, &u_conv, &*w_conv, &state.d);
        const auto cons = boundary_constraints(mesh, *space_, *asm_full_, params_, scale);
        apply_dirichlet_in_place(A, b, cons);
        std::vector<double> x = solve_checked(factor_full_, A, b);
        enforce(x, cons);
        for (int n = 0; n < np2; ++n) {
            unew[2 * n] = x[asm_full_->gu(n, 0)];
            unew[2 * n + 1] = x[asm_full_->gu(n, 1)];
            wnew[n] = x[asm_full_->gw(n)];
        }
        for (int k = 0; k < space_->n_pressure_dofs(); ++k) pnew[k] = x[asm_full_->gp(k)];
    }

    // Displacement update d + dt*u at the nodes the triangulation transports;
    // the fluid-side displacement stays zero.
    std::vector<double> dnew = state.d.coeffs();
    for (int n = 0; n < np2; ++n) {
        if (!space_->p2_node_touches(n, Region::solid)) continue;
        dnew[2 * n] += dt * unew[2 * n];
        dnew[2 * n + 1] += dt * unew[2 * n + 1];
    }

    // Mesh motion: solid vertices ride the velocity, fluid vertices follow
    // the harmonic extension of the interface velocity, outer boundaries
    // stay put.
    std::shared_ptr<const TriMesh> mesh2;
    if (mesh.interface_vertices().empty()) {
        mesh2 = state.mesh; // no solid: the triangulation never moves
    } else {
        std::vector<Vec2> iface_values(mesh.n_vertices(), Vec2{});
        for (const int v : mesh.interface_vertices())
            iface_values[v] = Vec2{unew[2 * v], unew[2 * v + 1]};
        const std::vector<Vec2> ext = laplace_extension(
            mesh, iface_values,
            {EdgeLabel::inlet, EdgeLabel::outlet, EdgeLabel::wall, EdgeLabel::cylinder});
        std::vector<Vec2> w(mesh.n_vertices());
        for (int v = 0; v < mesh.n_vertices(); ++v)
            w[v] = mesh.vertex_touches(v, Region::solid) ? Vec2{unew[2 * v], unew[2 * v + 1]}
                                                         : ext[v];
        mesh2 = std::make_shared<TriMesh>(move_vertices(mesh, w, dt));
    }

    return State{state.t + dt,
                 mesh2,
                 space_,
                 Field(space_, mesh2, SpaceTag::p2_vec, std::move(unew)),
                 Field(space_, mesh2, SpaceTag::p2, std::move(wnew)),
                 Field(space_, mesh2, SpaceTag::p1_broken, std::move(pnew)),
                 Field(space_, mesh2, SpaceTag::p2_vec, std::move(dnew))};
}

LinearSystem assemble_monolithic(const State& state, const MaterialParams& params, double dt,
                                 const StepperOptions& opts) {
    MaterialParams p = params;
    p.finalize();
    AssemblyOptions ao;
    ao.blocks = BlockSet::full;
    ao.mode = opts.mode;
    ao.body_force = opts.body_force;
    ao.body_couple = opts.body_couple;
    MonolithicAssembler assembler(state.space, ao);
    const Field u_conv = convect(state.u, state.u, dt);
    const Field w_conv = convect(state.omega, state.u, dt);
    auto [A, b] = assembler.assemble(*state.mesh, p, dt, &u_conv, &w_conv, &state.d);
    LinearSystem sys{std::move(A), std::move(b),
                     boundary_constraints(*state.mesh, *state.space, assembler, p, 1.0)};
    return sys;
}

State advance(const State& state, const MaterialParams& params, double dt,
              const StepperOptions& opts) {
    return Stepper(state.space, params, opts).advance(state, dt);
}

std::pair<double, double> extract_tip_displacement(const State& state, Vec2 control_point_initial) {
    const TriMesh& mesh = *state.mesh;
    const auto& dc = state.d.coeffs();
    for (int v = 0; v < mesh.n_vertices(); ++v) {
        if (!mesh.vertex_touches(v, Region::solid)) continue;
        const Vec2 d{dc[2 * v], dc[2 * v + 1]};
        const Vec2 initial = mesh.vertex(v) - d;
        if ((initial - control_point_initial).norm() <= 1e-9)
            return {d.x, d.y};
    }
    throw std::invalid_argument("extract_tip_displacement: point is not a tracked solid vertex");
}

Vec2 default_control_point(const TriMesh& mesh) {
    double ylo = std::numeric_limits<double>::infinity(), yhi = -ylo;
    for (int v = 0; v < mesh.n_vertices(); ++v) {
        if (!mesh.vertex_touches(v, Region::solid)) continue;
        ylo = std::min(ylo, mesh.vertex(v).y);
        yhi = std::max(yhi, mesh.vertex(v).y);
    }
    if (!(ylo <= yhi)) throw MeshError("default_control_point: mesh has no solid region");
    const double ymid = 0.5 * (ylo + yhi);
    Vec2 best{-std::numeric_limits<double>::infinity(), 0.0};
    for (int v = 0; v < mesh.n_vertices(); ++v) {
        if (!mesh.vertex_touches(v, Region::solid)) continue;
        const Vec2 q = mesh.vertex(v);
        if (q.x > best.x + 1e-12 ||
            (q.x > best.x - 1e-12 && std::fabs(q.y - ymid) < std::fabs(best.y - ymid)))
            best = q;
    }
    return best;
}

} // namespace ncfsi
