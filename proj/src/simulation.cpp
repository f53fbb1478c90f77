#include "ncfsi/simulation.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "ncfsi/snapshot.hpp"

namespace ncfsi {

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_snapshot_file(const std::filesystem::path& dir, int step, const State& state) {
    char name[40];
    std::snprintf(name, sizeof name, "snapshot_%06d.txt", step);
    std::ofstream os(dir / name, std::ios::binary);
    write_snapshot(os, state);
}

nlohmann::json config_json(const RunConfig& c) {
    nlohmann::json j;
    j["geometry"] = {{"domain_length", c.geometry.L},  {"domain_height", c.geometry.H},
                     {"cylinder_x", c.geometry.cx},    {"cylinder_y", c.geometry.cy},
                     {"cylinder_radius", c.geometry.r}, {"flag_length", c.geometry.l},
                     {"flag_thickness", c.geometry.h}};
    j["material"] = {{"rho_f", c.params.rho_f},
                     {"rho_s", c.params.rho_s},
                     {"mu", c.params.mu},
                     {"mu_r", c.params.mu_r},
                     {"lambda1", c.params.lambda1},
                     {"lambda2", c.params.lambda2},
                     {"micro_inertia", c.params.micro_inertia},
                     {"c1", c.params.c1},
                     {"c2", c.params.c2},
                     {"c3", c.params.c3},
                     {"zeta", c.params.zeta},
                     {"Ubar", c.params.Ubar}};
    j["numerics"] = {{"dt", c.dt},
                     {"t_max", c.t_max},
                     {"mesh_vertices", c.mesh_vertices},
                     {"mode", c.mode == RunMode::classical ? "classical" : "cosserat"},
                     {"determinism", c.determinism},
                     {"ramp", c.ramp},
                     {"t_ramp", c.t_ramp},
                     {"snapshot_every", c.snapshot_every}};
    j["body"] = {{"force_x", c.body_force.x},
                 {"force_y", c.body_force.y},
                 {"couple", c.body_couple}};
    return j;
}

} // namespace

RunResult run_simulation(const RunConfig& config_in) {
    RunConfig config = config_in;
    config.finalize();

    const auto wall_start = std::chrono::steady_clock::now();
    const std::filesystem::path dir(config.output_dir);
    std::filesystem::create_directories(dir);

    auto mesh = std::make_shared<TriMesh>(build_benchmark_mesh(config.geometry, config.mesh_vertices));
    State state = make_initial_state(mesh);
    const Vec2 control =
        config.control_point ? *config.control_point : default_control_point(*mesh);

    StepperOptions opts;
    opts.mode = config.determinism ? ScatterMode::parallel_ordered : ScatterMode::parallel_atomic;
    if (config.ramp) opts.ramp_time = config.t_ramp;
    if (config.body_force.x != 0.0 || config.body_force.y != 0.0) {
        const Vec2 f = config.body_force;
        opts.body_force = [f](Vec2) { return f; };
    }
    if (config.body_couple != 0.0) {
        const double g = config.body_couple;
        opts.body_couple = [g](Vec2) { return g; };
    }
    Stepper stepper(state.space, config.params, opts);

    RunResult result;
    result.control_point = control;
    result.min_area_over_run = mesh->min_signed_area();
    result.tip_csv_path = (dir / "tip.csv").string();
    result.provenance_path = (dir / "run.json").string();

    const int n_steps = static_cast<int>(std::llround(config.t_max / config.dt));

    std::ofstream tip(dir / "tip.csv", std::ios::binary);
    tip << "t,dx_A,dy_A\n";
    const auto emit = [&](const State& s) {
        const auto [dx, dy] = extract_tip_displacement(s, control);
        tip << fmt17(s.t) << ',' << fmt17(dx) << ',' << fmt17(dy) << "\n";
        result.tip.push_back({s.t, dx, dy});
    };
    emit(state);
    if (config.snapshot_every > 0) write_snapshot_file(dir, 0, state);

    const auto write_provenance = [&](const std::string& status, int failed_step) {
        nlohmann::json j;
        j["config"] = config_json(config);
        j["mesh"] = {{"vertices", mesh->n_vertices()},
                     {"triangles", mesh->n_triangles()},
                     {"edges", mesh->n_edges()},
                     {"fluid_area", mesh->region_area(Region::fluid)},
                     {"solid_area", mesh->region_area(Region::solid)},
                     {"initial_min_area", mesh->min_signed_area()}};
        j["control_point"] = {{"x", control.x}, {"y", control.y}};
        j["run"] = {{"status", status},
                    {"steps_completed", result.steps_completed},
                    {"steps_planned", n_steps},
                    {"min_area_over_run", result.min_area_over_run},
                    {"wall_seconds",
                     std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start)
                         .count()}};
        if (failed_step >= 0) j["run"]["failed_step"] = failed_step;
        std::ofstream js(dir / "run.json", std::ios::binary);
        js << j.dump(2) << "\n";
    };

    for (int step = 1; step <= n_steps; ++step) {
        try {
            state = stepper.advance(state, config.dt);
        } catch (const MeshInversion& e) {
            write_provenance("mesh_inversion", step);
            throw MeshInversion(e.triangle, std::string(e.what()) + " (at step " +
                                                std::to_string(step) + ")");
        } catch (const SolverFailure& e) {
            write_provenance("solver_failure", step);
            throw SolverFailure(std::string(e.what()) + " (at step " + std::to_string(step) + ")");
        } catch (const SingularMatrix& e) {
            write_provenance("singular_matrix", step);
            throw SingularMatrix(e.pivot, std::string(e.what()) + " (at step " +
                                              std::to_string(step) + ")");
        }
        result.steps_completed = step;
        result.min_area_over_run =
            std::min(result.min_area_over_run, state.mesh->min_signed_area());
        emit(state);
        if (config.snapshot_every > 0 &&
            (step % config.snapshot_every == 0 || step == n_steps))
            write_snapshot_file(dir, step, state);
        if (step % 100 == 0 || step == n_steps) {
            std::fprintf(stderr, "[ncfsi] t = %.3f (%d/%d steps), min area %.3e\n", state.t, step,
                         n_steps, result.min_area_over_run);
        }
    }
    tip.close();

    result.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
    write_provenance("completed", -1);
    return result;
}

} // namespace ncfsi
