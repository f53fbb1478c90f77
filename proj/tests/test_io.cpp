#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "ncfsi/config.hpp"
#include "ncfsi/simulation.hpp"
#include "ncfsi/snapshot.hpp"

using namespace ncfsi;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    REQUIRE(f.good());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

RunConfig tiny_run_config(const std::string& outdir, int steps) {
    RunConfig c;
    c.mesh_vertices = 600;
    c.dt = 0.005;
    c.t_max = steps * c.dt;
    c.output_dir = outdir;
    c.snapshot_every = steps; // initial + final snapshot
    return c;
}

} // namespace

TEST_CASE("empty config gives the benchmark defaults") {
    const RunConfig c = parse_config_text("");
    CHECK(c.geometry.L == 2.5);
    CHECK(c.geometry.H == 0.41);
    CHECK(c.geometry.cx == 0.2);
    CHECK(c.geometry.cy == 0.2);
    CHECK(c.geometry.r == 0.05);
    CHECK(c.geometry.l == 0.35);
    CHECK(c.geometry.h == 0.02);
    CHECK(c.params.Ubar == 2.0);
    CHECK(c.params.rho_f == 1e3);
    CHECK(c.params.rho_s == 1e3);
    CHECK(c.params.mu == 1.0); // nu_f = mu/rho_f = 1e-3
    CHECK(c.params.c1 == 1e6);
    CHECK(c.dt == 0.005);
    CHECK(c.t_max == 5.0);
    CHECK(c.mesh_vertices == 2199);
    CHECK(c.mode == RunMode::cosserat);
    CHECK(c.determinism);
    CHECK(!c.ramp);
}

TEST_CASE("config parsing") {
    SUBCASE("comments, whitespace and overrides") {
        RunConfig c = parse_config_text("# comment line\n"
                                        "  dt = 0.01   # trailing comment\n"
                                        "\n"
                                        "mu_r = 0.25\n"
                                        "mode = classical\n"
                                        "determinism = off\n");
        CHECK(c.dt == 0.01);
        CHECK(c.params.mu_r == 0.25);
        CHECK(c.mode == RunMode::classical);
        CHECK(!c.determinism);
        c.finalize();
        // classical mode forces the micro coefficients to zero
        CHECK(c.params.mu_r == 0.0);
        CHECK(c.params.lambda1 == 0.0);
        CHECK(c.params.lambda2 == 0.0);
    }
    SUBCASE("negative dt is a constraint error naming dt") {
        RunConfig c = parse_config_text("dt = -1\n");
        try {
            c.finalize();
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("dt") != std::string::npos);
        }
    }
    SUBCASE("unknown keys are rejected by name") {
        try {
            (void)parse_config_text("muu_r = 0.5\n");
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("muu_r") != std::string::npos);
        }
    }
    SUBCASE("parse errors carry the line number") {
        try {
            (void)parse_config_text("dt = 0.005\nthis is not a key value line\n");
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("line 2") != std::string::npos);
        }
    }
    SUBCASE("--set style overrides") {
        RunConfig c;
        apply_override(c, "c1=2e6");
        CHECK(c.params.c1 == 2e6);
        CHECK_THROWS_AS(apply_override(c, "nonsense"), ConfigError);
        CHECK_THROWS_AS(apply_override(c, "bogus_key=1"), ConfigError);
    }
    SUBCASE("key table help lists every key") {
        const std::string help = config_keys_help();
        for (const char* key : {"domain_length", "mu_r", "zeta", "mesh_vertices", "mode"})
            CHECK(help.find(key) != std::string::npos);
    }
}

TEST_CASE("run_simulation writes tip.csv with one row per step plus t = 0") {
    const std::string dir = "io_test_run";
    std::filesystem::remove_all(dir);
    const RunConfig c = tiny_run_config(dir, 10);
    const RunResult r = run_simulation(c);
    CHECK(r.steps_completed == 10);
    CHECK(r.tip.size() == 11);

    const std::string csv = slurp(dir + "/tip.csv");
    int rows = 0;
    for (const char ch : csv)
        if (ch == '\n') ++rows;
    CHECK(rows == 12); // header + 11 samples
    CHECK(csv.substr(0, 12) == "t,dx_A,dy_A\n");

    // provenance exists and records the full step count
    const std::string prov = slurp(dir + "/run.json");
    CHECK(prov.find("\"steps_completed\": 10") != std::string::npos);
    CHECK(prov.find("\"status\": \"completed\"") != std::string::npos);
    CHECK(prov.find("wall_seconds") != std::string::npos);

    std::filesystem::remove_all(dir);
}

TEST_CASE("identical configs give byte-identical tip.csv, across thread counts") {
    const std::string dir1 = "io_det_a", dir2 = "io_det_b";
    std::filesystem::remove_all(dir1);
    std::filesystem::remove_all(dir2);
    RunConfig c1 = tiny_run_config(dir1, 6);
    RunConfig c2 = tiny_run_config(dir2, 6);
#ifdef _OPENMP
    omp_set_num_threads(1);
#endif
    (void)run_simulation(c1);
#ifdef _OPENMP
    omp_set_num_threads(2);
#endif
    (void)run_simulation(c2);
    CHECK(slurp(dir1 + "/tip.csv") == slurp(dir2 + "/tip.csv"));
    // snapshots are byte-identical too
    CHECK(slurp(dir1 + "/snapshot_000006.txt") == slurp(dir2 + "/snapshot_000006.txt"));
    std::filesystem::remove_all(dir1);
    std::filesystem::remove_all(dir2);
}

TEST_CASE("snapshots round-trip byte-for-byte") {
    auto mesh = std::make_shared<TriMesh>(build_benchmark_mesh(BenchmarkGeometry{}, 600));
    State s = make_initial_state(mesh);
    MaterialParams prm;
    prm.finalize();
    Stepper stepper(s.space, prm);
    for (int k = 0; k < 2; ++k) s = stepper.advance(s, 0.005);

    std::ostringstream os1;
    write_snapshot(os1, s);
    std::istringstream is(os1.str());
    const State back = read_snapshot(is);
    std::ostringstream os2;
    write_snapshot(os2, back);
    CHECK(os1.str() == os2.str());
    CHECK(back.u.coeffs() == s.u.coeffs());
    CHECK(back.p.coeffs() == s.p.coeffs());
    CHECK(back.d.coeffs() == s.d.coeffs());
}
