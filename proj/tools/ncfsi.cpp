// ncfsi: monolithic Eulerian finite element solver for micropolar
// fluid-structure interaction on the flag-behind-cylinder benchmark.

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ncfsi/simulation.hpp"
#include "ncfsi/verification.hpp"

namespace {

int run_verification_suites() {
    using namespace ncfsi;
    int failures = 0;

    std::printf("== MMS convergence (unit square, levels h = 1/8, 1/16, 1/32) ==\n");
    const MmsResult mms = mms_cosserat_fixed_domain({8, 16, 32});
    std::printf("%s", mms.csv().c_str());
    std::printf("orders: u-H1 %.3f, omega-H1 %.3f, p-L2 %.3f, monotone %s -> %s\n",
                mms.order_u_h1, mms.order_w_h1, mms.order_p_l2, mms.monotone ? "yes" : "no",
                mms.pass ? "PASS" : "FAIL");
    failures += mms.pass ? 0 : 1;

    std::printf("\n== Mooney-Rivlin derivation chain (100 random trials) ==\n");
    const ChainCheckResult chain = mooney_rivlin_chain_check(100);
    std::printf("max relative discrepancy %.3e -> %s\n", chain.max_rel_discrepancy,
                chain.pass ? "PASS" : "FAIL");
    if (!chain.worst_case.empty()) std::printf("worst case: %s\n", chain.worst_case.c_str());
    failures += chain.pass ? 0 : 1;

    std::printf("\n== Classical-limit regression (50 steps, coarse mesh) ==\n");
    const RegressionResult reg = classical_regression(BenchmarkGeometry{}, 700, 50, 0.005);
    std::printf("max |u| deviation (omega block on/off) %.3e, coupled deviation %.3e -> %s\n",
                reg.max_u_deviation, reg.coupled_deviation, reg.pass ? "PASS" : "FAIL");
    failures += reg.pass ? 0 : 1;

    return failures == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monolithic Eulerian micropolar FSI solver (flag behind a cylinder)"};

    std::string config_path;
    std::vector<std::string> overrides;
    std::string output_dir;
    double tmax = -1.0, dt = -1.0;
    int snapshot_every = -1;
    bool classical = false, verify = false, print_keys = false;

    app.add_option("--config", config_path, "configuration file (key = value lines)");
    app.add_option("--set", overrides, "override a config key (key=value, repeatable)");
    app.add_option("--tmax", tmax, "final time [s]");
    app.add_option("--dt", dt, "time step [s]");
    app.add_option("--output", output_dir, "output directory");
    app.add_option("--snapshot-every", snapshot_every, "snapshot interval in steps (0 = off)");
    app.add_flag("--classical", classical, "classical mode (mu_r = lambda1 = lambda2 = 0)");
    app.add_flag("--verify", verify, "run the verification suites instead of a simulation");
    app.add_flag("--keys", print_keys, "print the config key table and exit");

    CLI11_PARSE(app, argc, argv);

    try {
        if (print_keys) {
            std::printf("%s", ncfsi::config_keys_help().c_str());
            return 0;
        }
        if (verify) return run_verification_suites();

        ncfsi::RunConfig config =
            config_path.empty() ? ncfsi::RunConfig{} : ncfsi::parse_config(config_path);
        for (const std::string& kv : overrides) ncfsi::apply_override(config, kv);
        if (tmax > 0) config.t_max = tmax;
        if (dt > 0) config.dt = dt;
        if (!output_dir.empty()) config.output_dir = output_dir;
        if (snapshot_every >= 0) config.snapshot_every = snapshot_every;
        if (classical) config.mode = ncfsi::RunMode::classical;

        const ncfsi::RunResult result = ncfsi::run_simulation(config);
        std::printf("completed %d steps in %.1f s; outputs in %s\n", result.steps_completed,
                    result.wall_seconds, config.output_dir.c_str());
        std::printf("tip displacement at t_max: dx = %.6g, dy = %.6g\n", result.tip.back().dx,
                    result.tip.back().dy);
        return 0;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
