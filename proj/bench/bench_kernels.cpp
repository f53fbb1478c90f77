// Timing harness for the data-parallel kernels: global assembly in its three
// scatter modes (serial reference, deterministic ordered gather, atomic) and
// the semi-Lagrangian transport. Also reports the max entrywise deviation of
// each parallel mode from the serial reference.
//
//   bench_kernels [target_vertices] [repeats]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "ncfsi/assembly.hpp"
#include "ncfsi/stepper.hpp"

using namespace ncfsi;
using Clock = std::chrono::steady_clock;

namespace {

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

Field p2_vec_from(std::shared_ptr<const MixedSpace> s, std::shared_ptr<const TriMesh> m,
                  Vec2 (*f)(Vec2)) {
    std::vector<double> c(2 * s->n_p2_nodes());
    for (int n = 0; n < s->n_p2_nodes(); ++n) {
        const Vec2 v = f(s->p2_node_pos(*m, n));
        c[2 * n] = v.x;
        c[2 * n + 1] = v.y;
    }
    return Field(s, m, SpaceTag::p2_vec, std::move(c));
}

} // namespace

int main(int argc, char** argv) {
    const int target = argc > 1 ? std::atoi(argv[1]) : 2199;
    const int repeats = argc > 2 ? std::atoi(argv[2]) : 5;
#ifdef _OPENMP
    const int threads = omp_get_max_threads();
#else
    const int threads = 1;
#endif
    std::printf("mesh target %d vertices, %d repeats, %d thread(s)\n", target, repeats, threads);

    auto mesh = std::make_shared<TriMesh>(build_benchmark_mesh(BenchmarkGeometry{}, target));
    auto space = std::make_shared<MixedSpace>(mesh);
    std::printf("mesh: %d vertices, %d triangles, %d coupled dofs\n\n", mesh->n_vertices(),
                mesh->n_triangles(), space->n_coupled_dofs());

    MaterialParams prm;
    prm.finalize();
    const Field uc = p2_vec_from(space, mesh, [](Vec2 p) { return Vec2{p.y, -0.2 * p.x}; });
    Field wc = Field::zeros(space, mesh, SpaceTag::p2);
    for (int n = 0; n < space->n_p2_nodes(); ++n) {
        const Vec2 p = space->p2_node_pos(*mesh, n);
        wc.coeffs()[n] = std::sin(p.x) * p.y;
    }
    const Field df = p2_vec_from(space, mesh, [](Vec2 p) {
        return Vec2{0.01 * std::sin(3 * p.x), 0.01 * std::cos(2 * p.y)};
    });

    struct ModeRow {
        const char* name;
        ScatterMode mode;
    };
    const ModeRow rows[] = {{"assembly serial", ScatterMode::serial},
                            {"assembly parallel (ordered)", ScatterMode::parallel_ordered},
                            {"assembly parallel (atomic)", ScatterMode::parallel_atomic}};

    std::vector<double> ref_vals;
    double serial_ms = 0.0;
    for (const auto& row : rows) {
        AssemblyOptions o;
        o.mode = row.mode;
        MonolithicAssembler assembler(space, o);
        // warm-up (also builds the cached plan)
        auto [A0, b0] = assembler.assemble(*mesh, prm, 0.005, &uc, &wc, &df);
        const auto t0 = Clock::now();
        for (int r = 0; r < repeats; ++r) {
            auto [A, b] = assembler.assemble(*mesh, prm, 0.005, &uc, &wc, &df);
        }
        const double ms = ms_since(t0) / repeats;
        double dev = 0.0;
        bool bitwise = false;
        if (row.mode == ScatterMode::serial) {
            ref_vals = A0.values();
            serial_ms = ms;
        } else {
            bitwise = std::memcmp(ref_vals.data(), A0.values().data(),
                                  ref_vals.size() * sizeof(double)) == 0;
            for (std::size_t k = 0; k < ref_vals.size(); ++k)
                dev = std::max(dev, std::fabs(ref_vals[k] - A0.values()[k]));
        }
        std::printf("%-30s %8.2f ms/assembly  speedup %.2fx  max|dA| %.2e%s\n", row.name, ms,
                    serial_ms / ms, dev, bitwise ? "  (bitwise == serial)" : "");
    }

    // Semi-Lagrangian transport: the OpenMP loop lives inside convect; time
    // it against a forced single-thread run.
    std::printf("\n");
    const auto time_convect = [&](int nthreads) {
#ifdef _OPENMP
        omp_set_num_threads(nthreads);
#else
        (void)nthreads;
#endif
        const auto t0 = Clock::now();
        for (int r = 0; r < repeats; ++r) {
            const Field out = convect(wc, uc, 0.005);
            (void)out;
        }
        return ms_since(t0) / repeats;
    };
    const double c1ms = time_convect(1);
    const double cNms = time_convect(threads);
    std::printf("%-30s %8.2f ms/sweep\n", "transport 1 thread", c1ms);
    std::printf("%-30s %8.2f ms/sweep  speedup %.2fx\n", "transport all threads", cNms,
                c1ms / cNms);
    return 0;
}
