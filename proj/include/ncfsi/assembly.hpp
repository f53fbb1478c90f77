#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "ncfsi/fem.hpp"
#include "ncfsi/linalg.hpp"
#include "ncfsi/physics.hpp"

namespace ncfsi {

struct AssemblyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Which unknowns the assembled system covers. The coupled system is the
/// default; the reduced layouts exist because the microrotation block
/// decouples exactly when mu_r = 0 and the two sub-systems can be solved
/// independently.
enum class BlockSet {
    full,              // velocity + microrotation + pressure
    velocity_pressure, // velocity + pressure
    omega_only         // microrotation
};

/// How element contributions reach the global matrix. The serial loop is the
/// reference; parallel_ordered computes element matrices concurrently and
/// accumulates them row-by-row in element order, reproducing the serial
/// result bitwise; parallel_atomic scatters with atomics and gives up the
/// deterministic addition order.
enum class ScatterMode { serial, parallel_ordered, parallel_atomic };

struct LinearSystem {
    SparseMatrix A;
    std::vector<double> b;
    std::vector<DirichletConstraint> dirichlet;
};

struct AssemblyOptions {
    BlockSet blocks = BlockSet::full;
    ScatterMode mode = ScatterMode::parallel_ordered;
    bool include_time_terms = true;
    bool include_solid = true;
    std::function<Vec2(Vec2)> body_force;    // f, defaults to zero
    std::function<double(Vec2)> body_couple; // g, defaults to zero
};

/// Assembles the volumetric part of the coupled momentum / continuity /
/// microrotation system on the current mesh. Boundary conditions are the
/// caller's business (see stepper). The sparsity pattern and the scatter
/// plan depend on connectivity only and are cached across time steps.
class MonolithicAssembler {
public:
    MonolithicAssembler(std::shared_ptr<const MixedSpace> space, AssemblyOptions opts);

    /// System dimension for the chosen block set.
    int dimension() const { return n_global_; }

    /// Global dof helpers for the chosen block set.
    int gu(int p2_node, int comp) const { return 2 * p2_node + comp; }
    int gw(int p2_node) const { return w_base_ + p2_node; }
    int gp(int pressure_dof) const { return p_base_ + pressure_dof; }
    bool has_velocity() const { return opts_.blocks != BlockSet::omega_only; }
    bool has_omega() const { return opts_.blocks != BlockSet::velocity_pressure; }

    const AssemblyOptions& options() const { return opts_; }
    const MixedSpace& space() const { return *space_; }

    /// u_conv / w_conv: convected fields for the time terms (may be null
    /// when include_time_terms is false). d: displacement for the solid
    /// terms (may be null when include_solid is false or no solid exists).
    /// Throws AssemblyError on dimension mismatches or non-finite output.
    std::pair<SparseMatrix, std::vector<double>>
    assemble(const TriMesh& mesh, const MaterialParams& params, double dt,
             const Field* u_conv, const Field* w_conv, const Field* d) const;

private:
    std::shared_ptr<const MixedSpace> space_;
    AssemblyOptions opts_;
    int n_global_ = 0;
    int w_base_ = 0;
    int p_base_ = 0;
    int local_dim_ = 0;

    // Pattern + scatter plan, built once per connectivity.
    SparseMatrix pattern_;
    std::vector<int> elem_slots_;        // element-local (a,b) -> CSR value slot
    std::vector<int> elem_rows_;         // element-local a -> global row
    std::vector<int> gather_off_;        // per-slot contribution ranges
    std::vector<int> gather_elem_;
    std::vector<std::uint16_t> gather_local_; // packed a*dim+b
    std::vector<int> rhs_off_;           // per-row contribution ranges
    std::vector<int> rhs_elem_;
    std::vector<std::uint16_t> rhs_local_;

    void build_pattern();
    void compute_local(int t, const TriMesh& mesh, const MaterialParams& params, double dt,
                       const Field* u_conv, const Field* w_conv, const Field* d,
                       double* local, double* local_rhs) const;
};

} // namespace ncfsi
