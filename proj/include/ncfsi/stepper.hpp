#pragma once

#include <memory>
#include <optional>

#include "ncfsi/assembly.hpp"
#include "ncfsi/fem.hpp"
#include "ncfsi/physics.hpp"

namespace ncfsi {

/// One time level: the moving mesh plus velocity, microrotation, pressure
/// and displacement. Immutable snapshot, safe to share.
struct State {
    double t = 0.0;
    std::shared_ptr<const TriMesh> mesh;
    std::shared_ptr<const MixedSpace> space;
    Field u;     // P2 vector
    Field omega; // P2 scalar
    Field p;     // region-wise P1
    Field d;     // P2 vector, zero outside the solid
};

/// Quiescent state at t = 0 on the given mesh.
State make_initial_state(std::shared_ptr<const TriMesh> mesh);

/// Characteristic foot x - dt*u(x); feet leaving the domain are projected to
/// the nearest boundary point.
Vec2 characteristic_foot(Vec2 x, const Field& u_n, double dt);

/// Semi-Lagrangian transport: nodal values of `field` at the characteristic
/// feet of the P2 nodes. Exact for constant fields.
Field convect(const Field& field, const Field& u_n, double dt);

struct StepperOptions {
    ScatterMode mode = ScatterMode::parallel_ordered;
    /// Assemble and solve the microrotation block (turned off only by the
    /// classical-regression harness).
    bool with_omega_block = true;
    /// Cosine inflow ramp over [0, ramp_time]; 0 disables (default).
    double ramp_time = 0.0;
    std::function<Vec2(Vec2)> body_force;
    std::function<double(Vec2)> body_couple;
};

/// The monolithic semi-implicit step, with cached sparsity patterns and
/// symbolic factorizations (connectivity never changes during a run).
///
/// When mu_r = 0 the curl couplings vanish identically and the system is
/// block-diagonal; the step then solves the velocity-pressure and the
/// microrotation systems separately, which makes the velocity trajectory
/// independent of the microrotation machinery by construction.
class Stepper {
public:
    Stepper(std::shared_ptr<const MixedSpace> space, MaterialParams params,
            StepperOptions opts = {});

    State advance(const State& state, double dt) const;

    const MaterialParams& params() const { return params_; }
    const StepperOptions& options() const { return opts_; }


private:
    std::shared_ptr<const MixedSpace> space_;
    MaterialParams params_;
    StepperOptions opts_;
    bool split_;                                    // mu_r == 0
    std::unique_ptr<MonolithicAssembler> asm_full_; // coupled system
    std::unique_ptr<MonolithicAssembler> asm_up_;   // velocity-pressure
    std::unique_ptr<MonolithicAssembler> asm_w_;    // microrotation
    mutable SparseFactor factor_full_;
    mutable SparseFactor factor_up_;
    mutable SparseFactor factor_w_;

    double ramp_scale(double t) const;
};

/// Dirichlet rows: inflow profile on the inlet, u = 0 and omega = 0 on walls
/// and cylinder, omega = 0 on the inlet, outlet natural. `scale` multiplies
/// the inflow values (startup ramp).
std::vector<DirichletConstraint>
boundary_constraints(const TriMesh& mesh, const MixedSpace& space,
                     const MonolithicAssembler& assembler, const MaterialParams& params,
                     double scale);

/// The full spec'd assembly: volumetric terms plus the Dirichlet constraint
/// list, without applying the constraints.
LinearSystem assemble_monolithic(const State& state, const MaterialParams& params, double dt,
                                 const StepperOptions& opts = {});

/// One-shot advance (builds a Stepper internally).
State advance(const State& state, const MaterialParams& params, double dt,
              const StepperOptions& opts = {});

/// Displacement of the tracked flag-tip vertex. The control point is given
/// by its position at t = 0; the vertex is identified through the invariant
/// current_position - d = initial_position. Throws if no solid vertex
/// matches.
std::pair<double, double> extract_tip_displacement(const State& state, Vec2 control_point_initial);

/// The solid vertex with maximal x (ties broken toward the flag midline y),
/// i.e. the default control point A at t = 0.
Vec2 default_control_point(const TriMesh& mesh);

} // namespace ncfsi
