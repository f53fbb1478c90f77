#pragma once

#include <stdexcept>

#include "ncfsi/fem.hpp"
#include "ncfsi/mesh.hpp"
#include "ncfsi/vec2.hpp"

namespace ncfsi {

struct ParamError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Physical and numerical constants of a run.
///
/// c1 is the Mooney-Rivlin stress-scale coefficient in Pa; the per-mass
/// material constant is c1/rho_s, so the momentum-equation coefficient
/// c3 = rho_s * (c1/rho_s) carries the same numerical value as c1. c2 only
/// enters the isotropic part of the solid stress, which the pressure absorbs
/// for an incompressible material; it is accepted and has no runtime effect.
/// lambda2 multiplies a grad-div term that vanishes identically under the 2D
/// scalar microrotation; it is accepted and ignored.
struct MaterialParams {
    double rho_f = 1e3;          // fluid density
    double rho_s = 1e3;          // solid density
    double mu = 1.0;             // dynamic viscosity
    double mu_r = 0.5;           // microrotational viscosity
    double lambda1 = 1e-3;       // angular viscosity beta + gamma
    double lambda2 = 0.0;        // angular viscosity alpha + beta - gamma (inert in 2D)
    double micro_inertia = 1e-4; // microinertia coefficient I
    double c1 = 1e6;             // solid material parameter
    double c2 = 0.0;             // solid material parameter (absorbed by pressure)
    double c3 = 1e6;             // momentum-equation solid coefficient, tied to c1
    double zeta = 1e-8;          // pressure penalization
    double Ubar = 2.0;           // mean inflow velocity

    /// Recomputes c3 from c1 and checks all constraints; throws ParamError
    /// naming the offending field.
    void finalize();
    double density(Region r) const { return r == Region::fluid ? rho_f : rho_s; }
};

/// Parabolic inlet profile (Ubar*6y(H-y)/H^2, 0); its flux over [0,H] is
/// Ubar*H. Throws ParamError for y outside [0,H].
Vec2 inflow_profile(double y, double Ubar, double H);

/// 2D curl of a scalar field: (d_y w, -d_x w). Throws PointOutsideDomain.
Vec2 curl_scalar(const Field& omega, Vec2 x);
/// 2D curl of a vector field: d_x u_y - d_y u_x. Throws PointOutsideDomain.
double curl_vector(const Field& u, Vec2 x);

// In-triangle variants used by assembly kernels.
Vec2 curl_scalar_in(const Field& omega, int t, const std::array<double, 3>& bary);
double curl_vector_in(const Field& u, int t, const std::array<double, 3>& bary);

/// Eulerian Mooney-Rivlin extra stress Dd - grad(d) grad(d)^T with
/// Dd = grad(d) + grad(d)^T; the c3 scaling happens in assembly.
Mat2 solid_extra_stress(const Field& d, int t, const std::array<double, 3>& bary);

} // namespace ncfsi
