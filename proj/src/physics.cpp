#include "ncfsi/physics.hpp"

namespace ncfsi {

void MaterialParams::finalize() {
    c3 = rho_s * (c1 / rho_s);
    if (!(rho_f > 0.0)) throw ParamError("rho_f must be positive");
    if (!(rho_s > 0.0)) throw ParamError("rho_s must be positive");
    if (!(mu > 0.0)) throw ParamError("mu must be positive");
    if (!(mu_r >= 0.0)) throw ParamError("mu_r must be non-negative");
    if (!(lambda1 >= 0.0)) throw ParamError("lambda1 must be non-negative");
    if (!(lambda2 >= 0.0)) throw ParamError("lambda2 must be non-negative");
    if (!(micro_inertia >= 0.0)) throw ParamError("micro_inertia must be non-negative");
    if (!(c1 >= 0.0)) throw ParamError("c1 must be non-negative");
    if (!(zeta > 0.0 && zeta <= 1e-6)) throw ParamError("zeta must lie in (0, 1e-6]");
}

Vec2 inflow_profile(double y, double Ubar, double H) {
    if (y < 0.0 || y > H) throw ParamError("inflow_profile: y outside [0, H]");
    return {Ubar * 6.0 * y * (H - y) / (H * H), 0.0};
}

Vec2 curl_scalar(const Field& omega, Vec2 x) {
    const auto loc = omega.mesh().locate(x);
    if (!loc.found()) throw PointOutsideDomain("curl_scalar: point outside the mesh");
    return curl_scalar_in(omega, loc.tri, loc.bary);
}

double curl_vector(const Field& u, Vec2 x) {
    const auto loc = u.mesh().locate(x);
    if (!loc.found()) throw PointOutsideDomain("curl_vector: point outside the mesh");
    return curl_vector_in(u, loc.tri, loc.bary);
}

Vec2 curl_scalar_in(const Field& omega, int t, const std::array<double, 3>& bary) {
    const Vec2 g = omega.grad_scalar_in(t, bary);
    return {g.y, -g.x};
}

double curl_vector_in(const Field& u, int t, const std::array<double, 3>& bary) {
    const Mat2 g = u.grad_vector_in(t, bary); // g = du_i/dx_j
    return g.c - g.b;                         // d_x u_y - d_y u_x
}

Mat2 solid_extra_stress(const Field& d, int t, const std::array<double, 3>& bary) {
    const Mat2 g = d.grad_vector_in(t, bary);
    return sym2(g) - g.matmul(g.transpose());
}

} // namespace ncfsi
