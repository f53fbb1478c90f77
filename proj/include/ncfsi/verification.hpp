#pragma once

#include <string>
#include <vector>

#include "ncfsi/mesh.hpp"
#include "ncfsi/physics.hpp"

namespace ncfsi {

/// Manufactured-solution fields and matching sources for the coupled
/// operator on the unit square (divergence-free velocity with zero normal
/// trace, so the discrete compatibility condition holds exactly).
struct MmsSolution {
    Vec2 u(Vec2 p) const;
    double omega(Vec2 p) const;
    double pressure(Vec2 p) const; // zero mean
    Vec2 grad_omega(Vec2 p) const;
    Mat2 grad_u(Vec2 p) const;
    /// Momentum source for the steady operator as discretized: the weak
    /// viscous term (mu+mu_r)/2 Du:Dv corresponds to -(mu+mu_r) Lap(u) on
    /// divergence-free fields.
    Vec2 momentum_source(Vec2 p, const MaterialParams& prm) const;
    double microrotation_source(Vec2 p, const MaterialParams& prm) const;
};

struct MmsLevel {
    double h;
    double err_u_l2, err_u_h1;
    double err_w_l2, err_w_h1;
    double err_p_l2;
};

struct MmsResult {
    std::vector<MmsLevel> levels;
    double order_u_h1 = 0.0; // finest-pair observed orders
    double order_w_h1 = 0.0;
    double order_p_l2 = 0.0;
    bool monotone = false;
    bool pass = false;
    /// Columns: h, err_u_L2, err_u_H1, err_w_L2, err_w_H1, err_p_L2,
    /// order_u_H1, order_w_H1, order_p_L2 (orders between rows).
    std::string csv() const;
};

/// Convergence study of the steady coupled operator against the
/// manufactured solution; cells = unit-square subdivisions per level
/// (h = 1/cells). Thresholds: u-H1 and omega-H1 orders >= 1.8, p-L2 >= 1.5,
/// errors strictly decreasing. Convection is exercised separately by the
/// characteristics oracles.
MmsResult mms_cosserat_fixed_domain(const std::vector<int>& cells_per_level,
                                    const MaterialParams& prm);
MmsResult mms_cosserat_fixed_domain(const std::vector<int>& cells_per_level);

struct ChainCheckResult {
    int trials = 0;
    double max_rel_discrepancy = 0.0;
    bool pass = false;
    std::string worst_case; // offending displacement gradient, if any
};

/// Numerical validation of the Cayley-Hamilton reduction of the
/// Mooney-Rivlin stress: 2c1 F F^T - 4c2 det(F F^T) I against
/// 2c1 det(B) (Dd - grad d grad d^T) + [2c1(tr B - det B) - 4c2 det B] I,
/// over random displacement gradients with norm < 0.3. Tolerance 1e-10.
ChainCheckResult mooney_rivlin_chain_check(int trials);

struct RegressionResult {
    int steps = 0;
    double max_u_deviation = 0.0;     // omega block on vs off, mu_r = 0
    double coupled_deviation = 0.0;   // mu_r > 0 vs classical (must differ)
    bool pass = false;
};

/// Classical-limit regression on a coarse benchmark mesh: with
/// mu_r = lambda1 = lambda2 = g = 0 the velocity trajectory must be
/// independent of whether the microrotation block is assembled (<= 1e-12
/// per step over n_steps); with mu_r > 0 the coupling must be live
/// (deviation > 1e-6).
RegressionResult classical_regression(const BenchmarkGeometry& geom, int target_vertices,
                                      int n_steps, double dt);

} // namespace ncfsi
