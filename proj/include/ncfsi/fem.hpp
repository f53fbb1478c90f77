#pragma once

#include <array>
#include <memory>
#include <vector>

#include "ncfsi/mesh.hpp"
#include "ncfsi/vec2.hpp"

namespace ncfsi {

enum class SpaceTag { p1, p2, p2_vec, p1_broken };

/// Quadrature on the reference triangle (0,0)-(1,0)-(0,1); weights sum to the
/// reference area 1/2.
struct QuadratureRule {
    std::vector<std::array<double, 3>> points; // barycentric
    std::vector<double> weights;
};

/// The production rule: 7 points, exact for polynomials up to degree 5.
const QuadratureRule& quadrature_rule();

struct BasisEval {
    int n = 0;                     // 3 for P1, 6 for P2
    std::array<double, 6> value{};
    std::array<Vec2, 6> grad_ref{}; // gradients in reference coordinates
};

/// Lagrange P1/P2 values and reference gradients at a barycentric point.
/// P2 node order: vertices 0,1,2 then midpoints of edges (0,1), (1,2), (2,0).
BasisEval eval_basis(SpaceTag space, const std::array<double, 3>& bary);

/// Degree-of-freedom layout of the coupled discretization: P2 vector
/// velocity, P2 scalar microrotation, region-wise continuous P1 pressure
/// (duplicated at interface vertices), P2 vector displacement.
///
/// The layout depends on the mesh connectivity and region tags only, so one
/// MixedSpace serves an entire run while the vertices move.
class MixedSpace {
public:
    explicit MixedSpace(std::shared_ptr<const TriMesh> mesh);

    int n_p2_nodes() const { return n_p2_; } // #vertices + #edges
    int n_velocity_dofs() const { return 2 * n_p2_; }
    int n_microrotation_dofs() const { return n_p2_; }
    int n_pressure_dofs() const { return n_pressure_; }
    int n_displacement_dofs() const { return 2 * n_p2_; }
    /// Size of the monolithic system: velocity + microrotation + pressure.
    int n_coupled_dofs() const { return 3 * n_p2_ + n_pressure_; }

    // Disjoint global ranges of the monolithic system.
    int u_dof(int p2_node, int comp) const { return 2 * p2_node + comp; }
    int w_dof(int p2_node) const { return 2 * n_p2_ + p2_node; }
    int p_dof(int pressure_dof) const { return 3 * n_p2_ + pressure_dof; }

    /// Local pressure dof of a vertex as seen from one region side.
    /// Interface vertices own two dofs (fluid copy first).
    int pressure_dof(int vertex, Region side) const;
    bool pressure_duplicated(int vertex) const;
    /// Vertex owning a pressure dof (inverse of pressure_dof).
    int pressure_dof_vertex(int pdof) const { return pdof_vertex_[pdof]; }

    /// Global P2 node ids of a triangle: 3 vertices then 3 edge midpoints in
    /// the eval_basis local order.
    std::array<int, 6> p2_nodes(int t) const;
    /// Pressure dofs of a triangle, resolved through its region tag.
    std::array<int, 3> pressure_dofs(int t) const;

    /// Positions of P2 nodes on a given mesh with the same connectivity.
    Vec2 p2_node_pos(const TriMesh& mesh, int node) const;
    /// A triangle incident to the node, used to seed point-location walks.
    int p2_node_seed(int node) const { return node_seed_[node]; }
    bool p2_node_touches(int node, Region r) const;
    bool p2_node_on_label(const TriMesh& mesh, int node, EdgeLabel l) const;

    const TriMesh& mesh() const { return *mesh_; }
    std::shared_ptr<const TriMesh> mesh_ptr() const { return mesh_; }
    /// True when `other` shares the connectivity this layout was built from.
    bool layout_matches(const TriMesh& other) const;

private:
    std::shared_ptr<const TriMesh> mesh_;
    int n_p2_ = 0;
    int n_pressure_ = 0;
    std::vector<int> pressure_fluid_;  // per-vertex dof as seen from fluid (-1 none)
    std::vector<int> pressure_solid_;  // per-vertex dof as seen from solid (-1 none)
    std::vector<int> pdof_vertex_;
    std::vector<int> node_seed_;
};

/// A discrete field: coefficients over the dofs of one sub-space, tied to the
/// mesh (current vertex positions) it is evaluated on.
class Field {
public:
    Field(std::shared_ptr<const MixedSpace> space, std::shared_ptr<const TriMesh> mesh,
          SpaceTag tag, std::vector<double> coeffs);
    static Field zeros(std::shared_ptr<const MixedSpace> space,
                       std::shared_ptr<const TriMesh> mesh, SpaceTag tag);

    SpaceTag tag() const { return tag_; }
    const std::vector<double>& coeffs() const { return coeffs_; }
    std::vector<double>& coeffs() { return coeffs_; }
    const MixedSpace& space() const { return *space_; }
    std::shared_ptr<const MixedSpace> space_ptr() const { return space_; }
    const TriMesh& mesh() const { return *mesh_; }
    std::shared_ptr<const TriMesh> mesh_ptr() const { return mesh_; }

    /// Same coefficients viewed on a moved mesh (identical connectivity).
    Field on_mesh(std::shared_ptr<const TriMesh> mesh) const;

    static int expected_size(const MixedSpace& space, SpaceTag tag);

    // Evaluation inside a known triangle.
    double eval_scalar_in(int t, const std::array<double, 3>& bary) const;
    Vec2 eval_vector_in(int t, const std::array<double, 3>& bary) const;
    Vec2 grad_scalar_in(int t, const std::array<double, 3>& bary) const;
    /// Gradient (d u_i / d x_j) of a P2 vector field.
    Mat2 grad_vector_in(int t, const std::array<double, 3>& bary) const;

private:
    std::shared_ptr<const MixedSpace> space_;
    std::shared_ptr<const TriMesh> mesh_;
    SpaceTag tag_;
    std::vector<double> coeffs_;
};

/// Point evaluation of a scalar-valued field; throws PointOutsideDomain.
double interpolate(const Field& field, Vec2 x);
/// Point evaluation of a P2 vector field; throws PointOutsideDomain.
Vec2 interpolate_vector(const Field& field, Vec2 x);

} // namespace ncfsi
