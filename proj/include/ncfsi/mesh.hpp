#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>
#include <iosfwd>

#include "ncfsi/vec2.hpp"

namespace ncfsi {

enum class Region : std::uint8_t { fluid = 0, solid = 1 };

enum class EdgeLabel : std::uint8_t { inlet, outlet, wall, cylinder, iface };

const char* to_string(Region r);
const char* to_string(EdgeLabel l);
Region region_from_string(const std::string& s);
EdgeLabel edge_label_from_string(const std::string& s);

struct MeshError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A vertex move produced a non-positive triangle area.
struct MeshInversion : MeshError {
    int triangle;
    MeshInversion(int tri, const std::string& what_) : MeshError(what_), triangle(tri) {}
};

struct PointOutsideDomain : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct LocateResult {
    int tri = -1;
    std::array<double, 3> bary{0.0, 0.0, 0.0};
    bool found() const { return tri >= 0; }
};

struct BoundaryProjection {
    Vec2 point;   // closest point on the domain boundary
    int tri = -1; // triangle adjacent to the boundary edge
    std::array<double, 3> bary{};
};

using EdgeKey = std::array<int, 2>; // sorted vertex pair

/// Conforming triangulation with fluid/solid region tags and labeled edges.
/// Immutable after construction; all derived connectivity (unique edges,
/// neighbors, locate acceleration grid) is built once in the constructor.
class TriMesh {
public:
    TriMesh(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> triangles,
            std::vector<Region> regions,
            std::vector<std::pair<EdgeKey, EdgeLabel>> edge_labels);

    int n_vertices() const { return static_cast<int>(vertices_.size()); }
    int n_triangles() const { return static_cast<int>(triangles_.size()); }
    int n_edges() const { return static_cast<int>(edges_.size()); }

    const std::vector<Vec2>& vertices() const { return vertices_; }
    Vec2 vertex(int v) const { return vertices_[v]; }
    const std::array<int, 3>& tri(int t) const { return triangles_[t]; }
    const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }
    Region region(int t) const { return regions_[t]; }
    const std::vector<Region>& regions() const { return regions_; }

    /// Unique undirected edges as sorted vertex pairs, in lexicographic
    /// order. Edge index is the canonical P2 midpoint-node ordering.
    const std::vector<EdgeKey>& edges() const { return edges_; }
    /// Edge indices of triangle t for local edges (0,1), (1,2), (2,0).
    const std::array<int, 3>& tri_edges(int t) const { return tri_edges_[t]; }
    /// Neighbor triangle across each local edge, -1 on a boundary.
    const std::array<int, 3>& tri_neighbors(int t) const { return tri_neighbors_[t]; }
    /// Triangles adjacent to edge e; second entry -1 on a boundary.
    const std::array<int, 2>& edge_tris(int e) const { return edge_tris_[e]; }

    /// Label of edge e, or nullopt for unlabeled interior edges.
    std::optional<EdgeLabel> edge_label(int e) const;
    /// Edge indices carrying a label, ascending.
    const std::vector<int>& labeled_edges() const { return labeled_edge_ids_; }
    /// Edge indices with exactly one adjacent triangle (domain boundary).
    const std::vector<int>& domain_boundary_edges() const { return boundary_edge_ids_; }

    bool vertex_on_label(int v, EdgeLabel l) const;
    bool vertex_touches(int v, Region r) const;
    /// Vertices incident to both fluid and solid triangles (the interface
    /// curve, including junction corners on the cylinder).
    const std::vector<int>& interface_vertices() const { return interface_vertices_; }

    double signed_area(int t) const;
    double min_signed_area() const;
    double total_area() const;
    double region_area(Region r) const;
    Vec2 centroid(int t) const;
    /// Affine map Jacobian: columns (q1 - q0), (q2 - q0).
    Mat2 jacobian(int t) const;

    std::array<double, 3> barycentric(int t, Vec2 x) const;

    /// Point location via acceleration grid + neighbor walk, brute-force
    /// fallback. Tolerance 1e-12 on barycentric coordinates.
    LocateResult locate(Vec2 x) const;
    /// Walk from a seed triangle (falls back to locate() when the walk
    /// escapes, e.g. across the cylinder hole).
    LocateResult locate_from(Vec2 x, int seed) const;

    /// Closest point on the domain boundary, for characteristic feet that
    /// leave the domain.
    BoundaryProjection project_to_boundary(Vec2 x) const;

    /// One triangle incident to each vertex (walk seeds).
    int vertex_seed(int v) const { return vertex_seed_[v]; }

private:
    std::vector<Vec2> vertices_;
    std::vector<std::array<int, 3>> triangles_;
    std::vector<Region> regions_;

    std::vector<EdgeKey> edges_;
    std::vector<std::array<int, 3>> tri_edges_;
    std::vector<std::array<int, 3>> tri_neighbors_;
    std::vector<std::int8_t> edge_label_;           // -1 = unlabeled
    std::vector<std::array<int, 2>> edge_tris_;     // adjacent triangles, -1 padded
    std::vector<int> labeled_edge_ids_;
    std::vector<int> boundary_edge_ids_;
    std::vector<std::uint8_t> vertex_label_mask_;   // bit per EdgeLabel
    std::vector<std::uint8_t> vertex_region_mask_;  // bit per Region
    std::vector<int> interface_vertices_;
    std::vector<int> vertex_seed_;

    // locate acceleration grid
    int grid_nx_ = 0, grid_ny_ = 0;
    Vec2 grid_lo_{}, grid_hi_{};
    std::vector<int> grid_offsets_;
    std::vector<int> grid_tris_;

    void build_edges(const std::vector<std::pair<EdgeKey, EdgeLabel>>& edge_labels);
    void validate() const;
    void build_grid();
    LocateResult brute_force_locate(Vec2 x) const;
};

/// Geometry of the flag-behind-cylinder benchmark channel.
struct BenchmarkGeometry {
    double L = 2.5;   // channel length
    double H = 0.41;  // channel height
    double cx = 0.2;  // cylinder center
    double cy = 0.2;
    double r = 0.05;  // cylinder radius
    double l = 0.35;  // flag length measured from the cylinder surface
    double h = 0.02;  // flag thickness

    /// Throws MeshError naming the violated constraint.
    void validate() const;
    double flag_tip_x() const { return cx + r + l; }
};

/// Unstructured graded triangulation of the benchmark domain. Vertex count
/// lands within ±20% of the target (>= 500); the flag is tagged solid, edges
/// are labeled inlet/outlet/wall/cylinder and fluid-solid shared edges
/// iface. Refined near the cylinder and the flag.
TriMesh build_benchmark_mesh(const BenchmarkGeometry& geom, int target_vertex_count);

/// Structured triangulation of [x0,x1]x[y0,y1], nx-by-ny cells split into two
/// triangles. All triangles fluid; labels: left inlet, right outlet,
/// top/bottom wall.
TriMesh build_rectangle_mesh(double x0, double y0, double x1, double y1, int nx, int ny);

/// Midpoint refinement: every triangle into four, labels and regions
/// inherited.
TriMesh refine_uniform(const TriMesh& mesh);

LocateResult locate_point(const TriMesh& mesh, Vec2 x);

/// New mesh with vertices q + dt*v; throws MeshInversion naming the first
/// inverted triangle.
TriMesh move_vertices(const TriMesh& mesh, const std::vector<Vec2>& vertex_velocity, double dt);

/// Discrete harmonic extension of interface data into the fluid region:
/// P1 Galerkin solve of -Δu = 0 with u = interface_values on the interface
/// vertices and u = 0 on vertices of edges labeled with zero_boundary.
/// `interface_values` is indexed by vertex; only interface vertices are read.
/// The result is indexed by vertex and is zero away from the fluid region.
std::vector<Vec2> laplace_extension(const TriMesh& mesh, const std::vector<Vec2>& interface_values,
                                    const std::set<EdgeLabel>& zero_boundary);

/// `NCFSI-MESH v1` ASCII snapshot; byte-stable given identical inputs.
void write_mesh(std::ostream& os, const TriMesh& mesh);
TriMesh read_mesh(std::istream& is);

} // namespace ncfsi
