#include "ncfsi/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "ncfsi/linalg.hpp"

namespace ncfsi {

const char* to_string(Region r) { return r == Region::fluid ? "fluid" : "solid"; }

const char* to_string(EdgeLabel l) {
    switch (l) {
        case EdgeLabel::inlet: return "inlet";
        case EdgeLabel::outlet: return "outlet";
        case EdgeLabel::wall: return "wall";
        case EdgeLabel::cylinder: return "cylinder";
        case EdgeLabel::iface: return "interface";
    }
    return "?";
}

Region region_from_string(const std::string& s) {
    if (s == "fluid") return Region::fluid;
    if (s == "solid") return Region::solid;
    throw MeshError("unknown region name: " + s);
}

EdgeLabel edge_label_from_string(const std::string& s) {
    if (s == "inlet") return EdgeLabel::inlet;
    if (s == "outlet") return EdgeLabel::outlet;
    if (s == "wall") return EdgeLabel::wall;
    if (s == "cylinder") return EdgeLabel::cylinder;
    if (s == "interface") return EdgeLabel::iface;
    throw MeshError("unknown edge label: " + s);
}

namespace {
double tri_signed_area(Vec2 a, Vec2 b, Vec2 c) { return 0.5 * (b - a).cross(c - a); }
constexpr double kBaryTol = 1e-12;
} // namespace

TriMesh::TriMesh(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> triangles,
                 std::vector<Region> regions,
                 std::vector<std::pair<EdgeKey, EdgeLabel>> edge_labels)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)), regions_(std::move(regions)) {
    if (triangles_.size() != regions_.size())
        throw MeshError("TriMesh: one region tag per triangle required");
    const int nv = n_vertices();
    for (std::size_t t = 0; t < triangles_.size(); ++t) {
        const auto& tri = triangles_[t];
        for (int k = 0; k < 3; ++k)
            if (tri[k] < 0 || tri[k] >= nv)
                throw MeshError("TriMesh: vertex index out of range in triangle " + std::to_string(t));
        if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2])
            throw MeshError("TriMesh: repeated vertex in triangle " + std::to_string(t));
    }
    build_edges(edge_labels);
    validate();
    build_grid();
}

void TriMesh::build_edges(const std::vector<std::pair<EdgeKey, EdgeLabel>>& edge_labels) {
    const int nt = n_triangles();
    std::vector<EdgeKey> all;
    all.reserve(3 * nt);
    for (const auto& t : triangles_) {
        for (int k = 0; k < 3; ++k) {
            const int a = t[k], b = t[(k + 1) % 3];
            all.push_back({std::min(a, b), std::max(a, b)});
        }
    }
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    edges_ = std::move(all);

    auto edge_index = [this](int a, int b) {
        const EdgeKey key{std::min(a, b), std::max(a, b)};
        const auto it = std::lower_bound(edges_.begin(), edges_.end(), key);
        return static_cast<int>(it - edges_.begin());
    };

    tri_edges_.resize(nt);
    edge_tris_.assign(edges_.size(), {-1, -1});
    for (int t = 0; t < nt; ++t) {
        const auto& tri = triangles_[t];
        for (int k = 0; k < 3; ++k) {
            const int e = edge_index(tri[k], tri[(k + 1) % 3]);
            tri_edges_[t][k] = e;
            auto& adj = edge_tris_[e];
            if (adj[0] < 0)
                adj[0] = t;
            else if (adj[1] < 0)
                adj[1] = t;
            else
                throw MeshError("TriMesh: edge shared by more than two triangles (non-conforming)");
        }
    }

    tri_neighbors_.assign(nt, {-1, -1, -1});
    for (int t = 0; t < nt; ++t) {
        for (int k = 0; k < 3; ++k) {
            const auto& adj = edge_tris_[tri_edges_[t][k]];
            tri_neighbors_[t][k] = (adj[0] == t) ? adj[1] : adj[0];
        }
    }

    edge_label_.assign(edges_.size(), -1);
    for (const auto& [key, label] : edge_labels) {
        const EdgeKey k{std::min(key[0], key[1]), std::max(key[0], key[1])};
        const auto it = std::lower_bound(edges_.begin(), edges_.end(), k);
        if (it == edges_.end() || *it != k)
            throw MeshError("TriMesh: label refers to a non-existent edge (" +
                            std::to_string(key[0]) + "," + std::to_string(key[1]) + ")");
        const int e = static_cast<int>(it - edges_.begin());
        if (edge_label_[e] >= 0 && edge_label_[e] != static_cast<std::int8_t>(label))
            throw MeshError("TriMesh: conflicting labels on one edge");
        edge_label_[e] = static_cast<std::int8_t>(label);
    }
    for (int e = 0; e < n_edges(); ++e)
        if (edge_label_[e] >= 0) labeled_edge_ids_.push_back(e);
    for (int e = 0; e < n_edges(); ++e)
        if (edge_tris_[e][1] < 0) boundary_edge_ids_.push_back(e);

    vertex_label_mask_.assign(vertices_.size(), 0);
    for (int e : labeled_edge_ids_) {
        const auto lbl = static_cast<std::uint8_t>(1u << edge_label_[e]);
        vertex_label_mask_[edges_[e][0]] |= lbl;
        vertex_label_mask_[edges_[e][1]] |= lbl;
    }
    vertex_region_mask_.assign(vertices_.size(), 0);
    vertex_seed_.assign(vertices_.size(), -1);
    for (int t = 0; t < nt; ++t) {
        for (int k = 0; k < 3; ++k) {
            const int v = triangles_[t][k];
            vertex_region_mask_[v] |= static_cast<std::uint8_t>(1u << static_cast<int>(regions_[t]));
            if (vertex_seed_[v] < 0) vertex_seed_[v] = t;
        }
    }
    for (int v = 0; v < n_vertices(); ++v)
        if (vertex_region_mask_[v] == 3) interface_vertices_.push_back(v);
}

void TriMesh::validate() const {
    for (int t = 0; t < n_triangles(); ++t) {
        if (!(signed_area(t) > 0.0))
            throw MeshError("TriMesh: non-positive area in triangle " + std::to_string(t));
    }
    for (int e = 0; e < n_edges(); ++e) {
        const auto& adj = edge_tris_[e];
        const bool labeled = edge_label_[e] >= 0;
        const auto label = labeled ? static_cast<EdgeLabel>(edge_label_[e]) : EdgeLabel::inlet;
        if (adj[1] < 0) {
            // Domain boundary edge: must carry a non-interface label.
            if (!labeled || label == EdgeLabel::iface)
                throw MeshError("TriMesh: unlabeled or interface-labeled boundary edge (" +
                                std::to_string(edges_[e][0]) + "," + std::to_string(edges_[e][1]) + ")");
        } else {
            const bool mixed = regions_[adj[0]] != regions_[adj[1]];
            if (mixed && (!labeled || label != EdgeLabel::iface))
                throw MeshError("TriMesh: fluid-solid shared edge not labeled interface");
            if (!mixed && labeled)
                throw MeshError("TriMesh: interior same-region edge carries a label");
        }
    }
}

std::optional<EdgeLabel> TriMesh::edge_label(int e) const {
    if (edge_label_[e] < 0) return std::nullopt;
    return static_cast<EdgeLabel>(edge_label_[e]);
}

bool TriMesh::vertex_on_label(int v, EdgeLabel l) const {
    return (vertex_label_mask_[v] >> static_cast<int>(l)) & 1u;
}

bool TriMesh::vertex_touches(int v, Region r) const {
    return (vertex_region_mask_[v] >> static_cast<int>(r)) & 1u;
}

double TriMesh::signed_area(int t) const {
    const auto& tri = triangles_[t];
    return tri_signed_area(vertices_[tri[0]], vertices_[tri[1]], vertices_[tri[2]]);
}

double TriMesh::min_signed_area() const {
    double m = std::numeric_limits<double>::infinity();
    for (int t = 0; t < n_triangles(); ++t) m = std::min(m, signed_area(t));
    return m;
}

double TriMesh::total_area() const {
    double a = 0.0;
    for (int t = 0; t < n_triangles(); ++t) a += signed_area(t);
    return a;
}

double TriMesh::region_area(Region r) const {
    double a = 0.0;
    for (int t = 0; t < n_triangles(); ++t)
        if (regions_[t] == r) a += signed_area(t);
    return a;
}

Vec2 TriMesh::centroid(int t) const {
    const auto& tri = triangles_[t];
    return (vertices_[tri[0]] + vertices_[tri[1]] + vertices_[tri[2]]) / 3.0;
}

Mat2 TriMesh::jacobian(int t) const {
    const auto& tri = triangles_[t];
    const Vec2 d1 = vertices_[tri[1]] - vertices_[tri[0]];
    const Vec2 d2 = vertices_[tri[2]] - vertices_[tri[0]];
    return Mat2{d1.x, d2.x, d1.y, d2.y};
}

std::array<double, 3> TriMesh::barycentric(int t, Vec2 x) const {
    const auto& tri = triangles_[t];
    const Vec2 a = vertices_[tri[0]], b = vertices_[tri[1]], c = vertices_[tri[2]];
    const double inv2a = 1.0 / (b - a).cross(c - a);
    const double l1 = (x - a).cross(c - a) * inv2a;
    const double l2 = (b - a).cross(x - a) * inv2a;
    return {1.0 - l1 - l2, l1, l2};
}

void TriMesh::build_grid() {
    grid_lo_ = Vec2(std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity());
    grid_hi_ = Vec2(-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity());
    for (const Vec2& v : vertices_) {
        grid_lo_.x = std::min(grid_lo_.x, v.x);
        grid_lo_.y = std::min(grid_lo_.y, v.y);
        grid_hi_.x = std::max(grid_hi_.x, v.x);
        grid_hi_.y = std::max(grid_hi_.y, v.y);
    }
    const double w = std::max(grid_hi_.x - grid_lo_.x, 1e-300);
    const double h = std::max(grid_hi_.y - grid_lo_.y, 1e-300);
    const double cells = std::max(1.0, static_cast<double>(n_triangles()));
    grid_nx_ = std::max(1, static_cast<int>(std::lround(std::sqrt(cells * w / h))));
    grid_ny_ = std::max(1, static_cast<int>(std::lround(cells / grid_nx_)));

    std::vector<std::pair<int, int>> cell_tri; // (cell, tri)
    cell_tri.reserve(4 * triangles_.size());
    for (int t = 0; t < n_triangles(); ++t) {
        const auto& tri = triangles_[t];
        double xmin = vertices_[tri[0]].x, xmax = xmin;
        double ymin = vertices_[tri[0]].y, ymax = ymin;
        for (int k = 1; k < 3; ++k) {
            xmin = std::min(xmin, vertices_[tri[k]].x);
            xmax = std::max(xmax, vertices_[tri[k]].x);
            ymin = std::min(ymin, vertices_[tri[k]].y);
            ymax = std::max(ymax, vertices_[tri[k]].y);
        }
        const auto clampi = [](int v, int lo, int hi) { return std::max(lo, std::min(hi, v)); };
        const int ix0 = clampi(static_cast<int>((xmin - grid_lo_.x) / w * grid_nx_), 0, grid_nx_ - 1);
        const int ix1 = clampi(static_cast<int>((xmax - grid_lo_.x) / w * grid_nx_), 0, grid_nx_ - 1);
        const int iy0 = clampi(static_cast<int>((ymin - grid_lo_.y) / h * grid_ny_), 0, grid_ny_ - 1);
        const int iy1 = clampi(static_cast<int>((ymax - grid_lo_.y) / h * grid_ny_), 0, grid_ny_ - 1);
        for (int iy = iy0; iy <= iy1; ++iy)
            for (int ix = ix0; ix <= ix1; ++ix) cell_tri.emplace_back(iy * grid_nx_ + ix, t);
    }
    std::sort(cell_tri.begin(), cell_tri.end());
    grid_offsets_.assign(static_cast<std::size_t>(grid_nx_) * grid_ny_ + 1, 0);
    grid_tris_.resize(cell_tri.size());
    for (const auto& [cell, tri] : cell_tri) ++grid_offsets_[cell + 1];
    for (std::size_t c = 1; c < grid_offsets_.size(); ++c) grid_offsets_[c] += grid_offsets_[c - 1];
    std::vector<int> cursor(grid_offsets_.begin(), grid_offsets_.end() - 1);
    for (const auto& [cell, tri] : cell_tri) grid_tris_[cursor[cell]++] = tri;
}

LocateResult TriMesh::brute_force_locate(Vec2 x) const {
    for (int t = 0; t < n_triangles(); ++t) {
        const auto bary = barycentric(t, x);
        if (bary[0] >= -kBaryTol && bary[1] >= -kBaryTol && bary[2] >= -kBaryTol)
            return {t, bary};
    }
    return {};
}

LocateResult TriMesh::locate(Vec2 x) const {
    const double w = std::max(grid_hi_.x - grid_lo_.x, 1e-300);
    const double h = std::max(grid_hi_.y - grid_lo_.y, 1e-300);
    const auto clampi = [](int v, int lo, int hi) { return std::max(lo, std::min(hi, v)); };
    const int ix = clampi(static_cast<int>((x.x - grid_lo_.x) / w * grid_nx_), 0, grid_nx_ - 1);
    const int iy = clampi(static_cast<int>((x.y - grid_lo_.y) / h * grid_ny_), 0, grid_ny_ - 1);
    const int cell = iy * grid_nx_ + ix;
    for (int k = grid_offsets_[cell]; k < grid_offsets_[cell + 1]; ++k) {
        const int t = grid_tris_[k];
        const auto bary = barycentric(t, x);
        if (bary[0] >= -kBaryTol && bary[1] >= -kBaryTol && bary[2] >= -kBaryTol)
            return {t, bary};
    }
    // A point inside the mesh always lies in a triangle registered to its own
    // cell, so reaching the fallback means x is outside up to roundoff.
    return brute_force_locate(x);
}

LocateResult TriMesh::locate_from(Vec2 x, int seed) const {
    int t = (seed >= 0 && seed < n_triangles()) ? seed : 0;
    const int max_steps = n_triangles() + 4;
    for (int step = 0; step < max_steps; ++step) {
        const auto bary = barycentric(t, x);
        int worst = 0;
        for (int k = 1; k < 3; ++k)
            if (bary[k] < bary[worst]) worst = k;
        if (bary[worst] >= -kBaryTol) return {t, bary};
        // Cross the edge opposite the most negative coordinate:
        // opposite vertex 0 -> local edge (1,2), etc.
        const int local_edge = (worst + 1) % 3;
        const int next = tri_neighbors_[t][local_edge];
        if (next < 0) break; // hit a boundary or hole, fall back
        t = next;
    }
    return locate(x);
}

BoundaryProjection TriMesh::project_to_boundary(Vec2 x) const {
    double best = std::numeric_limits<double>::infinity();
    BoundaryProjection out;
    for (int e : boundary_edge_ids_) {
        const Vec2 a = vertices_[edges_[e][0]];
        const Vec2 b = vertices_[edges_[e][1]];
        const Vec2 ab = b - a;
        const double len2 = ab.norm2();
        double s = len2 > 0.0 ? (x - a).dot(ab) / len2 : 0.0;
        s = std::max(0.0, std::min(1.0, s));
        const Vec2 p = a + s * ab;
        const double d2 = (x - p).norm2();
        if (d2 < best) {
            best = d2;
            out.point = p;
            out.tri = edge_tris_[e][0];
        }
    }
    if (out.tri < 0) throw MeshError("project_to_boundary: mesh has no boundary");
    auto bary = barycentric(out.tri, out.point);
    // Clamp roundoff so downstream basis evaluation sees a valid point.
    double sum = 0.0;
    for (double& l : bary) {
        l = std::max(0.0, l);
        sum += l;
    }
    for (double& l : bary) l /= sum;
    out.bary = bary;
    return out;
}

void BenchmarkGeometry::validate() const {
    if (!(L > 0.0)) throw MeshError("geometry: L must be positive");
    if (!(H > 0.0)) throw MeshError("geometry: H must be positive");
    if (!(r > 0.0)) throw MeshError("geometry: cylinder radius must be positive");
    if (!(h > 0.0)) throw MeshError("geometry: flag thickness must be positive");
    if (!(l > 0.0)) throw MeshError("geometry: flag length must be positive");
    if (!(h / 2.0 < r)) throw MeshError("geometry: flag thicker than the cylinder");
    if (!(cx - r > 0.0 && cx + r < L && cy - r > 0.0 && cy + r < H))
        throw MeshError("geometry: cylinder not strictly inside the channel");
    if (!(flag_tip_x() < L)) throw MeshError("geometry: flag exits the domain");
    if (!(cy - h / 2.0 > 0.0 && cy + h / 2.0 < H))
        throw MeshError("geometry: flag not strictly inside the channel");
}

TriMesh build_rectangle_mesh(double x0, double y0, double x1, double y1, int nx, int ny) {
    if (nx < 1 || ny < 1 || !(x1 > x0) || !(y1 > y0))
        throw MeshError("build_rectangle_mesh: invalid parameters");
    std::vector<Vec2> verts;
    verts.reserve(static_cast<std::size_t>(nx + 1) * (ny + 1));
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i)
            verts.emplace_back(x0 + (x1 - x0) * i / nx, y0 + (y1 - y0) * j / ny);
    const auto vid = [nx](int i, int j) { return j * (nx + 1) + i; };
    std::vector<std::array<int, 3>> tris;
    tris.reserve(static_cast<std::size_t>(2) * nx * ny);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const int v00 = vid(i, j), v10 = vid(i + 1, j), v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
            if ((i + j) % 2 == 0) {
                tris.push_back({v00, v10, v11});
                tris.push_back({v00, v11, v01});
            } else {
                tris.push_back({v00, v10, v01});
                tris.push_back({v10, v11, v01});
            }
        }
    }
    std::vector<Region> regions(tris.size(), Region::fluid);
    std::vector<std::pair<EdgeKey, EdgeLabel>> labels;
    for (int j = 0; j < ny; ++j) {
        labels.push_back({{vid(0, j), vid(0, j + 1)}, EdgeLabel::inlet});
        labels.push_back({{vid(nx, j), vid(nx, j + 1)}, EdgeLabel::outlet});
    }
    for (int i = 0; i < nx; ++i) {
        labels.push_back({{vid(i, 0), vid(i + 1, 0)}, EdgeLabel::wall});
        labels.push_back({{vid(i, ny), vid(i + 1, ny)}, EdgeLabel::wall});
    }
    return TriMesh(std::move(verts), std::move(tris), std::move(regions), std::move(labels));
}

TriMesh refine_uniform(const TriMesh& mesh) {
    const int nv = mesh.n_vertices();
    std::vector<Vec2> verts = mesh.vertices();
    verts.reserve(nv + mesh.n_edges());
    for (const auto& e : mesh.edges()) verts.push_back((mesh.vertex(e[0]) + mesh.vertex(e[1])) * 0.5);

    std::vector<std::array<int, 3>> tris;
    std::vector<Region> regions;
    tris.reserve(4 * mesh.n_triangles());
    regions.reserve(4 * mesh.n_triangles());
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto& tri = mesh.tri(t);
        const auto& te = mesh.tri_edges(t);
        const int mab = nv + te[0], mbc = nv + te[1], mca = nv + te[2];
        tris.push_back({tri[0], mab, mca});
        tris.push_back({mab, tri[1], mbc});
        tris.push_back({mca, mbc, tri[2]});
        tris.push_back({mab, mbc, mca});
        for (int k = 0; k < 4; ++k) regions.push_back(mesh.region(t));
    }
    std::vector<std::pair<EdgeKey, EdgeLabel>> labels;
    for (int e : mesh.labeled_edges()) {
        const auto l = *mesh.edge_label(e);
        const int a = mesh.edges()[e][0], b = mesh.edges()[e][1], m = nv + e;
        labels.push_back({{a, m}, l});
        labels.push_back({{m, b}, l});
    }
    return TriMesh(std::move(verts), std::move(tris), std::move(regions), std::move(labels));
}

LocateResult locate_point(const TriMesh& mesh, Vec2 x) { return mesh.locate(x); }

TriMesh move_vertices(const TriMesh& mesh, const std::vector<Vec2>& vertex_velocity, double dt) {
    if (static_cast<int>(vertex_velocity.size()) != mesh.n_vertices())
        throw MeshError("move_vertices: velocity must be given at every vertex");
    if (!(dt > 0.0)) throw MeshError("move_vertices: dt must be positive");
    std::vector<Vec2> moved(mesh.n_vertices());
    for (int v = 0; v < mesh.n_vertices(); ++v) moved[v] = mesh.vertex(v) + dt * vertex_velocity[v];
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto& tri = mesh.tri(t);
        if (!(tri_signed_area(moved[tri[0]], moved[tri[1]], moved[tri[2]]) > 0.0))
            throw MeshInversion(t, "move_vertices: triangle " + std::to_string(t) +
                                       " inverted or collapsed");
    }
    std::vector<std::pair<EdgeKey, EdgeLabel>> labels;
    for (int e : mesh.labeled_edges()) labels.push_back({mesh.edges()[e], *mesh.edge_label(e)});
    return TriMesh(std::move(moved), mesh.triangles(), mesh.regions(), std::move(labels));
}

std::vector<Vec2> laplace_extension(const TriMesh& mesh, const std::vector<Vec2>& interface_values,
                                    const std::set<EdgeLabel>& zero_boundary) {
    if (static_cast<int>(interface_values.size()) != mesh.n_vertices())
        throw MeshError("laplace_extension: values must be indexed by vertex");
    const int nv = mesh.n_vertices();

    std::vector<int> row(nv, -1);
    std::vector<int> fluid_verts;
    for (int v = 0; v < nv; ++v) {
        if (mesh.vertex_touches(v, Region::fluid)) {
            row[v] = static_cast<int>(fluid_verts.size());
            fluid_verts.push_back(v);
        }
    }
    const int n = static_cast<int>(fluid_verts.size());
    if (n == 0) throw MeshError("laplace_extension: mesh has no fluid region");

    std::vector<Triplet> trips;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        if (mesh.region(t) != Region::fluid) continue;
        const auto& tri = mesh.tri(t);
        const Mat2 jit = mesh.jacobian(t).inverse().transpose();
        const double area = mesh.signed_area(t);
        const Vec2 g[3] = {jit.apply({-1.0, -1.0}), jit.apply({1.0, 0.0}), jit.apply({0.0, 1.0})};
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                trips.push_back({row[tri[a]], row[tri[b]], area * g[a].dot(g[b])});
    }
    SparseMatrix A = SparseMatrix::from_triplets(n, trips);

    std::vector<DirichletConstraint> cons_x, cons_y;
    for (int v : mesh.interface_vertices()) {
        if (row[v] < 0) continue;
        cons_x.push_back({row[v], interface_values[v].x});
        cons_y.push_back({row[v], interface_values[v].y});
    }
    for (int v : fluid_verts) {
        if (mesh.vertex_touches(v, Region::solid)) continue; // interface takes precedence
        bool zero = false;
        for (EdgeLabel l : zero_boundary)
            if (mesh.vertex_on_label(v, l)) zero = true;
        if (zero) {
            cons_x.push_back({row[v], 0.0});
            cons_y.push_back({row[v], 0.0});
        }
    }

    std::vector<double> zero_rhs(n, 0.0);
    auto [Ax, bx] = apply_dirichlet(A, zero_rhs, cons_x);
    auto [Ay, by] = apply_dirichlet(A, zero_rhs, cons_y);
    const std::vector<double> sx = factor_solve(Ax, bx);
    const std::vector<double> sy = factor_solve(Ay, by);

    std::vector<Vec2> out(nv, Vec2{0.0, 0.0});
    for (int v : fluid_verts) out[v] = Vec2{sx[row[v]], sy[row[v]]};
    // Interface vertices carry the inputs exactly, bypassing solver roundoff.
    for (int v : mesh.interface_vertices()) out[v] = interface_values[v];
    return out;
}

void write_mesh(std::ostream& os, const TriMesh& mesh) {
    char buf[128];
    os << "NCFSI-MESH v1\n";
    os << mesh.n_vertices() << "\n";
    for (const Vec2& v : mesh.vertices()) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g\n", v.x, v.y);
        os << buf;
    }
    os << mesh.n_triangles() << "\n";
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto& tri = mesh.tri(t);
        os << tri[0] << ' ' << tri[1] << ' ' << tri[2] << ' ' << to_string(mesh.region(t)) << "\n";
    }
    os << mesh.labeled_edges().size() << "\n";
    for (int e : mesh.labeled_edges()) {
        const auto& key = mesh.edges()[e];
        os << key[0] << ' ' << key[1] << ' ' << to_string(*mesh.edge_label(e)) << "\n";
    }
}

TriMesh read_mesh(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != "NCFSI-MESH v1")
        throw MeshError("read_mesh: missing NCFSI-MESH v1 header");
    int nv = 0;
    if (!(is >> nv) || nv < 3) throw MeshError("read_mesh: bad vertex count");
    std::vector<Vec2> verts(nv);
    for (int v = 0; v < nv; ++v)
        if (!(is >> verts[v].x >> verts[v].y)) throw MeshError("read_mesh: bad vertex line");
    int nt = 0;
    if (!(is >> nt) || nt < 1) throw MeshError("read_mesh: bad triangle count");
    std::vector<std::array<int, 3>> tris(nt);
    std::vector<Region> regions(nt);
    for (int t = 0; t < nt; ++t) {
        std::string reg;
        if (!(is >> tris[t][0] >> tris[t][1] >> tris[t][2] >> reg))
            throw MeshError("read_mesh: bad triangle line");
        regions[t] = region_from_string(reg);
    }
    int ne = 0;
    if (!(is >> ne) || ne < 0) throw MeshError("read_mesh: bad labeled edge count");
    std::vector<std::pair<EdgeKey, EdgeLabel>> labels(ne);
    for (int e = 0; e < ne; ++e) {
        std::string lbl;
        if (!(is >> labels[e].first[0] >> labels[e].first[1] >> lbl))
            throw MeshError("read_mesh: bad edge label line");
        labels[e].second = edge_label_from_string(lbl);
    }
    return TriMesh(std::move(verts), std::move(tris), std::move(regions), std::move(labels));
}

} // namespace ncfsi
