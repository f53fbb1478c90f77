#include "ncfsi/fem.hpp"

#include <cmath>
#include <stdexcept>

namespace ncfsi {

const QuadratureRule& quadrature_rule() {
    // 7-point degree-5 rule; weights normalized to the reference area 1/2.
    static const QuadratureRule rule = [] {
        QuadratureRule r;
        const double s = std::sqrt(15.0);
        const double a = (6.0 - s) / 21.0, wa = (155.0 - s) / 1200.0;
        const double b = (6.0 + s) / 21.0, wb = (155.0 + s) / 1200.0;
        r.points.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
        r.weights.push_back(9.0 / 40.0 / 2.0);
        const auto push3 = [&r](double l, double w) {
            r.points.push_back({1.0 - 2.0 * l, l, l});
            r.points.push_back({l, 1.0 - 2.0 * l, l});
            r.points.push_back({l, l, 1.0 - 2.0 * l});
            for (int k = 0; k < 3; ++k) r.weights.push_back(w / 2.0);
        };
        push3(a, wa);
        push3(b, wb);
        return r;
    }();
    return rule;
}

BasisEval eval_basis(SpaceTag space, const std::array<double, 3>& bary) {
    const double l0 = bary[0], l1 = bary[1], l2 = bary[2];
    // Reference gradients of the barycentric coordinates.
    constexpr Vec2 g0{-1.0, -1.0}, g1{1.0, 0.0}, g2{0.0, 1.0};
    BasisEval out;
    switch (space) {
        case SpaceTag::p1:
        case SpaceTag::p1_broken:
            out.n = 3;
            out.value = {l0, l1, l2, 0, 0, 0};
            out.grad_ref = {g0, g1, g2, Vec2{}, Vec2{}, Vec2{}};
            return out;
        case SpaceTag::p2:
        case SpaceTag::p2_vec:
            out.n = 6;
            out.value = {l0 * (2.0 * l0 - 1.0), l1 * (2.0 * l1 - 1.0), l2 * (2.0 * l2 - 1.0),
                         4.0 * l0 * l1, 4.0 * l1 * l2, 4.0 * l2 * l0};
            out.grad_ref = {g0 * (4.0 * l0 - 1.0),
                            g1 * (4.0 * l1 - 1.0),
                            g2 * (4.0 * l2 - 1.0),
                            4.0 * (l1 * g0 + l0 * g1),
                            4.0 * (l2 * g1 + l1 * g2),
                            4.0 * (l0 * g2 + l2 * g0)};
            return out;
    }
    throw std::logic_error("eval_basis: unknown space tag");
}

MixedSpace::MixedSpace(std::shared_ptr<const TriMesh> mesh) : mesh_(std::move(mesh)) {
    const TriMesh& m = *mesh_;
    n_p2_ = m.n_vertices() + m.n_edges();

    pressure_fluid_.assign(m.n_vertices(), -1);
    pressure_solid_.assign(m.n_vertices(), -1);
    int next = 0;
    for (int v = 0; v < m.n_vertices(); ++v) {
        const bool f = m.vertex_touches(v, Region::fluid);
        const bool s = m.vertex_touches(v, Region::solid);
        if (!f && !s) throw MeshError("MixedSpace: isolated vertex " + std::to_string(v));
        if (f && s) {
            pressure_fluid_[v] = next++;
            pressure_solid_[v] = next++;
        } else {
            pressure_fluid_[v] = pressure_solid_[v] = next++;
        }
    }
    n_pressure_ = next;

    pdof_vertex_.assign(n_pressure_, -1);
    for (int v = 0; v < m.n_vertices(); ++v) {
        if (pressure_fluid_[v] >= 0) pdof_vertex_[pressure_fluid_[v]] = v;
        if (pressure_solid_[v] >= 0) pdof_vertex_[pressure_solid_[v]] = v;
    }

    node_seed_.assign(n_p2_, -1);
    for (int v = 0; v < m.n_vertices(); ++v) node_seed_[v] = m.vertex_seed(v);
    for (int t = 0; t < m.n_triangles(); ++t)
        for (int k = 0; k < 3; ++k) {
            const int node = m.n_vertices() + m.tri_edges(t)[k];
            if (node_seed_[node] < 0) node_seed_[node] = t;
        }
}

int MixedSpace::pressure_dof(int vertex, Region side) const {
    const int d = side == Region::fluid ? pressure_fluid_[vertex] : pressure_solid_[vertex];
    if (d < 0)
        throw std::out_of_range("MixedSpace::pressure_dof: vertex has no dof on that side");
    return d;
}

bool MixedSpace::pressure_duplicated(int vertex) const {
    return pressure_fluid_[vertex] >= 0 && pressure_solid_[vertex] >= 0 &&
           pressure_fluid_[vertex] != pressure_solid_[vertex];
}

std::array<int, 6> MixedSpace::p2_nodes(int t) const {
    const auto& tri = mesh_->tri(t);
    const auto& te = mesh_->tri_edges(t);
    const int nv = mesh_->n_vertices();
    return {tri[0], tri[1], tri[2], nv + te[0], nv + te[1], nv + te[2]};
}

std::array<int, 3> MixedSpace::pressure_dofs(int t) const {
    const auto& tri = mesh_->tri(t);
    const Region r = mesh_->region(t);
    return {pressure_dof(tri[0], r), pressure_dof(tri[1], r), pressure_dof(tri[2], r)};
}

Vec2 MixedSpace::p2_node_pos(const TriMesh& mesh, int node) const {
    const int nv = mesh.n_vertices();
    if (node < nv) return mesh.vertex(node);
    const auto& e = mesh.edges()[node - nv];
    return (mesh.vertex(e[0]) + mesh.vertex(e[1])) * 0.5;
}

bool MixedSpace::p2_node_touches(int node, Region r) const {
    const TriMesh& m = *mesh_;
    if (node < m.n_vertices()) return m.vertex_touches(node, r);
    const auto& adj = m.edge_tris(node - m.n_vertices());
    if (adj[0] >= 0 && m.region(adj[0]) == r) return true;
    if (adj[1] >= 0 && m.region(adj[1]) == r) return true;
    return false;
}

bool MixedSpace::p2_node_on_label(const TriMesh& mesh, int node, EdgeLabel l) const {
    if (node < mesh.n_vertices()) return mesh.vertex_on_label(node, l);
    const int e = node - mesh.n_vertices();
    return mesh.edge_label(e) == l;
}

bool MixedSpace::layout_matches(const TriMesh& other) const {
    return other.n_vertices() == mesh_->n_vertices() && other.n_edges() == mesh_->n_edges() &&
           other.n_triangles() == mesh_->n_triangles();
}

int Field::expected_size(const MixedSpace& space, SpaceTag tag) {
    switch (tag) {
        case SpaceTag::p1: return space.mesh().n_vertices();
        case SpaceTag::p2: return space.n_p2_nodes();
        case SpaceTag::p2_vec: return 2 * space.n_p2_nodes();
        case SpaceTag::p1_broken: return space.n_pressure_dofs();
    }
    throw std::logic_error("Field: unknown space tag");
}

Field::Field(std::shared_ptr<const MixedSpace> space, std::shared_ptr<const TriMesh> mesh,
             SpaceTag tag, std::vector<double> coeffs)
    : space_(std::move(space)), mesh_(std::move(mesh)), tag_(tag), coeffs_(std::move(coeffs)) {
    if (!space_ || !mesh_) throw std::invalid_argument("Field: null space/mesh");
    if (!space_->layout_matches(*mesh_))
        throw std::invalid_argument("Field: mesh connectivity does not match the space layout");
    if (static_cast<int>(coeffs_.size()) != expected_size(*space_, tag_))
        throw std::invalid_argument("Field: coefficient vector length mismatch");
}

Field Field::zeros(std::shared_ptr<const MixedSpace> space, std::shared_ptr<const TriMesh> mesh,
                   SpaceTag tag) {
    std::vector<double> c(expected_size(*space, tag), 0.0);
    return Field(std::move(space), std::move(mesh), tag, std::move(c));
}

Field Field::on_mesh(std::shared_ptr<const TriMesh> mesh) const {
    return Field(space_, std::move(mesh), tag_, coeffs_);
}

double Field::eval_scalar_in(int t, const std::array<double, 3>& bary) const {
    const auto basis = eval_basis(tag_, bary);
    double s = 0.0;
    if (tag_ == SpaceTag::p2) {
        const auto nodes = space_->p2_nodes(t);
        for (int k = 0; k < 6; ++k) s += coeffs_[nodes[k]] * basis.value[k];
    } else if (tag_ == SpaceTag::p1) {
        const auto& tri = mesh_->tri(t);
        for (int k = 0; k < 3; ++k) s += coeffs_[tri[k]] * basis.value[k];
    } else if (tag_ == SpaceTag::p1_broken) {
        const auto dofs = space_->pressure_dofs(t);
        for (int k = 0; k < 3; ++k) s += coeffs_[dofs[k]] * basis.value[k];
    } else {
        throw std::logic_error("eval_scalar_in on a vector field");
    }
    return s;
}

Vec2 Field::eval_vector_in(int t, const std::array<double, 3>& bary) const {
    if (tag_ != SpaceTag::p2_vec) throw std::logic_error("eval_vector_in on a scalar field");
    const auto basis = eval_basis(SpaceTag::p2, bary);
    const auto nodes = space_->p2_nodes(t);
    Vec2 s{};
    for (int k = 0; k < 6; ++k) {
        s.x += coeffs_[2 * nodes[k]] * basis.value[k];
        s.y += coeffs_[2 * nodes[k] + 1] * basis.value[k];
    }
    return s;
}

Vec2 Field::grad_scalar_in(int t, const std::array<double, 3>& bary) const {
    const auto basis = eval_basis(tag_, bary);
    const Mat2 jit = mesh_->jacobian(t).inverse().transpose();
    Vec2 g{};
    if (tag_ == SpaceTag::p2) {
        const auto nodes = space_->p2_nodes(t);
        for (int k = 0; k < 6; ++k) g += coeffs_[nodes[k]] * basis.grad_ref[k];
    } else if (tag_ == SpaceTag::p1) {
        const auto& tri = mesh_->tri(t);
        for (int k = 0; k < 3; ++k) g += coeffs_[tri[k]] * basis.grad_ref[k];
    } else if (tag_ == SpaceTag::p1_broken) {
        const auto dofs = space_->pressure_dofs(t);
        for (int k = 0; k < 3; ++k) g += coeffs_[dofs[k]] * basis.grad_ref[k];
    } else {
        throw std::logic_error("grad_scalar_in on a vector field");
    }
    return jit.apply(g);
}

Mat2 Field::grad_vector_in(int t, const std::array<double, 3>& bary) const {
    if (tag_ != SpaceTag::p2_vec) throw std::logic_error("grad_vector_in on a scalar field");
    const auto basis = eval_basis(SpaceTag::p2, bary);
    const Mat2 jit = mesh_->jacobian(t).inverse().transpose();
    const auto nodes = space_->p2_nodes(t);
    Vec2 gx{}, gy{};
    for (int k = 0; k < 6; ++k) {
        gx += coeffs_[2 * nodes[k]] * basis.grad_ref[k];
        gy += coeffs_[2 * nodes[k] + 1] * basis.grad_ref[k];
    }
    const Vec2 px = jit.apply(gx); // grad of u_x
    const Vec2 py = jit.apply(gy); // grad of u_y
    return Mat2{px.x, px.y, py.x, py.y};
}

namespace {
LocateResult locate_or_throw(const TriMesh& mesh, Vec2 x) {
    const LocateResult loc = mesh.locate(x);
    if (!loc.found())
        throw PointOutsideDomain("interpolate: point (" + std::to_string(x.x) + ", " +
                                 std::to_string(x.y) + ") not inside the mesh");
    return loc;
}
} // namespace

double interpolate(const Field& field, Vec2 x) {
    const auto loc = locate_or_throw(field.mesh(), x);
    return field.eval_scalar_in(loc.tri, loc.bary);
}

Vec2 interpolate_vector(const Field& field, Vec2 x) {
    const auto loc = locate_or_throw(field.mesh(), x);
    return field.eval_vector_in(loc.tri, loc.bary);
}

} // namespace ncfsi
