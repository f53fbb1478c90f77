#include "ncfsi/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ncfsi {

namespace {

struct QPointData {
    std::array<double, 3> bary;
    double weight; // reference weight
    std::array<double, 6> n2;   // P2 values
    std::array<Vec2, 6> g2_ref; // P2 reference gradients
};

const std::vector<QPointData>& qpoints() {
    static const std::vector<QPointData> data = [] {
        std::vector<QPointData> out;
        const QuadratureRule& rule = quadrature_rule();
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            QPointData d;
            d.bary = rule.points[q];
            d.weight = rule.weights[q];
            const BasisEval b2 = eval_basis(SpaceTag::p2, d.bary);
            d.n2 = b2.value;
            d.g2_ref = b2.grad_ref;
            out.push_back(d);
        }
        return out;
    }();
    return data;
}

} // namespace

MonolithicAssembler::MonolithicAssembler(std::shared_ptr<const MixedSpace> space,
                                         AssemblyOptions opts)
    : space_(std::move(space)), opts_(std::move(opts)) {
    const int np2 = space_->n_p2_nodes();
    const int np = space_->n_pressure_dofs();
    switch (opts_.blocks) {
        case BlockSet::full:
            local_dim_ = 21;
            w_base_ = 2 * np2;
            p_base_ = 3 * np2;
            n_global_ = 3 * np2 + np;
            break;
        case BlockSet::velocity_pressure:
            local_dim_ = 15;
            w_base_ = -1;
            p_base_ = 2 * np2;
            n_global_ = 2 * np2 + np;
            break;
        case BlockSet::omega_only:
            local_dim_ = 6;
            w_base_ = 0;
            p_base_ = -1;
            n_global_ = np2;
            break;
    }
    build_pattern();
}

void MonolithicAssembler::build_pattern() {
    const TriMesh& mesh = space_->mesh();
    const int nt = mesh.n_triangles();
    const int dim = local_dim_;

    // Global dofs of each element, in the local ordering used by the kernel.
    elem_rows_.assign(static_cast<std::size_t>(nt) * dim, -1);
    for (int t = 0; t < nt; ++t) {
        const auto nodes = space_->p2_nodes(t);
        int* rows = elem_rows_.data() + static_cast<std::size_t>(t) * dim;
        int idx = 0;
        if (has_velocity()) {
            for (int k = 0; k < 6; ++k)
                for (int c = 0; c < 2; ++c) rows[idx++] = gu(nodes[k], c);
        }
        if (has_omega()) {
            for (int k = 0; k < 6; ++k) rows[idx++] = gw(nodes[k]);
        }
        if (has_velocity()) {
            const auto pd = space_->pressure_dofs(t);
            for (int k = 0; k < 3; ++k) rows[idx++] = gp(pd[k]);
        }
    }

    std::vector<Triplet> trips;
    trips.reserve(static_cast<std::size_t>(nt) * dim * dim);
    for (int t = 0; t < nt; ++t) {
        const int* rows = elem_rows_.data() + static_cast<std::size_t>(t) * dim;
        for (int a = 0; a < dim; ++a)
            for (int b = 0; b < dim; ++b) trips.push_back({rows[a], rows[b], 0.0});
    }
    pattern_ = SparseMatrix::from_triplets(n_global_, trips);

    // Element-local pair -> CSR slot.
    elem_slots_.assign(static_cast<std::size_t>(nt) * dim * dim, -1);
    const auto& row_ptr = pattern_.row_ptr();
    const auto& cols = pattern_.cols();
    for (int t = 0; t < nt; ++t) {
        const int* rows = elem_rows_.data() + static_cast<std::size_t>(t) * dim;
        int* slots = elem_slots_.data() + static_cast<std::size_t>(t) * dim * dim;
        for (int a = 0; a < dim; ++a) {
            const int r = rows[a];
            for (int b = 0; b < dim; ++b) {
                const int c = rows[b];
                const auto begin = cols.begin() + row_ptr[r];
                const auto end = cols.begin() + row_ptr[r + 1];
                const auto it = std::lower_bound(begin, end, c);
                slots[a * dim + b] = static_cast<int>(it - cols.begin());
            }
        }
    }

    // Per-slot contribution lists in ascending element order, so the ordered
    // parallel gather reproduces the serial scatter bitwise.
    gather_off_.assign(pattern_.nnz() + 1, 0);
    for (const int s : elem_slots_) ++gather_off_[s + 1];
    for (std::size_t s = 1; s < gather_off_.size(); ++s) gather_off_[s] += gather_off_[s - 1];
    gather_elem_.resize(elem_slots_.size());
    gather_local_.resize(elem_slots_.size());
    {
        std::vector<int> cursor(gather_off_.begin(), gather_off_.end() - 1);
        for (int t = 0; t < nt; ++t) {
            const int* slots = elem_slots_.data() + static_cast<std::size_t>(t) * dim * dim;
            for (int ab = 0; ab < dim * dim; ++ab) {
                const int k = cursor[slots[ab]]++;
                gather_elem_[k] = t;
                gather_local_[k] = static_cast<std::uint16_t>(ab);
            }
        }
    }
    rhs_off_.assign(n_global_ + 1, 0);
    for (const int r : elem_rows_) ++rhs_off_[r + 1];
    for (std::size_t r = 1; r < rhs_off_.size(); ++r) rhs_off_[r] += rhs_off_[r - 1];
    rhs_elem_.resize(elem_rows_.size());
    rhs_local_.resize(elem_rows_.size());
    {
        std::vector<int> cursor(rhs_off_.begin(), rhs_off_.end() - 1);
        for (int t = 0; t < nt; ++t) {
            const int* rows = elem_rows_.data() + static_cast<std::size_t>(t) * dim;
            for (int a = 0; a < dim; ++a) {
                const int k = cursor[rows[a]]++;
                rhs_elem_[k] = t;
                rhs_local_[k] = static_cast<std::uint16_t>(a);
            }
        }
    }
}

void MonolithicAssembler::compute_local(int t, const TriMesh& mesh, const MaterialParams& p,
                                        double dt, const Field* u_conv, const Field* w_conv,
                                        const Field* d, double* local, double* local_rhs) const {
    const int dim = local_dim_;
    std::memset(local, 0, sizeof(double) * dim * dim);
    std::memset(local_rhs, 0, sizeof(double) * dim);

    const auto nodes = space_->p2_nodes(t);
    const Mat2 J = mesh.jacobian(t);
    const double detJ = J.det();
    const Mat2 jit = J.inverse().transpose();
    const Region region = mesh.region(t);
    const double rho = p.density(region);
    const bool solid = region == Region::solid && opts_.include_solid && has_velocity();
    const bool time_terms = opts_.include_time_terms;
    const double visc = p.mu + p.mu_r;

    const int u_off = 0;
    const int w_off = has_velocity() ? 12 : 0;
    const int p_off = has_omega() ? 18 : 12;

    for (const QPointData& q : qpoints()) {
        const double w = q.weight * detJ;
        // Physical P2 gradients.
        Vec2 g[6];
        for (int k = 0; k < 6; ++k) g[k] = jit.apply(q.g2_ref[k]);
        const double* N = q.n2.data();
        const double L[3] = {q.bary[0], q.bary[1], q.bary[2]};

        Vec2 xq{};
        if (opts_.body_force || opts_.body_couple || solid) {
            const auto& tri = mesh.tri(t);
            xq = mesh.vertex(tri[0]) * L[0] + mesh.vertex(tri[1]) * L[1] + mesh.vertex(tri[2]) * L[2];
        }

        if (has_velocity()) {
            // Viscous block (mu + mu_r)/2 Du : Dv, the weak counterpart of
            // (mu + mu_r) lap(u) for divergence-free fields, and, on solid
            // triangles, the implicit part of the solid stress,
            // c3*dt*[Du - grad(u) grad(d)^T - grad(d) grad(u)^T] : Dv.
            Mat2 Gd{};
            if (solid) {
                if (!d) throw AssemblyError("assemble: displacement field required for solid terms");
                Gd = d->grad_vector_in(t, q.bary);
            }
            const double cdt = solid ? p.c3 * dt : 0.0;
            for (int i = 0; i < 6; ++i) {
                for (int j = 0; j < 6; ++j) {
                    const double gg = g[i].dot(g[j]);
                    const Vec2 v = solid ? Gd.apply(g[j]) : Vec2{};
                    const double vg = solid ? v.dot(g[i]) : 0.0;
                    const double gic[2] = {g[i].x, g[i].y};
                    const double gjb[2] = {g[j].x, g[j].y};
                    const double vb[2] = {v.x, v.y};
                    for (int b = 0; b < 2; ++b) {
                        for (int c = 0; c < 2; ++c) {
                            double val = visc * w * ((b == c ? gg : 0.0) + gic[c] * gjb[b]);
                            if (solid) {
                                val += cdt * w * 2.0 * ((b == c ? gg : 0.0) + gic[c] * gjb[b]);
                                val -= 2.0 * cdt * w * ((b == c ? vg : 0.0) + gic[c] * vb[b]);
                            }
                            local[(u_off + 2 * i + b) * dim + (u_off + 2 * j + c)] += val;
                        }
                    }
                }
            }
            if (time_terms) {
                if (!u_conv) throw AssemblyError("assemble: convected velocity required");
                const double m = rho / dt * w;
                double uc[2] = {0.0, 0.0};
                const auto& cf = u_conv->coeffs();
                for (int k = 0; k < 6; ++k) {
                    uc[0] += cf[2 * nodes[k]] * N[k];
                    uc[1] += cf[2 * nodes[k] + 1] * N[k];
                }
                for (int i = 0; i < 6; ++i) {
                    for (int j = 0; j < 6; ++j) {
                        const double mm = m * N[i] * N[j];
                        local[(u_off + 2 * i) * dim + (u_off + 2 * j)] += mm;
                        local[(u_off + 2 * i + 1) * dim + (u_off + 2 * j + 1)] += mm;
                    }
                    local_rhs[u_off + 2 * i] += m * uc[0] * N[i];
                    local_rhs[u_off + 2 * i + 1] += m * uc[1] * N[i];
                }
            }
            // Pressure coupling: -p div(v) and -q div(u), plus the
            // penalization zeta p q that keeps the direct solver happy.
            for (int a = 0; a < 3; ++a) {
                for (int i = 0; i < 6; ++i) {
                    const double vx = w * L[a] * g[i].x;
                    const double vy = w * L[a] * g[i].y;
                    local[(u_off + 2 * i) * dim + (p_off + a)] -= vx;
                    local[(u_off + 2 * i + 1) * dim + (p_off + a)] -= vy;
                    local[(p_off + a) * dim + (u_off + 2 * i)] -= vx;
                    local[(p_off + a) * dim + (u_off + 2 * i + 1)] -= vy;
                }
                for (int b = 0; b < 3; ++b)
                    local[(p_off + a) * dim + (p_off + b)] += p.zeta * w * L[a] * L[b];
            }
            if (solid) {
                // Known part of the solid stress moves to the right-hand
                // side: -c3 (Dd - grad(d) grad(d)^T) : Dv.
                const Mat2 S = solid_extra_stress(*d, t, q.bary);
                for (int i = 0; i < 6; ++i) {
                    const double sx = S.a * g[i].x + S.b * g[i].y; // row 0 . g
                    const double sy = S.c * g[i].x + S.d * g[i].y; // row 1 . g
                    local_rhs[u_off + 2 * i] -= p.c3 * w * 2.0 * sx;
                    local_rhs[u_off + 2 * i + 1] -= p.c3 * w * 2.0 * sy;
                }
            }
            if (opts_.body_force) {
                const Vec2 f = opts_.body_force(xq);
                for (int i = 0; i < 6; ++i) {
                    local_rhs[u_off + 2 * i] += w * f.x * N[i];
                    local_rhs[u_off + 2 * i + 1] += w * f.y * N[i];
                }
            }
        }

        if (has_omega()) {
            const double iw = p.micro_inertia;
            for (int l = 0; l < 6; ++l) {
                for (int k = 0; k < 6; ++k) {
                    double val = p.lambda1 * w * g[k].dot(g[l]) + 4.0 * p.mu_r * w * N[k] * N[l];
                    if (time_terms) val += rho * iw / dt * w * N[k] * N[l];
                    local[(w_off + l) * dim + (w_off + k)] += val;
                }
            }
            if (time_terms) {
                if (!w_conv) throw AssemblyError("assemble: convected microrotation required");
                double wc = 0.0;
                const auto& cf = w_conv->coeffs();
                for (int k = 0; k < 6; ++k) wc += cf[nodes[k]] * N[k];
                for (int l = 0; l < 6; ++l) local_rhs[w_off + l] += rho * iw / dt * w * wc * N[l];
            }
            if (opts_.body_couple) {
                const double gq = opts_.body_couple(xq);
                for (int l = 0; l < 6; ++l) local_rhs[w_off + l] += w * gq * N[l];
            }
        }

        if (has_velocity() && has_omega() && p.mu_r != 0.0) {
            // Curl couplings, both in the non-integrated-by-parts form:
            // -2 mu_r (curl w) . v in the momentum rows and
            // -2 mu_r (curl u) q in the microrotation rows.
            const double c2w = -2.0 * p.mu_r * w;
            for (int i = 0; i < 6; ++i) {
                for (int k = 0; k < 6; ++k) {
                    local[(u_off + 2 * i) * dim + (w_off + k)] += c2w * g[k].y * N[i];
                    local[(u_off + 2 * i + 1) * dim + (w_off + k)] += c2w * (-g[k].x) * N[i];
                    local[(w_off + i) * dim + (u_off + 2 * k)] += c2w * (-g[k].y) * N[i];
                    local[(w_off + i) * dim + (u_off + 2 * k + 1)] += c2w * g[k].x * N[i];
                }
            }
        }
    }
}

std::pair<SparseMatrix, std::vector<double>>
MonolithicAssembler::assemble(const TriMesh& mesh, const MaterialParams& params, double dt,
                              const Field* u_conv, const Field* w_conv, const Field* d) const {
    if (!space_->layout_matches(mesh))
        throw AssemblyError("assemble: mesh connectivity does not match the space");
    if (opts_.include_time_terms && !(dt > 0.0))
        throw AssemblyError("assemble: dt must be positive");
    const auto check_field = [&](const Field* f, SpaceTag tag, const char* what) {
        if (!f) return;
        if (f->tag() != tag || !space_->layout_matches(f->mesh()))
            throw AssemblyError(std::string("assemble: bad field for ") + what);
    };
    check_field(u_conv, SpaceTag::p2_vec, "convected velocity");
    check_field(w_conv, SpaceTag::p2, "convected microrotation");
    check_field(d, SpaceTag::p2_vec, "displacement");
    if (d && &d->mesh() != &mesh)
        throw AssemblyError("assemble: displacement must live on the assembled mesh");

    const int nt = mesh.n_triangles();
    const int dim = local_dim_;
    SparseMatrix A = pattern_; // copies the pattern with zeroed values
    std::fill(A.values().begin(), A.values().end(), 0.0);
    std::vector<double> rhs(n_global_, 0.0);

    const auto kernel = [&](int t, double* local, double* local_rhs) {
        compute_local(t, mesh, params, dt, u_conv, w_conv, d, local, local_rhs);
    };

    if (opts_.mode == ScatterMode::serial) {
        std::vector<double> local(static_cast<std::size_t>(dim) * dim);
        std::vector<double> local_rhs(dim);
        for (int t = 0; t < nt; ++t) {
            kernel(t, local.data(), local_rhs.data());
            const int* slots = elem_slots_.data() + static_cast<std::size_t>(t) * dim * dim;
            const int* rows = elem_rows_.data() + static_cast<std::size_t>(t) * dim;
            for (int ab = 0; ab < dim * dim; ++ab) A.values()[slots[ab]] += local[ab];
            for (int a = 0; a < dim; ++a) rhs[rows[a]] += local_rhs[a];
        }
    } else {
        // Element matrices first (independent work), then either a
        // deterministic row-ordered gather or an atomic scatter.
        std::vector<double> locals(static_cast<std::size_t>(nt) * dim * dim);
        std::vector<double> local_rhss(static_cast<std::size_t>(nt) * dim);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
        for (int t = 0; t < nt; ++t) {
            kernel(t, locals.data() + static_cast<std::size_t>(t) * dim * dim,
                   local_rhss.data() + static_cast<std::size_t>(t) * dim);
        }
        if (opts_.mode == ScatterMode::parallel_ordered) {
            auto& vals = A.values();
            const int nnz = pattern_.nnz();
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
            for (int s = 0; s < nnz; ++s) {
                double acc = 0.0;
                for (int k = gather_off_[s]; k < gather_off_[s + 1]; ++k)
                    acc += locals[static_cast<std::size_t>(gather_elem_[k]) * dim * dim +
                                  gather_local_[k]];
                vals[s] = acc;
            }
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
            for (int r = 0; r < n_global_; ++r) {
                double acc = 0.0;
                for (int k = rhs_off_[r]; k < rhs_off_[r + 1]; ++k)
                    acc += local_rhss[static_cast<std::size_t>(rhs_elem_[k]) * dim + rhs_local_[k]];
                rhs[r] = acc;
            }
        } else { // parallel_atomic
            auto& vals = A.values();
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
            for (int t = 0; t < nt; ++t) {
                const double* local = locals.data() + static_cast<std::size_t>(t) * dim * dim;
                const double* local_rhs = local_rhss.data() + static_cast<std::size_t>(t) * dim;
                const int* slots = elem_slots_.data() + static_cast<std::size_t>(t) * dim * dim;
                const int* rows = elem_rows_.data() + static_cast<std::size_t>(t) * dim;
                for (int ab = 0; ab < dim * dim; ++ab) {
                    double& ref = vals[slots[ab]];
#ifdef _OPENMP
#pragma omp atomic
#endif
                    ref += local[ab];
                }
                for (int a = 0; a < dim; ++a) {
                    double& ref = rhs[rows[a]];
#ifdef _OPENMP
#pragma omp atomic
#endif
                    ref += local_rhs[a];
                }
            }
        }
    }

    for (const double v : A.values())
        if (!std::isfinite(v)) throw AssemblyError("assemble: non-finite matrix coefficient");
    for (const double v : rhs)
        if (!std::isfinite(v)) throw AssemblyError("assemble: non-finite right-hand side");
    return {std::move(A), std::move(rhs)};
}

} // namespace ncfsi
