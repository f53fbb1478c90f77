#include "ncfsi/snapshot.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <string>

namespace ncfsi {

namespace {

void write_field_block(std::ostream& os, const char* name, int comps,
                       const std::vector<double>& coeffs) {
    const int n = static_cast<int>(coeffs.size()) / comps;
    os << "FIELD " << name << ' ' << comps << "\n" << n << "\n";
    char buf[128];
    for (int i = 0; i < n; ++i) {
        if (comps == 2)
            std::snprintf(buf, sizeof buf, "%.17g %.17g\n", coeffs[2 * i], coeffs[2 * i + 1]);
        else
            std::snprintf(buf, sizeof buf, "%.17g\n", coeffs[i]);
        os << buf;
    }
}

std::vector<double> read_field_block(std::istream& is, const std::string& name, int comps,
                                     int expected_n) {
    std::string kw, got_name;
    int got_comps = 0, n = 0;
    if (!(is >> kw >> got_name >> got_comps) || kw != "FIELD" || got_name != name ||
        got_comps != comps)
        throw MeshError("read_snapshot: expected FIELD " + name);
    if (!(is >> n) || n != expected_n)
        throw MeshError("read_snapshot: wrong dof count for field " + name);
    std::vector<double> coeffs(static_cast<std::size_t>(n) * comps);
    for (double& v : coeffs)
        if (!(is >> v)) throw MeshError("read_snapshot: truncated field " + name);
    return coeffs;
}

} // namespace

void write_snapshot(std::ostream& os, const State& state) {
    write_mesh(os, *state.mesh);
    write_field_block(os, "u", 2, state.u.coeffs());
    write_field_block(os, "omega", 1, state.omega.coeffs());
    write_field_block(os, "p", 1, state.p.coeffs());
    write_field_block(os, "d", 2, state.d.coeffs());
}

State read_snapshot(std::istream& is) {
    auto mesh = std::make_shared<TriMesh>(read_mesh(is));
    auto space = std::make_shared<MixedSpace>(mesh);
    const int np2 = space->n_p2_nodes();
    auto u = read_field_block(is, "u", 2, np2);
    auto w = read_field_block(is, "omega", 1, np2);
    auto p = read_field_block(is, "p", 1, space->n_pressure_dofs());
    auto d = read_field_block(is, "d", 2, np2);
    return State{0.0,
                 mesh,
                 space,
                 Field(space, mesh, SpaceTag::p2_vec, std::move(u)),
                 Field(space, mesh, SpaceTag::p2, std::move(w)),
                 Field(space, mesh, SpaceTag::p1_broken, std::move(p)),
                 Field(space, mesh, SpaceTag::p2_vec, std::move(d))};
}

} // namespace ncfsi
