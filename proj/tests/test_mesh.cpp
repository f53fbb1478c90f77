#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "ncfsi/mesh.hpp"
#include "oracles.hpp"

using namespace ncfsi;

namespace {

const BenchmarkGeometry kGeom{}; // benchmark defaults

double boundary_flux(const TriMesh& mesh, const std::vector<Vec2>& v, double dt) {
    // |dA| <= dt * integral of |w . n| over the boundary of the half-moved
    // configuration; the polygon area is quadratic in t, so the midpoint
    // flux gives the change exactly and bounds it after taking moduli.
    double flux = 0.0;
    for (int e : mesh.domain_boundary_edges()) {
        const auto& key = mesh.edges()[e];
        const Vec2 a = mesh.vertex(key[0]) + v[key[0]] * (dt / 2);
        const Vec2 b = mesh.vertex(key[1]) + v[key[1]] * (dt / 2);
        const Vec2 t = b - a;
        // Unnormalized outward/inward normal times length; orientation does
        // not matter under the modulus. Trapezoid in the velocity.
        const Vec2 n{t.y, -t.x};
        flux += 0.5 * (std::fabs(v[key[0]].dot(n)) + std::fabs(v[key[1]].dot(n)));
    }
    return flux;
}

} // namespace

TEST_CASE("benchmark mesh: counts, regions and labels") {
    const TriMesh mesh = build_benchmark_mesh(kGeom, 2199);
    CHECK(mesh.n_vertices() >= 2199 * 0.8);
    CHECK(mesh.n_vertices() <= 2199 * 1.2);

    int n_fluid = 0, n_solid = 0;
    for (int t = 0; t < mesh.n_triangles(); ++t)
        (mesh.region(t) == Region::fluid ? n_fluid : n_solid)++;
    CHECK(n_fluid > 0);
    CHECK(n_solid > 0);
    CHECK(mesh.min_signed_area() > 0.0);

    // Region areas: the flag occupies about l*h plus the sliver at the
    // cylinder; the rest of the channel minus the hole is fluid.
    const double solid_area = mesh.region_area(Region::solid);
    CHECK(solid_area == doctest::Approx(0.35 * 0.02).epsilon(0.25));
    const double total = mesh.total_area();
    CHECK(total ==
          doctest::Approx(kGeom.L * kGeom.H - M_PI * kGeom.r * kGeom.r).epsilon(0.01));

    // All five labels present, interface edges separate regions.
    std::set<EdgeLabel> seen;
    for (int e : mesh.labeled_edges()) seen.insert(*mesh.edge_label(e));
    CHECK(seen.count(EdgeLabel::inlet));
    CHECK(seen.count(EdgeLabel::outlet));
    CHECK(seen.count(EdgeLabel::wall));
    CHECK(seen.count(EdgeLabel::cylinder));
    CHECK(seen.count(EdgeLabel::iface));
    for (int e : mesh.labeled_edges()) {
        if (mesh.edge_label(e) != EdgeLabel::iface) continue;
        const auto& adj = mesh.edge_tris(e);
        REQUIRE(adj[1] >= 0);
        CHECK(mesh.region(adj[0]) != mesh.region(adj[1]));
    }
    // Cylinder edges lie on the circle.
    for (int e : mesh.labeled_edges()) {
        if (mesh.edge_label(e) != EdgeLabel::cylinder) continue;
        for (int v : mesh.edges()[e])
            CHECK((mesh.vertex(v) - Vec2{kGeom.cx, kGeom.cy}).norm() ==
                  doctest::Approx(kGeom.r).epsilon(1e-9));
    }
    // Local refinement: triangles at the cylinder are smaller than far-field.
    double near = 0.0, far = 0.0;
    int n_near = 0, n_far = 0;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const double d = (mesh.centroid(t) - Vec2{kGeom.cx, kGeom.cy}).norm();
        if (d < 2 * kGeom.r) {
            near += mesh.signed_area(t);
            ++n_near;
        } else if (mesh.centroid(t).x > 1.5) {
            far += mesh.signed_area(t);
            ++n_far;
        }
    }
    CHECK(near / n_near < 0.25 * far / n_far);
}

TEST_CASE("benchmark mesh: degenerate and invalid geometry rejected") {
    BenchmarkGeometry g = kGeom;
    g.h = 0.0;
    CHECK_THROWS_AS((void)build_benchmark_mesh(g, 2199), MeshError);
    g = kGeom;
    g.l = 5.0; // flag exits the channel
    CHECK_THROWS_AS((void)build_benchmark_mesh(g, 2199), MeshError);
    CHECK_THROWS_AS((void)build_benchmark_mesh(kGeom, 100), MeshError); // target too small
}

TEST_CASE("benchmark mesh: 4x target quadruples the solid triangle count (refinement oracle)") {
    const TriMesh coarse = build_benchmark_mesh(kGeom, 2199);
    const TriMesh fine = build_benchmark_mesh(kGeom, 4 * 2199);
    const TriMesh refined = refine_uniform(coarse);
    const auto solid_count = [](const TriMesh& m) {
        int n = 0;
        for (int t = 0; t < m.n_triangles(); ++t)
            if (m.region(t) == Region::solid) ++n;
        return n;
    };
    CHECK(solid_count(refined) == 4 * solid_count(coarse));
    const double ratio = static_cast<double>(solid_count(fine)) / solid_count(refined);
    CHECK(ratio > 0.6);
    CHECK(ratio < 1.7);
}

TEST_CASE("locate_point: vertices, centroids, outside") {
    const TriMesh mesh = build_rectangle_mesh(0, 0, 2, 1, 8, 4);
    SUBCASE("vertex gives a unit barycentric coordinate") {
        const Vec2 x = mesh.vertex(7);
        const auto loc = locate_point(mesh, x);
        REQUIRE(loc.found());
        int at = -1;
        for (int k = 0; k < 3; ++k)
            if (mesh.tri(loc.tri)[k] == 7) at = k;
        REQUIRE(at >= 0);
        for (int k = 0; k < 3; ++k)
            CHECK(loc.bary[k] == doctest::Approx(k == at ? 1.0 : 0.0).epsilon(1e-12));
    }
    SUBCASE("centroid of triangle k returns (k, (1/3,1/3,1/3))") {
        for (int t : {0, 5, 17, mesh.n_triangles() - 1}) {
            const auto loc = locate_point(mesh, mesh.centroid(t));
            REQUIRE(loc.found());
            CHECK(loc.tri == t);
            for (int k = 0; k < 3; ++k)
                CHECK(loc.bary[k] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
        }
    }
    SUBCASE("outside points are not found") {
        CHECK(!locate_point(mesh, {-1.0, -1.0}).found());
        CHECK(!locate_point(mesh, {2.5, 0.5}).found());
    }
    SUBCASE("barycentric reconstruction reproduces the point (property)") {
        oracles::Rng rng(19);
        for (int k = 0; k < 200; ++k) {
            const Vec2 x{rng.uniform(0.0, 2.0), rng.uniform(0.0, 1.0)};
            const auto loc = locate_point(mesh, x);
            REQUIRE(loc.found());
            const auto& tri = mesh.tri(loc.tri);
            Vec2 rec{};
            for (int i = 0; i < 3; ++i) rec += loc.bary[i] * mesh.vertex(tri[i]);
            CHECK((rec - x).norm() <= 1e-12 * (1.0 + x.norm()));
            double s = 0.0;
            for (double l : loc.bary) {
                s += l;
                CHECK(l >= -1e-12);
            }
            CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
    SUBCASE("locate on the benchmark mesh, across the hole") {
        const TriMesh bm = build_benchmark_mesh(kGeom, 2199);
        CHECK(!locate_point(bm, {kGeom.cx, kGeom.cy}).found()); // inside the cylinder
        const auto loc = locate_point(bm, {1.5, 0.2});
        REQUIRE(loc.found());
        // walking from a seed on the far side crosses around the hole
        const auto loc2 = bm.locate_from({0.05, 0.2}, loc.tri);
        REQUIRE(loc2.found());
    }
}

TEST_CASE("move_vertices") {
    const TriMesh mesh = build_rectangle_mesh(0, 0, 1, 1, 4, 4);
    SUBCASE("zero velocity keeps every vertex") {
        const std::vector<Vec2> v(mesh.n_vertices(), Vec2{0, 0});
        const TriMesh moved = move_vertices(mesh, v, 0.005);
        for (int i = 0; i < mesh.n_vertices(); ++i) CHECK(moved.vertex(i) == mesh.vertex(i));
        CHECK(moved.n_edges() == mesh.n_edges());
    }
    SUBCASE("uniform translation shifts every vertex by dt*v") {
        const std::vector<Vec2> v(mesh.n_vertices(), Vec2{1, 0});
        const TriMesh moved = move_vertices(mesh, v, 0.005);
        for (int i = 0; i < mesh.n_vertices(); ++i) {
            CHECK(moved.vertex(i).x == doctest::Approx(mesh.vertex(i).x + 0.005).epsilon(1e-15));
            CHECK(moved.vertex(i).y == mesh.vertex(i).y);
        }
    }
    SUBCASE("collapsing a triangle raises MeshInversion naming it") {
        // Send vertex 0 across the opposite edge of its triangle.
        std::vector<Vec2> v(mesh.n_vertices(), Vec2{0, 0});
        v[0] = Vec2{10.0, 10.0};
        try {
            (void)move_vertices(mesh, v, 1.0);
            FAIL("expected MeshInversion");
        } catch (const MeshInversion& e) {
            CHECK(e.triangle >= 0);
            const auto& tri = mesh.tri(e.triangle);
            CHECK((tri[0] == 0 || tri[1] == 0 || tri[2] == 0));
        }
    }
    SUBCASE("area change bounded by dt times the boundary flux (property)") {
        oracles::Rng rng(23);
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<Vec2> v(mesh.n_vertices());
            for (auto& w : v) w = Vec2{rng.uniform(-1, 1), rng.uniform(-1, 1)};
            const double dt = 0.01;
            TriMesh moved = [&] {
                try {
                    return move_vertices(mesh, v, dt);
                } catch (const MeshInversion&) {
                    // skip degenerate draws
                    return mesh;
                }
            }();
            const double da = std::fabs(moved.total_area() - mesh.total_area());
            CHECK(da <= dt * boundary_flux(mesh, v, dt) + 1e-14);
        }
    }
    SUBCASE("uniform expansion: bound is exact up to the quadratic term") {
        std::vector<Vec2> v(mesh.n_vertices());
        for (int i = 0; i < mesh.n_vertices(); ++i) v[i] = mesh.vertex(i); // v = x
        const double dt = 0.125;
        const TriMesh moved = move_vertices(mesh, v, dt);
        CHECK(moved.total_area() ==
              doctest::Approx((1 + dt) * (1 + dt) * mesh.total_area()).epsilon(1e-12));
        CHECK(std::fabs(moved.total_area() - mesh.total_area()) <=
              dt * boundary_flux(mesh, v, dt) + 1e-12);
    }
}

TEST_CASE("laplace_extension") {
    const TriMesh square = build_rectangle_mesh(0, 0, 1, 1, 8, 8);
    const std::set<EdgeLabel> all_zero{EdgeLabel::inlet, EdgeLabel::outlet, EdgeLabel::wall};

    SUBCASE("zero interface data gives the zero field") {
        const auto out =
            laplace_extension(square, std::vector<Vec2>(square.n_vertices()), all_zero);
        for (const Vec2& w : out) CHECK(w.norm() == 0.0);
    }
    SUBCASE("interface values are reproduced exactly; harmonic extension solves the PDE") {
        // Use a two-region mesh: solid strip on the left column of cells.
        std::vector<Vec2> verts = square.vertices();
        std::vector<std::array<int, 3>> tris = square.triangles();
        std::vector<Region> regions(tris.size(), Region::fluid);
        for (std::size_t t = 0; t < tris.size(); ++t)
            if (square.centroid(static_cast<int>(t)).x < 1.0 / 8.0) regions[t] = Region::solid;
        std::vector<std::pair<EdgeKey, EdgeLabel>> labels;
        for (int e : square.labeled_edges()) labels.push_back({square.edges()[e], *square.edge_label(e)});
        for (int e = 0; e < square.n_edges(); ++e) {
            const auto& adj = square.edge_tris(e);
            if (adj[1] < 0) continue;
            if (regions[adj[0]] != regions[adj[1]]) labels.push_back({square.edges()[e], EdgeLabel::iface});
        }
        const TriMesh mesh(std::move(verts), std::move(tris), std::move(regions), std::move(labels));

        std::vector<Vec2> values(mesh.n_vertices(), Vec2{});
        for (int v : mesh.interface_vertices()) values[v] = Vec2{mesh.vertex(v).y, 1.0};
        const auto out = laplace_extension(mesh, values, all_zero);
        for (int v : mesh.interface_vertices()) CHECK(out[v] == values[v]);

        // Discrete maximum principle on this non-obtuse mesh.
        for (int v = 0; v < mesh.n_vertices(); ++v) {
            CHECK(out[v].x >= -1e-12);
            CHECK(out[v].x <= 1.0 + 1e-12);
            CHECK(out[v].y >= -1e-12);
            CHECK(out[v].y <= 1.0 + 1e-12);
        }
    }
    SUBCASE("linear boundary data is reproduced exactly at P1 nodes") {
        // g(x,y) = x is discrete-harmonic on any mesh: prescribe it on the
        // whole boundary via interface trickery is not possible here, so use
        // constant data c on the entire boundary instead and check the
        // interior equals c; then check g = x on a mesh where the interface
        // is the whole boundary of a fluid subdomain.
        std::vector<Vec2> verts = square.vertices();
        std::vector<std::array<int, 3>> tris = square.triangles();
        std::vector<Region> regions(tris.size(), Region::fluid);
        // ring of solid cells around the border, fluid core
        for (std::size_t t = 0; t < tris.size(); ++t) {
            const Vec2 c = square.centroid(static_cast<int>(t));
            const double m = 1.0 / 8.0;
            if (c.x < m || c.x > 1 - m || c.y < m || c.y > 1 - m) regions[t] = Region::solid;
        }
        std::vector<std::pair<EdgeKey, EdgeLabel>> labels;
        for (int e : square.labeled_edges()) labels.push_back({square.edges()[e], *square.edge_label(e)});
        for (int e = 0; e < square.n_edges(); ++e) {
            const auto& adj = square.edge_tris(e);
            if (adj[1] < 0) continue;
            if (regions[adj[0]] != regions[adj[1]]) labels.push_back({square.edges()[e], EdgeLabel::iface});
        }
        const TriMesh mesh(std::move(verts), std::move(tris), std::move(regions), std::move(labels));
        std::vector<Vec2> values(mesh.n_vertices(), Vec2{});
        for (int v : mesh.interface_vertices())
            values[v] = Vec2{mesh.vertex(v).x, 7.0}; // linear and constant data
        const auto out = laplace_extension(mesh, values, all_zero);
        for (int v = 0; v < mesh.n_vertices(); ++v) {
            if (!mesh.vertex_touches(v, Region::fluid)) continue;
            if (mesh.vertex_touches(v, Region::solid)) continue;
            CHECK(out[v].x == doctest::Approx(mesh.vertex(v).x).epsilon(1e-11));
            CHECK(out[v].y == doctest::Approx(7.0).epsilon(1e-11));
        }
    }
}

TEST_CASE("mesh snapshot round-trips byte-for-byte") {
    const TriMesh mesh = build_benchmark_mesh(kGeom, 600);
    std::ostringstream os1;
    write_mesh(os1, mesh);
    std::istringstream is(os1.str());
    const TriMesh back = read_mesh(is);
    std::ostringstream os2;
    write_mesh(os2, back);
    CHECK(os1.str() == os2.str());
    CHECK(back.n_vertices() == mesh.n_vertices());
    CHECK(back.n_triangles() == mesh.n_triangles());
    CHECK(os1.str().substr(0, 13) == "NCFSI-MESH v1");
}

TEST_CASE("uniform refinement preserves structure") {
    const TriMesh mesh = build_rectangle_mesh(0, 0, 1, 1, 3, 3);
    const TriMesh fine = refine_uniform(mesh);
    CHECK(fine.n_triangles() == 4 * mesh.n_triangles());
    CHECK(fine.n_vertices() == mesh.n_vertices() + mesh.n_edges());
    CHECK(fine.total_area() == doctest::Approx(mesh.total_area()).epsilon(1e-13));
    CHECK(fine.min_signed_area() > 0.0);
}
