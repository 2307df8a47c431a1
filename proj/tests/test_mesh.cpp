#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "quadcurl/mesh.hpp"

#include <cmath>
#include <set>
#include <sstream>

using namespace quadcurl;

namespace {

double total_volume(const TetMesh& m) {
    double v = 0.0;
    for (int t = 0; t < m.num_tets(); ++t) v += tet_geometry(m, t).volume;
    return v;
}

}  // namespace

TEST_CASE("cube mesh entity counts") {
    for (int n = 1; n <= 4; ++n) {
        const TetMesh m = build_cube_mesh(n);
        const EntityCounts c = entity_counts(m);
        CHECK(c.tets == 6 * n * n * n);
        CHECK(c.vertices == (n + 1) * (n + 1) * (n + 1));
        CHECK(c.euler() == 1);
        CHECK(c.interior_euler() == -1);
        CHECK(c.interior_vertices == (n - 1) * (n - 1) * (n - 1));
        CHECK(total_volume(m) == doctest::Approx(1.0).epsilon(1e-14));
    }
    // n = 1: 7 edges per cube face pattern gives 19 edges, 18 faces.
    const EntityCounts c1 = entity_counts(build_cube_mesh(1));
    CHECK(c1.edges == 19);
    CHECK(c1.faces == 18);
    CHECK(c1.interior_edges == 1);
    CHECK(c1.interior_faces == 6);
}

TEST_CASE("orientation conventions") {
    const TetMesh m = perturb(build_cube_mesh(2), 0.2, 3);
    for (int e = 0; e < m.num_edges(); ++e) CHECK(m.edges[e][0] < m.edges[e][1]);
    for (int f = 0; f < m.num_faces(); ++f) {
        CHECK(m.faces[f][0] < m.faces[f][1]);
        CHECK(m.faces[f][1] < m.faces[f][2]);
    }
    for (int t = 0; t < m.num_tets(); ++t) {
        const TetGeometry g = tet_geometry(m, t);
        CHECK(g.volume > 0.0);
        for (int i = 0; i < 4; ++i) {
            const int f = m.tet_faces[t][i];
            const FaceFrame fr = face_frame(m, f);
            const double s = g.outward_normal(i).dot(fr.n);
            CHECK(std::abs(std::abs(s) - 1.0) < 1e-12);
            CHECK((s > 0 ? 1 : -1) == m.tet_face_sign[t][i]);
        }
        for (int k = 0; k < 6; ++k) {
            const int e = m.tet_edges[t][k];
            const Vec3 local = g.t(kLocalEdges[k][0], kLocalEdges[k][1]);
            const Vec3 global = m.vertices[m.edges[e][1]] - m.vertices[m.edges[e][0]];
            CHECK((local.dot(global) > 0 ? 1 : -1) == m.tet_edge_sign[t][k]);
        }
    }
}

TEST_CASE("barycentric gradients") {
    const TetGeometry g = tet_geometry({Vec3(0, 0, 0), Vec3(1, 0.1, 0), Vec3(0.2, 1, 0), Vec3(0.1, 0.3, 0.9)});
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) CHECK(g.grad_lambda[i].dot(g.x[j] - g.x[0]) == doctest::Approx((i == j) - (i == 0)));
    Vec3 s = Vec3::Zero();
    for (const auto& v : g.grad_lambda) s += v;
    CHECK(s.norm() < 1e-14);
}

TEST_CASE("red refinement") {
    const TetMesh m = perturb(build_cube_mesh(2), 0.2, 42);
    const TetMesh r = refine_uniform(m);
    const EntityCounts a = entity_counts(m), b = entity_counts(r);
    CHECK(b.tets == 8 * a.tets);
    CHECK(b.vertices == a.vertices + a.edges);
    CHECK(b.euler() == 1);
    CHECK(b.interior_euler() == -1);
    CHECK(total_volume(r) == doctest::Approx(total_volume(m)).epsilon(1e-13));
    CHECK(mesh_size(r) < mesh_size(m));
    // Shape regularity stays bounded across refinements.
    const TetMesh r2 = refine_uniform(r);
    CHECK(shape_regularity(r2) < 2.0 * shape_regularity(m));
    // Boundary flags: boundary faces have one neighbour.
    for (int f = 0; f < r.num_faces(); ++f) CHECK((r.face_tets[f][1] < 0) == static_cast<bool>(r.boundary_face[f]));
}

TEST_CASE("perturbation is seeded and keeps the boundary") {
    const TetMesh m = build_cube_mesh(3);
    const TetMesh a = perturb(m, 0.3, 7), b = perturb(m, 0.3, 7), c = perturb(m, 0.3, 8);
    bool differs = false;
    for (int v = 0; v < m.num_vertices(); ++v) {
        CHECK(a.vertices[v] == b.vertices[v]);
        if (m.boundary_vertex[v]) {
            for (int d = 0; d < 3; ++d) {
                const double x = m.vertices[v][d];
                if (x == 0.0 || x == 1.0) CHECK(a.vertices[v][d] == x);
            }
        }
        differs = differs || a.vertices[v] != c.vertices[v];
    }
    CHECK(differs);
    for (int t = 0; t < a.num_tets(); ++t) CHECK(tet_geometry(a, t).volume > 0.0);
}

TEST_CASE("splitmix64 reference stream") {
    SplitMix64 r(0);
    CHECK(r.next() == 0xe220a8397b1dcdafULL);
    CHECK(r.next() == 0x6e789e6aa1b965f4ULL);
    SplitMix64 u(5);
    for (int i = 0; i < 100; ++i) {
        const double x = u.uniform(-2.0, 3.0);
        CHECK(x >= -2.0);
        CHECK(x < 3.0);
    }
}

TEST_CASE("mesh io round trip") {
    const TetMesh m = perturb(build_cube_mesh(2), 0.2, 1);
    std::stringstream ss;
    ss.precision(17);
    write_mesh(ss, m);
    const TetMesh r = read_mesh(ss);
    REQUIRE(r.num_tets() == m.num_tets());
    CHECK(r.num_faces() == m.num_faces());
    for (int v = 0; v < m.num_vertices(); ++v) CHECK((r.vertices[v] - m.vertices[v]).norm() < 1e-15);
}

TEST_CASE("degenerate input") {
    CHECK_THROWS_AS(build_single_tet({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(1, 1, 0)}), DegenerateMesh);
    const TetMesh t = build_single_tet({Vec3(0, 0, 0), Vec3(0, 1, 0), Vec3(1, 0, 0), Vec3(0, 0, 1)});
    CHECK(tet_geometry(t, 0).volume == doctest::Approx(1.0 / 6.0));
    CHECK_THROWS_AS(build_cube_mesh(0), InvalidArgument);
}
