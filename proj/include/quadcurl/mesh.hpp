#pragma once

#include "quadcurl/common.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace quadcurl {

/// Local edge k of a tet joins local vertices kLocalEdges[k][0] < kLocalEdges[k][1].
inline constexpr int kLocalEdges[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};

/// Tetrahedral mesh with derived edge and face tables.
///
/// Edges and faces store their vertices in ascending id order. The global
/// edge tangent points from the lower to the higher id; the global face
/// normal follows the right-hand rule on the sorted triple. Local face i of
/// a tet is the face opposite local vertex i.
struct TetMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 4>> tets;

    std::vector<std::array<int, 2>> edges;
    std::vector<std::array<int, 3>> faces;
    std::vector<std::array<int, 6>> tet_edges;
    std::vector<std::array<int, 4>> tet_faces;
    /// +1 if the local edge runs along the global tangent.
    std::vector<std::array<std::int8_t, 6>> tet_edge_sign;
    /// +1 if the outward normal of the tet on that face equals n_F.
    std::vector<std::array<std::int8_t, 4>> tet_face_sign;
    /// Incident tets per face; second entry is -1 on the boundary.
    std::vector<std::array<int, 2>> face_tets;

    std::vector<char> boundary_vertex;
    std::vector<char> boundary_edge;
    std::vector<char> boundary_face;

    int num_vertices() const { return static_cast<int>(vertices.size()); }
    int num_edges() const { return static_cast<int>(edges.size()); }
    int num_faces() const { return static_cast<int>(faces.size()); }
    int num_tets() const { return static_cast<int>(tets.size()); }

    /// Recomputes edges, faces, incidences, signs and boundary flags from
    /// vertices and tets. Throws DegenerateMesh on non-positive volumes or
    /// non-manifold faces.
    void build_topology();
};

/// Per-face orthonormal frame: t1 along the first sorted edge, t2 = n x t1.
struct FaceFrame {
    Vec3 t1, t2, n;
    double area = 0.0;
    Vec3 centroid;
};

FaceFrame face_frame(const TetMesh& mesh, int face);
/// Frame of the triangle p0 p1 p2 taken in the given (sorted) order.
FaceFrame face_frame_from_points(const Vec3& p0, const Vec3& p1, const Vec3& p2);

/// Geometry of one tet under its stored vertex order.
struct TetGeometry {
    std::array<Vec3, 4> x;
    std::array<Vec3, 4> grad_lambda;
    double volume = 0.0;
    double diameter = 0.0;
    Vec3 barycenter;

    /// t_ij = x_j - x_i.
    Vec3 t(int i, int j) const { return x[j] - x[i]; }
    Vec3 point(const std::array<double, 4>& lambda) const;
    /// Outward unit normal on local face i.
    Vec3 outward_normal(int i) const;
};

TetGeometry tet_geometry(const TetMesh& mesh, int tet);
TetGeometry tet_geometry(const std::array<Vec3, 4>& x);

double signed_volume(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d);

struct EntityCounts {
    int vertices = 0, edges = 0, faces = 0, tets = 0;
    int interior_vertices = 0, interior_edges = 0, interior_faces = 0;

    int euler() const { return vertices - edges + faces - tets; }
    int interior_euler() const { return interior_vertices - interior_edges + interior_faces - tets; }
};

/// Freudenthal split of [0,1]^3 into n^3 cubes of 6 tets each.
TetMesh build_cube_mesh(int n);

/// Single tet with the given vertices (reordered if needed for positive volume).
TetMesh build_single_tet(const std::array<Vec3, 4>& x);

/// Moves interior vertices by independent uniform offsets in
/// [-a h, a h]^3, h the shortest incident edge. Offending vertices are
/// redrawn (at most 100 rounds) until every tet has positive volume.
TetMesh perturb(const TetMesh& mesh, double amplitude, std::uint64_t seed);

/// Red refinement: 4 corner children plus the octahedron cut along its
/// shortest diagonal (ties: lowest vertex-id pair).
TetMesh refine_uniform(const TetMesh& mesh);

EntityCounts entity_counts(const TetMesh& mesh);

/// Max over tets of diameter / inradius.
double shape_regularity(const TetMesh& mesh);

/// Largest tet diameter.
double mesh_size(const TetMesh& mesh);

double edge_length(const TetMesh& mesh, int edge);

/// ASCII format: "nv ne nf nt", nv coordinate lines, nt vertex quadruples.
void write_mesh(std::ostream& os, const TetMesh& mesh);
TetMesh read_mesh(std::istream& is);

/// Counter-based splitmix64 generator.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next();
    /// Uniform in [lo, hi).
    double uniform(double lo, double hi);

private:
    std::uint64_t state_;
};

}  // namespace quadcurl
