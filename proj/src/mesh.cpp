#include "quadcurl/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <tuple>

namespace quadcurl {

double signed_volume(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
    return (b - a).dot((c - a).cross(d - a)) / 6.0;
}

namespace {

template <std::size_t N>
struct KeyRef {
    std::array<int, N> key;
    int tet;
    int local;
};

template <std::size_t N>
bool key_less(const KeyRef<N>& a, const KeyRef<N>& b) {
    return std::tie(a.key, a.tet, a.local) < std::tie(b.key, b.tet, b.local);
}

}  // namespace

void TetMesh::build_topology() {
    const int nt = num_tets();
    const int nv = num_vertices();
    for (int t = 0; t < nt; ++t) {
        for (int v : tets[t]) {
            if (v < 0 || v >= nv) throw InvalidArgument("tet " + std::to_string(t) + " references missing vertex");
        }
        const auto& T = tets[t];
        if (!(signed_volume(vertices[T[0]], vertices[T[1]], vertices[T[2]], vertices[T[3]]) > 0.0)) {
            throw DegenerateMesh("tet " + std::to_string(t) + " has non-positive volume");
        }
    }

    std::vector<KeyRef<2>> erefs;
    erefs.reserve(6 * static_cast<std::size_t>(nt));
    for (int t = 0; t < nt; ++t) {
        for (int k = 0; k < 6; ++k) {
            int a = tets[t][kLocalEdges[k][0]], b = tets[t][kLocalEdges[k][1]];
            erefs.push_back({{std::min(a, b), std::max(a, b)}, t, k});
        }
    }
    std::sort(erefs.begin(), erefs.end(), key_less<2>);
    edges.clear();
    tet_edges.assign(nt, {});
    tet_edge_sign.assign(nt, {});
    for (std::size_t i = 0; i < erefs.size(); ++i) {
        if (i == 0 || erefs[i].key != erefs[i - 1].key) edges.push_back(erefs[i].key);
        const int e = num_edges() - 1;
        const int t = erefs[i].tet, k = erefs[i].local;
        tet_edges[t][k] = e;
        tet_edge_sign[t][k] = tets[t][kLocalEdges[k][0]] < tets[t][kLocalEdges[k][1]] ? 1 : -1;
    }

    std::vector<KeyRef<3>> frefs;
    frefs.reserve(4 * static_cast<std::size_t>(nt));
    for (int t = 0; t < nt; ++t) {
        for (int i = 0; i < 4; ++i) {
            std::array<int, 3> f;
            int c = 0;
            for (int j = 0; j < 4; ++j)
                if (j != i) f[c++] = tets[t][j];
            std::sort(f.begin(), f.end());
            frefs.push_back({f, t, i});
        }
    }
    std::sort(frefs.begin(), frefs.end(), key_less<3>);
    faces.clear();
    face_tets.clear();
    tet_faces.assign(nt, {});
    tet_face_sign.assign(nt, {});
    for (std::size_t i = 0; i < frefs.size(); ++i) {
        if (i == 0 || frefs[i].key != frefs[i - 1].key) {
            faces.push_back(frefs[i].key);
            face_tets.push_back({frefs[i].tet, -1});
        } else {
            auto& ft = face_tets.back();
            if (ft[1] != -1) throw DegenerateMesh("face shared by more than two tets");
            ft[1] = frefs[i].tet;
        }
        const int f = num_faces() - 1;
        const int t = frefs[i].tet, li = frefs[i].local;
        tet_faces[t][li] = f;
        const auto& F = faces[f];
        const Vec3& p0 = vertices[F[0]];
        const Vec3 n = (vertices[F[1]] - p0).cross(vertices[F[2]] - p0);
        tet_face_sign[t][li] = n.dot(vertices[tets[t][li]] - p0) < 0.0 ? 1 : -1;
    }
    for (int f = 0; f < num_faces(); ++f) {
        const auto& ft = face_tets[f];
        if (ft[1] != -1) {
            int s0 = 0, s1 = 0;
            for (int i = 0; i < 4; ++i) {
                if (tet_faces[ft[0]][i] == f) s0 = tet_face_sign[ft[0]][i];
                if (tet_faces[ft[1]][i] == f) s1 = tet_face_sign[ft[1]][i];
            }
            if (s0 + s1 != 0) throw DegenerateMesh("inconsistent orientation across face " + std::to_string(f));
        }
    }

    boundary_face.assign(num_faces(), 0);
    boundary_edge.assign(num_edges(), 0);
    boundary_vertex.assign(nv, 0);
    for (int f = 0; f < num_faces(); ++f) {
        if (face_tets[f][1] != -1) continue;
        boundary_face[f] = 1;
        for (int v : faces[f]) boundary_vertex[v] = 1;
    }
    for (int t = 0; t < nt; ++t) {
        for (int i = 0; i < 4; ++i) {
            if (!boundary_face[tet_faces[t][i]]) continue;
            for (int k = 0; k < 6; ++k) {
                if (kLocalEdges[k][0] != i && kLocalEdges[k][1] != i) boundary_edge[tet_edges[t][k]] = 1;
            }
        }
    }
}

FaceFrame face_frame_from_points(const Vec3& p0, const Vec3& p1, const Vec3& p2) {
    FaceFrame fr;
    const Vec3 c = (p1 - p0).cross(p2 - p0);
    const double cn = c.norm();
    fr.n = c / cn;
    fr.area = 0.5 * cn;
    fr.t1 = (p1 - p0).normalized();
    fr.t2 = fr.n.cross(fr.t1);
    fr.centroid = (p0 + p1 + p2) / 3.0;
    return fr;
}

FaceFrame face_frame(const TetMesh& mesh, int face) {
    const auto& F = mesh.faces[face];
    return face_frame_from_points(mesh.vertices[F[0]], mesh.vertices[F[1]], mesh.vertices[F[2]]);
}

Vec3 TetGeometry::point(const std::array<double, 4>& lambda) const {
    return lambda[0] * x[0] + lambda[1] * x[1] + lambda[2] * x[2] + lambda[3] * x[3];
}

Vec3 TetGeometry::outward_normal(int i) const { return -grad_lambda[i].normalized(); }

TetGeometry tet_geometry(const std::array<Vec3, 4>& x) {
    TetGeometry g;
    g.x = x;
    Mat3 J;
    J.col(0) = x[1] - x[0];
    J.col(1) = x[2] - x[0];
    J.col(2) = x[3] - x[0];
    g.volume = J.determinant() / 6.0;
    const Mat3 Jinv = J.inverse();
    for (int i = 0; i < 3; ++i) g.grad_lambda[i + 1] = Jinv.row(i).transpose();
    g.grad_lambda[0] = -(g.grad_lambda[1] + g.grad_lambda[2] + g.grad_lambda[3]);
    g.barycenter = 0.25 * (x[0] + x[1] + x[2] + x[3]);
    double d = 0.0;
    for (const auto& e : kLocalEdges) d = std::max(d, (x[e[1]] - x[e[0]]).norm());
    g.diameter = d;
    return g;
}

TetGeometry tet_geometry(const TetMesh& mesh, int tet) {
    const auto& T = mesh.tets[tet];
    return tet_geometry({mesh.vertices[T[0]], mesh.vertices[T[1]], mesh.vertices[T[2]], mesh.vertices[T[3]]});
}

namespace {

void orient_positive(const std::vector<Vec3>& v, std::array<int, 4>& t) {
    if (signed_volume(v[t[0]], v[t[1]], v[t[2]], v[t[3]]) < 0.0) std::swap(t[2], t[3]);
}

}  // namespace

TetMesh build_cube_mesh(int n) {
    if (n < 1) throw InvalidArgument("build_cube_mesh: n must be >= 1");
    TetMesh m;
    const int np = n + 1;
    m.vertices.reserve(static_cast<std::size_t>(np) * np * np);
    for (int k = 0; k <= n; ++k)
        for (int j = 0; j <= n; ++j)
            for (int i = 0; i <= n; ++i)
                m.vertices.emplace_back(double(i) / n, double(j) / n, double(k) / n);
    auto id = [np](int i, int j, int k) { return i + np * (j + np * k); };
    const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    m.tets.reserve(6 * static_cast<std::size_t>(n) * n * n);
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
                for (const auto& p : perms) {
                    int c[3] = {i, j, k};
                    std::array<int, 4> t;
                    t[0] = id(c[0], c[1], c[2]);
                    c[p[0]]++;
                    t[1] = id(c[0], c[1], c[2]);
                    c[p[1]]++;
                    t[2] = id(c[0], c[1], c[2]);
                    c[p[2]]++;
                    t[3] = id(c[0], c[1], c[2]);
                    orient_positive(m.vertices, t);
                    m.tets.push_back(t);
                }
    m.build_topology();
    return m;
}

TetMesh build_single_tet(const std::array<Vec3, 4>& x) {
    TetMesh m;
    m.vertices.assign(x.begin(), x.end());
    std::array<int, 4> t{0, 1, 2, 3};
    orient_positive(m.vertices, t);
    m.tets.push_back(t);
    m.build_topology();
    return m;
}

std::uint64_t SplitMix64::next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double SplitMix64::uniform(double lo, double hi) {
    const double u = double(next() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
}

TetMesh perturb(const TetMesh& mesh, double amplitude, std::uint64_t seed) {
    if (!(amplitude >= 0.0 && amplitude < 0.5)) throw InvalidArgument("perturb: amplitude must lie in [0, 0.5)");
    TetMesh out = mesh;
    if (amplitude == 0.0) return out;

    const int nv = mesh.num_vertices();
    std::vector<double> hloc(nv, std::numeric_limits<double>::infinity());
    for (int e = 0; e < mesh.num_edges(); ++e) {
        const double len = edge_length(mesh, e);
        for (int v : mesh.edges[e]) hloc[v] = std::min(hloc[v], len);
    }
    SplitMix64 rng(seed);
    auto draw = [&](int v) {
        const double a = amplitude * hloc[v];
        Vec3 d;
        for (int c = 0; c < 3; ++c) d[c] = rng.uniform(-a, a);
        out.vertices[v] = mesh.vertices[v] + d;
    };
    for (int v = 0; v < nv; ++v)
        if (!mesh.boundary_vertex[v]) draw(v);

    for (int round = 0; round <= 100; ++round) {
        std::vector<char> redo(nv, 0);
        bool bad = false;
        for (const auto& T : out.tets) {
            const auto& X = out.vertices;
            if (signed_volume(X[T[0]], X[T[1]], X[T[2]], X[T[3]]) > 0.0) continue;
            bad = true;
            for (int v : T)
                if (!mesh.boundary_vertex[v]) redo[v] = 1;
        }
        if (!bad) {
            out.build_topology();
            return out;
        }
        if (round == 100) break;
        for (int v = 0; v < nv; ++v)
            if (redo[v]) draw(v);
    }
    throw DegenerateMesh("perturb: could not restore positive volumes after 100 retries");
}

TetMesh refine_uniform(const TetMesh& mesh) {
    TetMesh out;
    const int nv = mesh.num_vertices();
    out.vertices = mesh.vertices;
    out.vertices.reserve(nv + mesh.num_edges());
    for (const auto& e : mesh.edges) out.vertices.push_back(0.5 * (mesh.vertices[e[0]] + mesh.vertices[e[1]]));
    out.tets.reserve(8 * static_cast<std::size_t>(mesh.num_tets()));

    int local_edge[4][4];
    for (int k = 0; k < 6; ++k) {
        local_edge[kLocalEdges[k][0]][kLocalEdges[k][1]] = k;
        local_edge[kLocalEdges[k][1]][kLocalEdges[k][0]] = k;
    }
    for (int t = 0; t < mesh.num_tets(); ++t) {
        const auto& a = mesh.tets[t];
        auto m = [&](int i, int j) { return nv + mesh.tet_edges[t][local_edge[i][j]]; };
        std::array<std::array<int, 4>, 8> kids;
        kids[0] = {a[0], m(0, 1), m(0, 2), m(0, 3)};
        kids[1] = {m(0, 1), a[1], m(1, 2), m(1, 3)};
        kids[2] = {m(0, 2), m(1, 2), a[2], m(2, 3)};
        kids[3] = {m(0, 3), m(1, 3), m(2, 3), a[3]};

        // Octahedron diagonals (m_ab, m_cd) for the three splits of {0,1,2,3}.
        const int splits[3][4] = {{0, 1, 2, 3}, {0, 2, 1, 3}, {0, 3, 1, 2}};
        int best = 0;
        double best_len = std::numeric_limits<double>::infinity();
        std::array<int, 2> best_pair{};
        for (int s = 0; s < 3; ++s) {
            const int p = m(splits[s][0], splits[s][1]), q = m(splits[s][2], splits[s][3]);
            const double len = (out.vertices[p] - out.vertices[q]).squaredNorm();
            const std::array<int, 2> pair{std::min(p, q), std::max(p, q)};
            if (len < best_len || (len == best_len && pair < best_pair)) {
                best = s;
                best_len = len;
                best_pair = pair;
            }
        }
        const int A = splits[best][0], B = splits[best][1], C = splits[best][2], D = splits[best][3];
        const int p = m(A, B), q = m(C, D);
        const int ring[4] = {m(A, C), m(A, D), m(B, D), m(B, C)};
        for (int r = 0; r < 4; ++r) kids[4 + r] = {p, q, ring[r], ring[(r + 1) % 4]};
        for (auto& k : kids) {
            orient_positive(out.vertices, k);
            out.tets.push_back(k);
        }
    }
    out.build_topology();
    return out;
}

EntityCounts entity_counts(const TetMesh& mesh) {
    EntityCounts c;
    c.vertices = mesh.num_vertices();
    c.edges = mesh.num_edges();
    c.faces = mesh.num_faces();
    c.tets = mesh.num_tets();
    for (char b : mesh.boundary_vertex) c.interior_vertices += !b;
    for (char b : mesh.boundary_edge) c.interior_edges += !b;
    for (char b : mesh.boundary_face) c.interior_faces += !b;
    return c;
}

double shape_regularity(const TetMesh& mesh) {
    double worst = 0.0;
    for (int t = 0; t < mesh.num_tets(); ++t) {
        const TetGeometry g = tet_geometry(mesh, t);
        double surface = 0.0;
        for (int i = 0; i < 4; ++i) {
            const Vec3& p0 = g.x[(i + 1) % 4];
            surface += 0.5 * (g.x[(i + 2) % 4] - p0).cross(g.x[(i + 3) % 4] - p0).norm();
        }
        const double inradius = 3.0 * g.volume / surface;
        worst = std::max(worst, g.diameter / inradius);
    }
    return worst;
}

double mesh_size(const TetMesh& mesh) {
    double h = 0.0;
    for (int t = 0; t < mesh.num_tets(); ++t) h = std::max(h, tet_geometry(mesh, t).diameter);
    return h;
}

double edge_length(const TetMesh& mesh, int edge) {
    const auto& e = mesh.edges[edge];
    return (mesh.vertices[e[1]] - mesh.vertices[e[0]]).norm();
}

void write_mesh(std::ostream& os, const TetMesh& mesh) {
    std::ostringstream buf;
    buf.precision(17);
    buf << mesh.num_vertices() << ' ' << mesh.num_edges() << ' ' << mesh.num_faces() << ' ' << mesh.num_tets() << '\n';
    for (const auto& v : mesh.vertices) buf << v[0] << ' ' << v[1] << ' ' << v[2] << '\n';
    for (const auto& t : mesh.tets) buf << t[0] << ' ' << t[1] << ' ' << t[2] << ' ' << t[3] << '\n';
    os << buf.str();
}

TetMesh read_mesh(std::istream& is) {
    long nv = -1, ne = -1, nf = -1, nt = -1;
    if (!(is >> nv >> ne >> nf >> nt) || nv < 0 || nt < 0) throw InvalidArgument("read_mesh: bad header");
    TetMesh m;
    m.vertices.resize(nv);
    for (auto& v : m.vertices)
        if (!(is >> v[0] >> v[1] >> v[2])) throw InvalidArgument("read_mesh: truncated vertex list");
    m.tets.resize(nt);
    for (auto& t : m.tets)
        if (!(is >> t[0] >> t[1] >> t[2] >> t[3])) throw InvalidArgument("read_mesh: truncated tet list");
    m.build_topology();
    return m;
}

}  // namespace quadcurl
