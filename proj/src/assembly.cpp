#include "quadcurl/assembly.hpp"

#include "quadcurl/kernels.hpp"
#include "quadcurl/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace quadcurl {

using Triplet = Eigen::Triplet<double>;

FESpace::FESpace(const TetMesh& mesh, Family family, int k, int l, bool homogeneous_bc, bool broken)
    : mesh_(&mesh), family_(family), k_(k), l_(l), bc_(homogeneous_bc), broken_(broken) {
    per_ = dofs_per_entity(family, k, l);
    const int nt = mesh.num_tets();
    if (family == Family::Lambda) {
        nloc_ = 4 * per_[2];
    } else {
        nloc_ = 4 * per_[0] + 6 * per_[1] + 4 * per_[2] + per_[3];
        elements_ = std::make_shared<std::vector<LocalElement>>(nt);
        auto& els = *elements_;
        parallel_chunks(
            nt,
            [&](std::size_t b, std::size_t e, int) {
                for (std::size_t t = b; t < e; ++t) {
                    const TetView tv = tet_view(mesh, static_cast<int>(t));
                    switch (family) {
                        case Family::Lagrange: els[t] = lagrange_local(k, tv); break;
                        case Family::Nedelec: els[t] = nedelec_local(k, l, tv); break;
                        case Family::SigmaTn: els[t] = sigma_tn_local(k, tv); break;
                        default: break;
                    }
                }
            },
            thread_count());
    }

    l2g_.assign(static_cast<std::size_t>(nt) * nloc_, -1);
    if (broken) {
        full_dim_ = dim_ = nt * nloc_;
        for (std::size_t i = 0; i < l2g_.size(); ++i) l2g_[i] = static_cast<int>(i);
        return;
    }

    const std::array<int, 4> count{mesh.num_vertices(), mesh.num_edges(), mesh.num_faces(), nt};
    std::array<int, 4> off{};
    int acc = 0;
    for (int d = 0; d < 4; ++d) {
        off[d] = acc;
        acc += count[d] * per_[d];
    }
    full_dim_ = acc;
    std::vector<char> mask(full_dim_, 0);
    const bool mask_faces = bc_ || family == Family::Lambda;
    for (int v = 0; v < count[0]; ++v)
        if (bc_ && mesh.boundary_vertex[v])
            for (int i = 0; i < per_[0]; ++i) mask[off[0] + v * per_[0] + i] = 1;
    for (int e = 0; e < count[1]; ++e)
        if (bc_ && mesh.boundary_edge[e])
            for (int i = 0; i < per_[1]; ++i) mask[off[1] + e * per_[1] + i] = 1;
    for (int f = 0; f < count[2]; ++f)
        if (mask_faces && mesh.boundary_face[f])
            for (int i = 0; i < per_[2]; ++i) mask[off[2] + f * per_[2] + i] = 1;
    std::vector<int> free(full_dim_, -1);
    for (int i = 0; i < full_dim_; ++i)
        if (!mask[i]) free[i] = dim_++;

    for (int t = 0; t < nt; ++t) {
        int* out = &l2g_[static_cast<std::size_t>(t) * nloc_];
        if (family == Family::Lambda) {
            for (int f = 0; f < 4; ++f)
                for (int i = 0; i < per_[2]; ++i) out[f * per_[2] + i] = free[off[2] + mesh.tet_faces[t][f] * per_[2] + i];
            continue;
        }
        const auto& slots = (*elements_)[t].dofs.slots;
        for (int i = 0; i < nloc_; ++i) {
            const DofSlot& s = slots[i];
            int ent = 0;
            switch (s.kind) {
                case EntityKind::Vertex: ent = mesh.tets[t][s.entity]; break;
                case EntityKind::Edge: ent = mesh.tet_edges[t][s.entity]; break;
                case EntityKind::Face: ent = mesh.tet_faces[t][s.entity]; break;
                case EntityKind::Cell: ent = t; break;
            }
            const int d = static_cast<int>(s.kind);
            out[i] = free[off[d] + ent * per_[d] + s.index];
        }
    }
}

FESpace FESpace::broken_view() const {
    if (family_ == Family::Lambda) throw InvalidArgument("broken_view: multiplier space");
    FESpace b;
    b.mesh_ = mesh_;
    b.family_ = family_;
    b.k_ = k_;
    b.l_ = l_;
    b.bc_ = bc_;
    b.broken_ = true;
    b.per_ = per_;
    b.nloc_ = nloc_;
    b.elements_ = elements_;
    b.full_dim_ = b.dim_ = mesh_->num_tets() * nloc_;
    b.l2g_.resize(l2g_.size());
    for (std::size_t i = 0; i < b.l2g_.size(); ++i) b.l2g_[i] = static_cast<int>(i);
    return b;
}

const LocalElement& FESpace::element(int t) const {
    if (!elements_) throw InvalidArgument("FESpace::element: multiplier space has no tet elements");
    return (*elements_)[t];
}

int FESpace::value_rank() const {
    switch (family_) {
        case Family::Lagrange: return 1;
        case Family::SigmaTn: return 9;
        default: return 3;
    }
}

int FESpace::degree() const { return family_ == Family::Lambda ? k_ - 1 : k_; }

MatrixXd tabulate(const PolyField& f, const MatrixXd& lambda) {
    const int np = static_cast<int>(lambda.rows());
    MatrixXd out = MatrixXd::Zero(static_cast<Eigen::Index>(f.rank) * np, f.nfun());
    if (f.nmono() == 0) return out;
    const MatrixXd P = Monomials::get(4, f.degree).evaluate(lambda);
    for (int c = 0; c < f.rank; ++c) {
        const MatrixXd v = P * f.comp[c];
        for (int p = 0; p < np; ++p) out.row(f.rank * p + c) = v.row(p);
    }
    return out;
}

FacePoints face_points(const TetMesh& mesh, int t, int f, int degree) {
    const QuadratureRule& q = quadrature(Domain::Triangle, degree);
    const int F = mesh.tet_faces[t][f];
    const auto& fv = mesh.faces[F];
    int slot[3];
    for (int s = 0; s < 3; ++s)
        for (int j = 0; j < 4; ++j)
            if (mesh.tets[t][j] == fv[s]) slot[s] = j;
    const double area = face_frame(mesh, F).area;
    FacePoints fp;
    fp.lambda = MatrixXd::Zero(q.size(), 4);
    fp.mu = q.points;
    fp.w = q.weights * (area / q.measure());
    for (int p = 0; p < q.size(); ++p)
        for (int s = 0; s < 3; ++s) fp.lambda(p, slot[s]) = q.points(p, s);
    return fp;
}

namespace {

// Tet quadrature with physical weights.
struct CellPoints {
    MatrixXd lambda;
    VectorXd w;
};

CellPoints cell_points(const TetGeometry& g, int degree) {
    const QuadratureRule& q = quadrature(Domain::Tet, std::max(degree, 0));
    return {q.points, q.weights * (g.volume / q.measure())};
}

VectorXd expand(const VectorXd& w, int rank) {
    VectorXd out(w.size() * rank);
    for (Eigen::Index p = 0; p < w.size(); ++p)
        for (int c = 0; c < rank; ++c) out[rank * p + c] = w[p];
    return out;
}

MatrixXd gram(const MatrixXd& phi, const VectorXd& w) {
    const int n = static_cast<int>(phi.cols());
    MatrixXd G = MatrixXd::Zero(n, n);
    kernels::weighted_gram(phi.data(), static_cast<int>(phi.rows()), n, w.data(), G.data());
    return G;
}

// A^T diag(w) B.
MatrixXd cross_gram(const MatrixXd& A, const MatrixXd& B, const VectorXd& w) {
    return A.transpose() * (w.asDiagonal() * B);
}

void scatter(const MatrixXd& Ae, const int* rows, const int* cols, std::vector<Triplet>& out) {
    for (Eigen::Index j = 0; j < Ae.cols(); ++j) {
        if (cols[j] < 0) continue;
        for (Eigen::Index i = 0; i < Ae.rows(); ++i) {
            if (rows[i] < 0 || Ae(i, j) == 0.0) continue;
            out.emplace_back(rows[i], cols[j], Ae(i, j));
        }
    }
}

template <class Local>
SpMat assemble_tets(int nrows, int ncols, int nt, Local&& local) {
    const int nchunks = thread_count();
    std::vector<std::vector<Triplet>> parts(nchunks);
    parallel_chunks(
        nt,
        [&](std::size_t b, std::size_t e, int c) {
            for (std::size_t t = b; t < e; ++t) local(static_cast<int>(t), parts[c]);
        },
        nchunks);
    std::size_t total = 0;
    for (const auto& p : parts) total += p.size();
    std::vector<Triplet> all;
    all.reserve(total);
    for (auto& p : parts) all.insert(all.end(), p.begin(), p.end());
    SpMat A(nrows, ncols);
    A.setFromTriplets(all.begin(), all.end());
    A.makeCompressed();
    return A;
}

void check_same_mesh(const FESpace& a, const FESpace& b) {
    if (&a.mesh() != &b.mesh()) throw InvalidArgument("spaces live on different meshes");
}

void check_family(const FESpace& s, Family f, const char* what) {
    if (s.family() != f) throw InvalidArgument(std::string(what) + ": expected a " + family_name(f) + " space");
}

SpMat lambda_mass(const FESpace& L) {
    const TetMesh& mesh = L.mesh();
    const int per = L.per_entity()[2];
    std::vector<Triplet> trip;
    const QuadratureRule& q = quadrature(Domain::Triangle, 2 * (L.k() - 1));
    for (int t = 0; t < mesh.num_tets(); ++t) {
        const int* dofs = L.local_dofs(t);
        for (int f = 0; f < 4; ++f) {
            const int F = mesh.tet_faces[t][f];
            if (mesh.face_tets[F][0] != t || dofs[f * per] < 0) continue;
            const FaceFrame fr = face_frame(mesh, F);
            const MatrixXd phi = lambda_face_local(L.k(), fr).evaluate(q.points);
            const MatrixXd Me = gram(phi, expand(q.weights * (fr.area / q.measure()), 3));
            scatter(Me, dofs + f * per, dofs + f * per, trip);
        }
    }
    SpMat A(L.dim(), L.dim());
    A.setFromTriplets(trip.begin(), trip.end());
    return A;
}

}  // namespace

MatrixXd local_mass(const FESpace& S, int t) {
    const LocalElement& el = S.element(t);
    const CellPoints cp = cell_points(tet_geometry(S.mesh(), t), 2 * S.degree());
    return gram(tabulate(el.basis, cp.lambda), expand(cp.w, el.rank()));
}

SpMat assemble_mass(const FESpace& S) {
    if (S.family() == Family::Lambda) return lambda_mass(S);
    return assemble_tets(S.dim(), S.dim(), S.mesh().num_tets(), [&](int t, std::vector<Triplet>& out) {
        scatter(local_mass(S, t), S.local_dofs(t), S.local_dofs(t), out);
    });
}

SpMat assemble_curlcurl(const FESpace& V) {
    check_family(V, Family::Nedelec, "assemble_curlcurl");
    const int deg = 2 * (V.degree() - 1);
    return assemble_tets(V.dim(), V.dim(), V.mesh().num_tets(), [&](int t, std::vector<Triplet>& out) {
        const TetGeometry g = tet_geometry(V.mesh(), t);
        const PolyField c = TetCalculus(g).curl(V.element(t).basis);
        const CellPoints cp = cell_points(g, deg);
        scatter(gram(tabulate(c, cp.lambda), expand(cp.w, 3)), V.local_dofs(t), V.local_dofs(t), out);
    });
}

MatrixXd local_b(const FESpace& S, const FESpace& V, int t) {
    const TetMesh& mesh = S.mesh();
    const int ks = S.degree(), kv = V.degree();
    const TetGeometry g = tet_geometry(mesh, t);
    const TetCalculus calc(g);
    const LocalElement& es = S.element(t);
    const LocalElement& ev = V.element(t);
    const PolyField curlv = calc.curl(ev.basis);
    MatrixXd Bt = MatrixXd::Zero(ev.ndof(), es.ndof());
    if (ks >= 1) {
        const CellPoints cp = cell_points(g, ks - 1 + kv - 1);
        const PolyField divs = calc.div(es.basis);
        Bt += cross_gram(tabulate(curlv, cp.lambda), tabulate(divs, cp.lambda), expand(cp.w, 3));
    }
    for (int f = 0; f < 4; ++f) {
        if (mesh.boundary_face[mesh.tet_faces[t][f]]) continue;
        const FacePoints fp = face_points(mesh, t, f, ks + kv - 1);
        const Vec3 n = g.outward_normal(f);
        const MatrixXd tau = tabulate(es.basis, fp.lambda);
        const MatrixXd cv = tabulate(curlv, fp.lambda);
        const int np = static_cast<int>(fp.w.size());
        MatrixXd nn(np, es.ndof()), nc(np, ev.ndof());
        for (int p = 0; p < np; ++p) {
            nn.row(p).setZero();
            for (int r = 0; r < 3; ++r)
                for (int s = 0; s < 3; ++s) nn.row(p) += n[r] * n[s] * tau.row(9 * p + 3 * r + s);
            nc.row(p) = n[0] * cv.row(3 * p) + n[1] * cv.row(3 * p + 1) + n[2] * cv.row(3 * p + 2);
        }
        Bt -= cross_gram(nc, nn, fp.w);
    }
    return Bt;
}

SpMat assemble_b(const FESpace& S, const FESpace& V) {
    check_same_mesh(S, V);
    check_family(S, Family::SigmaTn, "assemble_b");
    check_family(V, Family::Nedelec, "assemble_b");
    return assemble_tets(V.dim(), S.dim(), S.mesh().num_tets(), [&](int t, std::vector<Triplet>& out) {
        scatter(local_b(S, V, t), V.local_dofs(t), S.local_dofs(t), out);
    });
}

SpMat assemble_grad(const FESpace& Q, const FESpace& V) {
    check_same_mesh(Q, V);
    check_family(Q, Family::Lagrange, "assemble_grad");
    check_family(V, Family::Nedelec, "assemble_grad");
    const int deg = V.degree() + Q.degree() - 1;
    return assemble_tets(V.dim(), Q.dim(), V.mesh().num_tets(), [&](int t, std::vector<Triplet>& out) {
        const TetGeometry g = tet_geometry(V.mesh(), t);
        const PolyField gq = TetCalculus(g).grad(Q.element(t).basis);
        const CellPoints cp = cell_points(g, deg);
        const MatrixXd Gt =
            cross_gram(tabulate(V.element(t).basis, cp.lambda), tabulate(gq, cp.lambda), expand(cp.w, 3));
        scatter(Gt, V.local_dofs(t), Q.local_dofs(t), out);
    });
}

MatrixXd local_c(const FESpace& S, const FESpace& L, int t) {
    const TetMesh& mesh = S.mesh();
    const int per = L.per_entity()[2];
    const int deg = S.degree() + L.degree();
    const LocalElement& es = S.element(t);
    MatrixXd Ct = MatrixXd::Zero(4 * per, es.ndof());
    for (int f = 0; f < 4; ++f) {
        const int F = mesh.tet_faces[t][f];
        if (mesh.boundary_face[F]) continue;
        const double s = mesh.tet_face_sign[t][f];
        const FaceFrame fr = face_frame(mesh, F);
        const FacePoints fp = face_points(mesh, t, f, deg);
        const MatrixXd tau = tabulate(es.basis, fp.lambda);
        const MatrixXd mu = lambda_face_local(L.k(), fr).evaluate(fp.mu);
        const int np = static_cast<int>(fp.w.size());
        MatrixXd tr(3 * np, es.ndof());
        const Vec3& n = fr.n;
        for (int p = 0; p < np; ++p) {
            for (int j = 0; j < es.ndof(); ++j) {
                Mat3 T;
                for (int c = 0; c < 9; ++c) T(c / 3, c % 3) = tau(9 * p + c, j);
                tr.block<3, 1>(3 * p, j) = n.cross(T * n);
            }
        }
        Ct.middleRows(f * per, per) = -s * cross_gram(mu, tr, expand(fp.w, 3));
    }
    return Ct;
}

SpMat assemble_c(const FESpace& S, const FESpace& L) {
    check_same_mesh(S, L);
    check_family(S, Family::SigmaTn, "assemble_c");
    check_family(L, Family::Lambda, "assemble_c");
    return assemble_tets(L.dim(), S.dim(), S.mesh().num_tets(), [&](int t, std::vector<Triplet>& out) {
        scatter(local_c(S, L, t), L.local_dofs(t), S.local_dofs(t), out);
    });
}

DevCurlOperator assemble_devcurl(const FESpace& V, const FESpace& S) {
    check_same_mesh(S, V);
    check_family(S, Family::SigmaTn, "assemble_devcurl");
    check_family(V, Family::Nedelec, "assemble_devcurl");
    const TetMesh& mesh = S.mesh();
    struct Entry {
        int row, col;
        double v;
    };
    std::vector<Entry> entries;
    for (int t = 0; t < mesh.num_tets(); ++t) {
        const LocalElement& es = S.element(t);
        const LocalElement& ev = V.element(t);
        const PolyField c = TetCalculus(tet_geometry(mesh, t)).curl(ev.basis);
        const MatrixXd cv = tabulate(c, es.dofs.lambda);
        const int np = es.dofs.npts();
        const int* srow = S.local_dofs(t);
        const int* vcol = V.local_dofs(t);
        for (int r = 0; r < 3; ++r) {
            MatrixXd samples = MatrixXd::Zero(9 * np, ev.ndof());
            for (int p = 0; p < np; ++p)
                for (int j = 0; j < ev.ndof(); ++j) {
                    const double tr = cv(3 * p + r, j) / 3.0;
                    for (int s = 0; s < 3; ++s) samples(9 * p + 3 * r + s, j) = cv(3 * p + s, j);
                    for (int d = 0; d < 3; ++d) samples(9 * p + 4 * d, j) -= tr;
                }
            const MatrixXd loc = es.dofs.W * samples;
            for (int j = 0; j < ev.ndof(); ++j) {
                if (vcol[j] < 0) continue;
                for (int i = 0; i < es.ndof(); ++i)
                    if (srow[i] >= 0) entries.push_back({srow[i], r * V.dim() + vcol[j], loc(i, j)});
            }
        }
    }
    std::stable_sort(entries.begin(), entries.end(),
                     [](const Entry& a, const Entry& b) { return a.row != b.row ? a.row < b.row : a.col < b.col; });
    DevCurlOperator out;
    double scale = 0.0;
    for (const auto& e : entries) scale = std::max(scale, std::abs(e.v));
    std::vector<Triplet> trip;
    for (std::size_t i = 0; i < entries.size();) {
        std::size_t j = i;
        while (j < entries.size() && entries[j].row == entries[i].row && entries[j].col == entries[i].col) {
            out.max_disagreement = std::max(out.max_disagreement, std::abs(entries[j].v - entries[i].v));
            ++j;
        }
        if (std::abs(entries[i].v) > 1e-14 * scale) trip.emplace_back(entries[i].row, entries[i].col, entries[i].v);
        i = j;
    }
    if (scale > 0.0) out.max_disagreement /= scale;
    out.D.resize(S.dim(), 3 * V.dim());
    out.D.setFromTriplets(trip.begin(), trip.end());
    return out;
}

VectorXd interpolate(const FESpace& S, const TetFunction& f, int extra_degree) {
    const TetMesh& mesh = S.mesh();
    const int rank = S.value_rank();
    VectorXd out = VectorXd::Zero(S.dim());
    std::vector<char> done(S.dim(), 0);
    if (S.family() == Family::Lambda) {
        // Face-wise L2 projection.
        const int per = S.per_entity()[2];
        const int deg = std::min(2 * S.degree() + 8, max_quadrature_degree(Domain::Triangle));
        const QuadratureRule& q = quadrature(Domain::Triangle, deg);
        for (int t = 0; t < mesh.num_tets(); ++t) {
            const int* dofs = S.local_dofs(t);
            const TetGeometry g = tet_geometry(mesh, t);
            for (int lf = 0; lf < 4; ++lf) {
                if (dofs[lf * per] < 0 || done[dofs[lf * per]]) continue;
                const FacePoints fp = face_points(mesh, t, lf, deg);
                const FaceFrame fr = face_frame(mesh, mesh.tet_faces[t][lf]);
                const MatrixXd phi = lambda_face_local(S.k(), fr).evaluate(q.points);
                VectorXd vals(3 * q.size());
                for (int p = 0; p < q.size(); ++p) {
                    const std::array<double, 4> l{fp.lambda(p, 0), fp.lambda(p, 1), fp.lambda(p, 2), fp.lambda(p, 3)};
                    f(t, g.point(l), l, vals.data() + 3 * p);
                }
                const VectorXd w = expand(fp.w, 3);
                const VectorXd c = gram(phi, w).ldlt().solve(phi.transpose() * w.asDiagonal() * vals);
                for (int i = 0; i < per; ++i) {
                    out[dofs[lf * per + i]] = c[i];
                    done[dofs[lf * per + i]] = 1;
                }
            }
        }
        return out;
    }
    const bool accurate = extra_degree > 0 && S.family() != Family::Lagrange;
    for (int t = 0; t < mesh.num_tets(); ++t) {
        const LocalElement& el = S.element(t);
        const int* dofs = S.local_dofs(t);
        bool needed = false;
        for (int i = 0; i < el.ndof(); ++i) needed = needed || (dofs[i] >= 0 && !done[dofs[i]]);
        if (!needed) continue;
        LocalElement fine;
        if (accurate) {
            const TetView tv = tet_view(mesh, t);
            fine = S.family() == Family::Nedelec ? nedelec_local(S.k(), S.l(), tv, extra_degree)
                                                 : sigma_tn_local(S.k(), tv, extra_degree);
        }
        const LocalElement& src = accurate ? fine : el;
        const int np = src.dofs.npts();
        VectorXd samples(rank * np);
        for (int p = 0; p < np; ++p) {
            const std::array<double, 4> l{src.dofs.lambda(p, 0), src.dofs.lambda(p, 1), src.dofs.lambda(p, 2),
                                          src.dofs.lambda(p, 3)};
            f(t, src.dofs.points[p], l, samples.data() + rank * p);
        }
        VectorXd loc = interpolate_local(src, samples);
        // Same functionals, possibly a different (equivalent) test subset:
        // re-express through the primary element's functionals.
        if (accurate) loc = el.dofs.W * (el.dofs.sample(src.basis) * loc);
        for (int i = 0; i < el.ndof(); ++i) {
            if (dofs[i] < 0 || done[dofs[i]]) continue;
            out[dofs[i]] = loc[i];
            done[dofs[i]] = 1;
        }
    }
    return out;
}

VectorXd interpolate(const FESpace& S, const PointFunction& f, int extra_degree) {
    return interpolate(
        S, TetFunction([&](int, const Vec3& x, const std::array<double, 4>&, double* out) { f(x, out); }), extra_degree);
}

namespace {

VectorXd load_vector(const FESpace& V, const PointFunction& f, int degree, bool curl) {
    const TetMesh& mesh = V.mesh();
    const int rank = V.value_rank();
    const int nchunks = thread_count();
    std::vector<std::vector<std::pair<int, double>>> parts(nchunks);
    parallel_chunks(
        mesh.num_tets(),
        [&](std::size_t b, std::size_t e, int chunk) {
            for (std::size_t t = b; t < e; ++t) {
                const TetGeometry g = tet_geometry(mesh, static_cast<int>(t));
                const CellPoints cp = cell_points(g, degree);
                const LocalElement& el = V.element(static_cast<int>(t));
                const MatrixXd phi = tabulate(curl ? TetCalculus(g).curl(el.basis) : el.basis, cp.lambda);
                VectorXd vals(rank * cp.w.size());
                for (Eigen::Index p = 0; p < cp.w.size(); ++p) {
                    const std::array<double, 4> l{cp.lambda(p, 0), cp.lambda(p, 1), cp.lambda(p, 2), cp.lambda(p, 3)};
                    f(g.point(l), vals.data() + rank * p);
                }
                const VectorXd loc = phi.transpose() * expand(cp.w, rank).cwiseProduct(vals);
                const int* dofs = V.local_dofs(static_cast<int>(t));
                for (int i = 0; i < el.ndof(); ++i)
                    if (dofs[i] >= 0) parts[chunk].emplace_back(dofs[i], loc[i]);
            }
        },
        nchunks);
    VectorXd F = VectorXd::Zero(V.dim());
    for (const auto& p : parts)
        for (const auto& [i, v] : p) F[i] += v;
    return F;
}

}  // namespace

VectorXd assemble_load(const FESpace& V, const PointFunction& f, int degree) {
    return load_vector(V, f, degree, false);
}

VectorXd assemble_load_curl(const FESpace& V, const PointFunction& psi, int degree) {
    if (V.family() != Family::Nedelec) throw InvalidArgument("assemble_load_curl: needs a Nedelec space");
    return load_vector(V, psi, degree, true);
}

VectorXd FieldCoefficients::local(int t) const {
    const int n = space->local_dim();
    const int* dofs = space->local_dofs(t);
    VectorXd c(n);
    for (int i = 0; i < n; ++i) c[i] = dofs[i] >= 0 ? coeffs[dofs[i]] : 0.0;
    return c;
}

VectorXd FieldCoefficients::evaluate(int t, const std::array<double, 4>& lambda) const {
    const LocalElement& el = space->element(t);
    const Monomials& M = Monomials::get(4, el.basis.degree);
    VectorXd P(M.size());
    M.evaluate(lambda.data(), P.data());
    const VectorXd c = local(t);
    VectorXd out(el.rank());
    for (int r = 0; r < el.rank(); ++r) out[r] = P.dot(el.basis.comp[r] * c);
    return out;
}

VectorXd FieldCoefficients::evaluate(const Vec3& x) const {
    const TetMesh& mesh = space->mesh();
    int best = -1;
    double best_min = -INFINITY;
    std::array<double, 4> best_l{};
    for (int t = 0; t < mesh.num_tets(); ++t) {
        const TetGeometry g = tet_geometry(mesh, t);
        std::array<double, 4> l;
        double mn = INFINITY;
        for (int i = 0; i < 4; ++i) {
            l[i] = 1.0 + g.grad_lambda[i].dot(x - g.x[i]);
            mn = std::min(mn, l[i]);
        }
        if (mn > best_min) {
            best_min = mn;
            best = t;
            best_l = l;
        }
        if (mn >= 0.0) break;
    }
    if (best < 0 || best_min < -1e-10) throw InvalidArgument("FieldCoefficients::evaluate: point outside the mesh");
    return evaluate(best, best_l);
}

void write_coo(std::ostream& os, const SpMat& A) {
    os.precision(17);
    for (int j = 0; j < A.outerSize(); ++j)
        for (SpMat::InnerIterator it(A, j); it; ++it) os << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
}

}  // namespace quadcurl
