#include "quadcurl/quadcurl.hpp"

#include "quadcurl/kernels.hpp"
#include "quadcurl/quadrature.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>

namespace quadcurl {

using Triplet = Eigen::Triplet<double>;

namespace {

std::array<double, 4> row4(const MatrixXd& lambda, Eigen::Index p) {
    return {lambda(p, 0), lambda(p, 1), lambda(p, 2), lambda(p, 3)};
}

VectorXd expand(const VectorXd& w, int rank) {
    VectorXd out(w.size() * rank);
    for (Eigen::Index p = 0; p < w.size(); ++p)
        for (int c = 0; c < rank; ++c) out[rank * p + c] = w[p];
    return out;
}

double weighted_sq(const VectorXd& a, const VectorXd& b, const VectorXd& w) {
    return kernels::weighted_sq_diff(a.data(), b.data(), w.data(), static_cast<int>(a.size()));
}

struct TetRule {
    MatrixXd lambda;
    VectorXd w;
};

TetRule tet_rule(const TetGeometry& g, int degree) {
    const QuadratureRule& q = quadrature(Domain::Tet, std::min(degree, max_quadrature_degree(Domain::Tet)));
    return {q.points, q.weights * (g.volume / q.measure())};
}

double longest_face_edge(const TetMesh& mesh, int F) {
    const auto& f = mesh.faces[F];
    const Vec3 &a = mesh.vertices[f[0]], &b = mesh.vertices[f[1]], &c = mesh.vertices[f[2]];
    return std::max({(a - b).norm(), (b - c).norm(), (a - c).norm()});
}

// Per-chunk accumulation of several sums, merged in chunk order.
template <int N, class Body>
std::array<double, N> chunked_sums(int n, Body&& body) {
    const int nchunks = thread_count();
    std::vector<std::array<double, N>> parts(nchunks);
    for (auto& p : parts) p.fill(0.0);
    parallel_chunks(
        n,
        [&](std::size_t b, std::size_t e, int c) {
            for (std::size_t i = b; i < e; ++i) body(static_cast<int>(i), parts[c]);
        },
        nchunks);
    std::array<double, N> out;
    out.fill(0.0);
    for (const auto& p : parts)
        for (int j = 0; j < N; ++j) out[j] += p[j];
    return out;
}

VectorXd load(const FESpace& V, const SolveOptions& opt) {
    if (opt.zero_rhs) return VectorXd::Zero(V.dim());
    const ManufacturedSolution ms;
    if (opt.rhs == RhsMode::CurlPsi) {
        return assemble_load_curl(
            V, [&](const Vec3& x, double* out) { Vec3::Map(out) = ms.psi(x); }, opt.quad_degree);
    }
    return assemble_load(V, [&](const Vec3& x, double* out) { Vec3::Map(out) = ms.f(x); }, opt.quad_degree);
}

void add_block(std::vector<Triplet>& out, const SpMat& A, int r0, int c0, double scale, bool transpose) {
    for (int j = 0; j < A.outerSize(); ++j)
        for (SpMat::InnerIterator it(A, j); it; ++it) {
            const int r = static_cast<int>(it.row()), c = static_cast<int>(it.col());
            if (transpose)
                out.emplace_back(r0 + c, c0 + r, scale * it.value());
            else
                out.emplace_back(r0 + r, c0 + c, scale * it.value());
        }
}

double rel_diff(const VectorXd& a, const VectorXd& b) {
    const double s = std::max(a.norm(), b.norm());
    return s > 0.0 ? (a - b).norm() / s : 0.0;
}

}  // namespace

Spaces Spaces::build(const TetMesh& mesh, int k, int l) {
    if (k < 1) throw InvalidArgument("k must be at least 1");
    if (l != k - 1 && l != k) throw InvalidArgument("l must be k-1 or k");
    Spaces s;
    s.mesh = &mesh;
    s.k = k;
    s.l = l;
    s.u = std::make_shared<FESpace>(mesh, Family::Nedelec, k, l, true);
    s.phi = std::make_shared<FESpace>(mesh, Family::Lagrange, l + 1, 0, true);
    s.lambda = std::make_shared<FESpace>(mesh, Family::Lambda, k, 0, false);
    return s;
}

QuadCurlSolution solve_mixed(const TetMesh& mesh, int k, int l, const SolveOptions& opt) {
    QuadCurlSolution sol;
    sol.spaces = Spaces::build(mesh, k, l);
    const FESpace S(mesh, Family::SigmaTn, k - 1, k - 1, false);
    sol.spaces.sigma = std::make_shared<FESpace>(S.broken_view());
    const FESpace& V = *sol.spaces.u;
    const FESpace& Q = *sol.spaces.phi;

    const SpMat M = assemble_mass(S);
    const SpMat B = assemble_b(S, V);
    const SpMat G = assemble_grad(Q, V);
    const VectorXd F = load(V, opt);

    const int ns = S.dim(), nv = V.dim(), nq = Q.dim();
    std::vector<Triplet> trip;
    add_block(trip, M, 0, 0, 1.0, false);
    add_block(trip, B, ns, 0, 1.0, false);
    add_block(trip, B, 0, ns, 1.0, true);
    add_block(trip, G, ns, ns + nv, 1.0, false);
    add_block(trip, G, ns + nv, ns, 1.0, true);
    SpMat A(ns + nv + nq, ns + nv + nq);
    A.setFromTriplets(trip.begin(), trip.end());
    VectorXd rhs = VectorXd::Zero(A.rows());
    rhs.segment(ns, nv) = -F;

    VectorXd x = VectorXd::Zero(A.rows());
    if (rhs.norm() > 0.0) {
        const Factorization fac(A);
        x = fac.solve(rhs, &sol.info, opt.tol_solve);
    } else {
        sol.info.backend = "none";
        sol.info.n = A.rows();
    }
    sol.dofs = A.rows();

    VectorXd sig(sol.spaces.sigma->dim());
    const int nloc = S.local_dim();
    for (int t = 0; t < mesh.num_tets(); ++t) {
        const int* d = S.local_dofs(t);
        for (int i = 0; i < nloc; ++i) sig[t * nloc + i] = x[d[i]];
    }
    sol.sigma = {sol.spaces.sigma.get(), sig};
    sol.u = {&V, x.segment(ns, nv)};
    sol.phi = {&Q, x.segment(ns + nv, nq)};
    sol.lambda = {sol.spaces.lambda.get(), VectorXd()};
    return sol;
}

HybridSystem::HybridSystem(const TetMesh& mesh, int k, int l) : spaces_(Spaces::build(mesh, k, l)) {
    spaces_.sigma = std::make_shared<FESpace>(mesh, Family::SigmaTn, k - 1, k - 1, false, true);
    const FESpace& S = *spaces_.sigma;
    const FESpace& V = *spaces_.u;
    const FESpace& Q = *spaces_.phi;
    const FESpace& L = *spaces_.lambda;
    const int nt = mesh.num_tets();
    const int nv = V.dim(), nl = L.dim(), nq = Q.dim();
    const int nvl = V.local_dim(), nll = L.local_dim(), nsl = S.local_dim();

    // Local elimination: X_T = M_T^{-1} [B_T; C_T]^T.
    X_.resize(nt);
    const int nchunks = thread_count();
    std::vector<std::vector<Triplet>> parts(nchunks);
    parallel_chunks(
        nt,
        [&](std::size_t b, std::size_t e, int c) {
            std::vector<int> idx(nvl + nll);
            for (std::size_t tt = b; tt < e; ++tt) {
                const int t = static_cast<int>(tt);
                const MatrixXd Mt = local_mass(S, t);
                MatrixXd R(nvl + nll, nsl);
                R.topRows(nvl) = local_b(S, V, t);
                R.bottomRows(nll) = local_c(S, L, t);
                Eigen::LLT<MatrixXd> llt(Mt);
                if (llt.info() != Eigen::Success)
                    throw SingularSystem("hybrid: local mass not positive definite on tet " + std::to_string(t), t);
                X_[t] = llt.solve(R.transpose());
                const MatrixXd K = R * X_[t];
                const int* dv = V.local_dofs(t);
                const int* dl = L.local_dofs(t);
                for (int i = 0; i < nvl; ++i) idx[i] = dv[i];
                for (int i = 0; i < nll; ++i) idx[nvl + i] = dl[i] < 0 ? -1 : nv + dl[i];
                for (int j = 0; j < nvl + nll; ++j) {
                    if (idx[j] < 0) continue;
                    for (int i = 0; i < nvl + nll; ++i)
                        if (idx[i] >= 0 && K(i, j) != 0.0) parts[c].emplace_back(idx[i], idx[j], K(i, j));
                }
            }
        },
        nchunks);
    std::vector<Triplet> trip;
    for (auto& p : parts) trip.insert(trip.end(), p.begin(), p.end());
    parts.clear();
    const SpMat G = assemble_grad(Q, V);
    add_block(trip, G, 0, nv + nl, -1.0, false);
    add_block(trip, G, nv + nl, 0, -1.0, true);
    const int n = nv + nl + nq;
    A_.resize(n, n);
    A_.setFromTriplets(trip.begin(), trip.end());
}

HybridSystem::~HybridSystem() = default;

QuadCurlSolution HybridSystem::solve(const VectorXd& F, double tol) const {
    const FESpace& S = *spaces_.sigma;
    const FESpace& V = *spaces_.u;
    const FESpace& Q = *spaces_.phi;
    const FESpace& L = *spaces_.lambda;
    const int nv = V.dim(), nl = L.dim(), nq = Q.dim();
    const int nvl = V.local_dim(), nll = L.local_dim(), nsl = S.local_dim();
    if (F.size() != nv) throw InvalidArgument("hybrid solve: load has the wrong size");
    QuadCurlSolution sol;
    sol.hybrid = true;
    sol.spaces = spaces_;
    const long n = A_.rows();
    VectorXd rhs = VectorXd::Zero(n);
    rhs.head(nv) = F;
    VectorXd x = VectorXd::Zero(n);
    if (rhs.norm() > 0.0) {
        if (!fac_) fac_ = std::make_unique<Factorization>(A_);
        x = fac_->solve(rhs, &sol.info, tol);
    } else {
        sol.info.backend = "none";
        sol.info.n = n;
    }
    sol.dofs = n;
    sol.u = {&V, x.head(nv)};
    sol.lambda = {&L, x.segment(nv, nl)};
    sol.phi = {&Q, x.segment(nv + nl, nq)};

    // Recovery sigma_T = -X_T (u_T; lambda_T).
    VectorXd sig(S.dim());
    parallel_chunks(
        X_.size(),
        [&](std::size_t b, std::size_t e, int) {
            VectorXd y(nvl + nll);
            for (std::size_t tt = b; tt < e; ++tt) {
                const int t = static_cast<int>(tt);
                y.head(nvl) = sol.u.local(t);
                y.tail(nll) = sol.lambda.local(t);
                sig.segment(static_cast<Eigen::Index>(t) * nsl, nsl) = -X_[t] * y;
            }
        },
        thread_count());
    sol.sigma = {&S, sig};
    return sol;
}

QuadCurlSolution solve_hybrid(const TetMesh& mesh, int k, int l, const SolveOptions& opt) {
    const HybridSystem sys(mesh, k, l);
    return sys.solve(load(*sys.spaces().u, opt), opt.tol_solve);
}

double BlockDifference::max() const { return std::max({sigma, u, phi}); }

BlockDifference compare(const QuadCurlSolution& a, const QuadCurlSolution& b) {
    if (a.sigma.coeffs.size() != b.sigma.coeffs.size() || a.u.coeffs.size() != b.u.coeffs.size() ||
        a.phi.coeffs.size() != b.phi.coeffs.size())
        throw InvalidArgument("compare: solutions live on different spaces");
    const double phi_scale =
        std::max({a.phi.coeffs.norm(), b.phi.coeffs.norm(), a.u.coeffs.norm(), b.u.coeffs.norm()});
    return {rel_diff(a.sigma.coeffs, b.sigma.coeffs), rel_diff(a.u.coeffs, b.u.coeffs),
            phi_scale > 0.0 ? (a.phi.coeffs - b.phi.coeffs).norm() / phi_scale : 0.0};
}

Vec3 BrokenField::evaluate(int t, const std::array<double, 4>& lambda) const {
    MatrixXd l(1, 4);
    for (int i = 0; i < 4; ++i) l(0, i) = lambda[i];
    const MatrixXd v = tabulate(local[t], l);
    return Vec3(v(0, 0), v(1, 0), v(2, 0));
}

PolyField postprocess_space(const TetGeometry& g, int k) {
    const TetCalculus calc(g);
    const PolyField span = concat(vector_basis(k), cross(calc.scaled_position(), vector_basis(k)));
    const std::vector<int> keep = independent_columns(span.stacked());
    MatrixXd sel = MatrixXd::Zero(span.nfun(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t j = 0; j < keep.size(); ++j) sel(keep[j], static_cast<Eigen::Index>(j)) = 1.0;
    return combine(span, sel);
}

PolyField postprocess_local(const TetGeometry& g, int k, const LocalElement& ue, const VectorXd& uc,
                            const LocalElement& se, const VectorXd& sc) {
    const TetCalculus calc(g);
    const PolyField P = postprocess_space(g, k);
    const int np = P.nfun();
    std::vector<VectorXd> rows;
    std::vector<double> rhs;
    auto add_rows = [&](const MatrixXd& A, const VectorXd& b) {
        for (Eigen::Index i = 0; i < A.rows(); ++i) {
            const double s = A.row(i).cwiseAbs().maxCoeff();
            if (s == 0.0) continue;
            rows.push_back(A.row(i).transpose() / s);
            rhs.push_back(b[i] / s);
        }
    };

    // Lowest-order edge moments.
    {
        const QuadratureRule& q = quadrature(Domain::Edge, k + 1);
        MatrixXd A(6, np);
        VectorXd b(6);
        for (int e = 0; e < 6; ++e) {
            const int i = kLocalEdges[e][0], j = kLocalEdges[e][1];
            const Vec3 t = g.t(i, j);
            MatrixXd lam = MatrixXd::Zero(q.size(), 4);
            lam.col(i) = q.points.col(0);
            lam.col(j) = q.points.col(1);
            const MatrixXd vp = tabulate(P, lam);
            const VectorXd vu = tabulate(ue.basis, lam) * uc;
            A.row(e).setZero();
            b[e] = 0.0;
            for (int p = 0; p < q.size(); ++p) {
                for (int c = 0; c < 3; ++c) {
                    A.row(e) += q.weights[p] * t[c] * vp.row(3 * p + c);
                    b[e] += q.weights[p] * t[c] * vu[3 * p + c];
                }
            }
        }
        add_rows(A, b);
    }

    // grad curl moments against grad curl P_{k+1}(T; R^3).
    {
        const PolyField gc = calc.grad(calc.curl(vector_basis(k + 1)));
        const std::vector<int> keep = independent_columns(gc.stacked());
        MatrixXd sel = MatrixXd::Zero(gc.nfun(), static_cast<Eigen::Index>(keep.size()));
        for (std::size_t j = 0; j < keep.size(); ++j) sel(keep[j], static_cast<Eigen::Index>(j)) = 1.0;
        const PolyField test = combine(gc, sel);
        const TetRule r = tet_rule(g, 2 * k);
        const VectorXd w = expand(r.w, 9);
        const MatrixXd tq = tabulate(test, r.lambda);
        const MatrixXd tp = tabulate(calc.grad(calc.curl(P)), r.lambda);
        const VectorXd vs = tabulate(se.basis, r.lambda) * sc;
        add_rows(tq.transpose() * w.asDiagonal() * tp, tq.transpose() * w.cwiseProduct(vs));
    }

    // Moments against gradients of P_{k+1} functions vanishing at the vertices.
    {
        const Monomials& mono = Monomials::get(4, k + 1);
        std::vector<int> cols;
        for (int m = 0; m < mono.size(); ++m) {
            const auto& a = mono.exponent(m);
            if (*std::max_element(a.begin(), a.end()) < k + 1) cols.push_back(m);
        }
        const PolyField all = calc.grad(scalar_basis(k + 1));
        MatrixXd sel = MatrixXd::Zero(all.nfun(), static_cast<Eigen::Index>(cols.size()));
        for (std::size_t j = 0; j < cols.size(); ++j) sel(cols[j], static_cast<Eigen::Index>(j)) = 1.0;
        const PolyField test = combine(all, sel);
        const TetRule r = tet_rule(g, 2 * k + 1);
        const VectorXd w = expand(r.w, 3);
        const MatrixXd tq = tabulate(test, r.lambda);
        const MatrixXd tp = tabulate(P, r.lambda);
        const VectorXd vu = tabulate(ue.basis, r.lambda) * uc;
        add_rows(tq.transpose() * w.asDiagonal() * tp, tq.transpose() * w.cwiseProduct(vu));
    }

    const int nr = static_cast<int>(rows.size());
    if (nr != np) throw ElementConstruction("postprocess: " + std::to_string(nr) + " constraints for " +
                                            std::to_string(np) + " unknowns");
    MatrixXd A(nr, np);
    VectorXd b(nr);
    for (int i = 0; i < nr; ++i) {
        A.row(i) = rows[i].transpose();
        b[i] = rhs[i];
    }
    Eigen::FullPivLU<MatrixXd> lu(A);
    lu.setThreshold(1e-12);
    if (lu.rank() < np) throw ElementConstruction("postprocess: singular local system");
    return combine(P, lu.solve(b));
}

BrokenField postprocess(const QuadCurlSolution& sol) {
    const TetMesh& mesh = *sol.spaces.mesh;
    BrokenField out;
    out.mesh = &mesh;
    out.local.resize(mesh.num_tets());
    const FESpace& V = *sol.spaces.u;
    const FESpace& S = *sol.spaces.sigma;
    parallel_chunks(
        mesh.num_tets(),
        [&](std::size_t b, std::size_t e, int) {
            for (std::size_t tt = b; tt < e; ++tt) {
                const int t = static_cast<int>(tt);
                try {
                    out.local[t] = postprocess_local(tet_geometry(mesh, t), sol.spaces.k, V.element(t), sol.u.local(t),
                                                     S.element(t), sol.sigma.local(t));
                } catch (const ElementConstruction& ex) {
                    throw ElementConstruction(std::string(ex.what()) + " on tet " + std::to_string(t));
                }
            }
        },
        thread_count());
    return out;
}

ErrorRow compute_errors(const QuadCurlSolution& sol, const BrokenField* ustar, const ManufacturedSolution& exact,
                        int quad_degree) {
    const TetMesh& mesh = *sol.spaces.mesh;
    const FESpace& V = *sol.spaces.u;
    const FESpace& S = *sol.spaces.sigma;
    const FESpace& L = *sol.spaces.lambda;
    const int k = sol.spaces.k;

    const VectorXd Iu =
        interpolate(V, PointFunction([&](const Vec3& x, double* out) { Vec3::Map(out) = exact.u(x); }),
                    kSmoothInterpolationExtra);
    const FieldCoefficients Ih{&V, Iu};
    const bool have_lambda = sol.lambda.coeffs.size() == L.dim() && L.dim() > 0;
    const int face_deg = std::min(quad_degree, max_quadrature_degree(Domain::Triangle));

    enum { Sig, U, CurlU, GradCurl, Super, CurlStar, GradCurlStar, Mult, N };
    const auto sums = chunked_sums<N>(mesh.num_tets(), [&](int t, std::array<double, N>& acc) {
        const TetGeometry g = tet_geometry(mesh, t);
        const TetCalculus calc(g);
        const TetRule r = tet_rule(g, quad_degree);
        const int np = static_cast<int>(r.w.size());
        const LocalElement& ue = V.element(t);
        const LocalElement& se = S.element(t);
        const VectorXd uc = sol.u.local(t);
        const PolyField cu = calc.curl(ue.basis);
        const PolyField gcu = calc.grad(cu);

        VectorXd eu(3 * np), ecu(3 * np), es(9 * np);
        for (int p = 0; p < np; ++p) {
            const Vec3 x = g.point(row4(r.lambda, p));
            eu.segment<3>(3 * p) = exact.u(x);
            ecu.segment<3>(3 * p) = exact.curl_u(x);
            const Mat3 s = exact.sigma(x);
            for (int c = 0; c < 9; ++c) es[9 * p + c] = s(c / 3, c % 3);
        }
        const VectorXd w3 = expand(r.w, 3), w9 = expand(r.w, 9);
        const VectorXd curl_uh = tabulate(cu, r.lambda) * uc;
        acc[Sig] += weighted_sq(es, tabulate(se.basis, r.lambda) * sol.sigma.local(t), w9);
        acc[U] += weighted_sq(eu, tabulate(ue.basis, r.lambda) * uc, w3);
        acc[CurlU] += weighted_sq(ecu, curl_uh, w3);
        acc[GradCurl] += weighted_sq(es, tabulate(gcu, r.lambda) * uc, w9);
        acc[Super] += weighted_sq(tabulate(cu, r.lambda) * Ih.local(t), curl_uh, w3);
        if (ustar) {
            const PolyField& us = ustar->local[t];
            acc[CurlStar] += weighted_sq(ecu, tabulate(calc.curl(us), r.lambda).col(0), w3);
            acc[GradCurlStar] += weighted_sq(es, tabulate(calc.grad(calc.curl(us)), r.lambda).col(0), w9);
        }
        if (have_lambda) {
            const VectorXd lc = sol.lambda.local(t);
            const int per = L.per_entity()[2];
            for (int f = 0; f < 4; ++f) {
                const int F = mesh.tet_faces[t][f];
                const FacePoints fp = face_points(mesh, t, f, face_deg);
                const FaceFrame fr = face_frame(mesh, F);
                const int nfp = static_cast<int>(fp.w.size());
                const VectorXd cv = tabulate(cu, fp.lambda) * uc;
                VectorXd tr(3 * nfp);
                for (int p = 0; p < nfp; ++p) tr.segment<3>(3 * p) = fr.n.cross(Vec3(cv.segment<3>(3 * p)));
                VectorXd lv = VectorXd::Zero(3 * nfp);
                if (!mesh.boundary_face[F])
                    lv = lambda_face_local(L.k(), fr).evaluate(fp.mu) * lc.segment(f * per, per);
                acc[Mult] += longest_face_edge(mesh, F) * weighted_sq(tr, lv, expand(fp.w, 3));
            }
        }
    });

    // Face jumps of curl u_h for the mesh-dependent norm.
    const auto jumps = chunked_sums<1>(mesh.num_faces(), [&](int F, std::array<double, 1>& acc) {
        const auto& ft = mesh.face_tets[F];
        if (ft[1] < 0) return;
        VectorXd v[2];
        VectorXd w;
        for (int s = 0; s < 2; ++s) {
            const int t = ft[s];
            int lf = 0;
            while (mesh.tet_faces[t][lf] != F) ++lf;
            const FacePoints fp = face_points(mesh, t, lf, face_deg);
            const TetCalculus calc(tet_geometry(mesh, t));
            v[s] = tabulate(calc.curl(V.element(t).basis), fp.lambda) * sol.u.local(t);
            w = expand(fp.w, 3);
        }
        acc[0] += weighted_sq(v[0], v[1], w) / longest_face_edge(mesh, F);
    });

    ErrorRow row;
    row.h = mesh_size(mesh);
    row.dofs_u = V.dim();
    row.dofs_lambda = L.dim();
    row.dofs_phi = sol.spaces.phi->dim();
    row.err_sigma = std::sqrt(sums[Sig]);
    row.err_u = std::sqrt(sums[U]);
    row.err_curlu = std::sqrt(sums[CurlU]);
    row.err_gradcurlu_broken = std::sqrt(sums[GradCurl]);
    row.err_curlu_1h = std::sqrt(sums[GradCurl] + jumps[0]);
    row.err_supercurl = std::sqrt(sums[Super]);
    row.err_curlu_star = ustar ? std::sqrt(sums[CurlStar]) : std::numeric_limits<double>::quiet_NaN();
    row.err_gradcurlu_star = ustar ? std::sqrt(sums[GradCurlStar]) : std::numeric_limits<double>::quiet_NaN();
    row.err_multiplier = have_lambda ? std::sqrt(sums[Mult]) : std::numeric_limits<double>::quiet_NaN();
    (void)k;
    return row;
}

StructuralReport structural_checks(const QuadCurlSolution& sol) {
    const TetMesh& mesh = *sol.spaces.mesh;
    const FESpace& V = *sol.spaces.u;
    const FESpace& S = *sol.spaces.sigma;
    const FESpace& Q = *sol.spaces.phi;
    StructuralReport rep;
    rep.galerkin_residual = sol.info.residual;

    const int deg = 2 * sol.spaces.k + 2;
    std::vector<double> trmax(mesh.num_tets(), 0.0), smax(mesh.num_tets(), 0.0);
    const auto norms = chunked_sums<2>(mesh.num_tets(), [&](int t, std::array<double, 2>& acc) {
        const TetGeometry g = tet_geometry(mesh, t);
        const TetRule r = tet_rule(g, deg);
        const VectorXd zero3 = VectorXd::Zero(3 * r.w.size());
        const VectorXd zero1 = VectorXd::Zero(r.w.size());
        acc[0] += weighted_sq(tabulate(Q.element(t).basis, r.lambda) * sol.phi.local(t), zero1, r.w);
        acc[1] += weighted_sq(tabulate(V.element(t).basis, r.lambda) * sol.u.local(t), zero3, expand(r.w, 3));
        const VectorXd s = tabulate(S.element(t).basis, r.lambda) * sol.sigma.local(t);
        for (Eigen::Index p = 0; p < r.w.size(); ++p) {
            trmax[t] = std::max(trmax[t], std::abs(s[9 * p] + s[9 * p + 4] + s[9 * p + 8]));
            smax[t] = std::max(smax[t], s.segment<9>(9 * p).cwiseAbs().maxCoeff());
        }
    });
    rep.phi_relative = norms[1] > 0.0 ? std::sqrt(norms[0] / norms[1]) : std::sqrt(norms[0]);
    const double sscale = *std::max_element(smax.begin(), smax.end());
    rep.trace_max = *std::max_element(trmax.begin(), trmax.end()) / std::max(sscale, 1e-300);

    // Tangential-normal jumps, relative to the largest face trace.
    std::vector<double> jump(mesh.num_faces(), 0.0), trace(mesh.num_faces(), 0.0);
    parallel_chunks(
        mesh.num_faces(),
        [&](std::size_t b, std::size_t e, int) {
            for (std::size_t FF = b; FF < e; ++FF) {
                const int F = static_cast<int>(FF);
                const auto& ft = mesh.face_tets[F];
                if (ft[1] < 0) continue;
                const Vec3 n = face_frame(mesh, F).n;
                VectorXd v[2];
                VectorXd w;
                for (int s = 0; s < 2; ++s) {
                    const int t = ft[s];
                    int lf = 0;
                    while (mesh.tet_faces[t][lf] != F) ++lf;
                    const FacePoints fp = face_points(mesh, t, lf, deg);
                    const VectorXd sv = tabulate(S.element(t).basis, fp.lambda) * sol.sigma.local(t);
                    v[s].resize(3 * fp.w.size());
                    for (Eigen::Index p = 0; p < fp.w.size(); ++p) {
                        Mat3 T;
                        for (int c = 0; c < 9; ++c) T(c / 3, c % 3) = sv[9 * p + c];
                        v[s].segment<3>(3 * p) = n.cross(T * n);
                    }
                    w = expand(fp.w, 3);
                }
                jump[F] = std::sqrt(weighted_sq(v[0], v[1], w));
                trace[F] = std::sqrt(weighted_sq(v[0], VectorXd::Zero(v[0].size()), w));
            }
        },
        thread_count());
    const double tscale = mesh.num_faces() ? *std::max_element(trace.begin(), trace.end()) : 0.0;
    const double jmax = mesh.num_faces() ? *std::max_element(jump.begin(), jump.end()) : 0.0;
    rep.tn_jump_max = tscale > 0.0 ? jmax / tscale : jmax;

    if (sol.hybrid) {
        const SpMat C = assemble_c(S, *sol.spaces.lambda);
        const VectorXd cs = C * sol.sigma.coeffs;
        double cmax = 0.0;
        for (int j = 0; j < C.outerSize(); ++j)
            for (SpMat::InnerIterator it(C, j); it; ++it) cmax = std::max(cmax, std::abs(it.value()));
        const double scale = cmax * sol.sigma.coeffs.cwiseAbs().maxCoeff();
        rep.c_residual = scale > 0.0 ? cs.cwiseAbs().maxCoeff() / scale : 0.0;
    }
    return rep;
}

std::vector<double> ConvergenceRecord::orders(double ErrorRow::*column) const {
    std::vector<double> out;
    for (std::size_t i = 1; i < rows.size(); ++i) out.push_back(std::log2(rows[i - 1].*column / (rows[i].*column)));
    return out;
}

double ConvergenceRecord::finest_order(double ErrorRow::*column) const {
    const std::vector<double> o = orders(column);
    return o.empty() ? std::numeric_limits<double>::quiet_NaN() : o.back();
}

std::vector<TetMesh> study_meshes(int levels, int n0, double amplitude, std::uint64_t seed) {
    if (levels < 1) throw InvalidArgument("levels must be at least 1");
    std::vector<TetMesh> meshes;
    meshes.push_back(perturb(build_cube_mesh(n0), amplitude, seed));
    for (int i = 1; i < levels; ++i) meshes.push_back(refine_uniform(meshes.back()));
    return meshes;
}

ConvergenceRecord convergence_study(const StudyOptions& opt, const std::function<void(const ErrorRow&)>& progress) {
    ConvergenceRecord rec;
    rec.k = opt.k;
    rec.l = opt.l;
    TetMesh mesh = perturb(build_cube_mesh(opt.n0), opt.amplitude, opt.seed);
    const ManufacturedSolution exact;
    for (int level = 0; level < opt.levels; ++level) {
        if (level > 0) mesh = refine_uniform(mesh);
        const QuadCurlSolution sol = opt.hybrid ? solve_hybrid(mesh, opt.k, opt.l, opt.solve)
                                                : solve_mixed(mesh, opt.k, opt.l, opt.solve);
        const BrokenField ustar = postprocess(sol);
        ErrorRow row = compute_errors(sol, &ustar, exact, opt.solve.quad_degree);
        row.level = level;
        rec.rows.push_back(row);
        rec.checks.push_back(structural_checks(sol));
        if (progress) progress(row);
    }
    return rec;
}

std::vector<double> superconvergence_check(const StudyOptions& opt) {
    return convergence_study(opt).orders(&ErrorRow::err_supercurl);
}

}  // namespace quadcurl
