#include "quadcurl/complexcheck.hpp"

#include "quadcurl/linalg.hpp"
#include "quadcurl/quadcurl.hpp"
#include "quadcurl/quadrature.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <ostream>

namespace quadcurl {

using Triplet = Eigen::Triplet<double>;

namespace {

constexpr double kPolyTol = 1e-12;
constexpr double kTrigTol = 1e-9;
constexpr int kCellDegree = 14;
constexpr int kFaceDegree = 16;
constexpr int kSubdivisions = 2;
// Raises every interpolation moment rule to its cap.
constexpr int kInterpolationExtra = 20;

// Composite rules for smooth integrands.
const QuadratureRule& smooth_cell_rule() {
    static const QuadratureRule q = composite_quadrature(Domain::Tet, kCellDegree, kSubdivisions);
    return q;
}

FacePoints smooth_face_points(const TetMesh& mesh, int t, int f) {
    static const QuadratureRule q = composite_quadrature(Domain::Triangle, kFaceDegree, kSubdivisions);
    const FacePoints base = face_points(mesh, t, f, 0);
    FacePoints fp;
    fp.mu = q.points;
    fp.w = q.weights * (base.w.sum() / q.measure());
    fp.lambda = MatrixXd::Zero(q.size(), 4);
    const auto& fv = mesh.faces[mesh.tet_faces[t][f]];
    for (int s = 0; s < 3; ++s)
        for (int j = 0; j < 4; ++j)
            if (mesh.tets[t][j] == fv[s]) fp.lambda.col(j) = q.points.col(s);
    return fp;
}

double max_abs(const MatrixXd& A) { return A.size() ? A.cwiseAbs().maxCoeff() : 0.0; }

IdentityResult relative(const std::string& name, double num, double scale, double tol) {
    const double r = scale > 0.0 ? num / scale : num;
    return {name, r, tol, r <= tol};
}

IdentityResult count(const std::string& name, int lhs, int rhs) {
    const double r = std::abs(lhs - rhs);
    return {name + " (" + std::to_string(lhs) + " vs " + std::to_string(rhs) + ")", r, 0.0, lhs == rhs};
}

VectorXd expand(const VectorXd& w, int rank) {
    VectorXd out(w.size() * rank);
    for (Eigen::Index p = 0; p < w.size(); ++p)
        for (int c = 0; c < rank; ++c) out[rank * p + c] = w[p];
    return out;
}

std::array<double, 4> row4(const MatrixXd& m, Eigen::Index p) { return {m(p, 0), m(p, 1), m(p, 2), m(p, 3)}; }

int local_face_of(const TetMesh& mesh, int t, int F) {
    for (int f = 0; f < 4; ++f)
        if (mesh.tet_faces[t][f] == F) return f;
    return -1;
}

// (grad, mskw x): columns r * dim(L) + j hold row r = grad of Lagrange basis j,
// the last column mskw x; rows follow the devcurl column convention.
MatrixXd inclusion(const FESpace& VM, const FESpace& Lg) {
    const TetMesh& mesh = VM.mesh();
    const int nv = VM.dim(), nl = Lg.dim();
    MatrixXd P = MatrixXd::Zero(3 * nv, 3 * nl + 1);
    for (int t = 0; t < mesh.num_tets(); ++t) {
        const LocalElement& ev = VM.element(t);
        const LocalElement& el = Lg.element(t);
        const PolyField g = TetCalculus(tet_geometry(mesh, t)).grad(el.basis);
        const MatrixXd C = ev.dofs.W * ev.dofs.sample(g);
        const int* dv = VM.local_dofs(t);
        const int* dl = Lg.local_dofs(t);
        for (int r = 0; r < 3; ++r)
            for (int j = 0; j < el.ndof(); ++j)
                for (int i = 0; i < ev.ndof(); ++i) P(r * nv + dv[i], r * nl + dl[j]) = C(i, j);
    }
    for (int r = 0; r < 3; ++r) {
        const VectorXd c = interpolate(VM, PointFunction([r](const Vec3& x, double* out) {
                                           Vec3::Map(out) = mskw(x).row(r).transpose();
                                       }));
        P.col(3 * nl).segment(r * nv, nv) = c;
    }
    return P;
}

// Weak (curl div) of a smooth tensor field against all test functions of V:
// sum_T (div tau, curl v)_T - (n^T tau n, n . curl v)_{dT minus boundary}.
struct SmoothTensor {
    std::function<Mat3(const Vec3&)> value;
    std::function<Vec3(const Vec3&)> div;
};

struct SmoothVector {
    std::function<Vec3(const Vec3&)> value;
    std::function<Vec3(const Vec3&)> curl;
};

void weak_curldiv(const FESpace& V, const SmoothTensor& tau, VectorXd& w, VectorXd& scale) {
    const TetMesh& mesh = V.mesh();
    w = VectorXd::Zero(V.dim());
    scale = VectorXd::Zero(V.dim());
    const QuadratureRule& qc = smooth_cell_rule();
    for (int t = 0; t < mesh.num_tets(); ++t) {
        const TetGeometry g = tet_geometry(mesh, t);
        const LocalElement& el = V.element(t);
        const PolyField cb = TetCalculus(g).curl(el.basis);
        const int* d = V.local_dofs(t);
        VectorXd loc = VectorXd::Zero(el.ndof()), mag = VectorXd::Zero(el.ndof());
        const MatrixXd cv = tabulate(cb, qc.points);
        for (int p = 0; p < qc.size(); ++p) {
            const double wt = qc.weights[p] * g.volume / qc.measure();
            const Vec3 dv = tau.div(g.point(row4(qc.points, p)));
            const VectorXd c = wt * (dv[0] * cv.row(3 * p) + dv[1] * cv.row(3 * p + 1) + dv[2] * cv.row(3 * p + 2));
            loc += c;
            mag += c.cwiseAbs();
        }
        for (int f = 0; f < 4; ++f) {
            if (mesh.boundary_face[mesh.tet_faces[t][f]]) continue;
            const FacePoints fp = smooth_face_points(mesh, t, f);
            const Vec3 n = g.outward_normal(f);
            const MatrixXd fv = tabulate(cb, fp.lambda);
            for (Eigen::Index p = 0; p < fp.w.size(); ++p) {
                const double nn = n.dot(tau.value(g.point(row4(fp.lambda, p))) * n);
                const VectorXd c =
                    fp.w[p] * nn * (n[0] * fv.row(3 * p) + n[1] * fv.row(3 * p + 1) + n[2] * fv.row(3 * p + 2));
                loc -= c;
                mag += c.cwiseAbs();
            }
        }
        for (int i = 0; i < el.ndof(); ++i)
            if (d[i] >= 0) {
                w[d[i]] += loc[i];
                scale[d[i]] += mag[i];
            }
    }
}

// <(curl div)_w tau_h, v> for a piecewise polynomial tau_h and smooth v.
void weak_curldiv_pair(const FESpace& S, const VectorXd& tau, const SmoothVector& v, double& value, double& scale) {
    const TetMesh& mesh = S.mesh();
    value = scale = 0.0;
    const QuadratureRule& qc = smooth_cell_rule();
    for (int t = 0; t < mesh.num_tets(); ++t) {
        const TetGeometry g = tet_geometry(mesh, t);
        const LocalElement& el = S.element(t);
        VectorXd c(el.ndof());
        const int* d = S.local_dofs(t);
        for (int i = 0; i < el.ndof(); ++i) c[i] = tau[d[i]];
        const VectorXd dv = tabulate(TetCalculus(g).div(el.basis), qc.points) * c;
        for (int p = 0; p < qc.size(); ++p) {
            const double wt = qc.weights[p] * g.volume / qc.measure();
            const double term = wt * Vec3(dv.segment<3>(3 * p)).dot(v.curl(g.point(row4(qc.points, p))));
            value += term;
            scale += std::abs(term);
        }
        for (int f = 0; f < 4; ++f) {
            if (mesh.boundary_face[mesh.tet_faces[t][f]]) continue;
            const FacePoints fp = smooth_face_points(mesh, t, f);
            const Vec3 n = g.outward_normal(f);
            const VectorXd tv = tabulate(el.basis, fp.lambda) * c;
            for (Eigen::Index p = 0; p < fp.w.size(); ++p) {
                Mat3 T;
                for (int q = 0; q < 9; ++q) T(q / 3, q % 3) = tv[9 * p + q];
                const double term = fp.w[p] * n.dot(T * n) * n.dot(v.curl(g.point(row4(fp.lambda, p))));
                value -= term;
                scale += std::abs(term);
            }
        }
    }
}

Mat3 random_traceless(SplitMix64& rng) {
    Mat3 A;
    for (int i = 0; i < 9; ++i) A(i / 3, i % 3) = rng.uniform(-1.0, 1.0);
    return A - A.trace() / 3.0 * Mat3::Identity();
}

Vec3 random_vec(SplitMix64& rng, double lo = -1.0, double hi = 1.0) {
    return Vec3(rng.uniform(lo, hi), rng.uniform(lo, hi), rng.uniform(lo, hi));
}

// Random tensor of degree deg: sum of traceless constants times monomials
// 1, x, y, z (degree 1 only when deg >= 1).
SmoothTensor poly_tensor(SplitMix64& rng, int deg) {
    std::array<Mat3, 4> A;
    for (auto& a : A) a = random_traceless(rng);
    if (deg < 1)
        for (int i = 1; i < 4; ++i) A[i].setZero();
    SmoothTensor s;
    s.value = [A](const Vec3& x) { return Mat3(A[0] + x[0] * A[1] + x[1] * A[2] + x[2] * A[3]); };
    s.div = [A](const Vec3&) {
        Vec3 d;
        for (int r = 0; r < 3; ++r) d[r] = A[1](r, 0) + A[2](r, 1) + A[3](r, 2);
        return d;
    };
    return s;
}

// dev(A) sin(omega . x + phase).
SmoothTensor trig_tensor(SplitMix64& rng) {
    const Mat3 A = random_traceless(rng);
    const Vec3 om = random_vec(rng, -2.0, 2.0);
    const double ph = rng.uniform(0.0, 6.283185307179586);
    SmoothTensor s;
    s.value = [=](const Vec3& x) { return Mat3(A * std::sin(om.dot(x) + ph)); };
    s.div = [=](const Vec3& x) { return Vec3(A * om * std::cos(om.dot(x) + ph)); };
    return s;
}

// c b(x) s(x) with b the cube bubble, so v x n = 0 on the boundary.
SmoothVector bubble_vector(SplitMix64& rng, bool trig) {
    const Vec3 c = random_vec(rng);
    const Vec3 om = trig ? random_vec(rng, -2.0, 2.0) : Vec3::Zero();
    const double ph = trig ? rng.uniform(0.0, 6.283185307179586) : 0.0;
    auto beta_grad = [=](const Vec3& x, double& beta, Vec3& grad) {
        double b = 1.0;
        Vec3 gb;
        for (int i = 0; i < 3; ++i) b *= x[i] * (1.0 - x[i]);
        for (int i = 0; i < 3; ++i) {
            double o = 1.0;
            for (int j = 0; j < 3; ++j)
                if (j != i) o *= x[j] * (1.0 - x[j]);
            gb[i] = o * (1.0 - 2.0 * x[i]);
        }
        const double s = trig ? std::sin(om.dot(x) + ph) : 1.0;
        const Vec3 gs = trig ? Vec3(om * std::cos(om.dot(x) + ph)) : Vec3::Zero();
        beta = b * s;
        grad = s * gb + b * gs;
    };
    SmoothVector v;
    v.value = [=](const Vec3& x) {
        double beta;
        Vec3 g;
        beta_grad(x, beta, g);
        return Vec3(beta * c);
    };
    v.curl = [=](const Vec3& x) {
        double beta;
        Vec3 g;
        beta_grad(x, beta, g);
        return Vec3(g.cross(c));
    };
    return v;
}

// B M^{-1} B^T with a sparse Cholesky factorization of the SPD mass M.
MatrixXd schur_dense(const SpMat& B, const SpMat& M) {
    Eigen::SimplicialLLT<SpMat> llt(M);
    if (llt.info() != Eigen::Success) throw InvalidArgument("mass matrix not positive definite");
    const MatrixXd X = llt.solve(MatrixXd(B.transpose()));
    return B * X;
}

}  // namespace

bool ComplexReport::pass() const {
    return std::all_of(identities.begin(), identities.end(), [](const IdentityResult& r) { return r.pass; });
}

bool CommutingReport::pass() const {
    return std::all_of(identities.begin(), identities.end(), [](const IdentityResult& r) { return r.pass; });
}

ComplexReport verify_complex(const TetMesh& mesh, int k, int l, const std::string& label, double tol_rank) {
    if (k < 1 || (l != k - 1 && l != k)) throw InvalidArgument("verify_complex: need k >= 1 and l in {k-1, k}");
    const FESpace S(mesh, Family::SigmaTn, k - 1, k - 1, false);
    if (S.dim() > 5000) throw SizeCap("verify_complex: dim Sigma " + std::to_string(S.dim()) + " exceeds 5000");
    const FESpace V(mesh, Family::Nedelec, k, l, true);
    const FESpace Q(mesh, Family::Lagrange, l + 1, 0, true);
    const FESpace VM(mesh, Family::Nedelec, k, k, false);
    const FESpace Lg(mesh, Family::Lagrange, k + 1, 0, false);

    ComplexReport rep;
    rep.label = label;
    rep.k = k;
    rep.l = l;
    rep.dim_grad = 3 * Lg.dim() + 1;
    rep.dim_curl_mat = 3 * VM.dim();
    rep.dim_sigma = S.dim();
    rep.dim_curl0 = V.dim();
    rep.dim_grad0 = Q.dim();

    const MatrixXd B(assemble_b(S, V));
    const MatrixXd G(assemble_grad(Q, V));
    const DevCurlOperator dc = assemble_devcurl(VM, S);
    const MatrixXd D(dc.D);
    const MatrixXd P = inclusion(VM, Lg);

    const RankNullity rb = rank_nullity(B, tol_rank);
    const RankNullity rd = rank_nullity(D, tol_rank);
    const RankNullity rp = rank_nullity(P, tol_rank);
    const RankNullity rg = rank_nullity(MatrixXd(G.transpose()), tol_rank);
    rep.rank_b = rb.rank;
    rep.nullity_b = rb.nullity;
    rep.rank_devcurl = rd.rank;
    rep.rank_incl = rp.rank;
    rep.rank_gt = rg.rank;
    rep.dim_kc = V.dim() - rg.rank;

    const double tol = 1e-8;
    auto& ids = rep.identities;
    ids.push_back(relative("(i) B D = 0", max_abs(B * D), max_abs(B) * max_abs(D), tol));
    ids.push_back(relative("dev curl (grad, mskw x) = 0", max_abs(D * P), max_abs(D) * max_abs(P), tol));
    ids.push_back(relative("dev curl single-valued on shared DoFs", dc.max_disagreement, std::max(max_abs(D), 1.0), tol));
    ids.push_back(count("(ii) rank B = dim V0curl - dim V0grad", rb.rank, V.dim() - Q.dim()));
    ids.push_back(count("(iii) nullity B = rank D", rb.nullity, rd.rank));
    ids.push_back(count("(iv) dim Sigma = rank D + dim Kc", S.dim(), rd.rank + rep.dim_kc));
    ids.push_back(count("(v) nullity (grad, mskw x) = 3", rp.nullity, 3));
    ids.push_back(count("nullity D = rank (grad, mskw x)", rd.nullity, rp.rank));
    ids.push_back(count("rank G^T = dim V0grad", rg.rank, Q.dim()));
    ids.push_back(count("alternating dimension sum", 3 - rep.dim_grad + rep.dim_curl_mat - S.dim() + V.dim() - Q.dim(), 0));
    return rep;
}

CommutingReport verify_commuting(const TetMesh& mesh, int k, int l, int samples, std::uint64_t seed) {
    if (k < 1 || (l != k - 1 && l != k)) throw InvalidArgument("verify_commuting: need k >= 1 and l in {k-1, k}");
    const FESpace S(mesh, Family::SigmaTn, k - 1, k - 1, false);
    const FESpace V(mesh, Family::Nedelec, k, l, true);
    const FESpace Q(mesh, Family::Lagrange, l + 1, 0, true);
    const SpMat B = assemble_b(S, V);
    SplitMix64 rng(seed);
    CommutingReport rep;

    // Interpolation into Sigma commutes with the weak operator.
    auto tn_check = [&](const SmoothTensor& tau, const std::string& name, double tol) {
        const VectorXd It = interpolate(
            S, PointFunction([&](const Vec3& x, double* out) { Eigen::Matrix<double, 9, 1>::Map(out) =
                                                                    Eigen::Map<const Eigen::Matrix<double, 9, 1>>(
                                                                        Mat3(tau.value(x).transpose()).data()); }),
            kInterpolationExtra);
        VectorXd w, scale;
        weak_curldiv(V, tau, w, scale);
        const VectorXd r = B * It - w;
        const double sc = std::max(scale.size() ? scale.maxCoeff() : 0.0, 1e-300);
        rep.identities.push_back(relative(name, r.size() ? r.cwiseAbs().maxCoeff() : 0.0, sc, tol));
    };
    {
        double worst = 0.0;
        for (int s = 0; s < samples; ++s) {
            CommutingReport tmp;
            std::swap(tmp.identities, rep.identities);
            tn_check(poly_tensor(rng, k - 1), "", kPolyTol);
            worst = std::max(worst, rep.identities.back().residual);
            std::swap(tmp.identities, rep.identities);
        }
        rep.identities.push_back({"interpolation-tn, polynomial", worst, kPolyTol, worst <= kPolyTol});
        worst = 0.0;
        for (int s = 0; s < samples; ++s) {
            CommutingReport tmp;
            std::swap(tmp.identities, rep.identities);
            tn_check(trig_tensor(rng), "", kTrigTol);
            worst = std::max(worst, rep.identities.back().residual);
            std::swap(tmp.identities, rep.identities);
        }
        rep.identities.push_back({"interpolation-tn, trigonometric", worst, kTrigTol, worst <= kTrigTol});
    }

    // Interpolation into V0curl commutes with the weak operator.
    for (const bool trig : {false, true}) {
        double worst = 0.0;
        for (int s = 0; s < samples; ++s) {
            VectorXd tau(S.dim());
            for (int i = 0; i < S.dim(); ++i) tau[i] = rng.uniform(-1.0, 1.0);
            const SmoothVector v = bubble_vector(rng, trig);
            const VectorXd Iv = interpolate(
                V, PointFunction([&](const Vec3& x, double* out) { Vec3::Map(out) = v.value(x); }),
                kInterpolationExtra);
            double lhs, scale;
            weak_curldiv_pair(S, tau, v, lhs, scale);
            const double rhs = (B * tau).dot(Iv);
            worst = std::max(worst, std::abs(lhs - rhs) / std::max(scale, 1e-300));
        }
        const double tol = trig ? kTrigTol : kPolyTol;
        rep.identities.push_back(
            {trig ? "interpolation-curl, trigonometric" : "interpolation-curl, polynomial", worst, tol, worst <= tol});
    }

    // mskw identity on K_h^c.
    if (V.dim() > 0) {
        const SpMat K = assemble_curlcurl(V);
        const MatrixXd Z = null_space(MatrixXd(MatrixXd(assemble_grad(Q, V)).transpose()));
        double worst = 0.0;
        for (int s = 0; s < samples && Z.cols() > 0; ++s) {
            VectorXd r(Z.cols());
            for (Eigen::Index i = 0; i < r.size(); ++i) r[i] = rng.uniform(-1.0, 1.0);
            const FieldCoefficients uh{&V, Z * r};
            const VectorXd It = interpolate(S, TetFunction([&](int t, const Vec3&, const std::array<double, 4>& lam,
                                                               double* out) {
                                                const VectorXd u = uh.evaluate(t, lam);
                                                const Mat3 m = mskw(Vec3(u[0], u[1], u[2]));
                                                for (int c = 0; c < 9; ++c) out[c] = m(c / 3, c % 3);
                                            }));
            const VectorXd Ku = K * uh.coeffs;
            const VectorXd res = B * It + Ku;
            worst = std::max(worst, res.cwiseAbs().maxCoeff() / std::max(Ku.cwiseAbs().maxCoeff(), 1e-300));
        }
        rep.identities.push_back({"mskw: B I(mskw u) = -curl curl u on Kc", worst, 1e-10, worst <= 1e-10});
    }
    return rep;
}

SpMat assemble_curl_broken_h1(const FESpace& V) {
    const TetMesh& mesh = V.mesh();
    const int k = V.degree();
    std::vector<Triplet> trip;
    auto scatter = [&](const MatrixXd& A, const std::vector<int>& idx) {
        for (Eigen::Index j = 0; j < A.cols(); ++j)
            for (Eigen::Index i = 0; i < A.rows(); ++i)
                if (idx[i] >= 0 && idx[j] >= 0 && A(i, j) != 0.0) trip.emplace_back(idx[i], idx[j], A(i, j));
    };
    if (k >= 2) {
        const QuadratureRule& q = quadrature(Domain::Tet, 2 * (k - 2));
        for (int t = 0; t < mesh.num_tets(); ++t) {
            const TetGeometry g = tet_geometry(mesh, t);
            const TetCalculus calc(g);
            const LocalElement& el = V.element(t);
            const MatrixXd phi = tabulate(calc.grad(calc.curl(el.basis)), q.points);
            const VectorXd w = expand(q.weights * (g.volume / q.measure()), 9);
            const int* d = V.local_dofs(t);
            scatter(phi.transpose() * w.asDiagonal() * phi, std::vector<int>(d, d + el.ndof()));
        }
    }
    for (int F = 0; F < mesh.num_faces(); ++F) {
        const auto& ft = mesh.face_tets[F];
        if (ft[1] < 0) continue;
        const auto& fv = mesh.faces[F];
        const double hF = std::max({(mesh.vertices[fv[0]] - mesh.vertices[fv[1]]).norm(),
                                    (mesh.vertices[fv[1]] - mesh.vertices[fv[2]]).norm(),
                                    (mesh.vertices[fv[0]] - mesh.vertices[fv[2]]).norm()});
        MatrixXd J;
        VectorXd w;
        std::vector<int> idx;
        for (int s = 0; s < 2; ++s) {
            const int t = ft[s];
            const FacePoints fp = face_points(mesh, t, local_face_of(mesh, t, F), 2 * (k - 1));
            const LocalElement& el = V.element(t);
            const MatrixXd c = tabulate(TetCalculus(tet_geometry(mesh, t)).curl(el.basis), fp.lambda);
            if (s == 0) {
                J = MatrixXd::Zero(c.rows(), 2 * el.ndof());
                w = expand(fp.w, 3);
            }
            J.middleCols(s * el.ndof(), el.ndof()) = (s == 0 ? 1.0 : -1.0) * c;
            const int* d = V.local_dofs(t);
            idx.insert(idx.end(), d, d + el.ndof());
        }
        scatter(J.transpose() * w.asDiagonal() * J / hF, idx);
    }
    SpMat H(V.dim(), V.dim());
    H.setFromTriplets(trip.begin(), trip.end());
    return H;
}

namespace {

constexpr int kDensePoincare = 5000;

// Both constants by shift-invert Lanczos; the constraint G^T v = 0 is carried
// by the saddle solves, so the iteration never leaves K_h^c.
PoincareLevel poincare_sparse(const TetMesh& mesh, int k, int l) {
    const FESpace V(mesh, Family::Nedelec, k, l, true);
    const FESpace Q(mesh, Family::Lagrange, l + 1, 0, true);
    const SpMat M = assemble_mass(V);
    const SpMat K = assemble_curlcurl(V);
    const SpMat G = assemble_grad(Q, V);
    const int nv = V.dim(), nq = Q.dim();
    PoincareLevel lv;
    lv.tets = mesh.num_tets();
    lv.dim_kc = nv - nq;
    lv.dense = false;
    lv.equiv_min = lv.equiv_max = lv.infsup = NAN;

    std::vector<Triplet> trip;
    for (int j = 0; j < K.outerSize(); ++j)
        for (SpMat::InnerIterator it(K, j); it; ++it) trip.emplace_back(it.row(), it.col(), it.value());
    for (int j = 0; j < G.outerSize(); ++j)
        for (SpMat::InnerIterator it(G, j); it; ++it) {
            trip.emplace_back(it.row(), nv + j, it.value());
            trip.emplace_back(nv + j, it.row(), it.value());
        }
    SpMat A(nv + nq, nv + nq);
    A.setFromTriplets(trip.begin(), trip.end());
    {
        const Factorization fac(A);
        lv.curl_constant = smallest_eigs_shift_invert(
            [&](const VectorXd& r) {
                VectorXd rhs = VectorXd::Zero(nv + nq);
                rhs.head(nv) = r;
                return VectorXd(fac.solve(rhs).head(nv));
            },
            M)[0];
    }
    const HybridSystem hyb(mesh, k, l);
    lv.gradcurl_constant = smallest_eigs_shift_invert(
        [&](const VectorXd& r) { return VectorXd(hyb.solve(r).u.coeffs); }, SpMat(M + K))[0];
    return lv;
}

}  // namespace

std::vector<PoincareLevel> poincare_monitor(const std::vector<TetMesh>& meshes, int k, int l, std::uint64_t seed,
                                            int equivalence_samples, int dense_cap) {
    std::vector<PoincareLevel> out;
    SplitMix64 rng(seed);
    for (const TetMesh& mesh : meshes) {
        const FESpace S(mesh, Family::SigmaTn, k - 1, k - 1, false);
        const FESpace V(mesh, Family::Nedelec, k, l, true);
        const FESpace Q(mesh, Family::Lagrange, l + 1, 0, true);
        if (V.dim() > std::min(dense_cap, kDensePoincare)) {
            out.push_back(poincare_sparse(mesh, k, l));
            continue;
        }
        const MatrixXd M(assemble_mass(V));
        const MatrixXd K(assemble_curlcurl(V));
        const MatrixXd H(assemble_curl_broken_h1(V));
        const MatrixXd G(assemble_grad(Q, V));
        const MatrixXd BMB = schur_dense(assemble_b(S, V), assemble_mass(S));
        const MatrixXd Z = null_space(MatrixXd(G.transpose()));

        PoincareLevel lv;
        lv.tets = mesh.num_tets();
        lv.dim_kc = static_cast<int>(Z.cols());
        lv.curl_constant = smallest_generalized_eig(K, M, Z);
        lv.gradcurl_constant = smallest_generalized_eig(BMB, M + K, Z);
        lv.equiv_min = INFINITY;
        lv.equiv_max = 0.0;
        for (int s = 0; s < equivalence_samples; ++s) {
            VectorXd r(Z.cols());
            for (Eigen::Index i = 0; i < r.size(); ++i) r[i] = rng.uniform(-1.0, 1.0);
            const VectorXd v = Z * r;
            const double ratio = std::sqrt(v.dot(BMB * v) / v.dot(H * v));
            lv.equiv_min = std::min(lv.equiv_min, ratio);
            lv.equiv_max = std::max(lv.equiv_max, ratio);
        }
        MatrixXd left = BMB;
        if (Q.dim() > 0) {
            const MatrixXd MinvG = M.llt().solve(G);
            const MatrixXd A = G.transpose() * MinvG;  // Lagrange stiffness via grad Q in V
            left += G * A.llt().solve(G.transpose());
        }
        const MatrixXd I = MatrixXd::Identity(V.dim(), V.dim());
        lv.infsup = std::sqrt(std::max(0.0, smallest_generalized_eig(left, M + K + H, I)));
        out.push_back(lv);
    }
    return out;
}

double curl_constant_with_gradient(const TetMesh& mesh, int k, int l) {
    const FESpace V(mesh, Family::Nedelec, k, l, true);
    const FESpace Q(mesh, Family::Lagrange, l + 1, 0, true);
    if (Q.dim() == 0) throw InvalidArgument("curl_constant_with_gradient: mesh has no interior Lagrange DoFs");
    const MatrixXd M(assemble_mass(V));
    const MatrixXd K(assemble_curlcurl(V));
    const MatrixXd G(assemble_grad(Q, V));
    const MatrixXd Z = null_space(MatrixXd(G.transpose()));
    MatrixXd Zg(Z.rows(), Z.cols() + 1);
    Zg << Z, M.llt().solve(G.col(0));
    return smallest_generalized_eig(K, M, Zg);
}

void write_complex_report(std::ostream& os, const ComplexReport& r) {
    os << "complex " << r.label << " k=" << r.k << " l=" << r.l << '\n'
       << "  dim V^grad_{k+1}(R^3) x R = " << r.dim_grad << '\n'
       << "  dim V^curl_k(M)            = " << r.dim_curl_mat << '\n'
       << "  dim Sigma^tn_{k-1}         = " << r.dim_sigma << '\n'
       << "  dim V0^curl_(k,l)          = " << r.dim_curl0 << '\n'
       << "  dim V0^grad_{l+1}          = " << r.dim_grad0 << '\n'
       << "  rank (grad, mskw x) = " << r.rank_incl << ", rank D = " << r.rank_devcurl << ", rank B = " << r.rank_b
       << ", nullity B = " << r.nullity_b << ", rank G^T = " << r.rank_gt << ", dim Kc = " << r.dim_kc << '\n';
    for (const auto& id : r.identities)
        os << "  [" << (id.pass ? "PASS" : "FAIL") << "] " << id.name << "  residual " << id.residual << " threshold "
           << id.threshold << '\n';
}

void write_identities_csv(std::ostream& os, const std::vector<IdentityResult>& ids, bool header) {
    if (header) os << "identity,residual,threshold,pass\n";
    for (const auto& id : ids) {
        std::string name = id.name;
        std::replace(name.begin(), name.end(), ',', ';');
        os << '"' << name << "\"," << id.residual << ',' << id.threshold << ',' << (id.pass ? 1 : 0) << '\n';
    }
}

}  // namespace quadcurl
