#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "quadcurl/assembly.hpp"

#include <Eigen/SparseCholesky>

#include <cmath>
#include <cstdlib>
#include <sstream>

using namespace quadcurl;

namespace {

TetMesh mesh2() { return perturb(build_cube_mesh(2), 0.2, 42); }

double sym_error(const SpMat& A) { return SpMat(A - SpMat(A.transpose())).norm() / A.norm(); }

}  // namespace

TEST_CASE("space dimensions on the one-cube mesh") {
    const TetMesh m = build_cube_mesh(1);
    CHECK(FESpace(m, Family::Nedelec, 1, 0, true).dim() == 1);
    CHECK(FESpace(m, Family::Nedelec, 1, 0, false).dim() == 19);
    CHECK(FESpace(m, Family::Lagrange, 1, 0, true).dim() == 0);
    CHECK(FESpace(m, Family::Lagrange, 2, 0, false).dim() == 8 + 19);
    CHECK(FESpace(m, Family::SigmaTn, 0, 0, false).dim() == 36);
    CHECK(FESpace(m, Family::Lambda, 1, 0, false).dim() == 12);
    const FESpace S(m, Family::SigmaTn, 1, 1, false);
    CHECK(S.dim() == 6 * 18 + 8 * 6);
    const FESpace Sb = S.broken_view();
    CHECK(Sb.dim() == 6 * S.local_dim());
    CHECK(Sb.broken());
}

TEST_CASE("mass and curl-curl matrices") {
    const TetMesh m = mesh2();
    for (auto [k, l] : {std::pair{1, 0}, std::pair{1, 1}, std::pair{2, 1}}) {
        const FESpace V(m, Family::Nedelec, k, l, true);
        const SpMat M = assemble_mass(V), K = assemble_curlcurl(V);
        CHECK(sym_error(M) < 1e-14);
        CHECK(sym_error(K) < 1e-14);
        Eigen::SimplicialLLT<SpMat> llt(M);
        CHECK(llt.info() == Eigen::Success);
        // Discrete gradients lie in V and have zero curl.
        const FESpace Q(m, Family::Lagrange, l + 1, 0, true);
        const SpMat G = assemble_grad(Q, V);
        const MatrixXd grads = llt.solve(MatrixXd(G));
        CHECK((K * grads).cwiseAbs().maxCoeff() < 1e-10 * K.norm());
        CHECK((M * grads - MatrixXd(G)).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("constants are reproduced by interpolation, mass and load") {
    const TetMesh m = mesh2();
    const Vec3 c(0.3, -1.0, 2.0);
    const FESpace V(m, Family::Nedelec, 1, 0, false);
    const VectorXd x = interpolate(V, PointFunction([&](const Vec3&, double* out) { Vec3::Map(out) = c; }));
    CHECK(x.dot(assemble_mass(V) * x) == doctest::Approx(c.squaredNorm()).epsilon(1e-13));
    const VectorXd F = assemble_load(V, [&](const Vec3&, double* out) { Vec3::Map(out) = c; }, 2);
    CHECK(F.dot(x) == doctest::Approx(c.squaredNorm()).epsilon(1e-13));
    // curl of a constant field vanishes
    CHECK((assemble_curlcurl(V) * x).norm() < 1e-12);
    // (psi, curl v) with constant psi vanishes on the tangentially constrained space
    const FESpace V0(m, Family::Nedelec, 1, 0, true);
    const VectorXd Fc = assemble_load_curl(V0, [&](const Vec3&, double* out) { Vec3::Map(out) = c; }, 2);
    CHECK(Fc.cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("linear fields evaluate exactly") {
    const TetMesh m = mesh2();
    const FESpace V(m, Family::Nedelec, 1, 1, false);
    auto field = [](const Vec3& x) { return Vec3(x[1] - 2 * x[2], 1 + x[0], 0.5 * x[0] + x[1]); };
    FieldCoefficients fc{&V, interpolate(V, PointFunction([&](const Vec3& x, double* out) { Vec3::Map(out) = field(x); }))};
    for (const Vec3 p : {Vec3(0.2, 0.3, 0.4), Vec3(0.9, 0.1, 0.6), Vec3(0.5, 0.5, 0.5)}) {
        const VectorXd v = fc.evaluate(p);
        CHECK((Vec3(v[0], v[1], v[2]) - field(p)).norm() < 1e-12);
    }
}

TEST_CASE("tangential-normal continuity: C annihilates continuous tensors") {
    const TetMesh m = mesh2();
    for (int k = 1; k <= 2; ++k) {
        const FESpace S(m, Family::SigmaTn, k - 1, k - 1, false);
        const FESpace Sb = S.broken_view();
        const FESpace L(m, Family::Lambda, k, 0, false);
        SplitMix64 rng(k);
        VectorXd c(S.dim());
        for (Eigen::Index i = 0; i < c.size(); ++i) c[i] = rng.uniform(-1, 1);
        VectorXd b(Sb.dim());
        const int nloc = S.local_dim();
        for (int t = 0; t < m.num_tets(); ++t)
            for (int i = 0; i < nloc; ++i) b[t * nloc + i] = c[S.local_dofs(t)[i]];
        const SpMat C = assemble_c(Sb, L);
        CHECK(C.rows() == L.dim());
        CHECK((C * b).cwiseAbs().maxCoeff() < 1e-12);
        // a random broken field is not continuous
        for (Eigen::Index i = 0; i < b.size(); ++i) b[i] = rng.uniform(-1, 1);
        CHECK((C * b).cwiseAbs().maxCoeff() > 1e-3);
    }
}

TEST_CASE("B on broken and continuous tensors agree") {
    const TetMesh m = mesh2();
    const FESpace S(m, Family::SigmaTn, 1, 1, false);
    const FESpace Sb = S.broken_view();
    const FESpace V(m, Family::Nedelec, 2, 1, true);
    const SpMat B = assemble_b(S, V), Bb = assemble_b(Sb, V);
    CHECK(B.rows() == V.dim());
    CHECK(B.cols() == S.dim());
    SplitMix64 rng(5);
    VectorXd c(S.dim());
    for (Eigen::Index i = 0; i < c.size(); ++i) c[i] = rng.uniform(-1, 1);
    VectorXd b(Sb.dim());
    const int nloc = S.local_dim();
    for (int t = 0; t < m.num_tets(); ++t)
        for (int i = 0; i < nloc; ++i) b[t * nloc + i] = c[S.local_dofs(t)[i]];
    CHECK((B * c - Bb * b).norm() < 1e-12 * (B * c).norm());
}

TEST_CASE("matrices do not depend on the thread count") {
    const TetMesh m = mesh2();
    const FESpace S(m, Family::SigmaTn, 0, 0, false);
    const FESpace V(m, Family::Nedelec, 1, 1, true);
    setenv("QUADCURL_THREADS", "1", 1);
    const SpMat a = assemble_b(S, V), ma = assemble_mass(V);
    setenv("QUADCURL_THREADS", "3", 1);
    const SpMat b = assemble_b(S, V), mb = assemble_mass(V);
    unsetenv("QUADCURL_THREADS");
    CHECK(SpMat(a - b).norm() == 0.0);
    CHECK(SpMat(ma - mb).norm() == 0.0);
}

TEST_CASE("coordinate output") {
    SpMat A(2, 3);
    A.insert(0, 1) = 2.5;
    A.insert(1, 2) = -1.0;
    std::ostringstream os;
    write_coo(os, A);
    CHECK(os.str() == "0 1 2.5\n1 2 -1\n");
}

TEST_CASE("face points") {
    const TetMesh m = mesh2();
    for (int t = 0; t < 3; ++t)
        for (int f = 0; f < 4; ++f) {
            const FacePoints fp = face_points(m, t, f, 4);
            CHECK(fp.w.sum() == doctest::Approx(face_frame(m, m.tet_faces[t][f]).area).epsilon(1e-13));
            CHECK((fp.lambda.col(f).cwiseAbs().maxCoeff()) < 1e-15);
        }
}
