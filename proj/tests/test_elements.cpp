#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "quadcurl/elements.hpp"

#include <cmath>

using namespace quadcurl;

namespace {

int sum4(const std::array<int, 4>& a) { return 4 * a[0] + 6 * a[1] + 4 * a[2] + a[3]; }

// Duality of the nodal basis with its own functionals.
double duality(const LocalElement& el) {
    const MatrixXd P = el.dofs.W * el.dofs.sample(el.basis);
    return (P - MatrixXd::Identity(el.ndof(), el.ndof())).cwiseAbs().maxCoeff();
}

TetView skew_view() {
    return tet_view({Vec3(0.1, 0, 0), Vec3(1, 0.2, 0.1), Vec3(0.3, 0.9, 0), Vec3(0.2, 0.1, 0.8)});
}

}  // namespace

TEST_CASE("dimensions per family") {
    // vertex + 6 edge + 4 face + cell counts on one tet.
    CHECK(sum4(dofs_per_entity(Family::Lagrange, 1, 0)) == 4);
    CHECK(sum4(dofs_per_entity(Family::Lagrange, 3, 0)) == 20);
    CHECK(sum4(dofs_per_entity(Family::Nedelec, 1, 0)) == 6);
    CHECK(sum4(dofs_per_entity(Family::Nedelec, 1, 1)) == 12);
    CHECK(sum4(dofs_per_entity(Family::Nedelec, 2, 1)) == 20);
    CHECK(sum4(dofs_per_entity(Family::Nedelec, 2, 2)) == 30);
    CHECK(sum4(dofs_per_entity(Family::Nedelec, 3, 2)) == 45);
    CHECK(sum4(dofs_per_entity(Family::Nedelec, 3, 3)) == 60);
    CHECK(sum4(dofs_per_entity(Family::SigmaTn, 0, 0)) == 8);
    CHECK(sum4(dofs_per_entity(Family::SigmaTn, 1, 1)) == 32);
    CHECK(sum4(dofs_per_entity(Family::SigmaTn, 2, 2)) == 80);
    CHECK(dofs_per_entity(Family::SigmaTn, 0, 0)[2] == 2);
    CHECK(dofs_per_entity(Family::SigmaTn, 1, 1)[2] == 6);
}

TEST_CASE("nodal bases are dual to their functionals") {
    const TetView tv = skew_view();
    for (int m = 1; m <= 4; ++m) CHECK(duality(lagrange_local(m, tv)) < 1e-11);
    for (int k = 1; k <= 3; ++k)
        for (int l : {k - 1, k}) {
            const LocalElement e = nedelec_local(k, l, tv);
            CHECK(duality(e) < 1e-11);
            CHECK(e.vandermonde_cond < 1e8);
        }
    for (int k = 0; k <= 2; ++k) {
        const LocalElement e = sigma_tn_local(k, tv);
        CHECK(e.ndof() == 8 * poly_dim(4, k));
        CHECK(duality(e) < 1e-11);
        // traceless members
        const PolyField tr = trace(e.basis);
        CHECK(tr.comp[0].cwiseAbs().maxCoeff() < 1e-11);
    }
}

TEST_CASE("raised moment quadrature leaves the basis unchanged") {
    const TetView tv = skew_view();
    const LocalElement a = nedelec_local(2, 1, tv), b = nedelec_local(2, 1, tv, 6);
    CHECK((a.basis.stacked() - b.basis.stacked()).cwiseAbs().maxCoeff() < 1e-10);
    const LocalElement s = sigma_tn_local(1, tv), t = sigma_tn_local(1, tv, 6);
    CHECK((s.basis.stacked() - t.basis.stacked()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("traceless frame duality") {
    SplitMix64 rng(9);
    for (int i = 0; i < 20; ++i) {
        const TetGeometry g = tet_geometry(random_shape_regular_tet(rng));
        const TracelessFrame fr = traceless_frame(g);
        CHECK((fr.pairing() - Eigen::Matrix<double, 8, 8>::Identity()).cwiseAbs().maxCoeff() < 1e-13);
        for (const Mat3& b : fr.basis) CHECK(std::abs(b.trace()) < 1e-13);
    }
}

TEST_CASE("mskw") {
    const Vec3 w(1, -2, 0.5), n(0.3, 0.4, -1.2);
    CHECK((mskw(w) * n - w.cross(n)).norm() < 1e-15);
    CHECK((mskw(w) + mskw(w).transpose()).norm() == 0.0);
}

TEST_CASE("multiplier face element") {
    const FaceFrame fr = face_frame_from_points(Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0.2));
    for (int k = 1; k <= 3; ++k) {
        const FaceElement fe = lambda_face_local(k, fr);
        CHECK(fe.ndof() == 2 * poly_dim(3, k - 1));
        const MatrixXd v = fe.evaluate(MatrixXd::Constant(1, 3, 1.0 / 3.0));
        for (int j = 0; j < fe.ndof(); ++j) CHECK(std::abs(fr.n.dot(v.col(j))) < 1e-14);
    }
}

TEST_CASE("bubble bases span the same space") {
    const TetGeometry g = skew_view().geo;
    for (int k = 1; k <= 2; ++k) {
        const PolyField a = bubble_basis(k, g), b = bubble_basis_grad(k, g);
        CHECK(a.nfun() == b.nfun());
        MatrixXd both(a.stacked().rows(), a.nfun() + b.nfun());
        both << a.stacked(), b.stacked();
        CHECK(static_cast<int>(independent_columns(both).size()) == a.nfun());
    }
    CHECK(bubble_basis(0, g).nfun() == 0);
}

TEST_CASE("element certificate on random tets") {
    const ElementCertificate c = certify_elements(10, 1);
    CHECK(c.tets == 10);
    CHECK(c.duality_error < 1e-13);
    CHECK(c.max_condition() < 1e8);
    CHECK(c.max_trace < 1e-12);
    CHECK(c.pass());
    CHECK(c.vandermonde.size() == 4 + 6 + 3);
}

TEST_CASE("random tets are shape regular") {
    SplitMix64 rng(2);
    for (int i = 0; i < 50; ++i) {
        const auto x = random_shape_regular_tet(rng, 20.0);
        const TetMesh m = build_single_tet(x);
        CHECK(shape_regularity(m) <= 20.0 + 1e-9);
    }
}
