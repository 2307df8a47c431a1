#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "quadcurl/linalg.hpp"
#include "quadcurl/mesh.hpp"

#include <cmath>
#include <vector>

using namespace quadcurl;

namespace {

// Saddle matrix [[A, B^T], [B, 0]] with A SPD tridiagonal, B a random full-rank block.
SpMat saddle(int n, int m, std::uint64_t seed) {
    SplitMix64 rng(seed);
    std::vector<Eigen::Triplet<double>> t;
    for (int i = 0; i < n; ++i) {
        t.emplace_back(i, i, 4.0);
        if (i + 1 < n) {
            t.emplace_back(i, i + 1, -1.0);
            t.emplace_back(i + 1, i, -1.0);
        }
    }
    for (int j = 0; j < m; ++j)
        for (int r = 0; r < 3; ++r) {
            const int i = static_cast<int>(rng.next() % n);
            const double v = rng.uniform(-1.0, 1.0);
            t.emplace_back(n + j, i, v);
            t.emplace_back(i, n + j, v);
        }
    for (int j = 0; j < m; ++j) {
        t.emplace_back(n + j, j, 1.0);
        t.emplace_back(j, n + j, 1.0);
    }
    SpMat A(n + m, n + m);
    A.setFromTriplets(t.begin(), t.end());
    return A;
}

SpMat laplace_1d(int n) {
    std::vector<Eigen::Triplet<double>> t;
    for (int i = 0; i < n; ++i) {
        t.emplace_back(i, i, 2.0);
        if (i + 1 < n) {
            t.emplace_back(i, i + 1, -1.0);
            t.emplace_back(i + 1, i, -1.0);
        }
    }
    SpMat A(n, n);
    A.setFromTriplets(t.begin(), t.end());
    return A;
}

}  // namespace

TEST_CASE("dense and sparse factorizations solve saddle systems") {
    for (auto [n, m] : {std::pair{60, 20}, std::pair{3000, 600}}) {
        const SpMat A = saddle(n, m, 3);
        VectorXd b(n + m);
        for (int i = 0; i < n + m; ++i) b[i] = std::sin(1.0 + i);
        SolveInfo info;
        const VectorXd x = factor_solve(A, b, &info, 1e-12);
        CHECK((A * x - b).norm() <= 1e-12 * b.norm());
        CHECK(info.residual <= 1e-12);
        CHECK(info.n == n + m);
        CHECK(info.backend == (n + m <= Factorization::kDenseThreshold ? "lapack-dsytrf-rook" : "umfpack"));
    }
}

TEST_CASE("factorization reuse") {
    const SpMat A = saddle(100, 30, 4);
    const Factorization f(A);
    CHECK(f.size() == 130);
    for (int s = 0; s < 3; ++s) {
        VectorXd b = VectorXd::Zero(130);
        b[s] = 1.0;
        CHECK((A * f.solve(b) - b).norm() < 1e-12);
    }
}

TEST_CASE("singular systems are reported") {
    SpMat A = saddle(40, 10, 5);
    // Duplicate a constraint row and column: rank deficient.
    SpMat Z(51, 51);
    std::vector<Eigen::Triplet<double>> t;
    for (int j = 0; j < A.outerSize(); ++j)
        for (SpMat::InnerIterator it(A, j); it; ++it) {
            t.emplace_back(it.row(), it.col(), it.value());
            if (it.row() == 40) t.emplace_back(50, it.col(), it.value());
            if (it.col() == 40) t.emplace_back(it.row(), 50, it.value());
        }
    Z.setFromTriplets(t.begin(), t.end());
    CHECK_THROWS_AS(Factorization{Z}, SingularSystem);
    CHECK_THROWS_AS(Factorization(Z, 0), SingularSystem);
}

TEST_CASE("rank and null space") {
    MatrixXd A(4, 5);
    A << 1, 2, 3, 4, 5, 2, 4, 6, 8, 10, 0, 1, 0, 1, 0, 1, 3, 3, 5, 5;
    const RankNullity rn = rank_nullity(A);
    CHECK(rn.rank == 2);
    CHECK(rn.nullity == 3);
    const MatrixXd N = null_space(A);
    CHECK(N.cols() == 3);
    CHECK((A * N).norm() < 1e-12);
    CHECK((N.transpose() * N - MatrixXd::Identity(3, 3)).norm() < 1e-12);
    CHECK(rank_nullity(SpMat(A.sparseView())).rank == 2);
    CHECK_THROWS_AS(rank_nullity(MatrixXd::Zero(5001, 5001)), SizeCap);
}

TEST_CASE("smallest eigenvalues: dense and shift-invert Lanczos agree") {
    const int n = 400;
    const SpMat A = laplace_1d(n);
    const double exact = 2.0 - 2.0 * std::cos(M_PI / (n + 1));
    const MatrixXd I = MatrixXd::Identity(n, n);
    CHECK(smallest_generalized_eig(MatrixXd(A), I, I) == doctest::Approx(exact).epsilon(1e-10));

    SpMat M(n, n);
    M.setIdentity();
    const Factorization f(A);
    const VectorXd mu = smallest_eigs_shift_invert([&](const VectorXd& r) { return f.solve(r); }, M, 3);
    for (int j = 0; j < 3; ++j)
        CHECK(mu[j] == doctest::Approx(2.0 - 2.0 * std::cos((j + 1) * M_PI / (n + 1))).epsilon(1e-9));
}

TEST_CASE("smallest eigenvalue on a constrained subspace") {
    // A = diag(1..n), constraint x_0 = 0: the smallest remaining eigenvalue is 2.
    const int n = 50;
    MatrixXd A = MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) A(i, i) = i + 1;
    const MatrixXd Z = MatrixXd::Identity(n, n).rightCols(n - 1);
    CHECK(smallest_generalized_eig(A, MatrixXd::Identity(n, n), Z) == doctest::Approx(2.0));
    CHECK(smallest_singular_value(A) == doctest::Approx(1.0));
}
