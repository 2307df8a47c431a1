#pragma once

#include "quadcurl/assembly.hpp"
#include "quadcurl/common.hpp"

#include <functional>
#include <memory>
#include <string>

namespace quadcurl {

struct SolveInfo {
    std::string backend;
    long n = 0;
    /// ||A x - b|| / ||b|| after refinement.
    double residual = 0.0;
    int refinement_steps = 0;
};

/// Symmetric (indefinite) direct solver. Below dense_threshold unknowns the
/// matrix is factored densely with rook-pivoted Bunch-Kaufman LDL^T
/// (LAPACK dsytrf_rook);
/// larger systems go to UMFPACK (LU with METIS column ordering).
/// Throws SingularSystem when a pivot is zero to tolerance.
class Factorization {
public:
    static constexpr long kDenseThreshold = 3000;

    explicit Factorization(const SpMat& A, long dense_threshold = kDenseThreshold);
    ~Factorization();
    Factorization(const Factorization&) = delete;
    Factorization& operator=(const Factorization&) = delete;

    /// Solve with iterative refinement until the relative residual is below
    /// tol (at most three correction steps).
    VectorXd solve(const VectorXd& b, SolveInfo* info = nullptr, double tol = 1e-10) const;
    long size() const { return n_; }
    const std::string& backend() const { return backend_; }

private:
    VectorXd raw_solve(const VectorXd& b) const;

    SpMat A_;
    long n_ = 0;
    std::string backend_;
    struct Dense;
    struct Umf;
    std::unique_ptr<Dense> dense_;
    std::unique_ptr<Umf> umf_;
};

VectorXd factor_solve(const SpMat& A, const VectorXd& b, SolveInfo* info = nullptr, double tol = 1e-10);

struct RankNullity {
    int rank = 0;
    int nullity = 0;
    VectorXd singular_values;
};

/// Dense SVD rank: singular values above tol * sigma_max. Throws SizeCap
/// when min(rows, cols) > 5000.
RankNullity rank_nullity(const MatrixXd& A, double tol = 1e-8);
RankNullity rank_nullity(const SpMat& A, double tol = 1e-8);

/// Orthonormal basis of ker A from the SVD (same tolerance rule).
MatrixXd null_space(const MatrixXd& A, double tol = 1e-8);

/// Smallest eigenvalue of Z^T A Z x = mu Z^T M Z x. Throws InvalidArgument
/// when Z^T M Z is not positive definite.
double smallest_generalized_eig(const MatrixXd& A, const MatrixXd& M, const MatrixXd& Z);

/// Smallest nev eigenvalues (ascending) of A x = mu M x on the range of the
/// caller's inverse, with M symmetric positive definite. inverse(r) returns w
/// with A w = r on that range (A may be singular elsewhere, e.g. on gradients
/// eliminated by a constraint). ARPACK shift-invert mode with zero shift.
VectorXd smallest_eigs_shift_invert(const std::function<VectorXd(const VectorXd&)>& inverse, const SpMat& M,
                                    int nev = 1, double tol = 1e-10);

/// Smallest singular value of A.
double smallest_singular_value(const MatrixXd& A);

}  // namespace quadcurl
