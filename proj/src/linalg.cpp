#include "quadcurl/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <lapacke.h>
#include <umfpack.h>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

extern "C" {
void dsaupd_c(int* ido, const char* bmat, int n, const char* which, int nev, double tol, double* resid, int ncv,
              double* v, int ldv, int* iparam, int* ipntr, double* workd, double* workl, int lworkl, int* info);
void dseupd_c(int rvec, const char* howmny, const int* select, double* d, double* z, int ldz, double sigma,
              const char* bmat, int n, const char* which, int nev, double tol, double* resid, int ncv, double* v,
              int ldv, int* iparam, int* ipntr, double* workd, double* workl, int lworkl, int* info);
}

namespace quadcurl {

namespace {

constexpr double kPivotTol = 1e-14;

}  // namespace

struct Factorization::Dense {
    std::vector<double> a;  // column-major factor
    std::vector<lapack_int> ipiv;
};

struct Factorization::Umf {
    std::vector<SuiteSparse_long> Ap, Ai;
    std::vector<double> Ax;
    void* numeric = nullptr;
    double control[UMFPACK_CONTROL];
    ~Umf() {
        if (numeric) umfpack_dl_free_numeric(&numeric);
    }
};

Factorization::Factorization(const SpMat& A, long dense_threshold) : A_(A), n_(A.rows()) {
    if (A.rows() != A.cols()) throw InvalidArgument("factor: matrix must be square");
    A_.makeCompressed();
    if (n_ == 0) {
        backend_ = "empty";
        return;
    }
    double amax = 0.0;
    for (int j = 0; j < A_.outerSize(); ++j)
        for (SpMat::InnerIterator it(A_, j); it; ++it) amax = std::max(amax, std::abs(it.value()));
    if (amax == 0.0) throw SingularSystem("factor: zero matrix", 0);

    if (n_ <= dense_threshold) {
        backend_ = "lapack-dsytrf-rook";
        dense_ = std::make_unique<Dense>();
        MatrixXd D = MatrixXd(A_);
        dense_->a.assign(D.data(), D.data() + n_ * n_);
        dense_->ipiv.resize(n_);
        const lapack_int info = LAPACKE_dsytrf_rook(LAPACK_COL_MAJOR, 'L', static_cast<lapack_int>(n_), dense_->a.data(),
                                               static_cast<lapack_int>(n_), dense_->ipiv.data());
        if (info < 0) throw InvalidArgument("dsytrf_rook: illegal argument");
        if (info > 0) throw SingularSystem("factor: exactly zero pivot", info - 1);
        // Inspect the 1x1 and 2x2 diagonal blocks of D.
        const auto a = [&](long i, long j) { return dense_->a[j * n_ + i]; };
        for (long k = 0; k < n_;) {
            if (dense_->ipiv[k] > 0) {
                if (std::abs(a(k, k)) <= kPivotTol * amax) throw SingularSystem("factor: pivot zero to tolerance", k);
                ++k;
            } else {
                const double p = a(k, k), q = a(k + 1, k), r = a(k + 1, k + 1);
                const double m = 0.5 * (p + r), d = std::sqrt(0.25 * (p - r) * (p - r) + q * q);
                const double small = std::min(std::abs(m - d), std::abs(m + d));
                if (small <= kPivotTol * amax) throw SingularSystem("factor: 2x2 pivot singular to tolerance", k);
                k += 2;
            }
        }
        return;
    }

    backend_ = "umfpack";
    umf_ = std::make_unique<Umf>();
    Umf& u = *umf_;
    u.Ap.assign(A_.outerIndexPtr(), A_.outerIndexPtr() + n_ + 1);
    u.Ai.assign(A_.innerIndexPtr(), A_.innerIndexPtr() + A_.nonZeros());
    u.Ax.assign(A_.valuePtr(), A_.valuePtr() + A_.nonZeros());
    umfpack_dl_defaults(u.control);
    // Lowest fill on the condensed systems among the strategies and orderings tried.
    u.control[UMFPACK_STRATEGY] = UMFPACK_STRATEGY_UNSYMMETRIC;
    u.control[UMFPACK_ORDERING] = UMFPACK_ORDERING_METIS;
    double info[UMFPACK_INFO];
    void* symbolic = nullptr;
    SuiteSparse_long st = umfpack_dl_symbolic(n_, n_, u.Ap.data(), u.Ai.data(), u.Ax.data(), &symbolic, u.control, info);
    if (st != UMFPACK_OK) throw SingularSystem("umfpack symbolic failed (status " + std::to_string(st) + ")", -1);
    st = umfpack_dl_numeric(u.Ap.data(), u.Ai.data(), u.Ax.data(), symbolic, &u.numeric, u.control, info);
    umfpack_dl_free_symbolic(&symbolic);
    if (st == UMFPACK_ERROR_out_of_memory) throw SizeCap("umfpack: out of memory");
    if (st != UMFPACK_OK && st != UMFPACK_WARNING_singular_matrix)
        throw SingularSystem("umfpack numeric failed (status " + std::to_string(st) + ")", -1);
    std::vector<SuiteSparse_long> Q(n_);
    std::vector<double> Dx(n_);
    SuiteSparse_long do_recip = 0;
    umfpack_dl_get_numeric(nullptr, nullptr, nullptr, nullptr, nullptr, nullptr, nullptr, Q.data(), Dx.data(), &do_recip,
                           nullptr, u.numeric);
    double dmax = 0.0;
    for (double d : Dx) dmax = std::max(dmax, std::abs(d));
    for (long k = 0; k < n_; ++k)
        if (std::abs(Dx[k]) <= kPivotTol * dmax) throw SingularSystem("umfpack: pivot zero to tolerance", Q[k]);
}

Factorization::~Factorization() = default;

VectorXd Factorization::raw_solve(const VectorXd& b) const {
    VectorXd x = b;
    if (dense_) {
        const lapack_int info =
            LAPACKE_dsytrs_rook(LAPACK_COL_MAJOR, 'L', static_cast<lapack_int>(n_), 1, dense_->a.data(),
                           static_cast<lapack_int>(n_), dense_->ipiv.data(), x.data(), static_cast<lapack_int>(n_));
        if (info != 0) throw InvalidArgument("dsytrs_rook failed");
    } else if (umf_) {
        double info[UMFPACK_INFO];
        const SuiteSparse_long st = umfpack_dl_solve(UMFPACK_A, umf_->Ap.data(), umf_->Ai.data(), umf_->Ax.data(),
                                                     x.data(), b.data(), umf_->numeric, umf_->control, info);
        if (st != UMFPACK_OK && st != UMFPACK_WARNING_singular_matrix)
            throw SingularSystem("umfpack solve failed (status " + std::to_string(st) + ")", -1);
    }
    return x;
}

VectorXd Factorization::solve(const VectorXd& b, SolveInfo* info, double tol) const {
    if (b.size() != n_) throw InvalidArgument("solve: right-hand side length mismatch");
    VectorXd x = raw_solve(b);
    const double bn = b.norm();
    double res = bn > 0.0 ? (b - A_ * x).norm() / bn : 0.0;
    int steps = 0;
    // One correction is always applied; further ones only while the contract fails.
    while (bn > 0.0 && (steps == 0 || res > tol) && steps < 3) {
        const VectorXd r = b - A_ * x;
        x += raw_solve(r);
        res = (b - A_ * x).norm() / bn;
        ++steps;
    }
    if (info) {
        info->backend = backend_;
        info->n = n_;
        info->residual = res;
        info->refinement_steps = steps;
    }
    return x;
}

VectorXd factor_solve(const SpMat& A, const VectorXd& b, SolveInfo* info, double tol) {
    Factorization F(A);
    return F.solve(b, info, tol);
}

RankNullity rank_nullity(const MatrixXd& A, double tol) {
    RankNullity rn;
    if (std::min(A.rows(), A.cols()) > 5000) throw SizeCap("rank_nullity: dense SVD limited to 5000");
    if (A.rows() == 0 || A.cols() == 0) {
        rn.nullity = static_cast<int>(A.cols());
        return rn;
    }
    Eigen::BDCSVD<MatrixXd> svd(A);
    rn.singular_values = svd.singularValues();
    const double smax = rn.singular_values.size() ? rn.singular_values[0] : 0.0;
    for (Eigen::Index i = 0; i < rn.singular_values.size(); ++i)
        if (smax > 0.0 && rn.singular_values[i] > tol * smax) ++rn.rank;
    rn.nullity = static_cast<int>(A.cols()) - rn.rank;
    return rn;
}

RankNullity rank_nullity(const SpMat& A, double tol) {
    if (std::min(A.rows(), A.cols()) > 5000) throw SizeCap("rank_nullity: dense SVD limited to 5000");
    return rank_nullity(MatrixXd(A), tol);
}

MatrixXd null_space(const MatrixXd& A, double tol) {
    if (std::min(A.rows(), A.cols()) > 5000) throw SizeCap("null_space: dense SVD limited to 5000");
    if (A.rows() == 0) return MatrixXd::Identity(A.cols(), A.cols());
    Eigen::BDCSVD<MatrixXd> svd(A, Eigen::ComputeFullV);
    const VectorXd s = svd.singularValues();
    int r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s[0] > 0.0 && s[i] > tol * s[0]) ++r;
    return svd.matrixV().rightCols(A.cols() - r);
}

double smallest_generalized_eig(const MatrixXd& A, const MatrixXd& M, const MatrixXd& Z) {
    const MatrixXd Ap = Z.transpose() * A * Z;
    const MatrixXd Mp = Z.transpose() * M * Z;
    if (Ap.rows() == 0) throw InvalidArgument("smallest_generalized_eig: empty subspace");
    Eigen::LLT<MatrixXd> llt(0.5 * (Mp + Mp.transpose()));
    if (llt.info() != Eigen::Success) throw InvalidArgument("smallest_generalized_eig: mass not positive definite");
    Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> es(0.5 * (Ap + Ap.transpose()), 0.5 * (Mp + Mp.transpose()),
                                                          Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

VectorXd smallest_eigs_shift_invert(const std::function<VectorXd(const VectorXd&)>& inverse, const SpMat& M,
                                    int nev, double tol) {
    const int n = static_cast<int>(M.rows());
    if (nev < 1 || nev >= n) throw InvalidArgument("smallest_eigs_shift_invert: need 1 <= nev < n");
    const int ncv = std::min(n, std::max(2 * nev + 1, 20));
    const int lworkl = ncv * (ncv + 8);
    std::vector<double> resid(n), v(static_cast<std::size_t>(n) * ncv), workd(3 * static_cast<std::size_t>(n)),
        workl(lworkl);
    int iparam[11] = {}, ipntr[14] = {};
    iparam[0] = 1;
    iparam[2] = 1000;
    iparam[6] = 3;
    int ido = 0, info = 0;
    auto x_at = [&](int p) { return Eigen::Map<VectorXd>(workd.data() + ipntr[p] - 1, n); };
    for (;;) {
        dsaupd_c(&ido, "G", n, "LM", nev, tol, resid.data(), ncv, v.data(), n, iparam, ipntr, workd.data(),
                 workl.data(), lworkl, &info);
        if (ido == -1) {
            const VectorXd mx = M * x_at(0);
            x_at(1) = inverse(mx);
        } else if (ido == 1) {
            x_at(1) = inverse(x_at(2));
        } else if (ido == 2) {
            x_at(1) = M * x_at(0);
        } else {
            break;
        }
    }
    if (info < 0) throw SingularSystem("ARPACK dsaupd failed with info " + std::to_string(info), -1);
    if (iparam[4] < nev) throw SingularSystem("ARPACK: only " + std::to_string(iparam[4]) + " eigenvalues converged", -1);
    std::vector<int> select(ncv);
    VectorXd d(nev);
    dseupd_c(0, "A", select.data(), d.data(), nullptr, n, 0.0, "G", n, "LM", nev, tol, resid.data(), ncv, v.data(), n,
             iparam, ipntr, workd.data(), workl.data(), lworkl, &info);
    if (info != 0) throw SingularSystem("ARPACK dseupd failed with info " + std::to_string(info), -1);
    std::sort(d.data(), d.data() + nev);
    return d;
}

double smallest_singular_value(const MatrixXd& A) {
    if (A.size() == 0) return 0.0;
    Eigen::BDCSVD<MatrixXd> svd(A);
    return svd.singularValues().minCoeff();
}

}  // namespace quadcurl
