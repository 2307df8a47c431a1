#pragma once

#include "quadcurl/common.hpp"
#include "quadcurl/mesh.hpp"

#include <array>
#include <vector>

namespace quadcurl {

/// Homogeneous barycentric monomials lambda^a, |a| = degree, in nvar
/// variables (4 on a tet, 3 on a triangle, 2 on an edge). Because the
/// barycentrics sum to one, these span all of P_degree.
class Monomials {
public:
    static const Monomials& get(int nvar, int degree);

    int nvar() const { return nvar_; }
    int degree() const { return degree_; }
    int size() const { return static_cast<int>(exps_.size()); }
    const std::array<int, 4>& exponent(int i) const { return exps_[i]; }
    /// Position of a, or -1 if |a| != degree.
    int index(const std::array<int, 4>& a) const;
    /// out[i] = prod_j lambda[j]^a_ij.
    void evaluate(const double* lambda, double* out) const;
    /// Row p holds the monomials at point p (points given as rows of lambda).
    MatrixXd evaluate(const MatrixXd& lambda) const;

private:
    Monomials(int nvar, int degree);
    int nvar_, degree_;
    std::vector<std::array<int, 4>> exps_;
    std::vector<int> lookup_;
};

/// dim P_k in nvar barycentric variables; 0 for k < 0.
int poly_dim(int nvar, int k);

/// Coefficient map multiplying by (sum lambda)^(to - from).
const MatrixXd& elevation_matrix(int nvar, int from, int to);

/// Coefficient map of d/d lambda_i from degree d to d-1.
const MatrixXd& bary_derivative_matrix(int nvar, int degree, int i);

/// Coefficient map v -> p * v for a fixed polynomial p.
MatrixXd multiplication_matrix(int nvar, int deg_p, const VectorXd& p, int deg_v);

/// A family of polynomial fields on one tet sharing a homogeneous degree.
/// rank is 1 (scalar), 3 (vector) or 9 (matrix, row-major (r,s) -> 3r+s).
/// comp[c] has one row per monomial and one column per member.
struct PolyField {
    int degree = 0;
    int rank = 1;
    std::vector<MatrixXd> comp;

    PolyField() = default;
    PolyField(int degree, int rank, int nfun);

    int nfun() const { return comp.empty() ? 0 : static_cast<int>(comp[0].cols()); }
    int nmono() const { return comp.empty() ? 0 : static_cast<int>(comp[0].rows()); }

    /// Members as columns of a (rank * nmono) x nfun matrix.
    MatrixXd stacked() const;
};

/// Calculus on one tet: physical derivatives via the chain rule through
/// the barycentric gradients.
class TetCalculus {
public:
    explicit TetCalculus(const TetGeometry& g) : g_(g) {}
    const TetGeometry& geometry() const { return g_; }

    /// Coefficient map of d/dx_c from degree d to d-1.
    MatrixXd derivative_matrix(int degree, int c) const;

    PolyField grad(const PolyField& f) const;    // scalar -> vector, vector -> matrix
    PolyField curl(const PolyField& f) const;    // vector -> vector, matrix -> matrix (row-wise)
    PolyField div(const PolyField& f) const;     // vector -> scalar, matrix -> vector (row-wise)

    /// (x - barycenter) / diameter as a degree-1 vector field with one member.
    PolyField scaled_position() const;

private:
    TetGeometry g_;
};

PolyField elevate(const PolyField& f, int degree);
/// Members of a and b side by side (after elevating to the larger degree).
PolyField concat(const PolyField& a, const PolyField& b);
/// New members as combinations: result.comp[c] = f.comp[c] * coeffs.
PolyField combine(const PolyField& f, const MatrixXd& coeffs);
/// Member-wise product p * f for a single scalar polynomial p (nfun 1).
PolyField multiply(const PolyField& p, const PolyField& f);
/// Cross product x(member of a) x f for a single vector field a.
PolyField cross(const PolyField& a, const PolyField& f);
/// dev of each matrix member.
PolyField dev(const PolyField& f);
/// Trace of each matrix member.
PolyField trace(const PolyField& f);

/// Scalar monomial basis of degree k, one member per monomial.
PolyField scalar_basis(int k);
/// Vector basis of P_k(T;R^3): monomial times unit vector, component-major.
PolyField vector_basis(int k);
/// Constant basis of traceless matrices E_01, E_02, E_10, E_12, E_20, E_21,
/// diag(1,-1,0), diag(0,1,-1).
const std::array<Mat3, 8>& traceless_unit_basis();

/// values[c] (npts x nfun) at points given by the monomial table P (npts x nmono).
std::vector<MatrixXd> evaluate(const PolyField& f, const MatrixXd& P);

/// Column indices of a maximal independent subset found by column-pivoted
/// QR with relative tolerance tol; order follows pivoting.
std::vector<int> independent_columns(const MatrixXd& A, double tol = 1e-10);

}  // namespace quadcurl
