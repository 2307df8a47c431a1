#pragma once

#include "quadcurl/common.hpp"
#include "quadcurl/elements.hpp"
#include "quadcurl/mesh.hpp"

#include <Eigen/Sparse>

#include <functional>
#include <iosfwd>
#include <memory>
#include <vector>

namespace quadcurl {

using SpMat = Eigen::SparseMatrix<double>;

/// Global DoF map of one element family over a mesh.
///
/// Full DoFs are numbered entity-kind major (vertices, edges, faces, cells),
/// then by global entity id and index within the entity. Masked DoFs (on the
/// boundary for H_0 spaces, and boundary faces for the multiplier space) are
/// dropped from the free numbering used by all operators. A broken space gives
/// every tet its own copy of all local DoFs.
class FESpace {
public:
    FESpace(const TetMesh& mesh, Family family, int k, int l, bool homogeneous_bc, bool broken = false);

    /// Broken copy sharing this space's elements.
    FESpace broken_view() const;

    const TetMesh& mesh() const { return *mesh_; }
    Family family() const { return family_; }
    int k() const { return k_; }
    int l() const { return l_; }
    bool homogeneous_bc() const { return bc_; }
    bool broken() const { return broken_; }

    int dim() const { return dim_; }
    int full_dim() const { return full_dim_; }
    int masked() const { return full_dim_ - dim_; }
    const std::array<int, 4>& per_entity() const { return per_; }
    /// Local DoFs per tet (4 faces for the multiplier space).
    int local_dim() const { return nloc_; }
    /// Free index of every local DoF of tet t, -1 where masked.
    const int* local_dofs(int t) const { return &l2g_[static_cast<std::size_t>(t) * nloc_]; }
    /// Nodal element on tet t (not available for the multiplier space).
    const LocalElement& element(int t) const;
    /// Rank of the field values (1, 3 or 9).
    int value_rank() const;
    /// Polynomial degree of the shape space.
    int degree() const;

private:
    FESpace() = default;

    const TetMesh* mesh_ = nullptr;
    Family family_ = Family::Lagrange;
    int k_ = 0, l_ = 0;
    bool bc_ = false, broken_ = false;
    std::array<int, 4> per_{0, 0, 0, 0};
    int nloc_ = 0;
    int full_dim_ = 0, dim_ = 0;
    std::vector<int> l2g_;
    std::shared_ptr<std::vector<LocalElement>> elements_;
};

/// Values of all members of f at barycentric points, rows rank*p + c.
MatrixXd tabulate(const PolyField& f, const MatrixXd& lambda);

/// Coefficient vector in the free numbering of one space.
struct FieldCoefficients {
    const FESpace* space = nullptr;
    VectorXd coeffs;

    /// Local nodal coefficients on tet t (zeros on masked DoFs).
    VectorXd local(int t) const;
    /// Value at barycentric point lambda of tet t (rank entries).
    VectorXd evaluate(int t, const std::array<double, 4>& lambda) const;
    /// Value at a physical point; searches for a containing tet.
    VectorXd evaluate(const Vec3& x) const;
};

/// Element matrices on tet t in local DoF order (rows test, columns trial).
MatrixXd local_mass(const FESpace& S, int t);
MatrixXd local_b(const FESpace& S, const FESpace& V, int t);
/// Rows are the 4 * per-face multiplier DoFs of the tet, face-major.
MatrixXd local_c(const FESpace& S, const FESpace& L, int t);

SpMat assemble_mass(const FESpace& S);
/// (curl u, curl v) on a Nedelec space.
SpMat assemble_curlcurl(const FESpace& V);
/// B[v, tau] = sum_T (div tau, curl v)_T - sum_{F interior} ([n^T tau n], n_F . curl v)_F.
SpMat assemble_b(const FESpace& S, const FESpace& V);
/// G[v, psi] = (grad psi, v).
SpMat assemble_grad(const FESpace& Q, const FESpace& V);
/// C[mu, tau] = -sum_T (n x tau n_F, mu)_{dT}, n the outward normal.
SpMat assemble_c(const FESpace& S, const FESpace& L);

/// dev curl from the matrix-valued space (three row copies of the Nedelec
/// space V) into S, by local interpolation. Row r of the matrix field built
/// from V DoF j is column r*dim(V) + j.
struct DevCurlOperator {
    SpMat D;
    /// Largest disagreement between tets writing the same S DoF.
    double max_disagreement = 0.0;
};
DevCurlOperator assemble_devcurl(const FESpace& V, const FESpace& S);

/// Pointwise field evaluated per tet: f(tet, x, lambda, out[rank]).
using TetFunction = std::function<void(int, const Vec3&, const std::array<double, 4>&, double*)>;
/// Pointwise field independent of the tet.
using PointFunction = std::function<void(const Vec3&, double*)>;

/// Canonical interpolation by the DoF functionals. A DoF shared by several
/// tets takes the value computed in the lowest-numbered one. extra_degree > 0
/// evaluates the moments with raised quadrature degree (for smooth, non
/// polynomial fields).
VectorXd interpolate(const FESpace& S, const TetFunction& f, int extra_degree = 0);
VectorXd interpolate(const FESpace& S, const PointFunction& f, int extra_degree = 0);

/// Extra moment quadrature degree used when interpolating smooth fields.
inline constexpr int kSmoothInterpolationExtra = 10;

/// Right-hand side (f, v) on a vector space by quadrature of the given degree.
VectorXd assemble_load(const FESpace& V, const PointFunction& f, int degree);
/// Right-hand side (psi, curl v) on a Nedelec space.
VectorXd assemble_load_curl(const FESpace& V, const PointFunction& psi, int degree);

/// `row col value` lines, 0-based.
void write_coo(std::ostream& os, const SpMat& A);

/// Face quadrature on local face f of a tet: tet barycentrics, face
/// barycentrics in sorted global vertex order, and physical weights.
struct FacePoints {
    MatrixXd lambda;
    MatrixXd mu;
    VectorXd w;
};
FacePoints face_points(const TetMesh& mesh, int t, int f, int degree);

}  // namespace quadcurl
