#pragma once

#include "quadcurl/common.hpp"
#include "quadcurl/mesh.hpp"
#include "quadcurl/polynomial.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace quadcurl {

enum class Family { Lagrange, Nedelec, SigmaTn, Lambda };

const char* family_name(Family f);

enum class EntityKind { Vertex = 0, Edge = 1, Face = 2, Cell = 3 };

/// Owner of one local DoF: local entity number within the tet (vertex
/// 0..3, edge 0..5, face 0..3 opposite that vertex, cell 0) and the index
/// among that entity's DoFs. The index order is defined by the entity's
/// global (sorted) vertex order, so it agrees between neighbouring tets.
struct DofSlot {
    EntityKind kind;
    int entity;
    int index;
};

/// A tet seen through the mesh: global vertex ids and geometry.
struct TetView {
    std::array<int, 4> gid{0, 1, 2, 3};
    TetGeometry geo;
};

TetView tet_view(const TetMesh& mesh, int tet);
TetView tet_view(const std::array<Vec3, 4>& x);

/// Mean-value DoF functionals sampled at points:
/// dof_i(f) = sum_p sum_c W(i, rank*p + c) f_c(x_p).
/// Face points are generated from the face's sorted global vertices, so a
/// face functional is identical from both incident tets.
struct DofFunctionals {
    int rank = 1;
    MatrixXd lambda;          ///< npts x 4 tet barycentrics
    std::vector<Vec3> points;  ///< physical coordinates
    MatrixXd W;               ///< ndof x (npts * rank)
    std::vector<DofSlot> slots;

    int ndof() const { return static_cast<int>(W.rows()); }
    int npts() const { return static_cast<int>(points.size()); }
    /// Stack of the members of f at the points: (npts*rank) x nfun.
    MatrixXd sample(const PolyField& f) const;
};

/// Finite element on one tet: nodal basis dual to its DoF functionals.
struct LocalElement {
    Family family = Family::Lagrange;
    int k = 0, l = 0;
    PolyField basis;
    DofFunctionals dofs;
    double vandermonde_cond = 0.0;

    int ndof() const { return dofs.ndof(); }
    int rank() const { return basis.rank; }
};

/// DoF counts per vertex, edge, face and cell.
std::array<int, 4> dofs_per_entity(Family family, int k, int l);

/// extra_degree raises the quadrature degree of the moment functionals
/// (capped per domain); the functionals agree on the shape space, so the
/// nodal basis is unchanged. Used to interpolate smooth fields accurately.

/// Traceless tensors with tangential-normal face moments; shape space P_k(T;T).
LocalElement sigma_tn_local(int k, const TetView& tv, int extra_degree = 0);

/// Nedelec shape space x cross P_{k-1}(T;R^3) + grad P_{l+1}(T), l in {k-1, k}.
LocalElement nedelec_local(int k, int l, const TetView& tv, int extra_degree = 0);

/// Nodal Lagrange element of degree m on lattice points.
LocalElement lagrange_local(int m, const TetView& tv);

/// Tangential multiplier on one face: members t_a q, a = 1,2, q in P_{k-1}(F)
/// face monomials in sorted-vertex order.
struct FaceElement {
    int k = 1;
    FaceFrame frame;
    int ndof() const;
    /// (npts*3) x ndof values at face barycentric points mu (npts x 3).
    MatrixXd evaluate(const MatrixXd& mu) const;
};

FaceElement lambda_face_local(int k, const FaceFrame& frame);

/// Intrinsic traceless bases of one tet: vertex-wise basis
/// dev(grad lambda_i (x) t_il), dev(grad lambda_j (x) t_jl) and face-wise
/// dual basis t_mi (x) grad lambda_l, t_mj (x) grad lambda_l with
/// (i, j, l, m) = (l+2, l+3, l, l+1) mod 4.
struct TracelessFrame {
    std::array<Mat3, 8> basis;
    std::array<Mat3, 8> dual;
    /// P(a,b) = basis[a] : dual[b].
    Eigen::Matrix<double, 8, 8> pairing() const;
};

TracelessFrame traceless_frame(const TetGeometry& g);

/// lambda_l dev(n_i (x) t_il), lambda_l dev(n_j (x) t_jl) times P_{k-1}(T);
/// empty for k = 0. n_i is the unit normal of face i.
PolyField bubble_basis(int k, const TetGeometry& g);

/// Same span written with grad lambda_i in place of n_i.
PolyField bubble_basis_grad(int k, const TetGeometry& g);

/// mskw(w) = [[0,-w3,w2],[w3,0,-w1],[-w2,w1,0]]; mskw(w) n = w x n.
Mat3 mskw(const Vec3& w);

/// Local interpolation: coefficients of the nodal basis from sampled
/// values f(x_p) stacked as (npts*rank).
VectorXd interpolate_local(const LocalElement& el, const VectorXd& samples);

/// Random tet with diameter / inradius at most max_ratio (rejection sampling
/// of vertices in the unit cube).
std::array<Vec3, 4> random_shape_regular_tet(SplitMix64& rng, double max_ratio = 20.0);

/// Duality and unisolvence over random shape-regular tets.
struct ElementCertificate {
    int tets = 0;
    /// max |pairing - I_8| entrywise.
    double duality_error = 0.0;
    /// Largest Vandermonde condition per family and order, e.g. "nedelec(2,1)".
    std::vector<std::pair<std::string, double>> vandermonde;
    double max_trace = 0.0;

    double max_condition() const;
    bool pass(double duality_tol = 1e-13, double cond_tol = 1e8) const;
};

/// Lagrange m <= 4, Nedelec k <= 3, Sigma^tn k <= 2.
ElementCertificate certify_elements(int tets, std::uint64_t seed);

}  // namespace quadcurl
