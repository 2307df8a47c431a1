#pragma once

#include "quadcurl/assembly.hpp"
#include "quadcurl/linalg.hpp"
#include "quadcurl/manufactured.hpp"
#include "quadcurl/mesh.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace quadcurl {

/// How <f, v> enters the discrete problem.
enum class RhsMode {
    L2,        ///< (f, v) by quadrature
    CurlPsi,   ///< (psi, curl v) with curl psi = f; exactly orthogonal to gradients
};

struct SolveOptions {
    RhsMode rhs = RhsMode::CurlPsi;
    int quad_degree = 10;
    double tol_solve = 1e-10;
    /// Zero right-hand side (well-posedness checks).
    bool zero_rhs = false;
};

/// The discrete spaces of the quad-curl problem for one (k, l) on one mesh.
struct Spaces {
    const TetMesh* mesh = nullptr;
    int k = 1, l = 0;
    std::shared_ptr<FESpace> sigma;   ///< broken Sigma^tn(k - 1)
    std::shared_ptr<FESpace> u;       ///< Nedelec(k, l), zero tangential trace
    std::shared_ptr<FESpace> phi;     ///< Lagrange(l + 1), zero trace
    std::shared_ptr<FESpace> lambda;  ///< multiplier Lambda(k), interior faces

    /// Throws InvalidArgument unless k >= 1 and l in {k-1, k}.
    static Spaces build(const TetMesh& mesh, int k, int l);
};

struct QuadCurlSolution {
    Spaces spaces;
    FieldCoefficients sigma;   ///< in the broken space
    FieldCoefficients u;
    FieldCoefficients phi;
    FieldCoefficients lambda;  ///< empty coefficients for the mixed method
    bool hybrid = false;
    SolveInfo info;
    /// u + lambda (+ phi) unknowns of the condensed system, or all unknowns
    /// of the monolithic one.
    long dofs = 0;
};

QuadCurlSolution solve_mixed(const TetMesh& mesh, int k, int l, const SolveOptions& opt = {});
QuadCurlSolution solve_hybrid(const TetMesh& mesh, int k, int l, const SolveOptions& opt = {});

/// Condensed hybrid system (u, lambda, phi) of one mesh. Assembled on
/// construction, factored on the first nonzero solve and reused after that.
class HybridSystem {
public:
    HybridSystem(const TetMesh& mesh, int k, int l);
    ~HybridSystem();
    HybridSystem(const HybridSystem&) = delete;
    HybridSystem& operator=(const HybridSystem&) = delete;

    /// F is the load functional on V; the solution satisfies
    /// B M^{-1} B^T u - G phi = F, G^T u = 0.
    QuadCurlSolution solve(const VectorXd& F, double tol = 1e-10) const;
    const Spaces& spaces() const { return spaces_; }
    long size() const { return A_.rows(); }

private:
    Spaces spaces_;
    std::vector<MatrixXd> X_;
    SpMat A_;
    mutable std::unique_ptr<Factorization> fac_;
};

/// Largest blockwise relative difference between two solutions on the same
/// spaces (sigma, u, phi). phi vanishes for loads orthogonal to gradients, so
/// its difference is taken relative to max(|phi|, |u|).
struct BlockDifference {
    double sigma = 0.0, u = 0.0, phi = 0.0;
    double max() const;
};
BlockDifference compare(const QuadCurlSolution& a, const QuadCurlSolution& b);

/// Per-tet polynomial field (one member per tet).
struct BrokenField {
    const TetMesh* mesh = nullptr;
    std::vector<PolyField> local;

    Vec3 evaluate(int t, const std::array<double, 4>& lambda) const;
};

/// Local post-processing into P_k + x cross P_k: lowest-order edge moments
/// of u_h, grad curl moments against grad curl P_{k+1} matched to sigma_h,
/// and moments against grad P_{k+1} (vanishing at vertices) matched to u_h.
/// Throws ElementConstruction naming the tet when a local system is singular.
BrokenField postprocess(const QuadCurlSolution& sol);

/// Post-processing on one tet from local data: the Nedelec element and its
/// coefficients, the Sigma element and its coefficients.
PolyField postprocess_local(const TetGeometry& g, int k, const LocalElement& ue, const VectorXd& uc,
                            const LocalElement& se, const VectorXd& sc);

/// Local post-processing space P_k + x cross P_k on a tet (independent members).
PolyField postprocess_space(const TetGeometry& g, int k);

struct ErrorRow {
    int level = 0;
    double h = 0.0;
    long dofs_u = 0, dofs_lambda = 0, dofs_phi = 0;
    double err_sigma = 0.0;
    double err_u = 0.0;
    double err_curlu = 0.0;
    /// Elementwise ||grad curl (u - u_h)|| without face jumps.
    double err_gradcurlu_broken = 0.0;
    /// Same plus sum_F h_F^{-1} ||[curl u_h]||_F^2 (mesh-dependent norm).
    double err_curlu_1h = 0.0;
    double err_supercurl = 0.0;
    double err_curlu_star = 0.0;
    double err_gradcurlu_star = 0.0;
    double err_multiplier = 0.0;
};

ErrorRow compute_errors(const QuadCurlSolution& sol, const BrokenField* ustar, const ManufacturedSolution& exact,
                        int quad_degree = 10);

/// Pointwise structural checks on a solution.
struct StructuralReport {
    double phi_relative = 0.0;    ///< ||phi_h|| / ||u_h|| (L2)
    double trace_max = 0.0;       ///< max |tr sigma_h| at quadrature points
    double tn_jump_max = 0.0;     ///< max over interior faces of ||[n x sigma_h n]||_F
    double c_residual = 0.0;      ///< ||C sigma_h||_inf (hybrid only)
    double galerkin_residual = 0.0;
};
StructuralReport structural_checks(const QuadCurlSolution& sol);

struct StudyOptions {
    int levels = 4;
    int k = 1, l = 0;
    int n0 = 2;
    double amplitude = 0.2;
    std::uint64_t seed = 42;
    bool hybrid = true;
    SolveOptions solve;
};

struct ConvergenceRecord {
    int k = 1, l = 0;
    std::vector<ErrorRow> rows;
    std::vector<StructuralReport> checks;

    /// log2(e_i / e_{i+1}) of one error column between consecutive levels.
    std::vector<double> orders(double ErrorRow::*column) const;
    /// Order at the finest pair.
    double finest_order(double ErrorRow::*column) const;
};

/// Perturbed n0 cube mesh refined uniformly levels - 1 times.
std::vector<TetMesh> study_meshes(int levels, int n0, double amplitude, std::uint64_t seed);

/// Solves on each level, post-processes and records errors. progress, if
/// set, is called after every level.
ConvergenceRecord convergence_study(const StudyOptions& opt,
                                    const std::function<void(const ErrorRow&)>& progress = {});

/// Observed orders of ||curl(I_h u - u_h)||.
std::vector<double> superconvergence_check(const StudyOptions& opt);

}  // namespace quadcurl
