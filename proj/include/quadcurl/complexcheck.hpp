#pragma once

#include "quadcurl/assembly.hpp"
#include "quadcurl/mesh.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace quadcurl {

struct IdentityResult {
    std::string name;
    double residual = 0.0;
    double threshold = 0.0;
    bool pass = false;
};

/// Ranks and exactness identities of the discrete curl div complex
///   R^3 x {0} -> V^grad_{k+1}(R^3) x R -> V^curl_k(M) -> Sigma^tn_{k-1}
///             -> V0^curl_(k,l) -> V0^grad_{l+1} -> 0.
struct ComplexReport {
    std::string label;
    int k = 1, l = 0;
    int dim_grad = 0;       ///< 3 dim V^grad_{k+1} + 1
    int dim_curl_mat = 0;   ///< 3 dim V^curl_k
    int dim_sigma = 0;
    int dim_curl0 = 0;
    int dim_grad0 = 0;
    int rank_incl = 0;      ///< (grad, mskw x)
    int rank_devcurl = 0;
    int rank_b = 0;
    int nullity_b = 0;
    int rank_gt = 0;
    int dim_kc = 0;
    std::vector<IdentityResult> identities;

    bool pass() const;
};

/// Throws SizeCap when dim Sigma exceeds 5000 (dense SVD regime).
ComplexReport verify_complex(const TetMesh& mesh, int k, int l, const std::string& label = "",
                             double tol_rank = 1e-8);

/// Commuting identities of the interpolations with the weak operators:
///   interpolation-tn: B I^tn tau = <(curl div)_w tau, .> on V0^curl,
///   interpolation-curl: <(curl div)_w tau_h, v> = (B tau_h, I^curl v),
///   mskw: B I^tn(mskw u_h) = -(curl u_h, curl .) for u_h in K_h^c.
/// Polynomial samples are checked against 1e-12, trigonometric ones
/// against 1e-9 (relative to the magnitude of the summed terms).
struct CommutingReport {
    std::vector<IdentityResult> identities;
    bool pass() const;
};
CommutingReport verify_commuting(const TetMesh& mesh, int k, int l, int samples, std::uint64_t seed);

/// Discrete Poincare constants on K_h^c and related monitors for one mesh.
struct PoincareLevel {
    int tets = 0;
    int dim_kc = 0;
    /// min (curl v, curl v) / (v, v)
    double curl_constant = 0.0;
    /// min ||(grad curl)_h v||^2 / ||v||^2_{H(curl)}
    double gradcurl_constant = 0.0;
    /// Range of ||(grad curl)_h v|| / |curl v|_{1,h} over random v.
    double equiv_min = 0.0, equiv_max = 0.0;
    /// Smallest singular value of b_h with (||tau||^2 + |psi|_1^2)^{1/2} on
    /// the left and (||v||_{H(curl)}^2 + |curl v|_{1,h}^2)^{1/2} on the right
    /// (observational).
    double infsup = 0.0;
    /// False when the level exceeded the dense regime: the two constants came
    /// from shift-invert Lanczos and the monitors above are NaN.
    bool dense = true;
};
/// Levels with dim V <= dense_cap (at most 5000) are treated densely,
/// larger ones by ARPACK.
std::vector<PoincareLevel> poincare_monitor(const std::vector<TetMesh>& meshes, int k, int l, std::uint64_t seed,
                                            int equivalence_samples = 50, int dense_cap = 5000);

/// Smallest eigenvalue of (curl, curl) against the mass on span(K_h^c, grad psi)
/// for one gradient direction psi; zero up to roundoff (sanity check).
double curl_constant_with_gradient(const TetMesh& mesh, int k, int l);

/// |curl v|_{1,h}^2 = sum_T ||grad curl v||_T^2 + sum_F h_F^{-1} ||[curl v]||_F^2.
SpMat assemble_curl_broken_h1(const FESpace& V);

void write_complex_report(std::ostream& os, const ComplexReport& r);
/// CSV lines: identity,residual,threshold,pass.
void write_identities_csv(std::ostream& os, const std::vector<IdentityResult>& ids, bool header = true);

}  // namespace quadcurl
