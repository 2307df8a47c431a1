// Acceptance run: one PASS/FAIL line per criterion, tolerances fixed below.

#include "quadcurl/complexcheck.hpp"
#include "quadcurl/elements.hpp"
#include "quadcurl/quadcurl.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

using namespace quadcurl;

namespace {

constexpr std::uint64_t kSeed = 42;
constexpr double kAmplitude = 0.2;

// Element certification
constexpr int kRandomTets = 100;
constexpr double kDualityTol = 1e-13;
constexpr double kConditionTol = 1e8;
// Complex and commuting identities
constexpr double kRankTol = 1e-8;
constexpr int kTrigSamples = 20;
constexpr double kPolyTol = 1e-12, kTrigTol = 1e-9;
// Mixed and hybrid
constexpr double kEquivalenceTol = 1e-9;
// Orders at the finest pair
constexpr double kSigmaBand = 0.25;
constexpr double kCurlBand = 0.3;
constexpr double kGradCurlLo = -0.2, kGradCurlHi = 0.3;
constexpr double kUBand = 0.3;
constexpr double kSuperMin = 1.7;
constexpr double kStarCurlMin = 1.7;
constexpr double kStarGradLo = 0.75, kStarGradHi = 1.25;
constexpr double kMultiplierMin = 0.75;
// Structural invariants
constexpr double kPhiTol = 1e-8;
constexpr double kTraceTol = 1e-12;
constexpr double kJumpTol = 1e-9;
constexpr double kFdTol = 1e-5;
constexpr int kFdPoints = 20;
// l = 0 and l = 1 share sigma_h and curl u_h; agreement required before reuse.
constexpr double kShareTol = 1e-8;
// Poincare ratios
constexpr double kRatioLo = 0.5, kRatioHi = 2.0;
constexpr int kDensePoincareCap = 1000;
// Runtime budgets in seconds
constexpr double kBudget1 = 10, kBudget2 = 120, kBudget3 = 120, kBudget4 = 60, kBudget5 = 1200, kBudget9 = 300;

int failures = 0;

using Clock = std::chrono::steady_clock;
double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

void verdict(int id, bool ok, const std::string& what) {
    std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", id, what.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

void info(const std::string& s) {
    std::printf("  %s\n", s.c_str());
    std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::string timing(double t, double budget) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.1f s (budget %.0f s)", t, budget);
    return buf;
}

double order(double coarse, double fine) { return std::log2(coarse / fine); }

ConvergenceRecord run_study(int l, int levels) {
    StudyOptions opt;
    opt.k = 1;
    opt.l = l;
    opt.levels = levels;
    opt.n0 = 2;
    opt.amplitude = kAmplitude;
    opt.seed = kSeed;
    return convergence_study(opt, [l](const ErrorRow& r) {
        info("l=" + std::to_string(l) + " level " + std::to_string(r.level) + ": " +
             std::to_string(r.dofs_u + r.dofs_lambda + r.dofs_phi) + " unknowns");
    });
}

void criterion1() {
    const auto t0 = Clock::now();
    const ElementCertificate c = certify_elements(kRandomTets, kSeed);
    const double t = since(t0);
    info("duality " + fmt("%.3e", c.duality_error) + ", max Vandermonde condition " + fmt("%.3e", c.max_condition()) +
         ", max |tr| " + fmt("%.3e", c.max_trace));
    verdict(1, c.pass(kDualityTol, kConditionTol) && c.tets == kRandomTets && t < kBudget1,
            "element duality and unisolvence on 100 random tets, " + timing(t, kBudget1));
}

void criterion2() {
    const auto t0 = Clock::now();
    const ComplexReport r1 = verify_complex(build_cube_mesh(1), 1, 0, "n=1", kRankTol);
    bool ok = r1.rank_b == 1 && r1.nullity_b == 35 && r1.rank_devcurl == 35 && r1.pass();
    info("n=1 (1,0): rank B " + std::to_string(r1.rank_b) + ", nullity B " + std::to_string(r1.nullity_b) +
         ", rank D " + std::to_string(r1.rank_devcurl));
    const TetMesh m2 = perturb(build_cube_mesh(2), kAmplitude, kSeed);
    for (int l : {0, 1}) {
        const ComplexReport r = verify_complex(m2, 1, l, "n=2", kRankTol);
        double worst = 0.0;
        for (const auto& id : r.identities) worst = std::max(worst, id.residual / std::max(id.threshold, 1e-300));
        info("n=2 (1," + std::to_string(l) + "): " + std::to_string(r.identities.size()) +
             " identities, worst residual/threshold " + fmt("%.2e", worst));
        ok = ok && r.pass();
    }
    const double t = since(t0);
    verdict(2, ok && t < kBudget2, "complex ranks and exactness, " + timing(t, kBudget2));
}

void criterion3() {
    const auto t0 = Clock::now();
    bool ok = true;
    for (int n : {1, 2}) {
        const TetMesh m = perturb(build_cube_mesh(n), n == 1 ? 0.0 : kAmplitude, kSeed);
        for (int l : {0, 1}) {
            const CommutingReport c = verify_commuting(m, 1, l, kTrigSamples, kSeed);
            double worst_poly = 0.0, worst_trig = 0.0;
            for (const auto& id : c.identities) {
                const bool trig = id.name.find("trigonometric") != std::string::npos;
                (trig ? worst_trig : worst_poly) = std::max(trig ? worst_trig : worst_poly, id.residual);
                ok = ok && id.pass;
            }
            ok = ok && worst_poly <= kPolyTol && worst_trig <= kTrigTol;
            info("n=" + std::to_string(n) + " (1," + std::to_string(l) + "): polynomial " + fmt("%.2e", worst_poly) +
                 ", trigonometric " + fmt("%.2e", worst_trig));
        }
    }
    const double t = since(t0);
    verdict(3, ok && t < kBudget3, "commuting identities, " + timing(t, kBudget3));
}

void criterion4() {
    const auto t0 = Clock::now();
    const TetMesh m = perturb(build_cube_mesh(2), kAmplitude, kSeed);
    bool ok = true;
    for (int l : {0, 1}) {
        const BlockDifference d = compare(solve_mixed(m, 1, l), solve_hybrid(m, 1, l));
        info("(1," + std::to_string(l) + "): sigma " + fmt("%.2e", d.sigma) + ", u " + fmt("%.2e", d.u) + ", phi " +
             fmt("%.2e", d.phi));
        ok = ok && d.max() <= kEquivalenceTol;
    }
    const double t = since(t0);
    verdict(4, ok && t < kBudget4, "mixed and hybrid solutions coincide, " + timing(t, kBudget4));
}

struct Studies {
    ConvergenceRecord l0, l1;
    double seconds = 0.0;
};

Studies criterion5() {
    const auto t0 = Clock::now();
    Studies s;
    s.l0 = run_study(0, 4);
    // The fourth l = 1 level does not fit in memory here (direct factorization).
    s.l1 = run_study(1, 3);
    s.seconds = since(t0);

    const auto& a = s.l0.rows;
    const auto& b = s.l1.rows;
    const double o_sigma0 = s.l0.finest_order(&ErrorRow::err_sigma);
    const double o_curl0 = s.l0.finest_order(&ErrorRow::err_curlu);
    const double o_gc0 = s.l0.finest_order(&ErrorRow::err_gradcurlu_broken);
    const double o_u0 = s.l0.finest_order(&ErrorRow::err_u);
    info("l=0: sigma " + fmt("%.3f", o_sigma0) + ", curl u " + fmt("%.3f", o_curl0) + ", grad curl broken " +
         fmt("%.3f", o_gc0) + ", u " + fmt("%.3f", o_u0) + " (levels 2-3)");
    bool ok0 = std::abs(o_sigma0 - 1.0) <= kSigmaBand && std::abs(o_curl0 - 1.0) <= kCurlBand &&
               o_gc0 >= kGradCurlLo && o_gc0 <= kGradCurlHi && std::abs(o_u0 - 1.0) <= kUBand;

    // sigma_h and curl u_h do not depend on l; check on the shared levels.
    double share = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i)
        for (double ErrorRow::*c : {&ErrorRow::err_sigma, &ErrorRow::err_curlu, &ErrorRow::err_gradcurlu_broken})
            share = std::max(share, std::abs(a[i].*c - b[i].*c) / (a[i].*c));
    const double o_u1 = s.l1.finest_order(&ErrorRow::err_u);
    const double o_sigma1 = order(b[2].err_sigma, a[3].err_sigma);
    const double o_curl1 = order(b[2].err_curlu, a[3].err_curlu);
    const double o_gc1 = order(b[2].err_gradcurlu_broken, a[3].err_gradcurlu_broken);
    info("l=1: u " + fmt("%.3f", o_u1) + " (levels 1-2); l=0 and l=1 sigma, curl u, grad curl errors agree to " +
         fmt("%.1e", share) + " on levels 0-2");
    info("l=1: sigma " + fmt("%.3f", o_sigma1) + ", curl u " + fmt("%.3f", o_curl1) + ", grad curl broken " +
         fmt("%.3f", o_gc1) + " (level 3 errors of these l-independent fields taken from l=0)");
    const bool ok1 = share <= kShareTol && std::abs(o_u1 - 2.0) <= kUBand && std::abs(o_sigma1 - 1.0) <= kSigmaBand &&
                     std::abs(o_curl1 - 1.0) <= kCurlBand && o_gc1 >= kGradCurlLo && o_gc1 <= kGradCurlHi;
    verdict(5, ok0 && ok1 && s.seconds < kBudget5, "convergence orders k=1, " + timing(s.seconds, kBudget5));
    return s;
}

void criterion6(const Studies& s) {
    const double o = s.l0.finest_order(&ErrorRow::err_supercurl);
    info("l=0: " + fmt("%.3f", o) + "; l=1 (levels 1-2): " + fmt("%.3f", s.l1.finest_order(&ErrorRow::err_supercurl)));
    verdict(6, o >= kSuperMin, "superconvergence of curl(I_h u - u_h), order " + fmt("%.3f", o));
}

void criterion7(const Studies& s) {
    const double oc = s.l0.finest_order(&ErrorRow::err_curlu_star);
    const double og = s.l0.finest_order(&ErrorRow::err_gradcurlu_star);
    verdict(7, oc >= kStarCurlMin && og >= kStarGradLo && og <= kStarGradHi,
            "post-processing: curl order " + fmt("%.3f", oc) + ", broken grad curl order " + fmt("%.3f", og));
}

void criterion8(const Studies& s) {
    const double o = s.l0.finest_order(&ErrorRow::err_multiplier);
    verdict(8, o >= kMultiplierMin, "multiplier error order " + fmt("%.3f", o));
}

void criterion9(const Studies& s) {
    const auto t0 = Clock::now();
    bool ok = true;
    double phi = 0.0, tr = 0.0, jump = 0.0;
    for (const auto* rec : {&s.l0, &s.l1})
        for (const auto& c : rec->checks) {
            phi = std::max(phi, c.phi_relative);
            tr = std::max(tr, c.trace_max);
            jump = std::max(jump, c.tn_jump_max);
        }
    ok = phi <= kPhiTol && tr <= kTraceTol && jump <= kJumpTol;
    info("over all solves: phi_h " + fmt("%.2e", phi) + ", tr sigma_h " + fmt("%.2e", tr) + ", tn jump " +
         fmt("%.2e", jump));

    int meshes = 0;
    auto euler_ok = [&](const TetMesh& m) {
        const EntityCounts c = entity_counts(m);
        ++meshes;
        return c.euler() == 1 && c.interior_euler() == -1;
    };
    for (int n = 1; n <= 4; ++n) ok = euler_ok(build_cube_mesh(n)) && ok;
    for (const TetMesh& m : study_meshes(4, 2, kAmplitude, kSeed)) ok = euler_ok(m) && ok;
    info("Euler identities on " + std::to_string(meshes) + " meshes");

    const ManufacturedSolution ms;
    SplitMix64 rng(kSeed);
    double fd = 0.0;
    for (int i = 0; i < kFdPoints; ++i) {
        const Vec3 x(rng.uniform(0.05, 0.95), rng.uniform(0.05, 0.95), rng.uniform(0.05, 0.95));
        fd = std::max(fd, (ms.f_finite_difference(x) - ms.f(x)).norm() / ms.f(x).norm());
    }
    ok = ok && fd <= kFdTol;
    info("manufactured f against finite differences: " + fmt("%.2e", fd));
    const double t = since(t0);
    verdict(9, ok && t < kBudget9, "structural invariants, " + timing(t, kBudget9) + " beyond the studies");
}

void criterion10() {
    const std::vector<TetMesh> all = study_meshes(4, 2, kAmplitude, kSeed);
    // Dense monitors (inf-sup, norm equivalence) only on the two coarse levels.
    const std::vector<PoincareLevel> p = poincare_monitor(all, 1, 0, kSeed, 20, kDensePoincareCap);
    // The coarsest 2x2x2 mesh is pre-asymptotic; the three finer levels are monitored.
    const PoincareLevel& c = p[0];
    info("48 tets (not monitored): curl " + fmt("%.4f", c.curl_constant) + ", grad curl " +
         fmt("%.4f", c.gradcurl_constant) + ", inf-sup " + fmt("%.4f", c.infsup));
    bool ok = true;
    for (std::size_t i = 1; i < p.size(); ++i) {
        info(std::to_string(p[i].tets) + " tets: curl " + fmt("%.4f", p[i].curl_constant) + ", grad curl " +
             fmt("%.4f", p[i].gradcurl_constant) + (p[i].dense ? ", inf-sup " + fmt("%.4f", p[i].infsup) : ""));
        ok = ok && p[i].curl_constant > 0.0 && p[i].gradcurl_constant > 0.0;
        if (i > 1) {
            const double rc = p[i].curl_constant / p[i - 1].curl_constant;
            const double rg = p[i].gradcurl_constant / p[i - 1].gradcurl_constant;
            info("ratios: curl " + fmt("%.3f", rc) + ", grad curl " + fmt("%.3f", rg));
            ok = ok && rc >= kRatioLo && rc <= kRatioHi && rg >= kRatioLo && rg <= kRatioHi;
        }
    }
    verdict(10, ok, "discrete Poincare constants stable over 384, 3072, 24576 tets");
}

}  // namespace

int main() {
    const auto t0 = Clock::now();
    try {
        criterion1();
        criterion2();
        criterion3();
        criterion4();
        const Studies s = criterion5();
        criterion6(s);
        criterion7(s);
        criterion8(s);
        criterion9(s);
        criterion10();
    } catch (const std::exception& e) {
        std::printf("[FAIL] aborted: %s\n", e.what());
        return 1;
    }
    std::printf("%d of 10 criteria failed, total %.0f s\n", failures, since(t0));
    return failures == 0 ? 0 : 1;
}
