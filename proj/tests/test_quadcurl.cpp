#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "quadcurl/quadcurl.hpp"
#include "quadcurl/report.hpp"

#include <cmath>
#include <sstream>

using namespace quadcurl;

namespace {

TetMesh mesh2() { return perturb(build_cube_mesh(2), 0.2, 42); }

// Values of one member of a vector PolyField at barycentric points.
MatrixXd values(const PolyField& f, const VectorXd& c, const MatrixXd& lambda) { return tabulate(f, lambda) * c; }

}  // namespace

TEST_CASE("spaces reject invalid pairs") {
    const TetMesh m = build_cube_mesh(1);
    CHECK_THROWS_AS(Spaces::build(m, 1, 3), InvalidArgument);
    CHECK_THROWS_AS(Spaces::build(m, 0, 0), InvalidArgument);
    CHECK_THROWS_AS(solve_hybrid(m, 2, 0), InvalidArgument);
    const Spaces s = Spaces::build(m, 1, 1);
    CHECK(s.u->dim() == FESpace(m, Family::Nedelec, 1, 1, true).dim());
}

TEST_CASE("mixed and hybrid solutions coincide") {
    const TetMesh m = mesh2();
    for (int l : {0, 1}) {
        const QuadCurlSolution a = solve_mixed(m, 1, l), b = solve_hybrid(m, 1, l);
        CHECK(b.hybrid);
        CHECK_FALSE(a.hybrid);
        CHECK(compare(a, b).max() <= 1e-9);
        CHECK(a.info.residual <= 1e-10);
        CHECK(b.info.residual <= 1e-10);
        const StructuralReport r = structural_checks(b);
        CHECK(r.phi_relative <= 1e-8);
        CHECK(r.trace_max <= 1e-12);
        CHECK(r.tn_jump_max <= 1e-9);
        CHECK(r.c_residual <= 1e-9);
    }
    // one k = 2 pair
    const QuadCurlSolution a = solve_mixed(m, 2, 1), b = solve_hybrid(m, 2, 1);
    CHECK(compare(a, b).max() <= 1e-9);
}

TEST_CASE("hybrid system reuse") {
    const TetMesh m = mesh2();
    const HybridSystem sys(m, 1, 0);
    SolveOptions opt;
    const QuadCurlSolution ref = solve_hybrid(m, 1, 0, opt);
    const VectorXd F = assemble_load_curl(
        *sys.spaces().u, [](const Vec3& x, double* out) { Vec3::Map(out) = ManufacturedSolution{}.psi(x); },
        opt.quad_degree);
    const QuadCurlSolution s1 = sys.solve(F), s2 = sys.solve(2.0 * F);
    CHECK(compare(ref, s1).max() < 1e-12);
    CHECK((s2.u.coeffs - 2.0 * s1.u.coeffs).norm() < 1e-10 * s1.u.coeffs.norm());
    CHECK_THROWS_AS(sys.solve(VectorXd::Zero(3)), InvalidArgument);
}

TEST_CASE("zero load gives the zero solution") {
    const TetMesh m = mesh2();
    SolveOptions opt;
    opt.zero_rhs = true;
    for (int l : {0, 1}) {
        const QuadCurlSolution s = solve_hybrid(m, 1, l, opt);
        CHECK(s.u.coeffs.norm() == 0.0);
        CHECK(s.sigma.coeffs.norm() == 0.0);
        CHECK(s.info.backend == "none");
    }
}

TEST_CASE("solutions are deterministic") {
    const TetMesh m = mesh2();
    const QuadCurlSolution a = solve_hybrid(m, 1, 1), b = solve_hybrid(m, 1, 1);
    CHECK((a.u.coeffs - b.u.coeffs).norm() == 0.0);
    CHECK((a.sigma.coeffs - b.sigma.coeffs).norm() == 0.0);
}

TEST_CASE("L2 and curl loads give close solutions") {
    const TetMesh m = perturb(build_cube_mesh(4), 0.2, 42);
    SolveOptions l2;
    l2.rhs = RhsMode::L2;
    const QuadCurlSolution a = solve_hybrid(m, 1, 0, l2), b = solve_hybrid(m, 1, 0);
    CHECK(compare(a, b).u < 1e-3);
    CHECK(structural_checks(a).phi_relative < 1e-5);
    CHECK(structural_checks(b).phi_relative < 1e-12);
}

TEST_CASE("post-processing reproduces fields of the post-processing space") {
    // k = 2: a quadratic u lies in Nedelec(2,2) and P_2 + x cross P_2, and
    // grad curl u is a constant traceless tensor in Sigma^tn_1.
    auto u = [](const Vec3& x) {
        return Vec3(x[1] * x[2] + x[0], x[0] * x[0] - x[2], x[1] * x[1] + 2 * x[0] * x[1]);
    };
    auto gcu = [](const Vec3&) {
        // curl u = (2x + 2y + 1, -y, 2x - z)
        Mat3 s;
        s << 2, 2, 0, 0, -1, 0, 2, 0, -1;
        return s;
    };
    SplitMix64 rng(4);
    for (int trial = 0; trial < 5; ++trial) {
        const TetView tv = tet_view(random_shape_regular_tet(rng));
        const LocalElement ue = nedelec_local(2, 2, tv), se = sigma_tn_local(1, tv);
        VectorXd su(ue.dofs.npts() * 3), ss(se.dofs.npts() * 9);
        for (int p = 0; p < ue.dofs.npts(); ++p) su.segment<3>(3 * p) = u(ue.dofs.points[p]);
        for (int p = 0; p < se.dofs.npts(); ++p) {
            const Mat3 s = gcu(se.dofs.points[p]);
            for (int r = 0; r < 3; ++r)
                for (int c = 0; c < 3; ++c) ss[9 * p + 3 * r + c] = s(r, c);
        }
        const VectorXd uc = interpolate_local(ue, su), sc = interpolate_local(se, ss);
        const PolyField star = postprocess_local(tv.geo, 2, ue, uc, se, sc);
        REQUIRE(star.nfun() == 1);
        MatrixXd lam(1, 4);
        lam << 0.1, 0.2, 0.3, 0.4;
        const MatrixXd v = values(star, VectorXd::Ones(1), lam);
        const Vec3 want = u(tv.geo.point({0.1, 0.2, 0.3, 0.4}));
        CHECK((Vec3(v(0, 0), v(1, 0), v(2, 0)) - want).norm() < 1e-9 * (1.0 + want.norm()));
    }
}

TEST_CASE("post-processing space dimension") {
    SplitMix64 rng(1);
    const TetGeometry g = tet_geometry(random_shape_regular_tet(rng));
    // 3 dim P_k + 3 dim H_k - dim H_{k-1}, H_j the homogeneous polynomials of degree j
    CHECK(postprocess_space(g, 1).nfun() == 20);
    CHECK(postprocess_space(g, 2).nfun() == 45);
}

TEST_CASE("errors and orders on a short study") {
    StudyOptions opt;
    opt.levels = 2;
    const ConvergenceRecord rec = convergence_study(opt);
    REQUIRE(rec.rows.size() == 2);
    for (const ErrorRow& r : rec.rows) {
        CHECK(r.err_sigma > 0.0);
        CHECK(r.err_u > 0.0);
        CHECK(std::isfinite(r.err_multiplier));
    }
    CHECK(rec.rows[1].h < rec.rows[0].h);
    CHECK(rec.rows[1].err_u < rec.rows[0].err_u);
    CHECK(rec.orders(&ErrorRow::err_u).size() == 1);
    CHECK(rec.finest_order(&ErrorRow::err_u) == doctest::Approx(rec.orders(&ErrorRow::err_u)[0]));
    // k = 1: post-processed grad curl error equals the sigma error
    for (const ErrorRow& r : rec.rows) CHECK(r.err_gradcurlu_star == doctest::Approx(r.err_sigma).epsilon(1e-8));

    std::ostringstream csv, md;
    write_csv(csv, rec);
    write_markdown(md, rec);
    CHECK(csv.str().rfind("level,h,dofs_u,dofs_lambda,dofs_phi,err_sigma", 0) == 0);
    CHECK(md.str().find('|') != std::string::npos);
    CHECK(format_sci(123456.789) == "1.23457E+05");
}

TEST_CASE("study meshes") {
    const auto ms = study_meshes(3, 2, 0.2, 42);
    REQUIRE(ms.size() == 3);
    CHECK(ms[0].num_tets() == 48);
    CHECK(ms[2].num_tets() == 3072);
    CHECK_THROWS_AS(study_meshes(0, 2, 0.2, 42), InvalidArgument);
}
