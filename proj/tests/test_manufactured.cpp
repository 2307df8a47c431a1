#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "quadcurl/manufactured.hpp"
#include "quadcurl/mesh.hpp"

#include <cmath>

using namespace quadcurl;

namespace {

// Frozen from tests/oracles/manufactured_oracle.py (sympy, 30 digits).
struct Oracle {
    Vec3 x;
    double u[3], curlu[3], sigma[9], f[3], psi[3];
};

const Oracle kOracle[] = {
    {Vec3(0.3, 0.6, 0.45),
     {-0.65514183574484897, 0.65514183574484897, 4.3492712440207146},
     {13.390966283255814, 2.4157078386498485, 2.4798468163115084},
     {152.49480696650434, -198.04431765438153, 46.501983483122629, 258.61269301828713, -105.77430302375869,
      30.118796140059427, -12.656708277587672, -29.039895620650874, -46.720503942745651},
     {-6016.0953563576704, 6016.0953563576704, 60376.093749553533},
     {1506.2008416340091, 1506.2008416340091, 0.0}},
    {Vec3(0.1, 0.25, 0.8),
     {0.027483259678120646, -0.027483259678120646, 0.041486679919187162},
     {0.341517470540463, -0.72140617123955353, -1.0562163514394658},
     {3.7148682065752436, 1.1561313412963397, -7.5706375015367584, -1.710109806933978, -10.438278867856082,
      6.2177078834633495, -22.115456571798262, -8.327111186798156, 6.7234106612808393},
     {-1620.2373378179188, 1620.2373378179188, 991.67582304986536},
     {122.79200124959677, 122.79200124959677, 0.0}},
    {Vec3(0.71, 0.33, 0.52),
     {0.18544087701130976, -0.18544087701130976, -4.0294597241249503},
     {-0.77437518579994002, -5.4399764941836803, 0.32207538639675193},
     {-77.005447883464825, 179.9407012344742, -6.890719415791164, -187.4646879299865, 61.050193707901769,
      -4.1242195369372228, 6.4397454672365368, 9.2062453460904781, 15.955254175563063},
     {881.69020987418833, -881.69020987418833, -41316.982329312894},
     {192.26732379912667, 192.26732379912667, 0.0}},
};

void check_close(const double* got, const double* want, int n, double scale) {
    for (int i = 0; i < n; ++i) CHECK(std::abs(got[i] - want[i]) <= 1e-12 * scale);
}

}  // namespace

TEST_CASE("manufactured fields match the symbolic oracle") {
    const ManufacturedSolution ms;
    for (const Oracle& o : kOracle) {
        const Vec3 u = ms.u(o.x), cu = ms.curl_u(o.x), f = ms.f(o.x), psi = ms.psi(o.x);
        Eigen::Matrix<double, 3, 3, Eigen::RowMajor> S = ms.sigma(o.x);
        check_close(u.data(), o.u, 3, 10.0);
        check_close(cu.data(), o.curlu, 3, 100.0);
        check_close(S.data(), o.sigma, 9, 1e3);
        check_close(f.data(), o.f, 3, 1e5);
        check_close(psi.data(), o.psi, 3, 1e4);
    }
}

TEST_CASE("finite-difference oracle for f") {
    const ManufacturedSolution ms;
    for (const Oracle& o : kOracle) {
        const Vec3 fd = ms.f_finite_difference(o.x);
        CHECK((fd - ms.f(o.x)).norm() <= 1e-5 * ms.f(o.x).norm());
    }
}

TEST_CASE("structure of the manufactured solution") {
    const ManufacturedSolution ms;
    SplitMix64 rng(3);
    const double h = 1e-5;
    for (int i = 0; i < 10; ++i) {
        const Vec3 x(rng.uniform(0.05, 0.95), rng.uniform(0.05, 0.95), rng.uniform(0.05, 0.95));
        // sigma is traceless since div curl = 0, and div u = 0
        CHECK(std::abs(ms.sigma(x).trace()) < 1e-10 * ms.sigma(x).norm());
        double div = 0.0;
        for (int d = 0; d < 3; ++d) {
            Vec3 p = x, m = x;
            p[d] += h;
            m[d] -= h;
            div += (ms.u(p)[d] - ms.u(m)[d]) / (2 * h);
        }
        CHECK(std::abs(div) < 1e-6 * (1.0 + ms.u(x).norm()));
        // curl psi = f, by central differences of psi
        Mat3 dpsi;
        for (int d = 0; d < 3; ++d) {
            Vec3 p = x, m = x;
            p[d] += h;
            m[d] -= h;
            dpsi.col(d) = (ms.psi(p) - ms.psi(m)) / (2 * h);
        }
        const Vec3 curl_psi(dpsi(2, 1) - dpsi(1, 2), dpsi(0, 2) - dpsi(2, 0), dpsi(1, 0) - dpsi(0, 1));
        CHECK((curl_psi - ms.f(x)).norm() < 1e-5 * ms.f(x).norm());
    }
    // boundary: tangential u and curl u vanish on the faces of the cube
    for (const Vec3 x : {Vec3(0.0, 0.3, 0.7), Vec3(0.4, 1.0, 0.2), Vec3(0.6, 0.5, 0.0)}) {
        CHECK(ms.curl_u(x).norm() < 1e-12);
        CHECK(ms.u(x).norm() < 1e-12);
    }
    CHECK_THROWS_AS(ManufacturedSolution::s(6, 0.1), InvalidArgument);
}
