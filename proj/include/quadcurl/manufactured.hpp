#pragma once

#include "quadcurl/common.hpp"

namespace quadcurl {

/// u = curl(g, g, 0) with g = s(x) s(y) s(z), s(t) = sin^3(pi t), on the unit
/// cube. u x n and curl u vanish on the boundary and div u = 0.
class ManufacturedSolution {
public:
    /// n-th derivative of s, n = 0..5.
    static double s(int n, double t);
    /// d^(a+b+c) g / dx^a dy^b dz^c.
    static double g(int a, int b, int c, const Vec3& x);

    Vec3 u(const Vec3& x) const;
    Vec3 curl_u(const Vec3& x) const;
    /// grad curl u, entry (r,s) = d_s (curl u)_r.
    Mat3 sigma(const Vec3& x) const;
    /// -curl Laplace curl u (= Laplace^2 u since div u = 0).
    Vec3 f(const Vec3& x) const;
    /// psi = (Laplace^2 g, Laplace^2 g, 0) with curl psi = f.
    Vec3 psi(const Vec3& x) const;

    /// Independent oracle for f: -curl div sigma with all derivatives of the
    /// analytic sigma taken by fourth-order central differences of step h.
    Vec3 f_finite_difference(const Vec3& x, double h = 1e-3) const;
};

}  // namespace quadcurl
