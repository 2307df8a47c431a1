#include "quadcurl/manufactured.hpp"

#include <cmath>

namespace quadcurl {

double ManufacturedSolution::s(int n, double t) {
    // sin^3 = (3 sin(pi t) - sin(3 pi t)) / 4, differentiated termwise.
    if (n < 0 || n > 5) throw InvalidArgument("manufactured: derivative order outside 0..5");
    const double shift = 0.5 * M_PI * n;
    return 0.25 * (3.0 * std::pow(M_PI, n) * std::sin(M_PI * t + shift) -
                   std::pow(3.0 * M_PI, n) * std::sin(3.0 * M_PI * t + shift));
}

double ManufacturedSolution::g(int a, int b, int c, const Vec3& x) { return s(a, x[0]) * s(b, x[1]) * s(c, x[2]); }

Vec3 ManufacturedSolution::u(const Vec3& x) const {
    const double gz = g(0, 0, 1, x);
    return {-gz, gz, g(1, 0, 0, x) - g(0, 1, 0, x)};
}

Vec3 ManufacturedSolution::curl_u(const Vec3& x) const {
    const double gxy = g(1, 1, 0, x), gxz = g(1, 0, 1, x), gyz = g(0, 1, 1, x);
    const double gxx = g(2, 0, 0, x), gyy = g(0, 2, 0, x), gzz = g(0, 0, 2, x);
    return {gxy - gyy - gzz, -gzz - gxx + gxy, gxz + gyz};
}

Mat3 ManufacturedSolution::sigma(const Vec3& x) const {
    Mat3 S;
    for (int d = 0; d < 3; ++d) {
        const int e[3] = {d == 0, d == 1, d == 2};
        auto G = [&](int a, int b, int c) { return g(a + e[0], b + e[1], c + e[2], x); };
        S(0, d) = G(1, 1, 0) - G(0, 2, 0) - G(0, 0, 2);
        S(1, d) = -G(0, 0, 2) - G(2, 0, 0) + G(1, 1, 0);
        S(2, d) = G(1, 0, 1) + G(0, 1, 1);
    }
    return S;
}

namespace {

// d/dx^a dy^b dz^c of Laplace^2 g.
double bilaplace_g(int a, int b, int c, const Vec3& x) {
    auto G = [&](int i, int j, int k) { return ManufacturedSolution::g(a + i, b + j, c + k, x); };
    return G(4, 0, 0) + G(0, 4, 0) + G(0, 0, 4) + 2.0 * (G(2, 2, 0) + G(2, 0, 2) + G(0, 2, 2));
}

}  // namespace

Vec3 ManufacturedSolution::f(const Vec3& x) const {
    const double dz = bilaplace_g(0, 0, 1, x);
    return {-dz, dz, bilaplace_g(1, 0, 0, x) - bilaplace_g(0, 1, 0, x)};
}

Vec3 ManufacturedSolution::psi(const Vec3& x) const {
    const double b = bilaplace_g(0, 0, 0, x);
    return {b, b, 0.0};
}

Vec3 ManufacturedSolution::f_finite_difference(const Vec3& x, double h) const {
    static constexpr double kOffsets[4] = {-2.0, -1.0, 1.0, 2.0};
    static constexpr double kWeights[4] = {1.0 / 12.0, -8.0 / 12.0, 8.0 / 12.0, -1.0 / 12.0};
    // d2[a][s] = d_a d_s sigma
    Mat3 d2[3][3];
    for (int a = 0; a < 3; ++a)
        for (int s = 0; s < 3; ++s) {
            Mat3 acc = Mat3::Zero();
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) {
                    Vec3 y = x;
                    y[a] += kOffsets[i] * h;
                    y[s] += kOffsets[j] * h;
                    acc += kWeights[i] * kWeights[j] * sigma(y);
                }
            d2[a][s] = acc / (h * h);
        }
    // w = div sigma (row-wise); dw(b, a) = d_a w_b
    Mat3 dw = Mat3::Zero();
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            for (int s = 0; s < 3; ++s) dw(b, a) += d2[a][s](b, s);
    const Vec3 curl_w(dw(2, 1) - dw(1, 2), dw(0, 2) - dw(2, 0), dw(1, 0) - dw(0, 1));
    return -curl_w;
}

}  // namespace quadcurl
