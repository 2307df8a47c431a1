#pragma once

#include "quadcurl/common.hpp"
#include "quadcurl/mesh.hpp"

#include <functional>

namespace quadcurl {

enum class Domain { Edge, Triangle, Tet };

/// Rule on a reference simplex. Points are barycentric (one row per point,
/// columns = vertices); weights sum to the reference measure (1, 1/2, 1/6).
struct QuadratureRule {
    Domain domain = Domain::Tet;
    int degree = 0;
    MatrixXd points;
    VectorXd weights;

    int size() const { return static_cast<int>(weights.size()); }
    double measure() const;
};

int max_quadrature_degree(Domain d);

/// Collapsed-coordinate Gauss-Jacobi rule exact to at least `degree`.
/// Cached; throws UnsupportedOrder above the cap (tet 14, triangle and edge 20).
const QuadratureRule& quadrature(Domain domain, int degree);

/// The rule of the given degree repeated on every child of `levels` uniform
/// (red) refinements of the reference triangle or tet. For smooth,
/// non-polynomial integrands.
QuadratureRule composite_quadrature(Domain domain, int degree, int levels);

/// Gauss-Jacobi nodes and weights on [-1,1] for (1-x)^alpha (1+x)^beta.
void gauss_jacobi(int n, double alpha, double beta, VectorXd& x, VectorXd& w);

/// Integral over a physical tet of f(x, lambda).
double integrate(const std::function<double(const Vec3&, const std::array<double, 4>&)>& f,
                 const TetGeometry& g, int degree);

/// Integral over the segment a-b of f(x).
double integrate_segment(const std::function<double(const Vec3&)>& f, const Vec3& a, const Vec3& b, int degree);

/// Exact integral of prod lambda_i^a_i over a d-simplex of measure vol:
/// d! vol prod a_i! / (sum a_i + d)!.
double monomial_integral(const std::array<int, 4>& a, int dim, double vol);

}  // namespace quadcurl
