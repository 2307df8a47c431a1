#include "quadcurl/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

namespace quadcurl {

double QuadratureRule::measure() const {
    switch (domain) {
        case Domain::Edge: return 1.0;
        case Domain::Triangle: return 0.5;
        case Domain::Tet: return 1.0 / 6.0;
    }
    return 0.0;
}

int max_quadrature_degree(Domain d) { return d == Domain::Tet ? 14 : 20; }

void gauss_jacobi(int n, double alpha, double beta, VectorXd& x, VectorXd& w) {
    // Golub-Welsch on the symmetric Jacobi matrix of the recurrence.
    MatrixXd J = MatrixXd::Zero(n, n);
    const double ab = alpha + beta;
    for (int k = 0; k < n; ++k) {
        const double s = 2.0 * k + ab;
        J(k, k) = k == 0 ? (beta - alpha) / (ab + 2.0) : (beta * beta - alpha * alpha) / (s * (s + 2.0));
        if (k + 1 < n) {
            const double m = k + 1;
            const double t = 2.0 * m + ab;
            const double b = std::sqrt(4.0 * m * (m + alpha) * (m + beta) * (m + ab) / (t * t * (t + 1.0) * (t - 1.0)));
            J(k, k + 1) = J(k + 1, k) = b;
        }
    }
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(J);
    const double mu0 = std::pow(2.0, ab + 1.0) * std::tgamma(alpha + 1.0) * std::tgamma(beta + 1.0) / std::tgamma(ab + 2.0);
    x = es.eigenvalues();
    w.resize(n);
    for (int i = 0; i < n; ++i) w[i] = mu0 * es.eigenvectors()(0, i) * es.eigenvectors()(0, i);
}

namespace {

// Gauss-Jacobi rule on [0,1] for the weight (1-s)^alpha.
void unit_rule(int n, double alpha, VectorXd& s, VectorXd& w) {
    VectorXd x;
    gauss_jacobi(n, alpha, 0.0, x, w);
    s = 0.5 * (x.array() + 1.0);
    w /= std::pow(2.0, alpha + 1.0);
}

QuadratureRule build(Domain domain, int degree) {
    QuadratureRule q;
    q.domain = domain;
    const int n = std::max(1, (degree + 2) / 2);
    q.degree = 2 * n - 1;
    VectorXd s0, w0, s1, w1, s2, w2;
    if (domain == Domain::Edge) {
        unit_rule(n, 0.0, s0, w0);
        q.points.resize(n, 2);
        q.weights = w0;
        for (int i = 0; i < n; ++i) {
            q.points(i, 0) = 1.0 - s0[i];
            q.points(i, 1) = s0[i];
        }
    } else if (domain == Domain::Triangle) {
        unit_rule(n, 1.0, s0, w0);
        unit_rule(n, 0.0, s1, w1);
        q.points.resize(n * n, 3);
        q.weights.resize(n * n);
        int p = 0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j, ++p) {
                const double X = s0[i], Y = (1.0 - s0[i]) * s1[j];
                q.points.row(p) << 1.0 - X - Y, X, Y;
                q.weights[p] = w0[i] * w1[j];
            }
    } else {
        unit_rule(n, 2.0, s0, w0);
        unit_rule(n, 1.0, s1, w1);
        unit_rule(n, 0.0, s2, w2);
        q.points.resize(n * n * n, 4);
        q.weights.resize(n * n * n);
        int p = 0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k, ++p) {
                    const double X = s0[i];
                    const double Y = (1.0 - s0[i]) * s1[j];
                    const double Z = (1.0 - s0[i]) * (1.0 - s1[j]) * s2[k];
                    q.points.row(p) << 1.0 - X - Y - Z, X, Y, Z;
                    q.weights[p] = w0[i] * w1[j] * w2[k];
                }
    }
    return q;
}

}  // namespace

const QuadratureRule& quadrature(Domain domain, int degree) {
    if (degree < 0) degree = 0;
    if (degree > max_quadrature_degree(domain))
        throw UnsupportedOrder("quadrature: degree " + std::to_string(degree) + " above cap");
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::unique_ptr<QuadratureRule>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[{static_cast<int>(domain), degree}];
    if (!slot) slot = std::make_unique<QuadratureRule>(build(domain, degree));
    return *slot;
}

double integrate(const std::function<double(const Vec3&, const std::array<double, 4>&)>& f,
                 const TetGeometry& g, int degree) {
    const QuadratureRule& q = quadrature(Domain::Tet, degree);
    const double scale = g.volume / q.measure();
    double s = 0.0;
    for (int p = 0; p < q.size(); ++p) {
        const std::array<double, 4> l{q.points(p, 0), q.points(p, 1), q.points(p, 2), q.points(p, 3)};
        s += q.weights[p] * f(g.point(l), l);
    }
    return s * scale;
}

double integrate_segment(const std::function<double(const Vec3&)>& f, const Vec3& a, const Vec3& b, int degree) {
    const QuadratureRule& q = quadrature(Domain::Edge, degree);
    double s = 0.0;
    for (int p = 0; p < q.size(); ++p) s += q.weights[p] * f(q.points(p, 0) * a + q.points(p, 1) * b);
    return s * (b - a).norm();
}

double monomial_integral(const std::array<int, 4>& a, int dim, double vol) {
    double num = std::tgamma(dim + 1.0) * vol;
    int s = 0;
    for (int i = 0; i <= dim; ++i) {
        num *= std::tgamma(a[i] + 1.0);
        s += a[i];
    }
    return num / std::tgamma(s + dim + 1.0);
}

QuadratureRule composite_quadrature(Domain domain, int degree, int levels) {
    if (domain == Domain::Edge) throw InvalidArgument("composite_quadrature: triangle or tet only");
    const int nv = domain == Domain::Tet ? 4 : 3;
    // Children as rows of corner barycentrics (corners, then edge midpoints).
    auto corner = [nv](int i, int j) {
        Eigen::RowVectorXd v = Eigen::RowVectorXd::Zero(nv);
        v[i] += 0.5;
        v[j] += 0.5;
        return v;
    };
    std::vector<std::vector<std::pair<int, int>>> kids;
    if (nv == 3)
        kids = {{{0, 0}, {0, 1}, {0, 2}}, {{0, 1}, {1, 1}, {1, 2}}, {{0, 2}, {1, 2}, {2, 2}}, {{0, 1}, {1, 2}, {0, 2}}};
    else
        kids = {{{0, 0}, {0, 1}, {0, 2}, {0, 3}}, {{0, 1}, {1, 1}, {1, 2}, {1, 3}}, {{0, 2}, {1, 2}, {2, 2}, {2, 3}},
                {{0, 3}, {1, 3}, {2, 3}, {3, 3}}, {{0, 1}, {0, 2}, {0, 3}, {1, 3}}, {{0, 1}, {0, 2}, {1, 2}, {1, 3}},
                {{0, 2}, {0, 3}, {1, 3}, {2, 3}}, {{0, 2}, {1, 2}, {1, 3}, {2, 3}}};
    std::vector<MatrixXd> cells{MatrixXd::Identity(nv, nv)};
    for (int lv = 0; lv < levels; ++lv) {
        std::vector<MatrixXd> next;
        for (const MatrixXd& c : cells)
            for (const auto& kid : kids) {
                MatrixXd m(nv, nv);
                for (int r = 0; r < nv; ++r) m.row(r) = corner(kid[r].first, kid[r].second) * c;
                next.push_back(m);
            }
        cells = std::move(next);
    }
    const QuadratureRule& base = quadrature(domain, degree);
    QuadratureRule out;
    out.domain = domain;
    out.degree = degree;
    out.points.resize(base.size() * static_cast<Eigen::Index>(cells.size()), nv);
    out.weights.resize(out.points.rows());
    const double scale = 1.0 / static_cast<double>(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
        out.points.middleRows(c * base.size(), base.size()) = base.points * cells[c];
        out.weights.segment(c * base.size(), base.size()) = base.weights * scale;
    }
    return out;
}

}  // namespace quadcurl
