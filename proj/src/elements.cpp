#include "quadcurl/elements.hpp"

#include "quadcurl/quadrature.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <string>

namespace quadcurl {

const char* family_name(Family f) {
    switch (f) {
        case Family::Lagrange: return "lagrange";
        case Family::Nedelec: return "nedelec";
        case Family::SigmaTn: return "sigma_tn";
        case Family::Lambda: return "lambda";
    }
    return "?";
}

TetView tet_view(const TetMesh& mesh, int tet) {
    TetView tv;
    tv.gid = mesh.tets[tet];
    tv.geo = tet_geometry(mesh, tet);
    return tv;
}

TetView tet_view(const std::array<Vec3, 4>& x) {
    TetView tv;
    tv.geo = tet_geometry(x);
    if (tv.geo.volume <= 0.0) throw DegenerateMesh("tet_view: non-positive volume");
    return tv;
}

Mat3 mskw(const Vec3& w) {
    Mat3 m;
    m << 0.0, -w[2], w[1], w[2], 0.0, -w[0], -w[1], w[0], 0.0;
    return m;
}

namespace {

int curl_image_dim(int k) {
    // dim curl P_{k-2}(T;R^3) = 3 dim P_{k-2} - (dim P_{k-1} - 1)
    return k >= 2 ? 3 * poly_dim(4, k - 2) - (poly_dim(4, k - 1) - 1) : 0;
}

// Local vertices of face f ordered by global id.
std::array<int, 3> sorted_face(const TetView& tv, int f) {
    std::array<int, 3> v{};
    int c = 0;
    for (int i = 0; i < 4; ++i)
        if (i != f) v[c++] = i;
    std::sort(v.begin(), v.end(), [&](int a, int b) { return tv.gid[a] < tv.gid[b]; });
    return v;
}

std::array<int, 2> sorted_edge(const TetView& tv, int e) {
    int a = kLocalEdges[e][0], b = kLocalEdges[e][1];
    if (tv.gid[a] > tv.gid[b]) std::swap(a, b);
    return {a, b};
}

struct PointSet {
    std::vector<std::array<double, 4>> lambda;
    std::vector<Vec3> x;
    std::vector<double> w;  // weight already divided by the reference measure

    void add(const std::array<double, 4>& l, const TetView& tv, double weight) {
        lambda.push_back(l);
        x.push_back(tv.geo.point(l));
        w.push_back(weight);
    }
};

struct Builder {
    const TetView& tv;
    int rank;
    PointSet pts;
    std::vector<std::pair<int, std::vector<double>>> pending;  // (first point, weights per local point)
    std::vector<DofSlot> slots;

    Builder(const TetView& t, int r) : tv(t), rank(r) {}

    // Row touching points [p0, p0 + n) with per-point component weights.
    void add_row(int p0, const std::vector<double>& vals, DofSlot slot) {
        pending.emplace_back(p0, vals);
        slots.push_back(slot);
    }

    DofFunctionals finish() {
        DofFunctionals d;
        d.rank = rank;
        const int np = static_cast<int>(pts.x.size());
        d.lambda.resize(np, 4);
        for (int p = 0; p < np; ++p)
            for (int i = 0; i < 4; ++i) d.lambda(p, i) = pts.lambda[p][i];
        d.points = pts.x;
        d.W = MatrixXd::Zero(static_cast<Eigen::Index>(pending.size()), rank * np);
        for (std::size_t r = 0; r < pending.size(); ++r) {
            const int off = rank * pending[r].first;
            const auto& v = pending[r].second;
            for (std::size_t j = 0; j < v.size(); ++j) d.W(static_cast<Eigen::Index>(r), off + static_cast<int>(j)) = v[j];
        }
        d.slots = slots;
        return d;
    }
};

// Face quadrature points in sorted-vertex face barycentrics; returns the
// index of the first added point.
int add_face_points(Builder& b, int f, const QuadratureRule& q) {
    const auto sv = sorted_face(b.tv, f);
    const int first = static_cast<int>(b.pts.x.size());
    for (int p = 0; p < q.size(); ++p) {
        std::array<double, 4> l{0, 0, 0, 0};
        for (int s = 0; s < 3; ++s) l[sv[s]] = q.points(p, s);
        b.pts.add(l, b.tv, q.weights[p] / q.measure());
    }
    // Recompute physical points from sorted vertices so both tets agree bitwise.
    const Vec3& p0 = b.tv.geo.x[sv[0]];
    const Vec3& p1 = b.tv.geo.x[sv[1]];
    const Vec3& p2 = b.tv.geo.x[sv[2]];
    for (int p = 0; p < q.size(); ++p)
        b.pts.x[first + p] = q.points(p, 0) * p0 + q.points(p, 1) * p1 + q.points(p, 2) * p2;
    return first;
}

int add_cell_points(Builder& b, const QuadratureRule& q) {
    const int first = static_cast<int>(b.pts.x.size());
    for (int p = 0; p < q.size(); ++p)
        b.pts.add({q.points(p, 0), q.points(p, 1), q.points(p, 2), q.points(p, 3)}, b.tv, q.weights[p] / q.measure());
    return first;
}

FaceFrame sorted_frame(const TetView& tv, int f) {
    const auto sv = sorted_face(tv, f);
    return face_frame_from_points(tv.geo.x[sv[0]], tv.geo.x[sv[1]], tv.geo.x[sv[2]]);
}

LocalElement dualize(Family fam, int k, int l, const PolyField& shape, DofFunctionals dofs) {
    LocalElement el;
    el.family = fam;
    el.k = k;
    el.l = l;
    const MatrixXd V = dofs.W * dofs.sample(shape);
    if (V.rows() != V.cols())
        throw ElementConstruction(std::string(family_name(fam)) + ": " + std::to_string(V.rows()) + " DoFs for " +
                                  std::to_string(V.cols()) + " shape functions");
    Eigen::JacobiSVD<MatrixXd> svd(V);
    const VectorXd s = svd.singularValues();
    el.vandermonde_cond = s[s.size() - 1] > 0.0 ? s[0] / s[s.size() - 1] : INFINITY;
    if (!std::isfinite(el.vandermonde_cond) || el.vandermonde_cond > 1e12)
        throw ElementConstruction(std::string(family_name(fam)) + ": Vandermonde condition " +
                                  std::to_string(el.vandermonde_cond));
    const MatrixXd C = V.fullPivLu().inverse();
    el.basis = combine(shape, C);
    el.dofs = std::move(dofs);
    return el;
}

const QuadratureRule& dof_rule(Domain d, int degree, int extra) {
    return quadrature(d, std::min(degree + extra, max_quadrature_degree(d)));
}

// Face monomial values at face barycentrics (sorted-vertex order).
VectorXd face_monomials(int deg, const double* mu) {
    const Monomials& M = Monomials::get(3, deg);
    VectorXd out(M.size());
    if (M.size() > 0) M.evaluate(mu, out.data());
    return out;
}

}  // namespace

MatrixXd DofFunctionals::sample(const PolyField& f) const {
    const int np = npts();
    MatrixXd S = MatrixXd::Zero(static_cast<Eigen::Index>(rank) * np, f.nfun());
    if (f.nmono() == 0) return S;
    if (f.rank != rank) throw InvalidArgument("DofFunctionals::sample: rank mismatch");
    const MatrixXd P = Monomials::get(4, f.degree).evaluate(lambda);
    for (int c = 0; c < rank; ++c) {
        const MatrixXd vc = P * f.comp[c];
        for (int p = 0; p < np; ++p) S.row(rank * p + c) = vc.row(p);
    }
    return S;
}

std::array<int, 4> dofs_per_entity(Family family, int k, int l) {
    switch (family) {
        case Family::Lagrange:
            if (k < 1) throw UnsupportedOrder("lagrange: degree must be >= 1");
            return {1, k - 1, poly_dim(3, k - 3), poly_dim(4, k - 4)};
        case Family::Nedelec:
            if (k < 1) throw UnsupportedOrder("nedelec: k must be >= 1");
            if (l != k - 1 && l != k) throw InvalidArgument("nedelec: l must be k-1 or k");
            return {0, l + 1, poly_dim(3, k - 1) - 1 + poly_dim(3, l - 2), curl_image_dim(k) + poly_dim(4, l - 3)};
        case Family::SigmaTn:
            if (k < 0) throw UnsupportedOrder("sigma_tn: k must be >= 0");
            return {0, 0, 2 * poly_dim(3, k), 8 * poly_dim(4, k - 1)};
        case Family::Lambda:
            if (k < 1) throw UnsupportedOrder("lambda: k must be >= 1");
            return {0, 0, 2 * poly_dim(3, k - 1), 0};
    }
    return {0, 0, 0, 0};
}

LocalElement sigma_tn_local(int k, const TetView& tv, int extra_degree) {
    if (k < 0 || k > 3) throw UnsupportedOrder("sigma_tn: k outside 0..3");
    const auto& E = traceless_unit_basis();
    const int nm = poly_dim(4, k);
    PolyField shape(k, 9, 8 * nm);
    for (int j = 0; j < 8; ++j)
        for (int m = 0; m < nm; ++m)
            for (int c = 0; c < 9; ++c) shape.comp[c](m, j * nm + m) = E[j](c / 3, c % 3);

    Builder b(tv, 9);
    const QuadratureRule& qf = dof_rule(Domain::Triangle, 2 * k, extra_degree);
    const int nq = poly_dim(3, k);
    for (int f = 0; f < 4; ++f) {
        const FaceFrame fr = sorted_frame(tv, f);
        const int first = add_face_points(b, f, qf);
        for (int a = 0; a < 2; ++a) {
            const Vec3& t = a == 0 ? fr.t1 : fr.t2;
            for (int qi = 0; qi < nq; ++qi) {
                std::vector<double> v(9 * qf.size());
                for (int p = 0; p < qf.size(); ++p) {
                    const double mu[3] = {qf.points(p, 0), qf.points(p, 1), qf.points(p, 2)};
                    const double q = face_monomials(k, mu)[qi];
                    for (int r = 0; r < 3; ++r)
                        for (int s = 0; s < 3; ++s) v[9 * p + 3 * r + s] = b.pts.w[first + p] * t[r] * fr.n[s] * q;
                }
                b.add_row(first, v, {EntityKind::Face, f, a * nq + qi});
            }
        }
    }
    if (k >= 1) {
        const QuadratureRule& qc = dof_rule(Domain::Tet, 2 * k, extra_degree);
        const int first = add_cell_points(b, qc);
        const Monomials& M = Monomials::get(4, k - 1);
        const MatrixXd P = M.evaluate(qc.points);
        for (int j = 0; j < 8; ++j)
            for (int qi = 0; qi < M.size(); ++qi) {
                std::vector<double> v(9 * qc.size());
                for (int p = 0; p < qc.size(); ++p)
                    for (int c = 0; c < 9; ++c) v[9 * p + c] = b.pts.w[first + p] * E[j](c / 3, c % 3) * P(p, qi);
                b.add_row(first, v, {EntityKind::Cell, 0, j * M.size() + qi});
            }
    }
    return dualize(Family::SigmaTn, k, 0, shape, b.finish());
}

LocalElement nedelec_local(int k, int l, const TetView& tv, int extra_degree) {
    if (k < 1 || k > 3) throw UnsupportedOrder("nedelec: k outside 1..3");
    if (l != k - 1 && l != k) throw InvalidArgument("nedelec: l must be k-1 or k");
    const auto counts = dofs_per_entity(Family::Nedelec, k, l);
    const int expected = 6 * counts[1] + 4 * counts[2] + counts[3];
    const TetCalculus calc(tv.geo);
    const double h = tv.geo.diameter;

    PolyField grads = calc.grad(scalar_basis(l + 1));
    for (auto& c : grads.comp) c *= h;
    const PolyField span = concat(cross(calc.scaled_position(), vector_basis(k - 1)), grads);
    const auto keep = independent_columns(span.stacked());
    if (static_cast<int>(keep.size()) != expected)
        throw ElementConstruction("nedelec: shape space has dimension " + std::to_string(keep.size()) + ", expected " +
                                  std::to_string(expected));
    MatrixXd sel = MatrixXd::Zero(span.nfun(), expected);
    for (int i = 0; i < expected; ++i) sel(keep[i], i) = 1.0;
    const PolyField shape = combine(span, sel);

    Builder b(tv, 3);
    const QuadratureRule& qe = dof_rule(Domain::Edge, k + l + 1, extra_degree);
    for (int e = 0; e < 6; ++e) {
        const auto ab = sorted_edge(tv, e);
        const Vec3 t = (tv.geo.x[ab[1]] - tv.geo.x[ab[0]]).normalized();
        const int first = static_cast<int>(b.pts.x.size());
        for (int p = 0; p < qe.size(); ++p) {
            std::array<double, 4> lam{0, 0, 0, 0};
            lam[ab[0]] = qe.points(p, 0);
            lam[ab[1]] = qe.points(p, 1);
            b.pts.add(lam, tv, qe.weights[p]);
            b.pts.x.back() = qe.points(p, 0) * tv.geo.x[ab[0]] + qe.points(p, 1) * tv.geo.x[ab[1]];
        }
        const Monomials& M = Monomials::get(2, l);
        for (int qi = 0; qi < M.size(); ++qi) {
            std::vector<double> v(3 * qe.size());
            for (int p = 0; p < qe.size(); ++p) {
                const double mu[2] = {qe.points(p, 0), qe.points(p, 1)};
                double q[8];
                M.evaluate(mu, q);
                for (int c = 0; c < 3; ++c) v[3 * p + c] = b.pts.w[first + p] * t[c] * q[qi];
            }
            b.add_row(first, v, {EntityKind::Edge, e, qi});
        }
    }

    if (counts[2] > 0) {
        const QuadratureRule& qf = dof_rule(Domain::Triangle, 2 * k + 1, extra_degree);
        for (int f = 0; f < 4; ++f) {
            const auto sv = sorted_face(tv, f);
            const Vec3 P[3] = {tv.geo.x[sv[0]], tv.geo.x[sv[1]], tv.geo.x[sv[2]]};
            const FaceFrame fr = face_frame_from_points(P[0], P[1], P[2]);
            const double hf = std::max({(P[1] - P[0]).norm(), (P[2] - P[0]).norm(), (P[2] - P[1]).norm()});
            Vec3 gmu[3];
            for (int a = 0; a < 3; ++a) gmu[a] = fr.n.cross(P[(a + 2) % 3] - P[(a + 1) % 3]) / (2.0 * fr.area);
            const Monomials& Mc = Monomials::get(3, k - 1);
            const Monomials& Mx = Monomials::get(3, l - 2);
            const int ntest = Mc.size() + Mx.size();
            auto test_values = [&](const QuadratureRule& q) {
                MatrixXd vals(3 * q.size(), ntest);
                for (int p = 0; p < q.size(); ++p) {
                    const double mu[3] = {q.points(p, 0), q.points(p, 1), q.points(p, 2)};
                    for (int qi = 0; qi < Mc.size(); ++qi) {
                        const auto& ex = Mc.exponent(qi);
                        Vec3 g = Vec3::Zero();
                        for (int a = 0; a < 3; ++a) {
                            if (ex[a] == 0) continue;
                            double d = ex[a];
                            for (int s = 0; s < 3; ++s) d *= std::pow(mu[s], ex[s] - (s == a ? 1 : 0));
                            g += d * gmu[a];
                        }
                        vals.block<3, 1>(3 * p, qi) = hf * g.cross(fr.n);
                    }
                    if (Mx.size() > 0) {
                        const Vec3 x = mu[0] * P[0] + mu[1] * P[1] + mu[2] * P[2];
                        const VectorXd m = face_monomials(l - 2, mu);
                        for (int qi = 0; qi < Mx.size(); ++qi)
                            vals.block<3, 1>(3 * p, Mc.size() + qi) = (x - fr.centroid) / hf * m[qi];
                    }
                }
                return vals;
            };
            // Test selection on the base rule, so raised quadrature picks the same functionals.
            const auto use = independent_columns(test_values(dof_rule(Domain::Triangle, 2 * k + 1, 0)));
            const int first = add_face_points(b, f, qf);
            const MatrixXd vals = test_values(qf);
            if (static_cast<int>(use.size()) != counts[2])
                throw ElementConstruction("nedelec: face test space has rank " + std::to_string(use.size()));
            for (int i = 0; i < counts[2]; ++i) {
                std::vector<double> v(3 * qf.size());
                for (int p = 0; p < qf.size(); ++p)
                    for (int c = 0; c < 3; ++c) v[3 * p + c] = b.pts.w[first + p] * vals(3 * p + c, use[i]);
                b.add_row(first, v, {EntityKind::Face, f, i});
            }
        }
    }

    if (counts[3] > 0) {
        PolyField curls = calc.curl(vector_basis(k - 2));
        for (auto& c : curls.comp) c *= h;
        PolyField tests = curls;
        if (l >= 3) {
            const PolyField x = calc.scaled_position();
            const PolyField q = scalar_basis(l - 3);
            PolyField xq(l - 2, 3, q.nfun());
            for (int c = 0; c < 3; ++c) {
                PolyField xc(1, 1, 1);
                xc.comp[0] = x.comp[c];
                xq.comp[c] = multiply(xc, q).comp[0];
            }
            tests = concat(curls, xq);
        }
        const auto use = independent_columns(tests.stacked());
        if (static_cast<int>(use.size()) != counts[3])
            throw ElementConstruction("nedelec: interior test space has rank " + std::to_string(use.size()));
        const QuadratureRule& qc = dof_rule(Domain::Tet, 2 * k, extra_degree);
        const int first = add_cell_points(b, qc);
        const auto tv_vals = evaluate(tests, Monomials::get(4, tests.degree).evaluate(qc.points));
        for (int i = 0; i < counts[3]; ++i) {
            std::vector<double> v(3 * qc.size());
            for (int p = 0; p < qc.size(); ++p)
                for (int c = 0; c < 3; ++c) v[3 * p + c] = b.pts.w[first + p] * tv_vals[c](p, use[i]);
            b.add_row(first, v, {EntityKind::Cell, 0, i});
        }
    }
    return dualize(Family::Nedelec, k, l, shape, b.finish());
}

LocalElement lagrange_local(int m, const TetView& tv) {
    if (m < 1 || m > 4) throw UnsupportedOrder("lagrange: degree outside 1..4");
    Builder b(tv, 1);
    int row = 0;
    auto point_row = [&](const std::array<double, 4>& l, DofSlot slot) {
        b.pts.add(l, tv, 1.0);
        b.add_row(row++, {1.0}, slot);
    };
    for (int i = 0; i < 4; ++i) {
        std::array<double, 4> l{0, 0, 0, 0};
        l[i] = 1.0;
        point_row(l, {EntityKind::Vertex, i, 0});
    }
    for (int e = 0; e < 6; ++e) {
        const auto ab = sorted_edge(tv, e);
        for (int j = 1; j < m; ++j) {
            std::array<double, 4> l{0, 0, 0, 0};
            l[ab[0]] = double(m - j) / m;
            l[ab[1]] = double(j) / m;
            point_row(l, {EntityKind::Edge, e, j - 1});
        }
    }
    const Monomials& F = Monomials::get(3, m);
    for (int f = 0; f < 4; ++f) {
        const auto sv = sorted_face(tv, f);
        int idx = 0;
        for (int i = 0; i < F.size(); ++i) {
            const auto& a = F.exponent(i);
            if (a[0] < 1 || a[1] < 1 || a[2] < 1) continue;
            std::array<double, 4> l{0, 0, 0, 0};
            for (int s = 0; s < 3; ++s) l[sv[s]] = double(a[s]) / m;
            point_row(l, {EntityKind::Face, f, idx++});
        }
    }
    const Monomials& C = Monomials::get(4, m);
    int idx = 0;
    for (int i = 0; i < C.size(); ++i) {
        const auto& a = C.exponent(i);
        if (a[0] < 1 || a[1] < 1 || a[2] < 1 || a[3] < 1) continue;
        point_row({double(a[0]) / m, double(a[1]) / m, double(a[2]) / m, double(a[3]) / m}, {EntityKind::Cell, 0, idx++});
    }
    return dualize(Family::Lagrange, m, 0, scalar_basis(m), b.finish());
}

int FaceElement::ndof() const { return 2 * poly_dim(3, k - 1); }

MatrixXd FaceElement::evaluate(const MatrixXd& mu) const {
    const int nq = poly_dim(3, k - 1);
    const MatrixXd P = Monomials::get(3, k - 1).evaluate(mu);
    MatrixXd out(3 * mu.rows(), 2 * nq);
    for (Eigen::Index p = 0; p < mu.rows(); ++p)
        for (int a = 0; a < 2; ++a) {
            const Vec3& t = a == 0 ? frame.t1 : frame.t2;
            for (int qi = 0; qi < nq; ++qi) out.block<3, 1>(3 * p, a * nq + qi) = t * P(p, qi);
        }
    return out;
}

FaceElement lambda_face_local(int k, const FaceFrame& frame) {
    if (k < 1 || k > 4) throw UnsupportedOrder("lambda: k outside 1..4");
    FaceElement fe;
    fe.k = k;
    fe.frame = frame;
    return fe;
}

TracelessFrame traceless_frame(const TetGeometry& g) {
    TracelessFrame tf;
    for (int l = 0; l < 4; ++l) {
        const int i = (l + 2) % 4, j = (l + 3) % 4, m = (l + 1) % 4;
        auto devm = [](const Mat3& a) { return Mat3(a - a.trace() / 3.0 * Mat3::Identity()); };
        tf.basis[2 * l] = devm(g.grad_lambda[i] * g.t(i, l).transpose());
        tf.basis[2 * l + 1] = devm(g.grad_lambda[j] * g.t(j, l).transpose());
        tf.dual[2 * l] = g.t(m, i) * g.grad_lambda[l].transpose();
        tf.dual[2 * l + 1] = g.t(m, j) * g.grad_lambda[l].transpose();
    }
    return tf;
}

Eigen::Matrix<double, 8, 8> TracelessFrame::pairing() const {
    Eigen::Matrix<double, 8, 8> P;
    for (int a = 0; a < 8; ++a)
        for (int b = 0; b < 8; ++b) P(a, b) = basis[a].cwiseProduct(dual[b]).sum();
    return P;
}

namespace {

PolyField bubble_impl(int k, const TetGeometry& g, bool unit) {
    const int nq = poly_dim(4, k - 1);
    PolyField out(k, 9, 8 * nq);
    if (k < 1) return out;
    const Monomials& Q = Monomials::get(4, k - 1);
    const Monomials& R = Monomials::get(4, k);
    for (int l = 0; l < 4; ++l) {
        const int ij[2] = {(l + 2) % 4, (l + 3) % 4};
        for (int s = 0; s < 2; ++s) {
            const int i = ij[s];
            const Vec3 n = unit ? g.grad_lambda[i].normalized() : g.grad_lambda[i];
            Mat3 M = n * g.t(i, l).transpose();
            M -= M.trace() / 3.0 * Mat3::Identity();
            const int b = 2 * l + s;
            for (int qi = 0; qi < nq; ++qi) {
                auto e = Q.exponent(qi);
                e[l] += 1;
                const int row = R.index(e);
                for (int c = 0; c < 9; ++c) out.comp[c](row, b * nq + qi) = M(c / 3, c % 3);
            }
        }
    }
    return out;
}

}  // namespace

PolyField bubble_basis(int k, const TetGeometry& g) { return bubble_impl(k, g, true); }
PolyField bubble_basis_grad(int k, const TetGeometry& g) { return bubble_impl(k, g, false); }

VectorXd interpolate_local(const LocalElement& el, const VectorXd& samples) {
    if (samples.size() != el.dofs.W.cols()) throw InvalidArgument("interpolate_local: sample length mismatch");
    return el.dofs.W * samples;
}

}  // namespace quadcurl

namespace quadcurl {

std::array<Vec3, 4> random_shape_regular_tet(SplitMix64& rng, double max_ratio) {
    for (;;) {
        std::array<Vec3, 4> x;
        for (auto& p : x) p = Vec3(rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0));
        if (signed_volume(x[0], x[1], x[2], x[3]) < 0.0) std::swap(x[2], x[3]);
        const TetGeometry g = tet_geometry(x);
        if (g.volume < 1e-6) continue;
        double surface = 0.0;
        for (int i = 0; i < 4; ++i) {
            const Vec3& p0 = x[(i + 1) % 4];
            surface += 0.5 * (x[(i + 2) % 4] - p0).cross(x[(i + 3) % 4] - p0).norm();
        }
        if (g.diameter * surface / (3.0 * g.volume) <= max_ratio) return x;
    }
}

double ElementCertificate::max_condition() const {
    double c = 0.0;
    for (const auto& v : vandermonde) c = std::max(c, v.second);
    return c;
}

bool ElementCertificate::pass(double duality_tol, double cond_tol) const {
    return duality_error <= duality_tol && max_condition() < cond_tol && max_trace <= 1e-12;
}

ElementCertificate certify_elements(int tets, std::uint64_t seed) {
    SplitMix64 rng(seed);
    ElementCertificate cert;
    cert.tets = tets;
    auto record = [&](const std::string& name, double cond) {
        for (auto& v : cert.vandermonde)
            if (v.first == name) {
                v.second = std::max(v.second, cond);
                return;
            }
        cert.vandermonde.emplace_back(name, cond);
    };
    for (int n = 0; n < tets; ++n) {
        const TetView tv = tet_view(random_shape_regular_tet(rng));
        const auto P = traceless_frame(tv.geo).pairing();
        cert.duality_error =
            std::max(cert.duality_error, (P - Eigen::Matrix<double, 8, 8>::Identity()).cwiseAbs().maxCoeff());
        for (int m = 1; m <= 4; ++m)
            record("lagrange(" + std::to_string(m) + ")", lagrange_local(m, tv).vandermonde_cond);
        for (int k = 1; k <= 3; ++k)
            for (int l = k - 1; l <= k; ++l)
                record("nedelec(" + std::to_string(k) + "," + std::to_string(l) + ")",
                       nedelec_local(k, l, tv).vandermonde_cond);
        for (int k = 0; k <= 2; ++k) {
            const LocalElement el = sigma_tn_local(k, tv);
            record("sigma_tn(" + std::to_string(k) + ")", el.vandermonde_cond);
            const QuadratureRule& q = quadrature(Domain::Tet, std::max(k, 1));
            const PolyField tr = trace(el.basis);
            if (tr.nmono() > 0) {
                const MatrixXd v = Monomials::get(4, tr.degree).evaluate(q.points) * tr.comp[0];
                cert.max_trace = std::max(cert.max_trace, v.cwiseAbs().maxCoeff());
            }
        }
    }
    return cert;
}

}  // namespace quadcurl
