#include "quadcurl/polynomial.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>

namespace quadcurl {

Monomials::Monomials(int nvar, int degree) : nvar_(nvar), degree_(degree) {
    if (degree < 0) return;
    const int d = degree;
    std::size_t lsize = 1;
    for (int j = 1; j < nvar; ++j) lsize *= static_cast<std::size_t>(d + 1);
    lookup_.assign(lsize, -1);
    std::array<int, 4> a{0, 0, 0, 0};
    // Enumerate with a0 descending, then a1 descending, and so on.
    auto rec = [&](auto&& self, int var, int left) -> void {
        if (var == nvar - 1) {
            a[var] = left;
            exps_.push_back(a);
            return;
        }
        for (int v = left; v >= 0; --v) {
            a[var] = v;
            self(self, var + 1, left - v);
        }
    };
    rec(rec, 0, d);
    for (int i = 0; i < size(); ++i) {
        std::size_t key = 0;
        for (int j = nvar - 1; j >= 1; --j) key = key * (d + 1) + exps_[i][j];
        lookup_[key] = i;
    }
}

const Monomials& Monomials::get(int nvar, int degree) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::unique_ptr<Monomials>> cache;
    if (nvar < 1 || nvar > 4) throw InvalidArgument("Monomials: nvar must be 1..4");
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[{nvar, std::max(degree, -1)}];
    if (!slot) slot.reset(new Monomials(nvar, std::max(degree, -1)));
    return *slot;
}

int Monomials::index(const std::array<int, 4>& a) const {
    if (degree_ < 0) return -1;
    int s = 0;
    for (int j = 0; j < nvar_; ++j) {
        if (a[j] < 0) return -1;
        s += a[j];
    }
    if (s != degree_) return -1;
    std::size_t key = 0;
    for (int j = nvar_ - 1; j >= 1; --j) key = key * (degree_ + 1) + a[j];
    return lookup_[key];
}

void Monomials::evaluate(const double* lambda, double* out) const {
    double pw[4][32];
    for (int j = 0; j < nvar_; ++j) {
        pw[j][0] = 1.0;
        for (int e = 1; e <= degree_; ++e) pw[j][e] = pw[j][e - 1] * lambda[j];
    }
    for (int i = 0; i < size(); ++i) {
        double v = 1.0;
        for (int j = 0; j < nvar_; ++j) v *= pw[j][exps_[i][j]];
        out[i] = v;
    }
}

MatrixXd Monomials::evaluate(const MatrixXd& lambda) const {
    MatrixXd P(lambda.rows(), size());
    std::vector<double> row(size());
    for (Eigen::Index p = 0; p < lambda.rows(); ++p) {
        double l[4];
        for (int j = 0; j < nvar_; ++j) l[j] = lambda(p, j);
        evaluate(l, row.data());
        for (int i = 0; i < size(); ++i) P(p, i) = row[i];
    }
    return P;
}

int poly_dim(int nvar, int k) {
    if (k < 0) return 0;
    long num = 1, den = 1;
    for (int j = 1; j < nvar; ++j) {
        num *= (k + j);
        den *= j;
    }
    return static_cast<int>(num / den);
}

namespace {

std::mutex g_matrix_mu;

MatrixXd elevate_once(int nvar, int from) {
    const Monomials& A = Monomials::get(nvar, from);
    const Monomials& B = Monomials::get(nvar, from + 1);
    MatrixXd E = MatrixXd::Zero(B.size(), A.size());
    for (int m = 0; m < A.size(); ++m) {
        for (int j = 0; j < nvar; ++j) {
            auto a = A.exponent(m);
            a[j] += 1;
            E(B.index(a), m) += 1.0;
        }
    }
    return E;
}

}  // namespace

const MatrixXd& elevation_matrix(int nvar, int from, int to) {
    static std::map<std::tuple<int, int, int>, MatrixXd> cache;
    std::lock_guard<std::mutex> lock(g_matrix_mu);
    auto key = std::make_tuple(nvar, from, to);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    MatrixXd E;
    if (from < 0) {
        E = MatrixXd::Zero(Monomials::get(nvar, to).size(), 0);
    } else {
        E = MatrixXd::Identity(Monomials::get(nvar, from).size(), Monomials::get(nvar, from).size());
        for (int d = from; d < to; ++d) E = elevate_once(nvar, d) * E;
    }
    return cache.emplace(key, std::move(E)).first->second;
}

const MatrixXd& bary_derivative_matrix(int nvar, int degree, int i) {
    static std::map<std::tuple<int, int, int>, MatrixXd> cache;
    std::lock_guard<std::mutex> lock(g_matrix_mu);
    auto key = std::make_tuple(nvar, degree, i);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    const Monomials& A = Monomials::get(nvar, degree);
    const Monomials& B = Monomials::get(nvar, degree - 1);
    MatrixXd D = MatrixXd::Zero(B.size(), A.size());
    for (int m = 0; m < A.size(); ++m) {
        auto a = A.exponent(m);
        if (a[i] == 0) continue;
        const double c = a[i];
        a[i] -= 1;
        D(B.index(a), m) = c;
    }
    return cache.emplace(key, std::move(D)).first->second;
}

MatrixXd multiplication_matrix(int nvar, int deg_p, const VectorXd& p, int deg_v) {
    const Monomials& P = Monomials::get(nvar, deg_p);
    const Monomials& V = Monomials::get(nvar, deg_v);
    const Monomials& R = Monomials::get(nvar, deg_p + deg_v);
    MatrixXd M = MatrixXd::Zero(R.size(), V.size());
    if (deg_p < 0 || deg_v < 0) return M;
    for (int a = 0; a < P.size(); ++a) {
        if (p[a] == 0.0) continue;
        for (int b = 0; b < V.size(); ++b) {
            std::array<int, 4> e;
            for (int j = 0; j < 4; ++j) e[j] = P.exponent(a)[j] + V.exponent(b)[j];
            M(R.index(e), b) += p[a];
        }
    }
    return M;
}

PolyField::PolyField(int degree_, int rank_, int nfun) : degree(degree_), rank(rank_) {
    const int nm = Monomials::get(4, degree_).size();
    comp.assign(rank_, MatrixXd::Zero(nm, nfun));
}

MatrixXd PolyField::stacked() const {
    const int nm = nmono();
    MatrixXd S(rank * nm, nfun());
    for (int c = 0; c < rank; ++c) S.middleRows(c * nm, nm) = comp[c];
    return S;
}

MatrixXd TetCalculus::derivative_matrix(int degree, int c) const {
    const int nm_out = Monomials::get(4, degree - 1).size();
    const int nm_in = Monomials::get(4, degree).size();
    MatrixXd D = MatrixXd::Zero(nm_out, nm_in);
    if (degree <= 0) return D;
    for (int i = 0; i < 4; ++i) D += g_.grad_lambda[i][c] * bary_derivative_matrix(4, degree, i);
    return D;
}

PolyField TetCalculus::grad(const PolyField& f) const {
    if (f.rank != 1 && f.rank != 3) throw InvalidArgument("grad: scalar or vector field expected");
    PolyField out(f.degree - 1, 3 * f.rank, f.nfun());
    MatrixXd D[3];
    for (int s = 0; s < 3; ++s) D[s] = derivative_matrix(f.degree, s);
    for (int r = 0; r < f.rank; ++r)
        for (int s = 0; s < 3; ++s) out.comp[3 * r + s] = D[s] * f.comp[r];
    return out;
}

PolyField TetCalculus::curl(const PolyField& f) const {
    if (f.rank != 3 && f.rank != 9) throw InvalidArgument("curl: vector or matrix field expected");
    PolyField out(f.degree - 1, f.rank, f.nfun());
    MatrixXd D[3];
    for (int s = 0; s < 3; ++s) D[s] = derivative_matrix(f.degree, s);
    const int rows = f.rank / 3;
    for (int r = 0; r < rows; ++r) {
        const int o = rows == 1 ? 0 : 3 * r;
        out.comp[o + 0] = D[1] * f.comp[o + 2] - D[2] * f.comp[o + 1];
        out.comp[o + 1] = D[2] * f.comp[o + 0] - D[0] * f.comp[o + 2];
        out.comp[o + 2] = D[0] * f.comp[o + 1] - D[1] * f.comp[o + 0];
    }
    return out;
}

PolyField TetCalculus::div(const PolyField& f) const {
    if (f.rank != 3 && f.rank != 9) throw InvalidArgument("div: vector or matrix field expected");
    PolyField out(f.degree - 1, f.rank / 3, f.nfun());
    MatrixXd D[3];
    for (int s = 0; s < 3; ++s) D[s] = derivative_matrix(f.degree, s);
    const int rows = f.rank / 3;
    for (int r = 0; r < rows; ++r) {
        const int o = rows == 1 ? 0 : 3 * r;
        out.comp[r] = D[0] * f.comp[o] + D[1] * f.comp[o + 1] + D[2] * f.comp[o + 2];
    }
    return out;
}

PolyField TetCalculus::scaled_position() const {
    PolyField x(1, 3, 1);
    const Monomials& M = Monomials::get(4, 1);
    for (int i = 0; i < 4; ++i) {
        std::array<int, 4> e{0, 0, 0, 0};
        e[i] = 1;
        const Vec3 d = (g_.x[i] - g_.barycenter) / g_.diameter;
        for (int c = 0; c < 3; ++c) x.comp[c](M.index(e), 0) = d[c];
    }
    return x;
}

PolyField elevate(const PolyField& f, int degree) {
    if (degree < f.degree) throw InvalidArgument("elevate: target degree below source degree");
    if (degree == f.degree) return f;
    PolyField out(degree, f.rank, f.nfun());
    if (f.degree < 0) return out;
    const MatrixXd& E = elevation_matrix(4, f.degree, degree);
    for (int c = 0; c < f.rank; ++c) out.comp[c] = E * f.comp[c];
    return out;
}

PolyField concat(const PolyField& a, const PolyField& b) {
    if (a.rank != b.rank) throw InvalidArgument("concat: rank mismatch");
    const int d = std::max(a.degree, b.degree);
    const PolyField ea = elevate(a, d), eb = elevate(b, d);
    PolyField out(d, a.rank, a.nfun() + b.nfun());
    for (int c = 0; c < a.rank; ++c) {
        out.comp[c].leftCols(a.nfun()) = ea.comp[c];
        out.comp[c].rightCols(b.nfun()) = eb.comp[c];
    }
    return out;
}

PolyField combine(const PolyField& f, const MatrixXd& coeffs) {
    PolyField out(f.degree, f.rank, static_cast<int>(coeffs.cols()));
    for (int c = 0; c < f.rank; ++c) out.comp[c] = f.comp[c] * coeffs;
    return out;
}

PolyField multiply(const PolyField& p, const PolyField& f) {
    if (p.rank != 1 || p.nfun() != 1) throw InvalidArgument("multiply: single scalar polynomial expected");
    PolyField out(p.degree + f.degree, f.rank, f.nfun());
    if (p.degree < 0 || f.degree < 0) return out;
    const MatrixXd M = multiplication_matrix(4, p.degree, p.comp[0].col(0), f.degree);
    for (int c = 0; c < f.rank; ++c) out.comp[c] = M * f.comp[c];
    return out;
}

PolyField cross(const PolyField& a, const PolyField& f) {
    if (a.rank != 3 || a.nfun() != 1 || f.rank != 3) throw InvalidArgument("cross: vector fields expected");
    PolyField out(a.degree + f.degree, 3, f.nfun());
    if (a.degree < 0 || f.degree < 0) return out;
    MatrixXd M[3];
    for (int c = 0; c < 3; ++c) M[c] = multiplication_matrix(4, a.degree, a.comp[c].col(0), f.degree);
    out.comp[0] = M[1] * f.comp[2] - M[2] * f.comp[1];
    out.comp[1] = M[2] * f.comp[0] - M[0] * f.comp[2];
    out.comp[2] = M[0] * f.comp[1] - M[1] * f.comp[0];
    return out;
}

PolyField dev(const PolyField& f) {
    if (f.rank != 9) throw InvalidArgument("dev: matrix field expected");
    PolyField out = f;
    const MatrixXd tr = (f.comp[0] + f.comp[4] + f.comp[8]) / 3.0;
    for (int r = 0; r < 3; ++r) out.comp[4 * r] -= tr;
    return out;
}

PolyField trace(const PolyField& f) {
    if (f.rank != 9) throw InvalidArgument("trace: matrix field expected");
    PolyField out(f.degree, 1, f.nfun());
    out.comp[0] = f.comp[0] + f.comp[4] + f.comp[8];
    return out;
}

PolyField scalar_basis(int k) {
    const int nm = Monomials::get(4, k).size();
    PolyField out(k, 1, nm);
    out.comp[0].setIdentity();
    return out;
}

PolyField vector_basis(int k) {
    const int nm = Monomials::get(4, k).size();
    PolyField out(k, 3, 3 * nm);
    for (int c = 0; c < 3; ++c) out.comp[c].middleCols(c * nm, nm).setIdentity();
    return out;
}

const std::array<Mat3, 8>& traceless_unit_basis() {
    static const std::array<Mat3, 8> basis = [] {
        std::array<Mat3, 8> b;
        const int off[6][2] = {{0, 1}, {0, 2}, {1, 0}, {1, 2}, {2, 0}, {2, 1}};
        for (int i = 0; i < 6; ++i) {
            b[i].setZero();
            b[i](off[i][0], off[i][1]) = 1.0;
        }
        b[6] = Vec3(1, -1, 0).asDiagonal();
        b[7] = Vec3(0, 1, -1).asDiagonal();
        return b;
    }();
    return basis;
}

std::vector<MatrixXd> evaluate(const PolyField& f, const MatrixXd& P) {
    std::vector<MatrixXd> out(f.rank);
    for (int c = 0; c < f.rank; ++c) {
        if (f.nmono() == 0)
            out[c] = MatrixXd::Zero(P.rows(), f.nfun());
        else
            out[c] = P * f.comp[c];
    }
    return out;
}

std::vector<int> independent_columns(const MatrixXd& A, double tol) {
    if (A.cols() == 0) return {};
    Eigen::ColPivHouseholderQR<MatrixXd> qr(A);
    qr.setThreshold(tol);
    const int r = static_cast<int>(qr.rank());
    std::vector<int> cols(r);
    for (int i = 0; i < r; ++i) cols[i] = qr.colsPermutation().indices()[i];
    std::sort(cols.begin(), cols.end());
    return cols;
}

}  // namespace quadcurl
