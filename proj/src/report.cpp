#include "quadcurl/report.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace quadcurl {

const std::vector<ErrorColumn>& error_columns() {
    static const std::vector<ErrorColumn> cols = {
        {"err_sigma", "||sigma - sigma_h||", &ErrorRow::err_sigma},
        {"err_u", "||u - u_h||", &ErrorRow::err_u},
        {"err_curlu", "||curl(u - u_h)||", &ErrorRow::err_curlu},
        {"err_gradcurlu_broken", "||grad_h curl(u - u_h)||", &ErrorRow::err_gradcurlu_broken},
        {"err_supercurl", "||curl(I_h u - u_h)||", &ErrorRow::err_supercurl},
        {"err_curlu_star", "||curl(u - u*_h)||", &ErrorRow::err_curlu_star},
        {"err_gradcurlu_star", "||grad_h curl(u - u*_h)||", &ErrorRow::err_gradcurlu_star},
        {"err_multiplier", "||n x curl u_h - lambda_h||_{-1/2,h}", &ErrorRow::err_multiplier},
    };
    return cols;
}

namespace {

std::string full(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double order(const ErrorRow& coarse, const ErrorRow& fine, double ErrorRow::*m) {
    return std::log2(coarse.*m / (fine.*m));
}

std::string md(double v) { return std::isnan(v) ? "-" : format_sci(v); }

std::string md_order(double v) {
    if (std::isnan(v) || std::isinf(v)) return "-";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

void table(std::ostream& os, const ConvergenceRecord& rec, const std::vector<ErrorColumn>& cols) {
    os << "| h | DoFs |";
    for (const auto& c : cols) os << ' ' << c.label << " | order |";
    os << "\n|---|---|";
    for (std::size_t i = 0; i < cols.size(); ++i) os << "---|---|";
    os << '\n';
    for (std::size_t i = 0; i < rec.rows.size(); ++i) {
        const ErrorRow& r = rec.rows[i];
        os << "| " << format_sci(r.h) << " | " << r.dofs_u + r.dofs_lambda + r.dofs_phi << " |";
        for (const auto& c : cols) {
            os << ' ' << md(r.*c.member) << " | ";
            os << (i == 0 ? "-" : md_order(order(rec.rows[i - 1], r, c.member))) << " |";
        }
        os << '\n';
    }
}

}  // namespace

std::string format_sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.5E", v);
    return buf;
}

void write_csv(std::ostream& os, const ConvergenceRecord& rec) {
    const auto& cols = error_columns();
    os << "level,h,dofs_u,dofs_lambda,dofs_phi";
    for (const auto& c : cols) os << ',' << c.name;
    for (const auto& c : cols) os << ",order_" << (c.name + 4);
    os << '\n';
    for (std::size_t i = 0; i < rec.rows.size(); ++i) {
        const ErrorRow& r = rec.rows[i];
        os << r.level << ',' << full(r.h) << ',' << r.dofs_u << ',' << r.dofs_lambda << ',' << r.dofs_phi;
        for (const auto& c : cols) os << ',' << full(r.*c.member);
        for (const auto& c : cols) {
            os << ',';
            if (i > 0) os << full(order(rec.rows[i - 1], r, c.member));
        }
        os << '\n';
    }
}

void write_markdown(std::ostream& os, const ConvergenceRecord& rec) {
    const auto& cols = error_columns();
    os << "## Errors, k = " << rec.k << ", l = " << rec.l << "\n\n";
    table(os, rec, {cols[0], cols[1], cols[2], cols[3], cols[4], cols[7]});
    os << "\nMesh-dependent |curl(u - u_h)|_{1,h} including face jumps:\n\n| h | value | order |\n|---|---|---|\n";
    for (std::size_t i = 0; i < rec.rows.size(); ++i) {
        const ErrorRow& r = rec.rows[i];
        os << "| " << format_sci(r.h) << " | " << md(r.err_curlu_1h) << " | "
           << (i == 0 ? "-" : md_order(order(rec.rows[i - 1], r, &ErrorRow::err_curlu_1h))) << " |\n";
    }
    os << "\n## Errors of the post-processed solution, k = " << rec.k << ", l = " << rec.l << "\n\n";
    table(os, rec, {cols[5], cols[6]});
}

}  // namespace quadcurl
