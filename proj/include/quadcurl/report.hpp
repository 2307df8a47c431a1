#pragma once

#include "quadcurl/quadcurl.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace quadcurl {

struct ErrorColumn {
    const char* name;        ///< CSV column, e.g. err_sigma
    const char* label;       ///< markdown heading
    double ErrorRow::*member;
};

/// The error columns of the CSV schema, in order.
const std::vector<ErrorColumn>& error_columns();

/// CSV at full precision: level,h,dofs_u,dofs_lambda,dofs_phi, the error
/// columns, then one order_* column per error column (empty on level 0).
void write_csv(std::ostream& os, const ConvergenceRecord& rec);

/// Markdown error and order tables, six
/// significant digits.
void write_markdown(std::ostream& os, const ConvergenceRecord& rec);

/// Six significant digits in E notation.
std::string format_sci(double v);

}  // namespace quadcurl
