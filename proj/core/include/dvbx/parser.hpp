#pragma once

#include <string>

#include "dvbx/scalar_expr.hpp"
#include "dvbx/space.hpp"

namespace dvbx {

/// Parses the expression DSL into a normalized ScalarExpr.
///
/// Grammar (whitespace insignificant):
///   expr    := term (('+'|'-') term)*
///   term    := factor (('*'|'/') factor)*
///   factor  := ('+'|'-') factor | power
///   power   := primary ('^' intexp)?          -- intexp: 2, -1 or (-1)
///   primary := integer | name | name '[' int (',' int)* ']'
///            | fn '(' expr ')' | '(' expr ')'
///
/// Names resolve against the space signature: declared dependent variables
/// become fiber coordinates (offset defaults to zero, e.g. `u` == `u[0,0]`),
/// `n1`..`np` are base coordinates, `sin cos exp ln` are functions, anything
/// else is a named constant. Division requires a monomial divisor; numeric
/// literals are exact rationals (`1/2`, or decimals like `0.1` == 1/10).
ScalarExpr parse_expr(const std::string& src, const Space& space);

}  // namespace dvbx
