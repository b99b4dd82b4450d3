#pragma once

#include <string_view>

#include "cochainflow/analytic_form.hpp"
#include "cochainflow/errors.hpp"

namespace cochainflow {

class FormParseError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Parses a trigonometric form on the unit torus, e.g.
///
///   "sin(2pi x) dy"
///   "cos(2pi x)*sin(2pi y) dx - sin(2pi x)*cos(2pi y) dy"
///   "0.5*cos(2pi(x+y)) dx^dy"
///   "1"
///
/// Each term is an optional coefficient, a product of sin/cos factors whose
/// arguments are 2pi times an integer combination of x, y, z, and an optional
/// wedge of differentials. A parenthesized sum of scalar terms may stand in
/// for a factor, as in "(sin(2pi x) + 1) dy". All terms must have the same
/// degree. The names
/// "taylor-green" and "tg" are accepted as shorthands.
AnalyticForm parse_form(std::string_view text, int dim = 2);

}  // namespace cochainflow
