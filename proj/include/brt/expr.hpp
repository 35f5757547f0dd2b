#pragma once

#include <array>
#include <memory>
#include <vector>

#include <json.hpp>

#include "brt/jet.hpp"

namespace brt {

// Smooth scalar function of the plane, evaluated on jets of the coordinates.
class ScalarExpr {
 public:
  virtual ~ScalarExpr() = default;
  virtual Jet eval(const Jet& x, const Jet& y) const = 0;

  // Jet of the function about (x, y) to the given derivative order.
  Jet at(double x, double y, int order) const;
  double value(double x, double y) const;
};

using ScalarExprPtr = std::shared_ptr<const ScalarExpr>;

struct Monomial {
  double coef;
  int px;
  int py;
};

ScalarExprPtr make_constant(double c);
ScalarExprPtr make_polynomial(std::vector<Monomial> terms);
// amplitude * exp(-|x - center|^2 / (2 width^2))
ScalarExprPtr make_gaussian(double amplitude, std::array<double, 2> center, double width);
// amplitude * cos(kx x + ky y + phase)
ScalarExprPtr make_trig(double amplitude, std::array<double, 2> k, double phase);
ScalarExprPtr make_sum(std::vector<ScalarExprPtr> terms);
ScalarExprPtr make_product(std::vector<ScalarExprPtr> factors);
ScalarExprPtr make_scaled(ScalarExprPtr e, double s);

// Expression vocabulary: a number, {"poly": [[c, i, j], ...]},
// {"gaussian": {"amplitude", "center", "width"}}, {"trig": {"amplitude", "k", "phase"}},
// {"sum": [...]}, {"product": [...]}. Throws ConfigError.
ScalarExprPtr parse_expr(const nlohmann::json& j);

}  // namespace brt
