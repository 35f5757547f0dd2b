#pragma once

#include <array>
#include <memory>
#include <vector>

#include <json.hpp>

#include "brt/expr.hpp"
#include "brt/geometry.hpp"
#include "brt/jet.hpp"

namespace brt::tensorfield {

using geometry::ConformalMetric;
using geometry::Domain;
using geometry::PhasePoint;
using geometry::Vec2;

inline constexpr int kMaxRank = 4;
inline constexpr int kMaxFieldRank = 3;

// Independent components of a symmetric rank-m tensor: c[j] is the component with j indices equal to 2.
struct ComponentJets {
  int rank = 0;
  std::array<Jet, kMaxRank + 1> c;
};

class SymTensorField {
 public:
  SymTensorField(int rank, std::shared_ptr<const ConformalMetric> metric);
  virtual ~SymTensorField() = default;

  int rank() const { return rank_; }
  const ConformalMetric& metric() const { return *metric_; }
  const std::shared_ptr<const ConformalMetric>& metric_ptr() const { return metric_; }
  // Component jets at x, exact to the given derivative order.
  virtual ComponentJets components(const Vec2& x, int order) const = 0;

 private:
  int rank_;
  std::shared_ptr<const ConformalMetric> metric_;
};

using FieldPtr = std::shared_ptr<const SymTensorField>;

double binomial(int n, int k);
// sum_j C(m, j) c_j v1^{m-j} v2^j
double contract(const ComponentJets& f, double v1, double v2);
double eval_on_sm(const SymTensorField& f, const PhasePoint& p);

// Missing (null) components are zero.
FieldPtr make_expression_field(std::shared_ptr<const ConformalMetric> metric, int rank,
                               std::vector<ScalarExprPtr> components);
FieldPtr make_metric_tensor(std::shared_ptr<const ConformalMetric> metric);
FieldPtr sym_cov_derivative(FieldPtr h);
FieldPtr add(FieldPtr a, FieldPtr b);
FieldPtr scale(FieldPtr a, double s);

struct GaugeSpec {
  FieldPtr seed;  // rank m-1
  double cutoff_width = 0.3;
  double blend_width = 0.3;
};

// h = chi * h~, chi vanishing to all orders on E, h~ with nu-odd parts removed on R.
FieldPtr make_admissible_potential(std::shared_ptr<const Domain> domain, const GaugeSpec& spec);

std::vector<int> fiber_degrees(const SymTensorField& f, const std::vector<Vec2>& points, int n_theta = 32);
std::vector<int> fiber_degrees(const SymTensorField& f);

// {"rank": m, "components": {"<indices over 1,2>": expr}}; throws ConfigError.
FieldPtr parse_field(const nlohmann::json& j, std::shared_ptr<const ConformalMetric> metric);
// {"seed": field, "cutoff_width": w, "blend_width": w}
GaugeSpec parse_gauge(const nlohmann::json& j, std::shared_ptr<const ConformalMetric> metric);

}  // namespace brt::tensorfield
