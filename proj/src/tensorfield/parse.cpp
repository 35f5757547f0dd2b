#include <algorithm>

#include "brt/errors.hpp"
#include "brt/json_util.hpp"
#include "brt/tensorfield.hpp"

namespace brt::tensorfield {

FieldPtr parse_field(const nlohmann::json& j, std::shared_ptr<const ConformalMetric> metric) {
  using namespace json_util;
  check_keys(j, {"rank", "components"}, "field");
  const int rank = integer(j, "rank", "field");
  if (rank < 0 || rank > kMaxFieldRank) throw ConfigError("field: rank must be in 0..3");
  std::vector<ScalarExprPtr> comps(rank + 1);
  if (j.contains("components")) {
    if (!j.at("components").is_object()) throw ConfigError("field.components: expected an object");
    for (const auto& [key, expr] : j.at("components").items()) {
      if (static_cast<int>(key.size()) != rank || key.find_first_not_of("12") != std::string::npos)
        throw ConfigError("field.components: key '" + key + "' must be " + std::to_string(rank) +
                          " indices from {1,2}");
      const auto q = std::count(key.begin(), key.end(), '2');
      if (comps[q]) throw ConfigError("field.components: '" + key + "' duplicates a symmetric component");
      comps[q] = parse_expr(expr);
    }
  }
  return make_expression_field(std::move(metric), rank, std::move(comps));
}

GaugeSpec parse_gauge(const nlohmann::json& j, std::shared_ptr<const ConformalMetric> metric) {
  using namespace json_util;
  check_keys(j, {"seed", "cutoff_width", "blend_width"}, "gauge");
  if (!j.contains("seed")) throw ConfigError("gauge: 'seed' is required");
  GaugeSpec spec;
  spec.seed = parse_field(j.at("seed"), std::move(metric));
  spec.cutoff_width = number_or(j, "cutoff_width", spec.cutoff_width, "gauge");
  spec.blend_width = number_or(j, "blend_width", spec.blend_width, "gauge");
  return spec;
}

}  // namespace brt::tensorfield
