#include "brt/errors.hpp"
#include "brt/geometry.hpp"
#include "brt/json_util.hpp"

namespace brt::geometry {

using namespace json_util;

namespace {

ScalarExprPtr parse_phi(const nlohmann::json& j) {
  if (j.is_string() && j.get<std::string>() == "zero") return nullptr;
  if (!j.is_object() || j.size() != 1) throw ConfigError("metric.phi: expected \"zero\", gaussian_bump or quadratic");
  const std::string kind = j.begin().key();
  const auto& body = j.begin().value();
  if (kind == "gaussian_bump") {
    check_keys(body, {"amplitude", "center", "width"}, "gaussian_bump");
    const double w = number(body, "width", "gaussian_bump");
    if (!(w > 0.0)) throw ConfigError("gaussian_bump: width must be positive");
    return make_gaussian(number(body, "amplitude", "gaussian_bump"), pair(body, "center", "gaussian_bump"), w);
  }
  if (kind == "quadratic") {
    check_keys(body, {"xx", "xy", "yy", "x", "y"}, "quadratic");
    return make_polynomial({{number_or(body, "xx", 0.0, "quadratic"), 2, 0},
                            {number_or(body, "xy", 0.0, "quadratic"), 1, 1},
                            {number_or(body, "yy", 0.0, "quadratic"), 0, 2},
                            {number_or(body, "x", 0.0, "quadratic"), 1, 0},
                            {number_or(body, "y", 0.0, "quadratic"), 0, 1}});
  }
  throw ConfigError("metric.phi: unknown kind '" + kind + "'");
}

std::shared_ptr<const Curve> parse_curve(const nlohmann::json& j, const std::string& where, bool allow_ellipse) {
  if (!j.is_object() || j.size() != 1) throw ConfigError(where + ": expected {\"circle\": ...}");
  const std::string kind = j.begin().key();
  const auto& body = j.begin().value();
  if (kind == "circle") {
    check_keys(body, {"center", "radius"}, where + ".circle");
    const double r = number(body, "radius", where);
    if (!(r > 0.0)) throw ConfigError(where + ": radius must be positive");
    const auto c = body.contains("center") ? pair(body, "center", where) : std::array<double, 2>{0.0, 0.0};
    return std::make_shared<Circle>(Vec2(c[0], c[1]), r);
  }
  if (kind == "ellipse" && allow_ellipse) {
    check_keys(body, {"center", "semi_axes"}, where + ".ellipse");
    const auto ax = pair(body, "semi_axes", where);
    if (!(ax[0] > 0.0 && ax[1] > 0.0)) throw ConfigError(where + ": semi_axes must be positive");
    const auto c = body.contains("center") ? pair(body, "center", where) : std::array<double, 2>{0.0, 0.0};
    return std::make_shared<Ellipse>(Vec2(c[0], c[1]), ax[0], ax[1]);
  }
  throw ConfigError(where + ": unsupported curve '" + kind + "'");
}

}  // namespace

Geometry parse_geometry(const nlohmann::json& j) {
  check_keys(j, {"metric", "outer", "obstacle"}, "geometry");
  ScalarExprPtr phi;
  if (j.contains("metric")) {
    check_keys(j.at("metric"), {"phi"}, "geometry.metric");
    if (j.at("metric").contains("phi")) phi = parse_phi(j.at("metric").at("phi"));
  }
  if (!j.contains("outer")) throw ConfigError("geometry: 'outer' is required");
  auto outer = parse_curve(j.at("outer"), "geometry.outer", false);
  std::shared_ptr<const Curve> obstacle;
  if (j.contains("obstacle") && !j.at("obstacle").is_null())
    obstacle = parse_curve(j.at("obstacle"), "geometry.obstacle", true);
  Geometry g;
  g.metric = phi ? std::make_shared<ConformalMetric>(phi) : std::make_shared<ConformalMetric>();
  try {
    g.domain = std::make_shared<Domain>(outer, obstacle);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("geometry: ") + e.what());
  }
  return g;
}

}  // namespace brt::geometry
