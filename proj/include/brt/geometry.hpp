#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "brt/expr.hpp"
#include "brt/jet.hpp"

namespace brt::geometry {

using Vec2 = Eigen::Vector2d;

// g = e^{2 phi} (dx^2 + dy^2).
class ConformalMetric {
 public:
  ConformalMetric();  // Euclidean
  explicit ConformalMetric(ScalarExprPtr phi);

  bool is_flat() const { return !phi_; }
  Jet phi(const Vec2& x, int order) const;
  double phi_value(const Vec2& x) const;
  double curvature(const Vec2& x) const;
  // Gamma^k_ij at x, indexed [k][i][j].
  std::array<std::array<std::array<double, 2>, 2>, 2> christoffel(const Vec2& x) const;
  Vec2 unit_tangent(const Vec2& x, double theta) const;
  double inner(const Vec2& x, const Vec2& a, const Vec2& b) const;
  double norm(const Vec2& x, const Vec2& a) const;
  // Geodesic flow in (x, y, theta) coordinates.
  Eigen::Vector3d flow(const Eigen::Vector3d& state) const;

 private:
  ScalarExprPtr phi_;
};

double curvature(const ConformalMetric& metric, const Vec2& x);

// Smooth closed convex curve. level < 0 inside, 0 on the curve, approximately a signed distance.
class Curve {
 public:
  virtual ~Curve() = default;
  virtual double level(const Vec2& x) const = 0;
  virtual Vec2 gradient(const Vec2& x) const = 0;
  virtual Jet level_jet(const Jet& x, const Jet& y) const = 0;
  // Euclidean curvature (positive) at a point on the curve.
  virtual double curvature(const Vec2& x) const = 0;
  virtual std::vector<Vec2> sample(int n) const = 0;  // uniform in arc length
  virtual Vec2 center() const = 0;
  virtual double max_radius() const = 0;  // about center()
  virtual double min_radius() const = 0;
  virtual nlohmann::json to_json() const = 0;

  Vec2 outward_normal(const Vec2& x) const { return gradient(x).normalized(); }
};

class Circle final : public Curve {
 public:
  Circle(Vec2 center, double radius);
  double level(const Vec2& x) const override;
  Vec2 gradient(const Vec2& x) const override;
  Jet level_jet(const Jet& x, const Jet& y) const override;
  double curvature(const Vec2&) const override { return 1.0 / radius_; }
  std::vector<Vec2> sample(int n) const override;
  Vec2 center() const override { return center_; }
  double radius() const { return radius_; }
  double max_radius() const override { return radius_; }
  double min_radius() const override { return radius_; }
  nlohmann::json to_json() const override;

 private:
  Vec2 center_;
  double radius_;
};

// Axis-aligned ellipse. Level is b_min * (sqrt((dx/a)^2 + (dy/b)^2) - 1).
class Ellipse final : public Curve {
 public:
  Ellipse(Vec2 center, double a, double b);
  double level(const Vec2& x) const override;
  Vec2 gradient(const Vec2& x) const override;
  Jet level_jet(const Jet& x, const Jet& y) const override;
  double curvature(const Vec2& x) const override;
  std::vector<Vec2> sample(int n) const override;
  Vec2 center() const override { return center_; }
  double max_radius() const override { return std::max(a_, b_); }
  double min_radius() const override { return std::min(a_, b_); }
  nlohmann::json to_json() const override;

 private:
  Vec2 center_;
  double a_, b_;
};

enum class BoundaryComponent { Accessible, Reflecting };  // E, R

struct BoundaryPoint {
  Vec2 x;
  Vec2 nu;  // g-unit outward normal of M, Cartesian components
  double pi;
  BoundaryComponent component;
  double metric_scale;  // e^{2 phi(x)}
};

struct PhasePoint {
  Vec2 x;
  double theta;
};

class NotOnBoundary : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class Domain {
 public:
  Domain(std::shared_ptr<const Curve> outer, std::shared_ptr<const Curve> obstacle = nullptr);

  const Curve& outer() const { return *outer_; }
  const Curve* obstacle() const { return obstacle_.get(); }
  bool has_obstacle() const { return obstacle_ != nullptr; }
  // F < 0 inside M.
  double defining_function(const Vec2& x) const;
  bool contains(const Vec2& x) const { return defining_function(x) < 0.0; }
  // Lower bound on the distance between E and R (outer inradius about its centre without obstacle).
  double gap() const;
  nlohmann::json to_json() const;

 private:
  std::shared_ptr<const Curve> outer_;
  std::shared_ptr<const Curve> obstacle_;
};

inline constexpr double kBoundaryTolerance = 1e-10;

BoundaryPoint boundary_data(const Domain& domain, const ConformalMetric& metric, const Vec2& x);
Vec2 reflect(const BoundaryPoint& bp, const Vec2& v);
double reflect_angle(const BoundaryPoint& bp, double theta);
PhasePoint reverse(const PhasePoint& p);
double wrap_angle(double theta);  // into [0, 2 pi)
// <v, nu>_g for the unit tangent with angle theta.
double normal_cosine(const BoundaryPoint& bp, double theta);

struct AdmissibilityReport {
  bool curvature_ok = false;
  bool convexity_ok = false;
  double L_estimate = 0.0;
  int tangential_count_max = 0;
  double a = 0.0;
  double max_curvature = 0.0;
  double min_pi_accessible = 0.0;
  double max_pi_reflecting = 0.0;
  int curvature_samples = 0;
  int boundary_samples = 0;
  int fan_size = 0;
  std::vector<std::string> errors;

  bool admissible() const;
  nlohmann::json to_json() const;
};

AdmissibilityReport check_admissibility(const Domain& domain, const ConformalMetric& metric, int fan_size,
                                        double a, double L_max);

struct Geometry {
  std::shared_ptr<const ConformalMetric> metric;
  std::shared_ptr<const Domain> domain;
};

// {"metric": {"phi": ...}, "outer": {"circle": ...}, "obstacle": null | {...}}. Throws ConfigError.
Geometry parse_geometry(const nlohmann::json& j);

}  // namespace brt::geometry
