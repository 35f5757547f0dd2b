#include <cmath>
#include <numbers>

#include "brt/geometry.hpp"

namespace brt::geometry {

using std::numbers::pi;

Circle::Circle(Vec2 center, double radius) : center_(std::move(center)), radius_(radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("circle radius must be positive");
}

double Circle::level(const Vec2& x) const { return (x - center_).norm() - radius_; }

Vec2 Circle::gradient(const Vec2& x) const { return (x - center_).normalized(); }

Jet Circle::level_jet(const Jet& x, const Jet& y) const {
  const Jet dx = x - center_.x(), dy = y - center_.y();
  return sqrt(dx * dx + dy * dy) - radius_;
}

std::vector<Vec2> Circle::sample(int n) const {
  std::vector<Vec2> out;
  for (int i = 0; i < n; ++i) {
    const double t = 2.0 * pi * i / n;
    out.push_back(center_ + radius_ * Vec2(std::cos(t), std::sin(t)));
  }
  return out;
}

nlohmann::json Circle::to_json() const {
  return {{"circle", {{"center", {center_.x(), center_.y()}}, {"radius", radius_}}}};
}

Ellipse::Ellipse(Vec2 center, double a, double b) : center_(std::move(center)), a_(a), b_(b) {
  if (!(a > 0.0 && b > 0.0)) throw std::invalid_argument("ellipse semi-axes must be positive");
}

double Ellipse::level(const Vec2& x) const {
  const Vec2 d = x - center_;
  return std::min(a_, b_) * (std::hypot(d.x() / a_, d.y() / b_) - 1.0);
}

Vec2 Ellipse::gradient(const Vec2& x) const {
  const Vec2 d = x - center_;
  const double rho = std::hypot(d.x() / a_, d.y() / b_);
  return std::min(a_, b_) / rho * Vec2(d.x() / (a_ * a_), d.y() / (b_ * b_));
}

Jet Ellipse::level_jet(const Jet& x, const Jet& y) const {
  const Jet u = (x - center_.x()) / a_, w = (y - center_.y()) / b_;
  return std::min(a_, b_) * (sqrt(u * u + w * w) - 1.0);
}

double Ellipse::curvature(const Vec2& x) const {
  const Vec2 d = x - center_;
  const double t = std::atan2(d.y() / b_, d.x() / a_);
  const double s = std::sin(t), c = std::cos(t);
  return a_ * b_ / std::pow(a_ * a_ * s * s + b_ * b_ * c * c, 1.5);
}

std::vector<Vec2> Ellipse::sample(int n) const {
  constexpr int kTable = 8192;
  std::vector<double> arc(kTable + 1, 0.0);
  auto point = [&](double t) { return Vec2(center_.x() + a_ * std::cos(t), center_.y() + b_ * std::sin(t)); };
  for (int i = 1; i <= kTable; ++i)
    arc[i] = arc[i - 1] + (point(2.0 * pi * i / kTable) - point(2.0 * pi * (i - 1) / kTable)).norm();
  std::vector<Vec2> out;
  int seg = 0;
  for (int i = 0; i < n; ++i) {
    const double s = arc[kTable] * i / n;
    while (arc[seg + 1] < s) ++seg;
    const double f = (s - arc[seg]) / (arc[seg + 1] - arc[seg]);
    out.push_back(point(2.0 * pi * (seg + f) / kTable));
  }
  return out;
}

nlohmann::json Ellipse::to_json() const {
  return {{"ellipse", {{"center", {center_.x(), center_.y()}}, {"semi_axes", {a_, b_}}}}};
}

Domain::Domain(std::shared_ptr<const Curve> outer, std::shared_ptr<const Curve> obstacle)
    : outer_(std::move(outer)), obstacle_(std::move(obstacle)) {
  if (!outer_) throw std::invalid_argument("domain needs an outer curve");
  if (!(gap() > 0.0)) throw std::invalid_argument("obstacle must lie strictly inside the outer curve");
}

double Domain::defining_function(const Vec2& x) const {
  const double f = outer_->level(x);
  return obstacle_ ? std::max(f, -obstacle_->level(x)) : f;
}

double Domain::gap() const {
  if (!obstacle_) return outer_->min_radius();
  return outer_->min_radius() - (outer_->center() - obstacle_->center()).norm() - obstacle_->max_radius();
}

nlohmann::json Domain::to_json() const {
  return {{"outer", outer_->to_json()}, {"obstacle", obstacle_ ? obstacle_->to_json() : nlohmann::json()}};
}

BoundaryPoint boundary_data(const Domain& domain, const ConformalMetric& metric, const Vec2& x) {
  const Jet p = metric.phi(x, 1);
  const double e = std::exp(-p.value());
  const Vec2 grad_phi(p.derivative(1, 0), p.derivative(0, 1));
  auto make = [&](const Vec2& n, double kappa, BoundaryComponent c) {
    return BoundaryPoint{x, e * n, e * (kappa + grad_phi.dot(n)), c, 1.0 / (e * e)};
  };
  if (std::abs(domain.outer().level(x)) <= kBoundaryTolerance)
    return make(domain.outer().outward_normal(x), domain.outer().curvature(x), BoundaryComponent::Accessible);
  if (const Curve* obs = domain.obstacle(); obs && std::abs(obs->level(x)) <= kBoundaryTolerance)
    return make(-obs->outward_normal(x), -obs->curvature(x), BoundaryComponent::Reflecting);
  throw NotOnBoundary("point is not on the domain boundary");
}

Vec2 reflect(const BoundaryPoint& bp, const Vec2& v) {
  return v - 2.0 * bp.metric_scale * v.dot(bp.nu) * bp.nu;
}

double wrap_angle(double theta) {
  double t = std::fmod(theta, 2.0 * pi);
  if (t < 0.0) t += 2.0 * pi;
  if (t >= 2.0 * pi) t = 0.0;
  return t;
}

double reflect_angle(const BoundaryPoint& bp, double theta) {
  return wrap_angle(2.0 * std::atan2(bp.nu.y(), bp.nu.x()) + pi - theta);
}

double normal_cosine(const BoundaryPoint& bp, double theta) {
  return std::sqrt(bp.metric_scale) * (std::cos(theta) * bp.nu.x() + std::sin(theta) * bp.nu.y());
}

PhasePoint reverse(const PhasePoint& p) { return {p.x, wrap_angle(p.theta + pi)}; }

}  // namespace brt::geometry
