#include <cmath>

#include "brt/geometry.hpp"

namespace brt::geometry {

ConformalMetric::ConformalMetric() = default;

ConformalMetric::ConformalMetric(ScalarExprPtr phi) : phi_(std::move(phi)) {}

Jet ConformalMetric::phi(const Vec2& x, int order) const {
  if (!phi_) return Jet(0.0, order);
  return phi_->at(x.x(), x.y(), order);
}

double ConformalMetric::phi_value(const Vec2& x) const { return phi_ ? phi_->value(x.x(), x.y()) : 0.0; }

double ConformalMetric::curvature(const Vec2& x) const {
  if (!phi_) return 0.0;
  const Jet p = phi(x, 2);
  return -std::exp(-2.0 * p.value()) * (p.derivative(2, 0) + p.derivative(0, 2));
}

double curvature(const ConformalMetric& metric, const Vec2& x) { return metric.curvature(x); }

std::array<std::array<std::array<double, 2>, 2>, 2> ConformalMetric::christoffel(const Vec2& x) const {
  std::array<std::array<std::array<double, 2>, 2>, 2> g{};
  if (!phi_) return g;
  const Jet p = phi(x, 1);
  const double d[2] = {p.derivative(1, 0), p.derivative(0, 1)};
  for (int k = 0; k < 2; ++k)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        g[k][i][j] = (k == i ? d[j] : 0.0) + (k == j ? d[i] : 0.0) - (i == j ? d[k] : 0.0);
  return g;
}

Vec2 ConformalMetric::unit_tangent(const Vec2& x, double theta) const {
  return std::exp(-phi_value(x)) * Vec2(std::cos(theta), std::sin(theta));
}

double ConformalMetric::inner(const Vec2& x, const Vec2& a, const Vec2& b) const {
  return std::exp(2.0 * phi_value(x)) * a.dot(b);
}

double ConformalMetric::norm(const Vec2& x, const Vec2& a) const { return std::sqrt(inner(x, a, a)); }

Eigen::Vector3d ConformalMetric::flow(const Eigen::Vector3d& s) const {
  const double c = std::cos(s[2]), sn = std::sin(s[2]);
  if (!phi_) return {c, sn, 0.0};
  const Jet p = phi_->at(s[0], s[1], 1);
  const double e = std::exp(-p.value());
  return {e * c, e * sn, e * (-p.derivative(1, 0) * sn + p.derivative(0, 1) * c)};
}

}  // namespace brt::geometry
