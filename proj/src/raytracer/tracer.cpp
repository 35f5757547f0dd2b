#include <cmath>

#include "brt/raytracer.hpp"

namespace brt::raytracer {

namespace {

using State = Eigen::Vector3d;

constexpr double kGrazing = 1e-9;
constexpr double kEventTolerance = 1e-12;
constexpr int kMaxBisection = 60;

State rk4(const ConformalMetric& metric, const State& s, double h) {
  if (metric.is_flat()) return {s[0] + h * std::cos(s[2]), s[1] + h * std::sin(s[2]), s[2]};
  const State k1 = metric.flow(s);
  const State k2 = metric.flow(s + 0.5 * h * k1);
  const State k3 = metric.flow(s + 0.5 * h * k2);
  const State k4 = metric.flow(s + h * k3);
  return s + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

enum class Crossing { None, Outer, Obstacle };

// Positive outside M with respect to the given curve.
double excess(const Domain& d, Crossing c, const State& s) {
  const Vec2 x(s[0], s[1]);
  return c == Crossing::Outer ? d.outer().level(x) : -d.obstacle()->level(x);
}

Crossing crossed(const Domain& d, const State& s) {
  if (excess(d, Crossing::Outer, s) > 0.0) return Crossing::Outer;
  if (d.has_obstacle() && excess(d, Crossing::Obstacle, s) > 0.0) return Crossing::Obstacle;
  return Crossing::None;
}

Sample sample_of(double t, const State& s) { return {t, Vec2(s[0], s[1]), s[2]}; }

}  // namespace

std::string to_string(TraceErrorKind kind) {
  switch (kind) {
    case TraceErrorKind::BudgetExceeded: return "BudgetExceeded";
    case TraceErrorKind::SecondTangentialReflection: return "SecondTangentialReflection";
    case TraceErrorKind::StuckAtBoundary: return "StuckAtBoundary";
  }
  return "Unknown";
}

PhasePoint step_geodesic(const ConformalMetric& metric, const PhasePoint& p, double h) {
  const State s = rk4(metric, State(p.x.x(), p.x.y(), p.theta), h);
  return {Vec2(s[0], s[1]), s[2]};
}

BrokenRay trace_broken_ray(const Domain& domain, const ConformalMetric& metric, const PhasePoint& p0,
                           const TraceParams& params) {
  if (domain.defining_function(p0.x) > geometry::kBoundaryTolerance)
    throw std::invalid_argument("start point lies outside M");
  BrokenRay ray;
  ray.start = p0;
  State s(p0.x.x(), p0.x.y(), geometry::wrap_angle(p0.theta));
  GeodesicSegment seg;
  seg.start_event = Event::Launch;
  seg.samples.push_back(sample_of(0.0, s));

  if (std::abs(domain.outer().level(p0.x)) <= geometry::kBoundaryTolerance) {
    const auto bp = geometry::boundary_data(domain, metric, p0.x);
    if (geometry::normal_cosine(bp, s[2]) >= -kGrazing) {
      seg.end_event = Event::Exit;
      ray.segments.push_back(std::move(seg));
      ray.exit = {p0.x, s[2]};
      return ray;
    }
  } else if (domain.has_obstacle() && std::abs(domain.obstacle()->level(p0.x)) <= geometry::kBoundaryTolerance) {
    const auto bp = geometry::boundary_data(domain, metric, p0.x);
    if (geometry::normal_cosine(bp, s[2]) > kGrazing)
      throw std::invalid_argument("start on R points into the obstacle");
  }

  double t = 0.0;
  for (;;) {
    if (t > params.l_max)
      throw TraceError(TraceErrorKind::BudgetExceeded, "exit time exceeds L_max");
    double h = params.step;
    if (domain.has_obstacle() && domain.obstacle()->level(Vec2(s[0], s[1])) < 2.0 * params.step) h *= 0.25;

    const State mid = rk4(metric, s, 0.5 * h);
    const State end = rk4(metric, s, h);
    Crossing c = crossed(domain, mid);
    double hi = 0.5 * h;
    if (c == Crossing::None) {
      c = crossed(domain, end);
      hi = h;
    }
    if (c == Crossing::None) {
      seg.samples.push_back(sample_of(t + 0.5 * h, mid));
      seg.samples.push_back(sample_of(t + h, end));
      t += h;
      s = end;
      continue;
    }

    double lo = 0.0;
    for (int it = 0; it < kMaxBisection; ++it) {
      const double m = 0.5 * (lo + hi);
      if (m <= lo || m >= hi) break;
      if (excess(domain, c, rk4(metric, s, m)) > 0.0)
        hi = m;
      else
        lo = m;
    }
    const State at_hi = rk4(metric, s, hi);
    double sigma = hi;
    State ev = at_hi;
    if (lo > 0.0) {
      const State at_lo = rk4(metric, s, lo);
      if (std::abs(excess(domain, c, at_lo)) < std::abs(excess(domain, c, at_hi))) {
        sigma = lo;
        ev = at_lo;
      }
    }
    if (!(std::abs(excess(domain, c, ev)) < kEventTolerance))
      throw TraceError(TraceErrorKind::StuckAtBoundary, "event location did not converge");

    seg.samples.push_back(sample_of(t + 0.5 * sigma, rk4(metric, s, 0.5 * sigma)));
    seg.samples.push_back(sample_of(t + sigma, ev));
    t += sigma;
    s = ev;

    if (c == Crossing::Outer) {
      seg.end_event = Event::Exit;
      ray.segments.push_back(std::move(seg));
      ray.tau = t;
      ray.exit = {Vec2(s[0], s[1]), s[2]};
      return ray;
    }

    const Vec2 x(s[0], s[1]);
    const auto bp = geometry::boundary_data(domain, metric, x);
    const double cosine = geometry::normal_cosine(bp, s[2]);
    if (std::abs(cosine) < kGrazing) {
      ray.grazing = true;
      continue;
    }
    const double theta_out = geometry::reflect_angle(bp, s[2]);
    ray.reflections.push_back(
        {x, metric.unit_tangent(x, s[2]), metric.unit_tangent(x, theta_out), std::abs(cosine)});
    if (std::abs(cosine) < params.a && ++ray.near_tangential >= 2)
      throw TraceError(TraceErrorKind::SecondTangentialReflection, "second near-tangential reflection");
    if (static_cast<int>(ray.reflections.size()) > params.max_reflections)
      throw TraceError(TraceErrorKind::StuckAtBoundary, "reflection count exceeds limit");
    s[2] = theta_out;
    seg.end_event = Event::Reflection;
    ray.segments.push_back(std::move(seg));
    seg = GeodesicSegment{};
    seg.start_event = Event::Reflection;
    seg.samples.push_back(sample_of(t, s));
  }
}

}  // namespace brt::raytracer
