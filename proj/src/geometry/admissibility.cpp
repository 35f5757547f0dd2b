#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "brt/geometry.hpp"
#include "brt/parallel.hpp"
#include "brt/raytracer.hpp"

namespace brt::geometry {

bool AdmissibilityReport::admissible() const {
  return curvature_ok && convexity_ok && std::isfinite(L_estimate) && tangential_count_max <= 1;
}

nlohmann::json AdmissibilityReport::to_json() const {
  return {{"admissible", admissible()},
          {"curvature_ok", curvature_ok},
          {"convexity_ok", convexity_ok},
          {"L_estimate", std::isfinite(L_estimate) ? nlohmann::json(L_estimate) : nlohmann::json("inf")},
          {"tangential_count_max", tangential_count_max},
          {"a", a},
          {"max_curvature", max_curvature},
          {"min_pi_accessible", min_pi_accessible},
          {"max_pi_reflecting", max_pi_reflecting},
          {"curvature_samples", curvature_samples},
          {"boundary_samples", boundary_samples},
          {"fan_size", fan_size},
          {"errors", errors}};
}

AdmissibilityReport check_admissibility(const Domain& domain, const ConformalMetric& metric, int fan_size,
                                        double a, double L_max) {
  if (fan_size < 1) throw std::invalid_argument("fan_size must be >= 1");
  AdmissibilityReport rep;
  rep.a = a;
  rep.fan_size = fan_size;

  constexpr int kGrid = 41;
  const Vec2 c = domain.outer().center();
  const double r = domain.outer().max_radius();
  rep.max_curvature = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < kGrid; ++i)
    for (int j = 0; j < kGrid; ++j) {
      const Vec2 x = c + Vec2(-r + 2.0 * r * i / (kGrid - 1), -r + 2.0 * r * j / (kGrid - 1));
      if (!domain.contains(x)) continue;
      rep.max_curvature = std::max(rep.max_curvature, metric.curvature(x));
      ++rep.curvature_samples;
    }
  rep.curvature_ok = rep.max_curvature <= 0.0;

  constexpr int kBoundary = 256;
  rep.min_pi_accessible = std::numeric_limits<double>::infinity();
  rep.max_pi_reflecting = -std::numeric_limits<double>::infinity();
  for (const Vec2& x : domain.outer().sample(kBoundary)) {
    rep.min_pi_accessible = std::min(rep.min_pi_accessible, boundary_data(domain, metric, x).pi);
    ++rep.boundary_samples;
  }
  bool concave = true;
  if (domain.has_obstacle()) {
    for (const Vec2& x : domain.obstacle()->sample(kBoundary)) {
      rep.max_pi_reflecting = std::max(rep.max_pi_reflecting, boundary_data(domain, metric, x).pi);
      ++rep.boundary_samples;
    }
    concave = rep.max_pi_reflecting < 0.0;
  }
  rep.convexity_ok = rep.min_pi_accessible > 0.0 && concave;

  // Half the fan from inward boundary states, half from random interior states.
  const int n_boundary = (fan_size + 1) / 2;
  const int n_pos = std::max(1, static_cast<int>(std::round(std::sqrt(static_cast<double>(n_boundary)))));
  const int n_ang = (n_boundary + n_pos - 1) / n_pos;
  raytracer::FanSpec bspec;
  bspec.n_pos = n_pos;
  bspec.n_ang = n_ang;
  auto states = raytracer::sample_fan(domain, bspec).states;
  states.resize(std::min<std::size_t>(states.size(), n_boundary));
  std::mt19937_64 rng(0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  while (static_cast<int>(states.size()) < fan_size) {
    const Vec2 x = c + r * Vec2(2.0 * unit(rng) - 1.0, 2.0 * unit(rng) - 1.0);
    const double theta = 2.0 * std::numbers::pi * unit(rng);
    if (domain.contains(x)) states.push_back({x, theta});
  }

  raytracer::TraceParams params;
  params.step = 1e-3 * r;
  params.l_max = L_max;
  params.a = a;
  struct Result {
    double tau = 0.0;
    int tangential = 0;
    std::string error;
  };
  std::vector<Result> results(states.size());
  parallel_for(states.size(), [&](std::size_t i) {
    try {
      const auto ray = raytracer::trace_broken_ray(domain, metric, states[i], params);
      results[i] = {ray.tau, ray.near_tangential, {}};
    } catch (const raytracer::TraceError& e) {
      Result res;
      res.error = raytracer::to_string(e.kind());
      if (e.kind() == raytracer::TraceErrorKind::BudgetExceeded) res.tau = std::numeric_limits<double>::infinity();
      if (e.kind() == raytracer::TraceErrorKind::SecondTangentialReflection) res.tangential = 2;
      results[i] = res;
    }
  });
  for (std::size_t i = 0; i < results.size(); ++i) {
    rep.L_estimate = std::max(rep.L_estimate, results[i].tau);
    rep.tangential_count_max = std::max(rep.tangential_count_max, results[i].tangential);
    if (!results[i].error.empty()) rep.errors.push_back("ray " + std::to_string(i) + ": " + results[i].error);
  }
  return rep;
}

}  // namespace brt::geometry
