#include <cmath>

#include "brt/smcalculus.hpp"

namespace brt::smcalculus {

namespace {

double shell(double r, double rc, double sigma) {
  const double t = (r - rc) / sigma;
  return std::exp(-t * t);
}

}  // namespace

std::vector<TestFunction> interior_batch(const Vec2& c, double r_lo, double r_hi) {
  const double rc = 0.5 * (r_lo + r_hi);
  const double sigma = (r_hi - r_lo) / 8.0;
  std::vector<TestFunction> batch;
  batch.push_back([=](const Vec2& x, double th) { return shell((x - c).norm(), rc, sigma) * std::cos(2 * th); });
  batch.push_back([=](const Vec2& x, double th) {
    const Vec2 d = x - c;
    const double ang = std::atan2(d.y(), d.x());
    return shell(d.norm(), rc, sigma) * (1.0 + 0.3 * std::cos(ang)) * (std::sin(th) + 0.5 * std::cos(3 * th));
  });
  return batch;
}

TestFunction reflection_symmetric(const Vec2& c) {
  return [=](const Vec2& x, double th) {
    const Vec2 d = x - c;
    const double s = th - std::atan2(d.y(), d.x());
    const double a = 1.0 + 0.25 * d.norm();
    return a * (0.5 + std::sin(s) + std::cos(2 * s) + 0.5 * std::sin(3 * s));
  };
}

TestFunction comm_proj_input(const Vec2& c, double r_lo, double r_hi, int m) {
  const double rc = 0.5 * (r_lo + r_hi);
  const double sigma = (r_hi - r_lo) / 6.0;
  return [=](const Vec2& x, double th) {
    const Vec2 d = x - c;
    const double a = shell(d.norm(), rc, sigma);
    const double b = shell(d.norm(), rc, 0.7 * sigma) * (1.0 + 0.2 * d.x());
    return a * (std::cos((m + 1) * th) + 0.5 * std::sin((m + 1) * th)) + b * std::cos((m + 3) * th) +
           0.3 * a * std::sin(m * th);
  };
}

ResidualReport pestov_refinement(const TestFunction& u, std::shared_ptr<const Domain> domain,
                                 std::shared_ptr<const ConformalMetric> metric, const std::vector<int>& resolutions,
                                 int n_theta, double r_min, double r_max) {
  ResidualReport rep;
  rep.identity = "pestov_interior";
  for (int N : resolutions) {
    auto grid = std::make_shared<const SMGrid>(domain, metric, GridSpec{N, N, n_theta, r_min, r_max});
    rep.grids.push_back(N);
    rep.residuals.push_back(pestov_check(SMGridFunction::sample(grid, u)).defect);
  }
  rep.fill_orders();
  return rep;
}

}  // namespace brt::smcalculus
