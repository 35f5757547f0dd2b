#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "brt/errors.hpp"
#include "brt/raytracer.hpp"
#include "brt/tensorfield.hpp"

using namespace brt;
using namespace brt::geometry;
using namespace brt::tensorfield;

namespace {

constexpr double kPi = std::numbers::pi;

std::shared_ptr<const Domain> annulus() {
  return std::make_shared<Domain>(std::make_shared<Circle>(Vec2(0, 0), 2.0), std::make_shared<Circle>(Vec2(0, 0), 1.0));
}

std::shared_ptr<const ConformalMetric> flat() { return std::make_shared<ConformalMetric>(); }

std::shared_ptr<const ConformalMetric> curved() {
  return std::make_shared<ConformalMetric>(make_polynomial({{0.06, 2, 0}, {0.04, 0, 2}, {0.1, 1, 0}}));
}

FieldPtr random_field(std::shared_ptr<const ConformalMetric> g, int rank, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1, 1);
  std::vector<ScalarExprPtr> c;
  for (int j = 0; j <= rank; ++j) c.push_back(make_trig(U(rng), {2 * U(rng), 2 * U(rng)}, U(rng)));
  return make_expression_field(g, rank, c);
}

}  // namespace

TEST_CASE("evaluation on SM") {
  const auto g = flat();
  CHECK(eval_on_sm(*make_expression_field(g, 0, {make_constant(2.5)}), {Vec2(0.3, 0.2), 1.0}) == 2.5);
  const auto metric = make_metric_tensor(g);
  const auto dx = make_expression_field(g, 1, {make_constant(1.0), nullptr});
  for (double th = 0; th < 6.3; th += 0.4) {
    CHECK(eval_on_sm(*metric, {Vec2(1.2, -0.4), th}) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(eval_on_sm(*dx, {Vec2(1.2, -0.4), th}) == doctest::Approx(std::cos(th)).epsilon(1e-15));
  }
  // with a conformal factor the metric tensor still evaluates to 1 on unit vectors
  const auto gm = make_metric_tensor(curved());
  CHECK(eval_on_sm(*gm, {Vec2(0.7, 1.1), 0.3}) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("parity under reversal") {
  for (int m = 0; m <= 3; ++m) {
    const auto f = random_field(curved(), m, 10 + m);
    for (double th = 0.1; th < 6.3; th += 0.5) {
      const PhasePoint p{Vec2(0.4, -1.3), th};
      CHECK(eval_on_sm(*f, reverse(p)) == doctest::Approx((m % 2 ? -1.0 : 1.0) * eval_on_sm(*f, p)).epsilon(1e-13));
    }
  }
}

TEST_CASE("symmetrized derivative examples") {
  const auto g = flat();
  // h = |x|^2 - 4 gives 2 <x, v>
  const auto h = make_expression_field(g, 0, {make_polynomial({{1.0, 2, 0}, {1.0, 0, 2}, {-4.0, 0, 0}})});
  const auto dh = sym_cov_derivative(h);
  CHECK(dh->rank() == 1);
  for (double th = 0; th < 6.3; th += 0.7) {
    const Vec2 x(0.9, 1.3);
    CHECK(eval_on_sm(*dh, {x, th}) == doctest::Approx(2 * (x.x() * std::cos(th) + x.y() * std::sin(th))));
  }
  const auto dc = sym_cov_derivative(make_expression_field(g, 0, {make_constant(3.0)}));
  CHECK(eval_on_sm(*dc, {Vec2(1, 1), 0.3}) == 0.0);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-1.5, 1.5);
  const auto dg = sym_cov_derivative(make_metric_tensor(g));
  for (int n = 0; n < 20; ++n) CHECK(std::abs(eval_on_sm(*dg, {Vec2(U(rng), U(rng)), U(rng)})) < 1e-14);
  // on a curved metric the metric tensor is still parallel
  const auto dgc = sym_cov_derivative(make_metric_tensor(curved()));
  for (int n = 0; n < 20; ++n) CHECK(std::abs(eval_on_sm(*dgc, {Vec2(U(rng), U(rng)), U(rng)})) < 1e-13);
}

TEST_CASE("d^s h equals the derivative of h along geodesics") {
  const auto g = curved();
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int r = 0; r <= 2; ++r) {
    const auto h = random_field(g, r, 40 + r);
    const auto dh = sym_cov_derivative(h);
    for (int n = 0; n < 10; ++n) {
      const PhasePoint p{Vec2(U(rng), U(rng)), 3 * U(rng)};
      double err[2];
      for (int q = 0; q < 2; ++q) {
        const double s = 0.02 / (1 << q);
        const auto a = raytracer::step_geodesic(*g, p, s);
        const auto b = raytracer::step_geodesic(*g, p, -s);
        err[q] = std::abs((eval_on_sm(*h, a) - eval_on_sm(*h, b)) / (2 * s) - eval_on_sm(*dh, p));
      }
      CHECK(err[1] < 1e-4);
      if (err[1] > 1e-11) CHECK(err[0] / err[1] > 3.5);  // O(s^2)
    }
  }
}

TEST_CASE("fiber degrees") {
  const auto g = flat();
  CHECK(fiber_degrees(*make_metric_tensor(g)) == std::vector<int>{0});
  CHECK(fiber_degrees(*make_expression_field(g, 1, {make_constant(1.0), nullptr})) == std::vector<int>{1});
  CHECK(fiber_degrees(*make_expression_field(g, 2, {make_constant(1.0), nullptr, nullptr})) == std::vector<int>{0, 2});
  for (int m = 0; m <= 3; ++m)
    for (int d : fiber_degrees(*random_field(curved(), m, 70 + m))) CHECK((m - d) % 2 == 0);
}

TEST_CASE("admissible potentials satisfy the boundary conditions") {
  const auto dom = annulus();
  for (const auto& g : {flat(), curved()}) {
    for (int r = 0; r <= 2; ++r) {
      GaugeSpec spec;
      spec.seed = random_field(g, r, 90 + r);
      const auto h = make_admissible_potential(dom, spec);
      for (const auto& x : dom->outer().sample(64)) {
        const auto c = h->components(x, 2);
        for (int j = 0; j <= r; ++j)
          for (int a = 0; a <= 2; ++a)
            for (int b = 0; a + b <= 2; ++b) CHECK(c.c[j].derivative(a, b) == 0.0);
      }
      for (const auto& x : dom->obstacle()->sample(64)) {
        const auto bp = boundary_data(*dom, *g, x);
        const Vec2 n = bp.nu.normalized(), t(-n.y(), n.x());
        const auto c = h->components(x, 0);
        if (r == 1) CHECK(std::abs(c.c[0].value() * n.x() + c.c[1].value() * n.y()) < 1e-10);
        if (r == 2) {
          // mixed component h(n, t)
          const double hnt = c.c[0].value() * n.x() * t.x() + c.c[1].value() * (n.x() * t.y() + n.y() * t.x()) +
                             c.c[2].value() * n.y() * t.y();
          CHECK(std::abs(hnt) < 1e-10);
        }
      }
    }
  }
  GaugeSpec bad;
  bad.seed = random_field(flat(), 3, 1);
  CHECK_THROWS_AS(make_admissible_potential(dom, bad), RankUnsupported);
  GaugeSpec wide;
  wide.seed = random_field(flat(), 1, 1);
  wide.cutoff_width = 2.0;
  CHECK_THROWS(make_admissible_potential(dom, wide));
}

TEST_CASE("a defining-function scalar vanishes on E without a cutoff") {
  const auto g = flat();
  const auto h = make_expression_field(g, 0, {make_polynomial({{1.0, 2, 0}, {1.0, 0, 2}, {-4.0, 0, 0}})});
  for (const auto& x : annulus()->outer().sample(32)) CHECK(std::abs(h->components(x, 0).c[0].value()) < 1e-14);
}

TEST_CASE("field parser") {
  const auto g = flat();
  const auto f = parse_field({{"rank", 2}, {"components", {{"11", 1.0}, {"12", 0.5}, {"22", 2.0}}}}, g);
  CHECK(eval_on_sm(*f, {Vec2(0, 0), kPi / 4}) == doctest::Approx(0.5 * (1.0 + 2 * 0.5 + 2.0)));
  CHECK_THROWS_AS(parse_field({{"rank", 2}, {"components", {{"12", 1.0}, {"21", 1.0}}}}, g), ConfigError);
  CHECK_THROWS_AS(parse_field({{"rank", 5}, {"components", nlohmann::json::object()}}, g), ConfigError);
  CHECK_THROWS_AS(parse_field({{"rank", 1}, {"components", {{"3", 1.0}}}}, g), ConfigError);
  CHECK_THROWS_AS(parse_field({{"rank", 1}, {"components", {{"1", 1.0}}}, {"extra", 1}}, g), ConfigError);
  const auto gs = parse_gauge({{"seed", {{"rank", 0}, {"components", {{"", 1.0}}}}}, {"cutoff_width", 0.2}}, g);
  CHECK(gs.cutoff_width == 0.2);
  CHECK(gs.seed->rank() == 0);
}
