#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "brt/errors.hpp"
#include "brt/geometry.hpp"

using namespace brt;
using namespace brt::geometry;

namespace {

std::shared_ptr<const Domain> annulus() {
  return std::make_shared<Domain>(std::make_shared<Circle>(Vec2(0, 0), 2.0), std::make_shared<Circle>(Vec2(0, 0), 1.0));
}

ConformalMetric quadratic_metric(double xx, double yy) {
  return ConformalMetric(make_polynomial({{xx, 2, 0}, {yy, 0, 2}}));
}

}  // namespace

TEST_CASE("flat metric has zero curvature and Christoffel symbols") {
  const ConformalMetric g;
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> U(-2, 2);
  for (int n = 0; n < 50; ++n) {
    const Vec2 x(U(rng), U(rng));
    CHECK(g.curvature(x) == 0.0);
    for (const auto& a : g.christoffel(x))
      for (const auto& b : a)
        for (double c : b) CHECK(c == 0.0);
  }
}

TEST_CASE("curvature of phi = (x^2+y^2)/4 is -exp(-(x^2+y^2)/2)") {
  const auto g = quadratic_metric(0.25, 0.25);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> U(-2, 2);
  for (int n = 0; n < 50; ++n) {
    const Vec2 x(U(rng), U(rng));
    // Delta phi = 1, K = -e^{-2 phi}
    CHECK(g.curvature(x) == doctest::Approx(-std::exp(-0.5 * x.squaredNorm())).epsilon(1e-13));
    CHECK(g.curvature(x) < 0.0);
  }
  const auto pos = quadratic_metric(-0.5, 0.0);
  CHECK(pos.curvature(Vec2(0, 0)) == doctest::Approx(1.0));
}

TEST_CASE("Christoffel symbols match the conformal formula") {
  const auto g = quadratic_metric(0.3, -0.1);
  const Vec2 x(0.4, -0.9);
  const double px = 0.6 * x.x(), py = -0.2 * x.y();
  const double d[2] = {px, py};
  const auto G = g.christoffel(x);
  for (int k = 0; k < 2; ++k)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        const double expect = (k == i) * d[j] + (k == j) * d[i] - (i == j) * d[k];
        CHECK(G[k][i][j] == doctest::Approx(expect).epsilon(1e-13));
      }
}

TEST_CASE("unit tangents have unit g-length") {
  const auto g = quadratic_metric(0.2, 0.1);
  for (double th = 0.0; th < 6.28; th += 0.3) {
    const Vec2 x(0.7, -1.1);
    CHECK(g.norm(x, g.unit_tangent(x, th)) == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("boundary data on the annulus") {
  const auto dom = annulus();
  const ConformalMetric g;
  const auto e = boundary_data(*dom, g, Vec2(2, 0));
  CHECK(e.component == BoundaryComponent::Accessible);
  CHECK(e.nu.x() == doctest::Approx(1.0));
  CHECK(std::abs(e.nu.y()) < 1e-14);
  CHECK(e.pi == doctest::Approx(0.5));
  const auto r = boundary_data(*dom, g, Vec2(1, 0));
  CHECK(r.component == BoundaryComponent::Reflecting);
  CHECK(r.nu.x() == doctest::Approx(-1.0));
  CHECK(r.pi == doctest::Approx(-1.0));
  CHECK_THROWS_AS(boundary_data(*dom, g, Vec2(0, 0)), NotOnBoundary);
  CHECK_THROWS_AS(boundary_data(*dom, g, Vec2(1.5, 0)), NotOnBoundary);
}

TEST_CASE("second fundamental form sign convention on an ellipse obstacle") {
  const Domain dom(std::make_shared<Circle>(Vec2(0, 0), 3.0), std::make_shared<Ellipse>(Vec2(0, 0), 1.0, 0.5));
  const ConformalMetric g;
  for (const auto& p : dom.obstacle()->sample(64)) CHECK(boundary_data(dom, g, p).pi < 0.0);
  for (const auto& p : dom.outer().sample(64)) CHECK(boundary_data(dom, g, p).pi > 0.0);
  // ellipse curvature at the end of the major axis is a/b^2
  const auto tip = boundary_data(dom, g, Vec2(1.0, 0.0));
  CHECK(tip.pi == doctest::Approx(-4.0));
}

TEST_CASE("reflection examples") {
  BoundaryPoint bp{Vec2(1, 0), Vec2(-1, 0), -1.0, BoundaryComponent::Reflecting, 1.0};
  CHECK((reflect(bp, Vec2(-1, 0)) - Vec2(1, 0)).norm() < 1e-15);
  CHECK((reflect(bp, Vec2(0, 1)) - Vec2(0, 1)).norm() < 1e-15);
  bp.nu = Vec2(0, 1);
  const double s = std::sqrt(0.5);
  CHECK((reflect(bp, Vec2(s, s)) - Vec2(s, -s)).norm() < 1e-15);
}

TEST_CASE("reflection is a g-isometric involution commuting with reversal") {
  const auto dom = annulus();
  const auto g = quadratic_metric(0.1, 0.05);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(0, 2 * std::numbers::pi);
  for (int n = 0; n < 200; ++n) {
    const double a = U(rng);
    const double R = n % 2 ? 1.0 : 2.0;
    const Vec2 x(R * std::cos(a), R * std::sin(a));
    const auto bp = boundary_data(*dom, g, x);
    const double th = U(rng);
    const Vec2 v = g.unit_tangent(x, th);
    const Vec2 w = reflect(bp, v);
    CHECK(std::abs(g.norm(x, w) - 1.0) < 1e-12);
    CHECK((reflect(bp, w) - v).norm() < 1e-12);
    CHECK(std::abs(g.inner(x, w, bp.nu) + g.inner(x, v, bp.nu)) < 1e-12);
    // angle form
    const double th2 = reflect_angle(bp, th);
    CHECK((g.unit_tangent(x, th2) - w).norm() < 1e-12);
    // reverse o reflect = reflect o reverse
    const auto rr = reverse(PhasePoint{x, reflect_angle(bp, th)});
    const double rr2 = reflect_angle(bp, reverse(PhasePoint{x, th}).theta);
    CHECK(std::abs(std::remainder(rr.theta - rr2, 2 * std::numbers::pi)) < 1e-12);
  }
}

TEST_CASE("reverse is an involution") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> U(0, 2 * std::numbers::pi);
  const PhasePoint p{Vec2(0.3, 0.1), 0.0};
  CHECK(reverse(p).theta == doctest::Approx(std::numbers::pi));
  for (int n = 0; n < 50; ++n) {
    const PhasePoint q{Vec2(0.1, 0.2), U(rng)};
    const auto r = reverse(reverse(q));
    CHECK(std::abs(std::remainder(r.theta - q.theta, 2 * std::numbers::pi)) < 1e-14);
    CHECK(r.x == q.x);
  }
}

TEST_CASE("defining function and domain validation") {
  const auto dom = annulus();
  CHECK(dom->contains(Vec2(1.5, 0)));
  CHECK_FALSE(dom->contains(Vec2(0.5, 0)));
  CHECK_FALSE(dom->contains(Vec2(2.5, 0)));
  CHECK(std::abs(dom->defining_function(Vec2(0, 2))) < 1e-14);
  CHECK(std::abs(dom->defining_function(Vec2(0, -1))) < 1e-14);
  CHECK_THROWS(Domain(std::make_shared<Circle>(Vec2(0, 0), 2.0), std::make_shared<Circle>(Vec2(1.5, 0), 1.0)));
}

TEST_CASE("admissibility reports") {
  const ConformalMetric flat;
  const Domain disk(std::make_shared<Circle>(Vec2(0, 0), 2.0));
  const auto d = check_admissibility(disk, flat, 200, 0.05, 100.0);
  CHECK(d.admissible());
  CHECK(d.L_estimate <= 4.0 + 1e-9);
  const auto a = check_admissibility(*annulus(), flat, 400, 0.05, 100.0);
  CHECK(a.admissible());
  CHECK(a.tangential_count_max <= 1);
  CHECK(a.min_pi_accessible > 0.0);
  CHECK(a.max_pi_reflecting < 0.0);
  const auto pos = check_admissibility(disk, quadratic_metric(-0.5, 0.0), 50, 0.05, 100.0);
  CHECK_FALSE(pos.curvature_ok);
  CHECK_FALSE(pos.admissible());
}

TEST_CASE("geometry parser") {
  const nlohmann::json j = {{"metric",
                             {{"phi", {{"gaussian_bump", {{"amplitude", 0.1}, {"center", {0.5, 0.5}}, {"width", 0.4}}}}}}},
                            {"outer", {{"circle", {{"center", {0.0, 0.0}}, {"radius", 2.0}}}}},
                            {"obstacle", {{"ellipse", {{"center", {0.0, 0.0}}, {"semi_axes", {0.8, 0.5}}}}}}};
  const auto g = parse_geometry(j);
  CHECK_FALSE(g.metric->is_flat());
  CHECK(g.domain->has_obstacle());
  CHECK_THROWS_AS(parse_geometry({{"outer", {{"square", 1}}}}), ConfigError);
  CHECK_THROWS_AS(parse_geometry({{"outer", {{"circle", {{"radius", -1.0}}}}}}), ConfigError);
  CHECK_THROWS_AS(parse_geometry({{"outer", {{"circle", {{"radius", 1.0}}}}}, {"obstacle", {{"circle", {{"radius", 2.0}}}}}}),
                  ConfigError);
  CHECK_THROWS_AS(parse_geometry({{"metric", {{"phi", "one"}}}, {"outer", {{"circle", {{"radius", 1.0}}}}}}), ConfigError);
}
