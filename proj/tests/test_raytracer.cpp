#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "brt/errors.hpp"
#include "brt/raytracer.hpp"

using namespace brt;
using namespace brt::geometry;
using namespace brt::raytracer;

namespace {

constexpr double kPi = std::numbers::pi;

std::shared_ptr<const Domain> annulus() {
  return std::make_shared<Domain>(std::make_shared<Circle>(Vec2(0, 0), 2.0), std::make_shared<Circle>(Vec2(0, 0), 1.0));
}

ConformalMetric bump_metric() { return ConformalMetric(make_gaussian(0.3, {0.5, 0.2}, 0.6)); }

ConformalMetric negative_metric() { return ConformalMetric(make_polynomial({{0.06, 2, 0}, {0.04, 0, 2}, {0.1, 1, 0}})); }

TraceParams params(double step = 1e-3) {
  TraceParams p;
  p.step = step;
  return p;
}

}  // namespace

TEST_CASE("flat RK4 step is exact straight-line motion") {
  const ConformalMetric flat;
  const auto q = step_geodesic(flat, {Vec2(0, 0), 0.0}, 0.1);
  CHECK(q.x.x() == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(std::abs(q.x.y()) < 1e-16);
  CHECK(q.theta == 0.0);
}

TEST_CASE("unit speed is preserved and steps are reversible on a curved metric") {
  const auto g = bump_metric();
  PhasePoint p{Vec2(-0.4, 0.1), 0.7};
  const PhasePoint p0 = p;
  for (int i = 0; i < 1000; ++i) p = step_geodesic(g, p, 1e-3);
  // speed in g is 1 by construction of the (x, theta) parametrization; check the flow preserves it numerically
  const auto v = g.unit_tangent(p.x, p.theta);
  CHECK(std::abs(g.norm(p.x, v) - 1.0) < 1e-9);
  PhasePoint q = reverse(p);
  for (int i = 0; i < 1000; ++i) q = step_geodesic(g, q, 1e-3);
  q = reverse(q);
  CHECK((q.x - p0.x).norm() < 1e-10);
  CHECK(std::abs(std::remainder(q.theta - p0.theta, 2 * kPi)) < 1e-10);
}

TEST_CASE("RK4 converges at fourth order") {
  const auto g = bump_metric();
  auto run = [&](double h) {
    PhasePoint p{Vec2(-0.8, -0.3), 0.4};
    const int n = static_cast<int>(std::lround(0.8 / h));
    for (int i = 0; i < n; ++i) p = step_geodesic(g, p, h);
    return p;
  };
  const auto ref = run(1e-3 / 8);
  const double e1 = (run(0.02).x - ref.x).norm(), e2 = (run(0.01).x - ref.x).norm();
  CHECK(std::log2(e1 / e2) > 3.5);
}

TEST_CASE("diametral ray reflects once at the obstacle") {
  const auto dom = annulus();
  const ConformalMetric flat;
  const auto r = trace_broken_ray(*dom, flat, {Vec2(2, 0), kPi}, params());
  REQUIRE(r.reflections.size() == 1);
  CHECK((r.reflections[0].x - Vec2(1, 0)).norm() < 1e-10);
  CHECK((r.reflections[0].v_in - Vec2(-1, 0)).norm() < 1e-10);
  CHECK((r.reflections[0].v_out - Vec2(1, 0)).norm() < 1e-10);
  CHECK((r.exit.x - Vec2(2, 0)).norm() < 1e-10);
  CHECK(r.tau == doctest::Approx(2.0).epsilon(1e-10));
  REQUIRE(r.segments.size() == 2);
  CHECK(r.segments[0].end_event == Event::Reflection);
  CHECK(r.segments[1].end_event == Event::Exit);
}

TEST_CASE("tangential start exits immediately and a missing chord has length 2 sqrt 2") {
  const auto dom = annulus();
  const ConformalMetric flat;
  const auto t = trace_broken_ray(*dom, flat, {Vec2(2, 0), kPi / 2}, params());
  CHECK(t.tau == 0.0);
  CHECK(t.reflections.empty());
  const auto c = trace_broken_ray(*dom, flat, {Vec2(2, 0), 0.75 * kPi}, params());
  CHECK(c.reflections.empty());
  CHECK(c.tau == doctest::Approx(2 * std::numbers::sqrt2).epsilon(1e-10));
}

TEST_CASE("invalid starts are rejected") {
  const auto dom = annulus();
  const ConformalMetric flat;
  CHECK_THROWS_AS(trace_broken_ray(*dom, flat, {Vec2(0.5, 0), 0.0}, params()), std::invalid_argument);
  CHECK_THROWS_AS(trace_broken_ray(*dom, flat, {Vec2(1, 0), kPi}, params()), std::invalid_argument);
  CHECK_NOTHROW(trace_broken_ray(*dom, flat, {Vec2(1, 0), 0.0}, params()));
}

TEST_CASE("broken ray invariants over a boundary fan") {
  const auto dom = annulus();
  for (const auto& g : {ConformalMetric(), negative_metric()}) {
    FanSpec spec;
    spec.n_pos = 12;
    spec.n_ang = 9;
    const auto fan = sample_fan(*dom, spec);
    for (const auto& s : fan.states) {
      const auto r = trace_broken_ray(*dom, g, s, params(2e-3));
      double total = 0.0;
      for (const auto& seg : r.segments) {
        REQUIRE(seg.samples.size() % 2 == 1);
        for (std::size_t i = 1; i < seg.samples.size(); ++i) {
          CHECK(seg.samples[i].t > seg.samples[i - 1].t);
          CHECK(seg.samples[i].t - seg.samples[i - 1].t <= 2e-3 + 1e-15);
        }
        total += seg.duration();
      }
      CHECK(r.tau == doctest::Approx(total).epsilon(1e-12));
      CHECK(r.segments.back().end_event == Event::Exit);
      CHECK(std::abs(dom->outer().level(r.exit.x)) < 1e-9);
      for (const auto& refl : r.reflections) {
        const auto bp = boundary_data(*dom, g, refl.x);
        CHECK(bp.component == BoundaryComponent::Reflecting);
        const Vec2 law = refl.v_out - refl.v_in + 2 * g.inner(refl.x, refl.v_in, bp.nu) * bp.nu;
        CHECK(law.norm() < 1e-10);
        CHECK(std::abs(g.inner(refl.x, refl.v_out, bp.nu) + g.inner(refl.x, refl.v_in, bp.nu)) < 1e-10);
      }
      if (g.is_flat()) CHECK(r.reflections.size() <= 1);
    }
  }
}

TEST_CASE("reversal reproduces the broken ray") {
  const auto dom = annulus();
  const auto g = negative_metric();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(0, 2 * kPi);
  int checked = 0;
  for (int n = 0; n < 30; ++n) {
    const double r = 1.2 + 0.6 * (n % 5) / 5.0, a = U(rng);
    const PhasePoint p{Vec2(r * std::cos(a), r * std::sin(a)), U(rng)};
    BrokenRay fwd;
    try {
      fwd = trace_broken_ray(*dom, g, p, params());
    } catch (const TraceError&) {
      continue;
    }
    if (fwd.grazing || fwd.near_tangential) continue;
    const auto back = trace_broken_ray(*dom, g, reverse(fwd.exit), params());
    // the reversed ray passes through p; its reflections mirror the forward ones
    CHECK(back.reflections.size() >= fwd.reflections.size());
    double best = 1e9;
    for (const auto& seg : back.segments)
      for (const auto& s : seg.samples) best = std::min(best, (s.x - p.x).norm());
    CHECK(best < 1e-3);
    ++checked;
  }
  CHECK(checked > 10);
}

TEST_CASE("reversed exit state retraces to the start") {
  const auto dom = annulus();
  const auto g = negative_metric();
  FanSpec spec;
  spec.n_pos = 6;
  spec.n_ang = 5;
  for (const auto& s : sample_fan(*dom, spec).states) {
    const auto fwd = trace_broken_ray(*dom, g, s, params());
    if (fwd.near_tangential || fwd.grazing) continue;
    const auto back = trace_broken_ray(*dom, g, reverse(fwd.exit), params());
    CHECK((back.exit.x - s.x).norm() < 1e-6);
    CHECK(back.reflections.size() == fwd.reflections.size());
    CHECK(back.tau == doctest::Approx(fwd.tau).epsilon(1e-6));
  }
}

TEST_CASE("fans") {
  const auto dom = annulus();
  const ConformalMetric flat;
  FanSpec b;
  b.n_pos = 4;
  b.n_ang = 3;
  const auto fb = sample_fan(*dom, b);
  CHECK(fb.states.size() == 12);
  for (const auto& s : fb.states) CHECK(normal_cosine(boundary_data(*dom, flat, s.x), s.theta) < 0.0);

  FanSpec in;
  in.kind = FanSpec::Kind::Interior;
  in.n_x = 2;
  in.n_y = 2;
  in.n_theta = 4;
  const auto fi = sample_fan(*dom, in);
  CHECK(fi.states.size() <= 16);
  for (const auto& s : fi.states) CHECK(dom->contains(s.x));

  FanSpec r;
  r.kind = FanSpec::Kind::RandomBoundary;
  r.count = 50;
  r.seed = 11;
  const auto r1 = sample_fan(*dom, r), r2 = sample_fan(*dom, r);
  REQUIRE(r1.states.size() == 50);
  for (std::size_t i = 0; i < 50; ++i) {
    CHECK(r1.states[i].x == r2.states[i].x);
    CHECK(r1.states[i].theta == r2.states[i].theta);
  }
  r.seed = 12;
  CHECK(sample_fan(*dom, r).states[0].theta != r1.states[0].theta);
}

TEST_CASE("fan parser") {
  const auto f = parse_fan({{"boundary", {{"n_pos", 5}, {"n_ang", 7}}}});
  CHECK(f.kind == FanSpec::Kind::Boundary);
  CHECK(f.n_pos * f.n_ang == 35);
  CHECK_THROWS_AS(parse_fan({{"spiral", 1}}), ConfigError);
  CHECK_THROWS_AS(parse_fan({{"boundary", {{"n_pos", 0}, {"n_ang", 7}}}}), ConfigError);
  CHECK_THROWS_AS(parse_fan({{"random_boundary", {{"count", 10}, {"seed", -1}}}}), ConfigError);
}

TEST_CASE("budget exhaustion raises a tracing error") {
  const auto dom = annulus();
  const ConformalMetric flat;
  TraceParams p = params();
  p.l_max = 0.5;
  try {
    trace_broken_ray(*dom, flat, {Vec2(2, 0), kPi}, p);
    FAIL("expected TraceError");
  } catch (const TraceError& e) {
    CHECK(e.kind() == TraceErrorKind::BudgetExceeded);
    CHECK(to_string(e.kind()) == "BudgetExceeded");
  }
}
