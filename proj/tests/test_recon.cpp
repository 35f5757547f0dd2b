#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "brt/errors.hpp"
#include "brt/recon.hpp"

using namespace brt;
using namespace brt::geometry;
using namespace brt::recon;

namespace {

constexpr double kPi = std::numbers::pi;

std::shared_ptr<const Domain> annulus() {
  return std::make_shared<Domain>(std::make_shared<Circle>(Vec2(0, 0), 2.0), std::make_shared<Circle>(Vec2(0, 0), 1.0));
}

std::shared_ptr<const ConformalMetric> flat() { return std::make_shared<ConformalMetric>(); }

std::shared_ptr<const ConformalMetric> curved() {
  return std::make_shared<ConformalMetric>(make_polynomial({{0.06, 2, 0}, {0.04, 0, 2}, {0.1, 1, 0}}));
}

std::vector<BrokenRay> rays(const ConformalMetric& g, int n_pos, int n_ang) {
  raytracer::FanSpec fs;
  fs.n_pos = n_pos;
  fs.n_ang = n_ang;
  raytracer::TraceParams p;
  p.step = 1e-2;
  std::vector<BrokenRay> out;
  for (const auto& s : raytracer::sample_fan(*annulus(), fs).states)
    out.push_back(raytracer::trace_broken_ray(*annulus(), g, s, p));
  return out;
}

FieldGrid random_grid(int rank, const BaseGrid& bg, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N;
  FieldGrid f(rank, bg);
  for (auto& v : f.values) v = N(rng);
  return f;
}

const BaseGrid kGrid{Vec2(0, 0), 1.0, 2.0, 16, 32};

}  // namespace

TEST_CASE("forward of the constant field is tau") {
  const auto g = curved();
  const auto R = rays(*g, 8, 6);
  const ForwardOperator A(kGrid, 0, *g, R);
  FieldGrid one(0, kGrid);
  one.values.setOnes();
  const auto d = A.apply(one);
  for (std::size_t i = 0; i < R.size(); ++i) CHECK(d[i] == doctest::Approx(R[i].tau).epsilon(1e-8));
}

TEST_CASE("linearity and exact adjoint") {
  const auto g = curved();
  const auto R = rays(*g, 8, 6);
  for (int m = 0; m <= 2; ++m) {
    const ForwardOperator A(kGrid, m, *g, R);
    const auto f = random_grid(m, kGrid, 1 + m), h = random_grid(m, kGrid, 11 + m);
    FieldGrid comb(m, kGrid);
    comb.values = 2.5 * f.values - 0.75 * h.values;
    const Eigen::VectorXd lin = 2.5 * A.apply(f) - 0.75 * A.apply(h);
    CHECK((A.apply(comb) - lin).norm() <= 1e-13 * lin.norm());

    std::mt19937_64 rng(7);
    std::normal_distribution<double> N;
    Eigen::VectorXd d(R.size());
    for (auto& v : d) v = N(rng);
    const double lhs = A.apply(f).dot(d), rhs = f.values.dot(A.adjoint(d).values);
    CHECK(std::abs(lhs - rhs) <= 1e-10 * std::abs(lhs));
    CHECK(A.adjoint(Eigen::VectorXd::Zero(R.size())).values.norm() == 0.0);
  }
}

TEST_CASE("single-ray backprojection stays near the ray") {
  raytracer::TraceParams p;
  p.step = 1e-2;
  const std::vector<BrokenRay> R = {raytracer::trace_broken_ray(*annulus(), *flat(), {Vec2(0, -2), kPi / 4}, p)};
  const ForwardOperator A(kGrid, 0, *flat(), R);
  const auto back = A.adjoint(Eigen::VectorXd::Ones(1));
  const Vec2 a(0, -2), dir(std::cos(kPi / 4), std::sin(kPi / 4));
  const double cell = kGrid.dr() + kGrid.r_max * kGrid.dang();
  int support = 0;
  for (int i = 0; i < kGrid.n_r; ++i)
    for (int j = 0; j < kGrid.n_ang; ++j) {
      if (back.at(0, i, j) == 0.0) continue;
      ++support;
      const Vec2 q = kGrid.position(i, j) - a;
      CHECK(std::abs(q.x() * dir.y() - q.y() * dir.x()) <= cell);
    }
  CHECK(support > 0);
  CHECK(support < kGrid.size() / 4);
}

TEST_CASE("reconstruction basics") {
  const auto g = flat();
  const auto R = rays(*g, 12, 10);
  const ForwardOperator A(kGrid, 0, *g, R);
  const auto zero = reconstruct(A, Eigen::VectorXd::Zero(R.size()), {1e-6, 50, 1e-8});
  CHECK(zero.field.values.norm() == 0.0);

  const auto truth = random_grid(0, kGrid, 3);
  const Eigen::VectorXd d = A.apply(truth);
  const auto res = reconstruct(A, d, {0.0, 200, 1e-14});
  REQUIRE(res.log.size() > 2);
  for (std::size_t k = 1; k < res.log.size(); ++k)
    CHECK(res.log[k].residual <= res.log[k - 1].residual * (1 + 1e-12));
  CHECK(res.log.back().residual < 1e-3 * d.norm());

  const auto capped = reconstruct(A, d, {0.0, 3, 1e-14});
  CHECK_FALSE(capped.converged);
  CHECK(capped.log.size() == 3u);
}

TEST_CASE("gauge comparison") {
  const auto g = curved();
  const auto dom = annulus();
  const BaseGrid bg{Vec2(0, 0), 1.0, 2.0, 24, 48};
  for (int m = 1; m <= 2; ++m) {
    std::vector<ScalarExprPtr> c;
    for (int j = 0; j < m; ++j) c.push_back(make_trig(1.0 - 0.3 * j, {0.9, -0.6 + j}, 0.2 * j));
    tensorfield::GaugeSpec spec;
    spec.seed = tensorfield::make_expression_field(g, m - 1, c);
    const auto h = FieldGrid::sample(*tensorfield::make_admissible_potential(dom, spec), bg);
    const auto fa = FieldGrid::sample(
        *tensorfield::make_expression_field(
            g, m, std::vector<ScalarExprPtr>(m + 1, make_gaussian(1.0, {1.2, 0.4}, 0.5))),
        bg);

    const auto same = gauge_compare(fa, fa, *dom, *g);
    CHECK(same.residual == 0.0);
    CHECK(same.h.values.norm() == 0.0);
    CHECK(same.accessible_row);
    CHECK(same.reflecting_row);

    FieldGrid fb = fa;
    fb.values += discrete_sym_derivative(h, *g).values;
    const auto pot = gauge_compare(fb, fa, *dom, *g);
    CHECK(pot.residual < 1e-6 * weighted_norm(fa));
    CHECK(pot.difference_norm > 0.1 * weighted_norm(fa));
  }
  // a rotational one-form is not closed, so it is not a potential and its transform is nonzero
  const auto pert = FieldGrid::sample(
      *tensorfield::make_expression_field(g, 1,
                                          {make_product({make_polynomial({{-1.0, 0, 1}}), make_gaussian(1.0, {0, 0}, 0.8)}),
                                           make_product({make_polynomial({{1.0, 1, 0}}), make_gaussian(1.0, {0, 0}, 0.8)})}),
      bg);
  FieldGrid zero(1, bg);
  const auto rep = gauge_compare(pert, zero, *dom, *g);
  CHECK(rep.residual > 0.1 * weighted_norm(pert));
  const ForwardOperator A(bg, 1, *g, rays(*g, 10, 8));
  CHECK(A.apply(pert).norm() > 1e-2);
  CHECK_THROWS_AS(gauge_compare(FieldGrid(4, bg), FieldGrid(4, bg), *dom, *g), RankUnsupported);
}
