#include <cmath>
#include <numbers>
#include <random>

#include "brt/errors.hpp"
#include "brt/json_util.hpp"
#include "brt/raytracer.hpp"

namespace brt::raytracer {

using std::numbers::pi;

namespace {

void add_inward(std::vector<PhasePoint>& out, const Vec2& x, const Vec2& normal, double psi) {
  out.push_back({x, geometry::wrap_angle(std::atan2(normal.y(), normal.x()) + pi + psi)});
}

}  // namespace

RayFan sample_fan(const Domain& domain, const FanSpec& spec) {
  RayFan fan{spec, {}};
  const auto& outer = domain.outer();
  switch (spec.kind) {
    case FanSpec::Kind::Boundary: {
      if (spec.n_pos < 1 || spec.n_ang < 1) throw std::invalid_argument("fan counts must be >= 1");
      for (const Vec2& x : outer.sample(spec.n_pos))
        for (int k = 0; k < spec.n_ang; ++k)
          add_inward(fan.states, x, outer.outward_normal(x), -0.5 * pi + pi * (k + 0.5) / spec.n_ang);
      break;
    }
    case FanSpec::Kind::Interior: {
      if (spec.n_x < 1 || spec.n_y < 1 || spec.n_theta < 1) throw std::invalid_argument("fan counts must be >= 1");
      const Vec2 c = outer.center();
      const double r = outer.max_radius();
      for (int i = 0; i < spec.n_x; ++i)
        for (int j = 0; j < spec.n_y; ++j) {
          const Vec2 x = c + Vec2(-r + 2.0 * r * (i + 0.5) / spec.n_x, -r + 2.0 * r * (j + 0.5) / spec.n_y);
          if (!domain.contains(x)) continue;
          for (int k = 0; k < spec.n_theta; ++k) fan.states.push_back({x, 2.0 * pi * k / spec.n_theta});
        }
      break;
    }
    case FanSpec::Kind::RandomBoundary: {
      if (spec.count < 1) throw std::invalid_argument("fan counts must be >= 1");
      std::mt19937_64 rng(spec.seed);
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      constexpr int kDense = 1 << 16;
      const auto* circle = dynamic_cast<const geometry::Circle*>(&outer);
      const std::vector<Vec2> dense = circle ? std::vector<Vec2>{} : outer.sample(kDense);
      for (int n = 0; n < spec.count; ++n) {
        const double u = unit(rng), w = unit(rng);
        Vec2 x;
        if (circle) {
          const double t = 2.0 * pi * u;
          x = circle->center() + circle->radius() * Vec2(std::cos(t), std::sin(t));
        } else {
          x = dense[std::min(static_cast<int>(u * kDense), kDense - 1)];
        }
        add_inward(fan.states, x, outer.outward_normal(x), pi * (w - 0.5));
      }
      break;
    }
  }
  return fan;
}

nlohmann::json FanSpec::to_json() const {
  switch (kind) {
    case Kind::Boundary: return {{"boundary", {{"n_pos", n_pos}, {"n_ang", n_ang}}}};
    case Kind::Interior: return {{"interior", {{"n_x", n_x}, {"n_y", n_y}, {"n_theta", n_theta}}}};
    case Kind::RandomBoundary: return {{"random_boundary", {{"count", count}, {"seed", seed}}}};
  }
  return {};
}

FanSpec parse_fan(const nlohmann::json& j) {
  using namespace json_util;
  if (!j.is_object() || j.size() != 1) throw ConfigError("fan: expected a single-key object");
  const std::string kind = j.begin().key();
  const auto& body = j.begin().value();
  FanSpec spec;
  auto positive = [&](const char* key) {
    const int v = integer(body, key, "fan." + kind);
    if (v < 1) throw ConfigError("fan." + kind + ": '" + key + "' must be >= 1");
    return v;
  };
  if (kind == "boundary") {
    check_keys(body, {"n_pos", "n_ang"}, "fan.boundary");
    spec.kind = FanSpec::Kind::Boundary;
    spec.n_pos = positive("n_pos");
    spec.n_ang = positive("n_ang");
  } else if (kind == "interior") {
    check_keys(body, {"n_x", "n_y", "n_theta"}, "fan.interior");
    spec.kind = FanSpec::Kind::Interior;
    spec.n_x = positive("n_x");
    spec.n_y = positive("n_y");
    spec.n_theta = positive("n_theta");
  } else if (kind == "random_boundary") {
    check_keys(body, {"count", "seed"}, "fan.random_boundary");
    spec.kind = FanSpec::Kind::RandomBoundary;
    spec.count = positive("count");
    if (body.contains("seed")) {
      const auto& s = body.at("seed");
      if (!s.is_number_integer() || (!s.is_number_unsigned() && s.get<long>() < 0))
        throw ConfigError("fan.random_boundary: seed must be unsigned");
      spec.seed = body.at("seed").get<std::uint64_t>();
    }
  } else {
    throw ConfigError("fan: unknown kind '" + kind + "'");
  }
  return spec;
}

}  // namespace brt::raytracer
