#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "brt/geometry.hpp"

namespace brt::raytracer {

using geometry::ConformalMetric;
using geometry::Domain;
using geometry::PhasePoint;
using geometry::Vec2;

struct TraceParams {
  double step = 2e-3;
  double l_max = 100.0;
  double a = 0.05;
  int max_reflections = 10000;
};

enum class Event { Launch, Reflection, Exit };

struct Sample {
  double t;
  Vec2 x;
  double theta;
};

// Samples come in RK4 steps (start, half-step, end), so an odd count; Simpson uses them directly.
struct GeodesicSegment {
  std::vector<Sample> samples;
  Event start_event = Event::Launch;
  Event end_event = Event::Exit;

  double duration() const { return samples.back().t - samples.front().t; }
};

struct Reflection {
  Vec2 x;
  Vec2 v_in;
  Vec2 v_out;
  double transversality;
};

struct BrokenRay {
  PhasePoint start;
  PhasePoint exit;
  std::vector<GeodesicSegment> segments;
  std::vector<Reflection> reflections;
  double tau = 0.0;
  int near_tangential = 0;
  bool grazing = false;  // passed an exactly tangential contact with R
};

enum class TraceErrorKind { BudgetExceeded, SecondTangentialReflection, StuckAtBoundary };

class TraceError : public std::runtime_error {
 public:
  TraceError(TraceErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  TraceErrorKind kind() const { return kind_; }

 private:
  TraceErrorKind kind_;
};

std::string to_string(TraceErrorKind kind);

PhasePoint step_geodesic(const ConformalMetric& metric, const PhasePoint& p, double h);

// Throws std::invalid_argument if p0 lies outside M or points outward on R; TraceError on tracing failures.
BrokenRay trace_broken_ray(const Domain& domain, const ConformalMetric& metric, const PhasePoint& p0,
                           const TraceParams& params);

struct FanSpec {
  enum class Kind { Boundary, Interior, RandomBoundary };
  Kind kind = Kind::Boundary;
  int n_pos = 1;    // Boundary: arc positions on E
  int n_ang = 1;    // Boundary: inward angles
  int n_x = 1;      // Interior: Cartesian grid over the bounding box of E
  int n_y = 1;
  int n_theta = 1;  // Interior: fiber angles
  int count = 1;    // RandomBoundary
  std::uint64_t seed = 0;

  nlohmann::json to_json() const;
};

struct RayFan {
  FanSpec spec;
  std::vector<PhasePoint> states;
};

RayFan sample_fan(const Domain& domain, const FanSpec& spec);

FanSpec parse_fan(const nlohmann::json& j);

}  // namespace brt::raytracer
