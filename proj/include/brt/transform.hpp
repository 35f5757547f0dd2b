#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "brt/raytracer.hpp"
#include "brt/smcalculus.hpp"
#include "brt/tensorfield.hpp"

namespace brt::transform {

using geometry::ConformalMetric;
using geometry::Domain;
using geometry::PhasePoint;
using raytracer::BrokenRay;
using raytracer::RayFan;
using raytracer::TraceParams;
using tensorfield::SymTensorField;

// Composite Simpson over each segment's dense output.
double integrate_along(const BrokenRay& ray, const SymTensorField& f);

struct DatasetRow {
  int ray_id = 0;
  PhasePoint start;
  int n_reflections = 0;
  double tau = 0.0;
  double value = 0.0;
  std::string status = "ok";  // "ok" or a TraceErrorKind name
};

struct TransformDataset {
  std::vector<DatasetRow> rows;
  std::string config_hash;
  double step = 0.0;
  std::string quadrature = "simpson";

  void write_csv(std::ostream& os) const;
  static TransformDataset read_csv(std::istream& is);
};

TransformDataset forward(const Domain& domain, const ConformalMetric& metric, const RayFan& fan,
                         const SymTensorField& f, const TraceParams& params);

// u(x, v) at every grid node; nodes outside M or whose ray fails are invalid.
// Flags mark nodes whose ray has a near-tangential reflection or a grazing contact.
smcalculus::SMGridFunction integral_function_u(const SymTensorField& f, smcalculus::GridPtr grid,
                                               const TraceParams& params);

// u at a single phase point; a start on R pointing into the obstacle is reflected first.
double u_at(const Domain& domain, const SymTensorField& f, const PhasePoint& p, const TraceParams& params,
            BrokenRay* ray_out = nullptr);

}  // namespace brt::transform
