#pragma once

#include <vector>

#include <json.hpp>

#include "brt/smcalculus.hpp"
#include "brt/tensorfield.hpp"
#include "brt/transform.hpp"

namespace brt::smcalculus {

struct BeurlingReport {
  int max_degree = 0;
  RowWindow window;
  std::vector<double> xplus2;   // ‖X₊u_k‖², k = 0..max_degree
  std::vector<double> xminus2;  // ‖X₋u_k‖²
  std::vector<double> degree_mass;
  int invalid_nodes = 0;

  // |‖X₊u_k‖² − ‖X₋u_{k+2}‖²| / max of the two.
  double raising_lowering_mismatch(int k) const;
  // ‖X₋u_k‖² / (C(k,2) ‖X₊u_k‖²)
  double beurling_ratio(int k) const;
  nlohmann::json to_json() const;
};

// Traces u on the grid, then measures X±u_k on rows [2, last row with r <= shrink * r_max].
BeurlingReport beurling_experiment(const tensorfield::SymTensorField& f, GridPtr grid,
                                   const raytracer::TraceParams& params, int max_degree, double shrink = 0.9);

}  // namespace brt::smcalculus
