#include <algorithm>
#include <cmath>

#include "brt/beurling.hpp"

namespace brt::smcalculus {

double BeurlingReport::raising_lowering_mismatch(int k) const {
  const double a = xplus2.at(k), b = xminus2.at(k + 2);
  const double m = std::max(a, b);
  return m > 0.0 ? std::abs(a - b) / m : 0.0;
}

double BeurlingReport::beurling_ratio(int k) const {
  const double c = C_const(k, 2).get_d();
  return xminus2.at(k) / (c * xplus2.at(k));
}

nlohmann::json BeurlingReport::to_json() const {
  nlohmann::json pairs = nlohmann::json::array(), ratios = nlohmann::json::array();
  for (int k = 0; k + 2 <= max_degree; ++k)
    pairs.push_back({{"k", k}, {"xplus_uk_sq", xplus2[k]}, {"xminus_uk2_sq", xminus2[k + 2]},
                     {"mismatch", raising_lowering_mismatch(k)}});
  for (int k = 2; k <= max_degree; ++k)
    if (xplus2[k] > 0.0)
      ratios.push_back({{"k", k}, {"C_k_2", C_const(k, 2).get_d()}, {"ratio", beurling_ratio(k)}});
  return {{"window_rows", {window.first, window.last}},
          {"invalid_nodes", invalid_nodes},
          {"degree_mass", degree_mass},
          {"raising_vs_lowering", pairs},
          {"beurling_ratios", ratios}};
}

BeurlingReport beurling_experiment(const tensorfield::SymTensorField& f, GridPtr grid,
                                   const raytracer::TraceParams& params, int max_degree, double shrink) {
  const auto u = transform::integral_function_u(f, grid, params);
  BeurlingReport rep;
  rep.max_degree = max_degree;
  rep.invalid_nodes = static_cast<int>(std::count(u.valid.begin(), u.valid.end(), 0));
  int last = 2;
  while (last + 1 < grid->n_r() - 2 && grid->r(last + 1) <= shrink * grid->spec().r_max) ++last;
  rep.window = {2, last};
  rep.degree_mass = degree_mass(u);
  for (int k = 0; k <= max_degree; ++k) {
    const auto xu = apply_X(degree_part(u, k));
    rep.xplus2.push_back(norm2(degree_part(xu, k + 1), rep.window));
    rep.xminus2.push_back(k > 0 ? norm2(degree_part(xu, k - 1), rep.window) : 0.0);
  }
  return rep;
}

}  // namespace brt::smcalculus
