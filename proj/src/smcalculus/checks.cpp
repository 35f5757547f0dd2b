#include <algorithm>
#include <cmath>

#include "brt/smcalculus.hpp"

namespace brt::smcalculus {

namespace {

double largest(std::initializer_list<double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double relative(const SMGridFunction& residual, std::initializer_list<const SMGridFunction*> terms, RowWindow win) {
  double scale = 0.0;
  for (const auto* t : terms) scale = std::max(scale, std::sqrt(norm2(*t, win)));
  const double r = std::sqrt(norm2(residual, win));
  return scale > 0.0 ? r / scale : r;
}

}  // namespace

bool ResidualReport::converges_at_order(double min_order) const {
  for (std::size_t i = 0; i + 1 < residuals.size(); ++i) {
    if (residuals[i + 1] < roundoff_floor) continue;
    if (!orders[i] || *orders[i] < min_order) return false;
  }
  return true;
}

void ResidualReport::fill_orders() {
  orders.clear();
  for (std::size_t i = 0; i + 1 < residuals.size(); ++i) {
    if (residuals[i + 1] < roundoff_floor) {
      orders.push_back(std::nullopt);
      continue;
    }
    const double h0 = 1.0 / (grids[i] - 1), h1 = 1.0 / (grids[i + 1] - 1);
    orders.push_back(std::log(residuals[i] / residuals[i + 1]) / std::log(h0 / h1));
  }
}

nlohmann::json ResidualReport::to_json() const {
  nlohmann::json ord = nlohmann::json::array();
  for (const auto& o : orders) ord.push_back(o ? nlohmann::json(*o) : nlohmann::json("roundoff"));
  return {{"identity", identity},
          {"grids", grids},
          {"residuals", residuals},
          {"estimated_order", ord},
          {"roundoff_floor", roundoff_floor}};
}

std::vector<ResidualReport> verify_structure(const std::vector<TestFunction>& batch,
                                             std::shared_ptr<const Domain> domain,
                                             std::shared_ptr<const ConformalMetric> metric,
                                             const std::vector<int>& resolutions, int n_theta, double r_min,
                                             double r_max) {
  std::vector<ResidualReport> reps(4);
  reps[0].identity = "[X,V]-Xperp";
  reps[1].identity = "[Xperp,V]+X";
  reps[2].identity = "[X,Xperp]+KV";
  reps[3].identity = "[X,Delta]+(Xperp V+V Xperp)";
  for (int N : resolutions) {
    auto grid = std::make_shared<const SMGrid>(domain, metric, GridSpec{N, N, n_theta, r_min, r_max});
    const RowWindow win{2, N - 3};
    std::array<double, 4> worst{};
    for (const auto& f : batch) {
      const auto u = SMGridFunction::sample(grid, f);
      const auto vu = apply_V(u), xu = apply_X(u), pu = apply_Xperp(u), du = laplacian_vertical(u);
      const auto xvu = apply_X(vu), vxu = apply_V(xu), pvu = apply_Xperp(vu), vpu = apply_V(pu);
      const auto xpu = apply_X(pu), pxu = apply_Xperp(xu), kvu = times_curvature(vu);
      const auto xdu = apply_X(du), dxu = laplacian_vertical(xu);
      worst[0] = std::max(worst[0], relative(xvu - vxu - pu, {&xvu, &vxu, &pu}, win));
      worst[1] = std::max(worst[1], relative(pvu - vpu + xu, {&pvu, &vpu, &xu}, win));
      worst[2] = std::max(worst[2], relative(xpu - pxu + kvu, {&xpu, &pxu, &kvu}, win));
      worst[3] = std::max(worst[3], relative(xdu - dxu + pvu + vpu, {&xdu, &dxu, &pvu, &vpu}, win));
    }
    for (int q = 0; q < 4; ++q) {
      reps[q].grids.push_back(N);
      reps[q].residuals.push_back(worst[q]);
    }
  }
  for (auto& rep : reps) rep.fill_orders();
  return reps;
}

nlohmann::json PestovReport::to_json() const {
  return {{"norm_VXu_sq", vxu2}, {"norm_XVu_sq", xvu2}, {"curvature_term", kvu2}, {"norm_Xu_sq", xu2},
          {"P", P},          {"H", H},           {"defect", defect},      {"boundary_defect", boundary_defect}};
}

PestovReport pestov_check(const SMGridFunction& u) {
  const auto& g = *u.grid;
  const auto vu = apply_V(u), xu = apply_X(u), pu = apply_Xperp(u);
  const auto vxu = apply_V(xu), xvu = apply_X(vu), kvu = times_curvature(vu);
  PestovReport rep;
  rep.vxu2 = norm2(vxu);
  rep.xvu2 = norm2(xvu);
  rep.kvu2 = inner(kvu, vu);
  rep.xu2 = norm2(xu);
  const int nt = g.n_theta();
  for (int i : {0, g.n_r() - 1}) {
    const double s = row_normal_sign(g, i);
    rep.P += row_integral(g, i, [&](int j, int k) {
      const std::size_t n = g.index(i, j, k);
      return s * (-g.cos_rel(j, k) * pu.values[n] + g.sin_rel(j, k) * xu.values[n]) * vu.values[n];
    });
    rep.H += row_integral(g, i, [&](int j, int k) {
      const double v = vu.values[g.base(i, j) * nt + k];
      return row_second_fundamental_form(g, i, j) * v * v;
    });
  }
  const double lhs = rep.vxu2, rhs = rep.xvu2 - rep.kvu2 + rep.xu2 + rep.P;
  const double scale = largest({rep.vxu2, rep.xvu2, rep.kvu2, rep.xu2, rep.P});
  rep.defect = scale > 0.0 ? std::abs(lhs - rhs) / scale : 0.0;
  rep.boundary_defect = rep.H != 0.0 ? std::abs(rep.P + rep.H) / std::abs(rep.H) : 0.0;
  return rep;
}

double comm_proj_check(int m, const SMGridFunction& u) {
  const int n = u.grid->n_r();
  const RowWindow win{2, n - 3};
  const auto xu = apply_X(u);
  const auto lhs = degree_part(apply_X(laplacian_vertical(u)) - laplacian_vertical(xu), m);
  const auto rhs = static_cast<double>(2 * m + 1) * degree_part(xu, m);
  const double scale = std::sqrt(norm2(rhs, win));
  const double r = std::sqrt(norm2(lhs - rhs, win));
  return scale > 0.0 ? r / scale : r;
}

double vp_identity_defect(const SMGridFunction& u, RowWindow win) {
  const auto vu = apply_V(u), xu = apply_X(u), pu = apply_Xperp(u);
  const auto xvu = apply_X(vu), vxu = apply_V(xu);
  const auto comm = apply_X(laplacian_vertical(u)) - laplacian_vertical(xu);
  const double a = norm2(xvu, win), b = norm2(vxu, win), c = norm2(xu, win);
  const double d = inner(xu, comm, win), e = norm2(pu, win);
  const double scale = largest({a, b, c, d, e});
  return scale > 0.0 ? std::abs((a - b + c) - (d + e)) / scale : 0.0;
}

double integration_by_parts_defect(const SMGridFunction& u, const SMGridFunction& w) {
  const auto& g = *u.grid;
  const auto xu = apply_X(u), xw = apply_X(w);
  double bdy = 0.0;
  for (int i : {0, g.n_r() - 1}) {
    const double s = row_normal_sign(g, i);
    bdy += row_integral(g, i, [&](int j, int k) {
      const std::size_t n = g.index(i, j, k);
      return s * g.cos_rel(j, k) * u.values[n] * w.values[n];
    });
  }
  const double scale = std::sqrt(norm2(xu) * norm2(w)) + std::sqrt(norm2(u) * norm2(xw));
  const double d = inner(xu, w) + inner(u, xw) - bdy;
  return scale > 0.0 ? std::abs(d) / scale : 0.0;
}

HorizontalL2 horizontal_l2(const SMGridFunction& u, RowWindow win) {
  return {norm2(xplus_all(u), win), norm2(xminus_all(u), win), norm2(apply_X(u), win),
          norm2(apply_Xperp(u), win)};
}

}  // namespace brt::smcalculus
