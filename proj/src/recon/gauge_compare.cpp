#include <bit>
#include <cmath>

#include "brt/errors.hpp"
#include "brt/recon.hpp"

namespace brt::recon {

namespace {

using SpMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Triplets = std::vector<Eigen::Triplet<double>>;

struct Stencil {
  int first;
  double w[5];
};

Stencil radial_stencil(int i, int n) {
  if (i == 0) return {0, {-25.0, 48.0, -36.0, 16.0, -3.0}};
  if (i == 1) return {-1, {-3.0, -10.0, 18.0, -6.0, 1.0}};
  if (i == n - 2) return {-3, {-1.0, 6.0, -18.0, 10.0, 3.0}};
  if (i == n - 1) return {-4, {3.0, -16.0, 36.0, -48.0, 25.0}};
  return {-2, {1.0, -8.0, 0.0, 8.0, -1.0}};
}

constexpr double kCentral[5] = {1.0, -8.0, 0.0, 8.0, -1.0};

}  // namespace

SpMat sym_derivative_matrix(const BaseGrid& g, int h_rank, const ConformalMetric& metric) {
  if (h_rank < 0 || h_rank + 1 > tensorfield::kMaxRank) throw std::invalid_argument("d^s rank out of range");
  const int N = g.size(), m = h_rank + 1;
  Triplets trip;
  for (int i = 0; i < g.n_r; ++i) {
    const Stencil st = radial_stencil(i, g.n_r);
    for (int j = 0; j < g.n_ang; ++j) {
      const int node = g.node(i, j);
      const double c = std::cos(g.ang(j)), s = std::sin(g.ang(j)), inv_r = 1.0 / g.r(i);
      const Jet p = metric.phi(g.position(i, j), 1);
      const double dphi[2] = {p.derivative(1, 0), p.derivative(0, 1)};
      auto gamma = [&](int k, int a, int b) {
        return (k == a ? dphi[b] : 0.0) + (k == b ? dphi[a] : 0.0) - (a == b ? dphi[k] : 0.0);
      };
      // d/dx = cos D_r - sin/r D_ang, d/dy = sin D_r + cos/r D_ang
      auto add_derivative = [&](int row, int comp, int dir, double scale) {
        const double fr = (dir == 0 ? c : s) / (12.0 * g.dr());
        const double fa = (dir == 0 ? -s : c) * inv_r / (12.0 * g.dang());
        for (int q = 0; q < 5; ++q) {
          trip.emplace_back(row, comp * N + g.node(i + st.first + q, j), scale * fr * st.w[q]);
          if (kCentral[q] != 0.0)
            trip.emplace_back(row, comp * N + g.node(i, (j + q - 2 + g.n_ang) % g.n_ang), scale * fa * kCentral[q]);
        }
      };
      for (unsigned t = 0; t < (1u << m); ++t) {
        const int q = std::popcount(t);
        const int i0 = t & 1u;
        const unsigned rest = t >> 1;
        const int qr = std::popcount(rest);
        const double scale = 1.0 / tensorfield::binomial(m, q);
        const int row = q * N + node;
        add_derivative(row, qr, i0, scale);
        for (int sidx = 0; sidx < h_rank; ++sidx) {
          const int is = (rest >> sidx) & 1u;
          for (int k = 0; k < 2; ++k) {
            const double gk = gamma(k, i0, is);
            if (gk != 0.0) trip.emplace_back(row, (qr - is + k) * N + node, -scale * gk);
          }
        }
      }
    }
  }
  SpMat D((m + 1) * N, (h_rank + 1) * N);
  D.setFromTriplets(trip.begin(), trip.end());
  D.makeCompressed();
  return D;
}

FieldGrid discrete_sym_derivative(const FieldGrid& h, const ConformalMetric& metric) {
  FieldGrid out(h.rank + 1, h.grid);
  out.values = sym_derivative_matrix(h.grid, h.rank, metric) * h.values;
  return out;
}

nlohmann::json GaugeReport::to_json() const {
  return {{"residual", residual},
          {"difference_norm", difference_norm},
          {"reference_norm", reference_norm},
          {"relative_to_reference", reference_norm > 0.0 ? residual / reference_norm : 0.0},
          {"iterations", iterations},
          {"converged", converged},
          {"accessible_row", accessible_row},
          {"reflecting_row", reflecting_row}};
}

GaugeReport gauge_compare(const FieldGrid& a, const FieldGrid& b, const Domain& domain,
                          const ConformalMetric& metric, int max_iter, double tol) {
  if (a.rank != b.rank || a.values.size() != b.values.size()) throw std::invalid_argument("fields differ in shape");
  if (a.rank < 1) throw std::invalid_argument("gauge comparison needs rank >= 1");
  const int hr = a.rank - 1;
  if (hr > 2) throw RankUnsupported("gauge comparison is implemented for h of rank <= 2");
  const BaseGrid& g = a.grid;
  const int N = g.size();

  GaugeReport rep;
  if (const auto* outer = dynamic_cast<const geometry::Circle*>(&domain.outer()))
    rep.accessible_row = (outer->center() - g.center).norm() < 1e-12 && std::abs(outer->radius() - g.r_max) < 1e-9;
  if (const auto* obs = dynamic_cast<const geometry::Circle*>(domain.obstacle()))
    rep.reflecting_row = (obs->center() - g.center).norm() < 1e-12 && std::abs(obs->radius() - g.r_min) < 1e-9;

  // Parameters -> nodal h honouring the boundary conditions.
  Triplets ptrip;
  int n_par = 0;
  for (int i = 0; i < g.n_r; ++i)
    for (int j = 0; j < g.n_ang; ++j) {
      const int node = g.node(i, j);
      if (i == g.n_r - 1 && rep.accessible_row) continue;
      if (i == 0 && rep.reflecting_row && hr > 0) {
        const double c = std::cos(g.ang(j)), s = std::sin(g.ang(j));
        if (hr == 1) {
          ptrip.emplace_back(0 * N + node, n_par, -s);
          ptrip.emplace_back(1 * N + node, n_par, c);
          ++n_par;
        } else {
          ptrip.emplace_back(0 * N + node, n_par, c * c);
          ptrip.emplace_back(1 * N + node, n_par, c * s);
          ptrip.emplace_back(2 * N + node, n_par, s * s);
          ++n_par;
          ptrip.emplace_back(0 * N + node, n_par, s * s);
          ptrip.emplace_back(1 * N + node, n_par, -c * s);
          ptrip.emplace_back(2 * N + node, n_par, c * c);
          ++n_par;
        }
        continue;
      }
      for (int q = 0; q <= hr; ++q) ptrip.emplace_back(q * N + node, n_par++, 1.0);
    }
  SpMat P((hr + 1) * N, n_par);
  P.setFromTriplets(ptrip.begin(), ptrip.end());

  Eigen::VectorXd w((a.rank + 1) * N);
  for (int q = 0; q <= a.rank; ++q)
    for (int i = 0; i < g.n_r; ++i)
      for (int j = 0; j < g.n_ang; ++j)
        w[q * N + g.node(i, j)] = std::sqrt(g.area_weight(i) * tensorfield::binomial(a.rank, q));

  const SpMat D = sym_derivative_matrix(g, hr, metric);
  SpMat M = w.asDiagonal() * (D * P);
  M.makeCompressed();
  const SpMat Mt = M.transpose();
  const Eigen::VectorXd rhs = w.cwiseProduct(a.values - b.values);
  const auto sol = cgls(M, Mt, rhs, 0.0, max_iter, tol);

  rep.iterations = static_cast<int>(sol.log.size());
  rep.converged = sol.converged;
  rep.residual = (M * sol.x - rhs).norm();
  rep.difference_norm = rhs.norm();
  rep.reference_norm = weighted_norm(a);
  rep.h = FieldGrid(hr, g);
  rep.h.values = P * sol.x;
  return rep;
}

}  // namespace brt::recon
