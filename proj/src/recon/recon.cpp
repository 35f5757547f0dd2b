#include <algorithm>
#include <cmath>
#include <numbers>

#include "brt/parallel.hpp"
#include "brt/recon.hpp"

namespace brt::recon {

double BaseGrid::dang() const { return 2.0 * std::numbers::pi / n_ang; }

Vec2 BaseGrid::position(int i, int j) const {
  return center + r(i) * Vec2(std::cos(ang(j)), std::sin(ang(j)));
}

double BaseGrid::area_weight(int i) const {
  const double w = (i == 0 || i == n_r - 1) ? 0.5 : 1.0;
  return w * dr() * r(i) * dang();
}

FieldGrid::FieldGrid(int rank_, BaseGrid grid_)
    : rank(rank_), grid(grid_), values(Eigen::VectorXd::Zero((rank_ + 1) * grid_.size())) {}

FieldGrid FieldGrid::sample(const tensorfield::SymTensorField& f, const BaseGrid& grid) {
  FieldGrid out(f.rank(), grid);
  for (int i = 0; i < grid.n_r; ++i)
    for (int j = 0; j < grid.n_ang; ++j) {
      const auto c = f.components(grid.position(i, j), 0);
      for (int q = 0; q <= f.rank(); ++q) out.at(q, i, j) = c.c[q].value();
    }
  return out;
}

double weighted_norm(const FieldGrid& f) {
  double s = 0.0;
  for (int q = 0; q <= f.rank; ++q) {
    const double mult = tensorfield::binomial(f.rank, q);
    for (int i = 0; i < f.grid.n_r; ++i)
      for (int j = 0; j < f.grid.n_ang; ++j) s += mult * f.grid.area_weight(i) * f.at(q, i, j) * f.at(q, i, j);
  }
  return std::sqrt(s);
}

namespace {

struct Entry {
  int col;
  double w;
};

void bilinear(const BaseGrid& g, const Vec2& x, int cols[4], double w[4]) {
  const Vec2 d = x - g.center;
  const double rr = std::clamp((d.norm() - g.r_min) / g.dr(), 0.0, static_cast<double>(g.n_r - 1));
  double t = std::atan2(d.y(), d.x()) / g.dang();
  if (t < 0.0) t += g.n_ang;
  const int i = std::min(static_cast<int>(rr), g.n_r - 2);
  const int j = std::min(static_cast<int>(t), g.n_ang - 1);
  const double a = rr - i, b = t - j;
  const int j1 = (j + 1) % g.n_ang;
  cols[0] = g.node(i, j);
  cols[1] = g.node(i, j1);
  cols[2] = g.node(i + 1, j);
  cols[3] = g.node(i + 1, j1);
  w[0] = (1 - a) * (1 - b);
  w[1] = (1 - a) * b;
  w[2] = a * (1 - b);
  w[3] = a * b;
}

}  // namespace

ForwardOperator::ForwardOperator(const BaseGrid& grid, int rank, const ConformalMetric& metric,
                                 const std::vector<BrokenRay>& rays)
    : grid_(grid), rank_(rank) {
  const int N = grid.size();
  std::vector<std::vector<Entry>> rows(rays.size());
  parallel_for(rays.size(), [&](std::size_t r) {
    std::vector<Entry> raw;
    for (const auto& seg : rays[r].segments) {
      const auto& s = seg.samples;
      for (std::size_t i = 0; i + 2 < s.size(); i += 2) {
        const double H = s[i + 2].t - s[i].t;
        for (int q = 0; q < 3; ++q) {
          const auto& smp = s[i + q];
          const double wq = H * (q == 1 ? 4.0 : 1.0) / 6.0;
          const double e = std::exp(-metric.phi_value(smp.x));
          const double v1 = e * std::cos(smp.theta), v2 = e * std::sin(smp.theta);
          int cols[4];
          double wb[4];
          bilinear(grid, smp.x, cols, wb);
          for (int c = 0; c <= rank; ++c) {
            const double wc = wq * tensorfield::binomial(rank, c) * std::pow(v1, rank - c) * std::pow(v2, c);
            for (int n = 0; n < 4; ++n)
              if (wb[n] != 0.0) raw.push_back({c * N + cols[n], wc * wb[n]});
          }
        }
      }
    }
    std::stable_sort(raw.begin(), raw.end(), [](const Entry& a, const Entry& b) { return a.col < b.col; });
    auto& out = rows[r];
    for (const Entry& e : raw) {
      if (!out.empty() && out.back().col == e.col)
        out.back().w += e.w;
      else
        out.push_back(e);
    }
  });
  std::vector<Eigen::Triplet<double>> trip;
  std::size_t nnz = 0;
  for (const auto& row : rows) nnz += row.size();
  trip.reserve(nnz);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (const Entry& e : rows[r]) trip.emplace_back(static_cast<int>(r), e.col, e.w);
  A_.resize(static_cast<int>(rays.size()), (rank + 1) * N);
  A_.setFromTriplets(trip.begin(), trip.end());
  A_.makeCompressed();
  At_ = A_.transpose();
  At_.makeCompressed();
  double total = 0.0;
  for (const auto& ray : rays) total += ray.tau;
  mean_length_ = rays.empty() ? 0.0 : total / rays.size();
}

Eigen::VectorXd ForwardOperator::apply(const FieldGrid& f) const {
  if (f.rank != rank_ || f.values.size() != A_.cols()) throw std::invalid_argument("field does not match operator");
  return A_ * f.values;
}

FieldGrid ForwardOperator::adjoint(const Eigen::VectorXd& d) const {
  FieldGrid f(rank_, grid_);
  f.values = At_ * d;
  return f;
}

CglsResult cgls(const Eigen::SparseMatrix<double, Eigen::RowMajor>& A,
                const Eigen::SparseMatrix<double, Eigen::RowMajor>& At, const Eigen::VectorXd& b, double lambda,
                int max_iter, double tol) {
  CglsResult res;
  res.x = Eigen::VectorXd::Zero(A.cols());
  Eigen::VectorXd r = b;
  Eigen::VectorXd s = At * r;
  Eigen::VectorXd p = s;
  double gamma = s.squaredNorm();
  const double nb = b.norm(), ns0 = std::sqrt(gamma);
  if (nb == 0.0 || ns0 == 0.0) {
    res.converged = true;
    return res;
  }
  for (int it = 1; it <= max_iter; ++it) {
    const Eigen::VectorXd q = A * p;
    const double delta = q.squaredNorm() + lambda * p.squaredNorm();
    if (delta <= 0.0) break;
    const double alpha = gamma / delta;
    res.x += alpha * p;
    r -= alpha * q;
    s = At * r - lambda * res.x;
    const double gamma_new = s.squaredNorm();
    res.log.push_back({it, r.norm(), std::sqrt(gamma_new)});
    if (r.norm() <= tol * nb || std::sqrt(gamma_new) <= tol * ns0) {
      res.converged = true;
      break;
    }
    p = s + (gamma_new / gamma) * p;
    gamma = gamma_new;
  }
  return res;
}

ReconResult reconstruct(const ForwardOperator& A, const Eigen::VectorXd& data, const ReconConfig& cfg) {
  if (cfg.lambda < 0.0 || cfg.max_iter < 1) throw std::invalid_argument("invalid reconstruction config");
  if (data.size() != A.matrix().rows()) throw std::invalid_argument("data length does not match the ray count");
  auto c = cgls(A.matrix(), A.transposed(), data, cfg.lambda, cfg.max_iter, cfg.tol);
  ReconResult out;
  out.field = FieldGrid(A.rank(), A.grid());
  out.field.values = std::move(c.x);
  out.log = std::move(c.log);
  out.converged = c.converged;
  return out;
}

}  // namespace brt::recon
