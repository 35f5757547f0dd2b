#include <cmath>
#include <numbers>

#include "brt/smcalculus.hpp"

namespace brt::smcalculus {

SMGrid::SMGrid(std::shared_ptr<const Domain> domain, std::shared_ptr<const ConformalMetric> metric, GridSpec spec)
    : spec_(spec), domain_(std::move(domain)), metric_(std::move(metric)) {
  if (spec_.n_r < 5 || spec_.n_ang < 5) throw std::invalid_argument("grid needs at least 5 nodes per base axis");
  if (spec_.n_theta < 4 || spec_.n_theta % 2) throw std::invalid_argument("n_theta must be even and >= 4");
  if (!(spec_.r_min > 0.0 && spec_.r_max > spec_.r_min)) throw std::invalid_argument("need 0 < r_min < r_max");
  center_ = domain_->outer().center();
  dr_ = (spec_.r_max - spec_.r_min) / (spec_.n_r - 1);
  dang_ = 2.0 * std::numbers::pi / spec_.n_ang;
  dtheta_ = 2.0 * std::numbers::pi / spec_.n_theta;
  const std::size_t nb = base_size();
  phi_.resize(nb);
  emphi_.resize(nb);
  phix_.resize(nb);
  phiy_.resize(nb);
  K_.resize(nb);
  in_domain_.resize(nb);
  for (int i = 0; i < spec_.n_r; ++i)
    for (int j = 0; j < spec_.n_ang; ++j) {
      const std::size_t b = base(i, j);
      const Vec2 x = position(i, j);
      const Jet p = metric_->phi(x, 2);
      phi_[b] = p.value();
      emphi_[b] = std::exp(-p.value());
      phix_[b] = p.derivative(1, 0);
      phiy_[b] = p.derivative(0, 1);
      K_[b] = -std::exp(-2.0 * p.value()) * (p.derivative(2, 0) + p.derivative(0, 2));
      in_domain_[b] = domain_->defining_function(x) <= geometry::kBoundaryTolerance;
    }
  cos_rel_.resize(static_cast<std::size_t>(spec_.n_ang) * spec_.n_theta);
  sin_rel_.resize(cos_rel_.size());
  for (int j = 0; j < spec_.n_ang; ++j)
    for (int k = 0; k < spec_.n_theta; ++k) {
      cos_rel_[j * spec_.n_theta + k] = std::cos(theta(k) - ang(j));
      sin_rel_[j * spec_.n_theta + k] = std::sin(theta(k) - ang(j));
    }
}

Vec2 SMGrid::position(int i, int j) const {
  return center_ + r(i) * Vec2(std::cos(ang(j)), std::sin(ang(j)));
}

SMGridFunction::SMGridFunction(GridPtr g)
    : grid(std::move(g)), values(grid->size(), 0.0), valid(grid->size(), 1) {}

SMGridFunction SMGridFunction::sample(GridPtr g, const std::function<double(const Vec2&, double)>& f) {
  SMGridFunction u(g);
  for (int i = 0; i < g->n_r(); ++i)
    for (int j = 0; j < g->n_ang(); ++j) {
      const Vec2 x = g->position(i, j);
      for (int k = 0; k < g->n_theta(); ++k) u(i, j, k) = f(x, g->theta(k));
    }
  return u;
}

SMGridFunction& SMGridFunction::operator+=(const SMGridFunction& o) {
  for (std::size_t n = 0; n < values.size(); ++n) {
    values[n] += o.values[n];
    valid[n] &= o.valid[n];
  }
  return *this;
}

SMGridFunction& SMGridFunction::operator-=(const SMGridFunction& o) {
  for (std::size_t n = 0; n < values.size(); ++n) {
    values[n] -= o.values[n];
    valid[n] &= o.valid[n];
  }
  return *this;
}

SMGridFunction& SMGridFunction::operator*=(double s) {
  for (double& v : values) v *= s;
  return *this;
}

SMGridFunction operator+(SMGridFunction a, const SMGridFunction& b) { return a += b; }
SMGridFunction operator-(SMGridFunction a, const SMGridFunction& b) { return a -= b; }
SMGridFunction operator*(double s, SMGridFunction a) { return a *= s; }

SMGridFunction times_curvature(SMGridFunction u) {
  const auto& g = *u.grid;
  for (std::size_t b = 0; b < g.base_size(); ++b)
    for (int k = 0; k < g.n_theta(); ++k) u.values[b * g.n_theta() + k] *= g.curvature(b);
  return u;
}

namespace {

// Composite Simpson weights on n+1 equispaced nodes (3/8 rule on the last panel when n is odd).
std::vector<double> radial_weights(int n, double h) {
  std::vector<double> w(n + 1, 0.0);
  if (n == 0) return w;
  if (n == 1) {
    w[0] = w[1] = 0.5 * h;
    return w;
  }
  const int simpson = (n % 2 == 0) ? n : n - 3;
  for (int i = 0; i + 2 <= simpson; i += 2) {
    w[i] += h / 3.0;
    w[i + 1] += 4.0 * h / 3.0;
    w[i + 2] += h / 3.0;
  }
  if (simpson != n) {
    const int s = simpson;
    w[s] += 3.0 * h / 8.0;
    w[s + 1] += 9.0 * h / 8.0;
    w[s + 2] += 9.0 * h / 8.0;
    w[s + 3] += 3.0 * h / 8.0;
  }
  return w;
}

}  // namespace

double inner(const SMGridFunction& u, const SMGridFunction& w, RowWindow win) {
  const auto& g = *u.grid;
  const int first = win.first, last = win.last < 0 ? g.n_r() - 1 : win.last;
  const auto wr = radial_weights(last - first, g.dr());
  const int nt = g.n_theta();
  double total = 0.0;
  for (int i = first; i <= last; ++i) {
    double row = 0.0;
    for (int j = 0; j < g.n_ang(); ++j) {
      const std::size_t b = g.base(i, j);
      double fiber = 0.0;
      for (int k = 0; k < nt; ++k) {
        const std::size_t n = b * nt + k;
        if (u.valid[n] && w.valid[n]) fiber += u.values[n] * w.values[n];
      }
      row += fiber * std::exp(2.0 * g.phi(b));
    }
    total += wr[i - first] * g.r(i) * row;
  }
  return total * g.dang() * g.dtheta();
}

double norm2(const SMGridFunction& u, RowWindow win) { return inner(u, u, win); }

double row_integral(const SMGrid& g, int i, const std::function<double(int, int)>& f) {
  double total = 0.0;
  for (int j = 0; j < g.n_ang(); ++j) {
    double fiber = 0.0;
    for (int k = 0; k < g.n_theta(); ++k) fiber += f(j, k);
    total += fiber * std::exp(g.phi(g.base(i, j)));
  }
  return total * g.r(i) * g.dang() * g.dtheta();
}

double row_normal_sign(const SMGrid& g, int i) {
  if (i == 0) return -1.0;
  if (i == g.n_r() - 1) return 1.0;
  throw std::invalid_argument("row is not a boundary row");
}

double row_second_fundamental_form(const SMGrid& g, int i, int j) {
  const double s = row_normal_sign(g, i);
  const std::size_t b = g.base(i, j);
  const double dphi_dr = g.phix(b) * std::cos(g.ang(j)) + g.phiy(b) * std::sin(g.ang(j));
  return g.emphi(b) * s * (1.0 / g.r(i) + dphi_dr);
}

}  // namespace brt::smcalculus
