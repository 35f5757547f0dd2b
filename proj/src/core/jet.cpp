#include "brt/jet.hpp"

#include <algorithm>
#include <cmath>

namespace brt {

namespace {

constexpr std::array<double, 5> kFactorial{1.0, 1.0, 2.0, 6.0, 24.0};

}  // namespace

Jet::Jet(double value, int order) : order_(order) { c_[0] = value; }

Jet Jet::variable(double value, int axis, int order) {
  Jet j(value, order);
  if (order >= 1) j.c_[axis == 0 ? index(1, 0) : index(0, 1)] = 1.0;
  return j;
}

double Jet::derivative(int i, int j) const {
  if (i + j > order_) return 0.0;
  return c_[index(i, j)] * kFactorial[i] * kFactorial[j];
}

Jet Jet::dx() const {
  Jet r(0.0, std::max(order_ - 1, 0));
  for (int d = 0; d + 1 <= order_; ++d)
    for (int j = 0; j <= d; ++j) r.c_[index(d - j, j)] = (d - j + 1) * c_[index(d - j + 1, j)];
  return r;
}

Jet Jet::dy() const {
  Jet r(0.0, std::max(order_ - 1, 0));
  for (int d = 0; d + 1 <= order_; ++d)
    for (int j = 0; j <= d; ++j) r.c_[index(d - j, j)] = (j + 1) * c_[index(d - j, j + 1)];
  return r;
}

Jet Jet::truncated(int order) const {
  Jet r = *this;
  if (order >= order_) return r;
  for (int k = index(0, order + 1); k < kSize; ++k) r.c_[k] = 0.0;
  r.order_ = order;
  return r;
}

Jet& Jet::operator+=(const Jet& o) {
  order_ = std::min(order_, o.order_);
  const int n = index(0, order_) + 1;
  for (int k = 0; k < n; ++k) c_[k] += o.c_[k];
  for (int k = n; k < kSize; ++k) c_[k] = 0.0;
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  order_ = std::min(order_, o.order_);
  const int n = index(0, order_) + 1;
  for (int k = 0; k < n; ++k) c_[k] -= o.c_[k];
  for (int k = n; k < kSize; ++k) c_[k] = 0.0;
  return *this;
}

Jet& Jet::operator*=(double s) {
  for (double& v : c_) v *= s;
  return *this;
}

Jet& Jet::operator*=(const Jet& o) {
  *this = *this * o;
  return *this;
}

Jet operator*(const Jet& a, const Jet& b) {
  const int order = std::min(a.order(), b.order());
  Jet r(0.0, order);
  for (int da = 0; da <= order; ++da)
    for (int ja = 0; ja <= da; ++ja) {
      const double ca = a.coeff(da - ja, ja);
      if (ca == 0.0) continue;
      for (int db = 0; da + db <= order; ++db)
        for (int jb = 0; jb <= db; ++jb) r.coeff(da - ja + db - jb, ja + jb) += ca * b.coeff(db - jb, jb);
    }
  return r;
}

Jet Jet::compose(const Jet& a, const std::array<double, kMaxOrder + 1>& g) {
  Jet delta = a;
  delta.c_[0] = 0.0;
  Jet r(g[a.order_], a.order_);
  for (int k = a.order_ - 1; k >= 0; --k) {
    r = r * delta;
    r.c_[0] += g[k];
  }
  return r;
}

Jet operator+(Jet a, const Jet& b) { return a += b; }
Jet operator-(Jet a, const Jet& b) { return a -= b; }
Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }
Jet operator+(Jet a, double s) { return a += s; }
Jet operator+(double s, Jet a) { return a += s; }
Jet operator-(Jet a, double s) { return a -= s; }
Jet operator-(double s, const Jet& a) { return (-a) += s; }
Jet operator*(Jet a, double s) { return a *= s; }
Jet operator*(double s, Jet a) { return a *= s; }
Jet operator/(Jet a, double s) { return a *= 1.0 / s; }
Jet operator/(double s, const Jet& a) { return reciprocal(a) *= s; }
Jet operator-(const Jet& a) { return a * -1.0; }

Jet exp(const Jet& a) {
  const double e = std::exp(a.value());
  std::array<double, 5> g{};
  for (int k = 0; k <= Jet::kMaxOrder; ++k) g[k] = e / kFactorial[k];
  return Jet::compose(a, g);
}

Jet log(const Jet& a) {
  const double x = a.value();
  std::array<double, 5> g{std::log(x)};
  double p = 1.0;
  for (int k = 1; k <= Jet::kMaxOrder; ++k) {
    p /= x;
    g[k] = ((k % 2) ? 1.0 : -1.0) * p / k;
  }
  return Jet::compose(a, g);
}

Jet sin(const Jet& a) {
  const double s = std::sin(a.value()), c = std::cos(a.value());
  const std::array<double, 4> cyc{s, c, -s, -c};
  std::array<double, 5> g{};
  for (int k = 0; k <= Jet::kMaxOrder; ++k) g[k] = cyc[k % 4] / kFactorial[k];
  return Jet::compose(a, g);
}

Jet cos(const Jet& a) {
  const double s = std::sin(a.value()), c = std::cos(a.value());
  const std::array<double, 4> cyc{c, -s, -c, s};
  std::array<double, 5> g{};
  for (int k = 0; k <= Jet::kMaxOrder; ++k) g[k] = cyc[k % 4] / kFactorial[k];
  return Jet::compose(a, g);
}

Jet sqrt(const Jet& a) {
  const double x = a.value();
  std::array<double, 5> g{};
  // binomial series of x^{1/2}
  double coef = std::sqrt(x), p = 0.5;
  for (int k = 0; k <= Jet::kMaxOrder; ++k) {
    g[k] = coef;
    coef *= p / (k + 1) / x;
    p -= 1.0;
  }
  return Jet::compose(a, g);
}

Jet reciprocal(const Jet& a) {
  const double x = a.value();
  std::array<double, 5> g{};
  double p = 1.0 / x;
  for (int k = 0; k <= Jet::kMaxOrder; ++k) {
    g[k] = (k % 2 ? -p : p);
    p /= x;
  }
  return Jet::compose(a, g);
}

Jet square(const Jet& a) { return a * a; }

double smooth_step(double t) {
  if (t <= 1e-3) return 0.0;
  if (t >= 1.0 - 1e-3) return 1.0;
  const double p = std::exp(-1.0 / t), q = std::exp(-1.0 / (1.0 - t));
  return p / (p + q);
}

Jet smooth_step(const Jet& t) {
  const double t0 = t.value();
  // e^{-1/t} and all its derivatives underflow below t = 1e-3
  if (t0 <= 1e-3) return Jet(0.0, t.order());
  if (t0 >= 1.0 - 1e-3) return Jet(1.0, t.order());
  const Jet p = exp(-reciprocal(t));
  const Jet q = exp(-reciprocal(1.0 - t));
  return p / (p + q);
}

}  // namespace brt
