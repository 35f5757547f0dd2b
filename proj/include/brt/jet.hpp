#pragma once

#include <array>

namespace brt {

// Truncated bivariate Taylor polynomial about a base point.
// coeff(i, j) multiplies dx^i dy^j; terms above order() are dropped.
class Jet {
 public:
  static constexpr int kMaxOrder = 4;
  static constexpr int kSize = (kMaxOrder + 1) * (kMaxOrder + 2) / 2;

  static constexpr int index(int i, int j) {
    const int d = i + j;
    return d * (d + 1) / 2 + j;
  }

  Jet() = default;
  Jet(double value, int order);

  static Jet variable(double value, int axis, int order);

  int order() const { return order_; }
  double value() const { return c_[0]; }
  double coeff(int i, int j) const { return c_[index(i, j)]; }
  double& coeff(int i, int j) { return c_[index(i, j)]; }
  // Partial derivative d^{i+j}/dx^i dy^j at the base point.
  double derivative(int i, int j) const;

  // Partial derivative as a jet of one lower order.
  Jet dx() const;
  Jet dy() const;
  Jet truncated(int order) const;

  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator*=(const Jet& o);
  Jet& operator+=(double s) { c_[0] += s; return *this; }
  Jet& operator-=(double s) { c_[0] -= s; return *this; }
  Jet& operator*=(double s);

  // Evaluates sum_k g[k] (a - a0)^k, g[k] = f^(k)(a0)/k!.
  static Jet compose(const Jet& a, const std::array<double, kMaxOrder + 1>& g);

 private:
  int order_ = 0;
  std::array<double, kSize> c_{};
};

Jet operator+(Jet a, const Jet& b);
Jet operator-(Jet a, const Jet& b);
Jet operator*(const Jet& a, const Jet& b);
Jet operator/(const Jet& a, const Jet& b);
Jet operator+(Jet a, double s);
Jet operator+(double s, Jet a);
Jet operator-(Jet a, double s);
Jet operator-(double s, const Jet& a);
Jet operator*(Jet a, double s);
Jet operator*(double s, Jet a);
Jet operator/(Jet a, double s);
Jet operator/(double s, const Jet& a);
Jet operator-(const Jet& a);

Jet exp(const Jet& a);
Jet log(const Jet& a);
Jet sin(const Jet& a);
Jet cos(const Jet& a);
Jet sqrt(const Jet& a);
Jet reciprocal(const Jet& a);
Jet square(const Jet& a);

// C-infinity transition: 0 for t <= 0, 1 for t >= 1.
Jet smooth_step(const Jet& t);
double smooth_step(double t);

}  // namespace brt
