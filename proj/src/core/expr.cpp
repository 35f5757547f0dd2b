#include "brt/expr.hpp"

#include <cmath>
#include <string>

#include "brt/errors.hpp"
#include "brt/json_util.hpp"

namespace brt {

using json_util::check_keys;
using json_util::number;
using json_util::pair;

Jet ScalarExpr::at(double x, double y, int order) const {
  return eval(Jet::variable(x, 0, order), Jet::variable(y, 1, order));
}

double ScalarExpr::value(double x, double y) const { return eval(Jet(x, 0), Jet(y, 0)).value(); }

namespace {

Jet power(const Jet& a, int p) {
  Jet r(1.0, a.order());
  for (int i = 0; i < p; ++i) r = r * a;
  return r;
}

class Constant final : public ScalarExpr {
 public:
  explicit Constant(double c) : c_(c) {}
  Jet eval(const Jet& x, const Jet& y) const override { return Jet(c_, std::min(x.order(), y.order())); }

 private:
  double c_;
};

class Polynomial final : public ScalarExpr {
 public:
  explicit Polynomial(std::vector<Monomial> t) : terms_(std::move(t)) {}
  Jet eval(const Jet& x, const Jet& y) const override {
    Jet r(0.0, std::min(x.order(), y.order()));
    for (const auto& m : terms_) r += m.coef * (power(x, m.px) * power(y, m.py));
    return r;
  }

 private:
  std::vector<Monomial> terms_;
};

class Gaussian final : public ScalarExpr {
 public:
  Gaussian(double a, std::array<double, 2> c, double w) : a_(a), c_(c), w_(w) {}
  Jet eval(const Jet& x, const Jet& y) const override {
    const Jet dx = x - c_[0], dy = y - c_[1];
    return a_ * exp((dx * dx + dy * dy) * (-0.5 / (w_ * w_)));
  }

 private:
  double a_;
  std::array<double, 2> c_;
  double w_;
};

class Trig final : public ScalarExpr {
 public:
  Trig(double a, std::array<double, 2> k, double p) : a_(a), k_(k), p_(p) {}
  Jet eval(const Jet& x, const Jet& y) const override {
    return a_ * cos(x * k_[0] + y * k_[1] + p_);
  }

 private:
  double a_;
  std::array<double, 2> k_;
  double p_;
};

class Sum final : public ScalarExpr {
 public:
  explicit Sum(std::vector<ScalarExprPtr> t) : terms_(std::move(t)) {}
  Jet eval(const Jet& x, const Jet& y) const override {
    Jet r(0.0, std::min(x.order(), y.order()));
    for (const auto& t : terms_) r += t->eval(x, y);
    return r;
  }

 private:
  std::vector<ScalarExprPtr> terms_;
};

class Product final : public ScalarExpr {
 public:
  explicit Product(std::vector<ScalarExprPtr> f) : factors_(std::move(f)) {}
  Jet eval(const Jet& x, const Jet& y) const override {
    Jet r(1.0, std::min(x.order(), y.order()));
    for (const auto& f : factors_) r = r * f->eval(x, y);
    return r;
  }

 private:
  std::vector<ScalarExprPtr> factors_;
};

class Scaled final : public ScalarExpr {
 public:
  Scaled(ScalarExprPtr e, double s) : e_(std::move(e)), s_(s) {}
  Jet eval(const Jet& x, const Jet& y) const override { return s_ * e_->eval(x, y); }

 private:
  ScalarExprPtr e_;
  double s_;
};

std::vector<ScalarExprPtr> parse_list(const nlohmann::json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw ConfigError(where + ": expected a non-empty array");
  std::vector<ScalarExprPtr> out;
  for (const auto& e : j) out.push_back(parse_expr(e));
  return out;
}

}  // namespace

ScalarExprPtr make_constant(double c) { return std::make_shared<Constant>(c); }
ScalarExprPtr make_polynomial(std::vector<Monomial> terms) { return std::make_shared<Polynomial>(std::move(terms)); }
ScalarExprPtr make_gaussian(double amplitude, std::array<double, 2> center, double width) {
  if (!(width > 0.0)) throw std::invalid_argument("gaussian width must be positive");
  return std::make_shared<Gaussian>(amplitude, center, width);
}
ScalarExprPtr make_trig(double amplitude, std::array<double, 2> k, double phase) {
  return std::make_shared<Trig>(amplitude, k, phase);
}
ScalarExprPtr make_sum(std::vector<ScalarExprPtr> terms) { return std::make_shared<Sum>(std::move(terms)); }
ScalarExprPtr make_product(std::vector<ScalarExprPtr> factors) {
  return std::make_shared<Product>(std::move(factors));
}
ScalarExprPtr make_scaled(ScalarExprPtr e, double s) { return std::make_shared<Scaled>(std::move(e), s); }

ScalarExprPtr parse_expr(const nlohmann::json& j) {
  if (j.is_number()) return make_constant(j.get<double>());
  if (!j.is_object() || j.size() != 1) throw ConfigError("expression: expected a number or a single-key object");
  const std::string kind = j.begin().key();
  const auto& body = j.begin().value();
  if (kind == "poly") {
    if (!body.is_array()) throw ConfigError("poly: expected [[coef, i, j], ...]");
    std::vector<Monomial> terms;
    for (const auto& t : body) {
      if (!t.is_array() || t.size() != 3 || !t[0].is_number() || !t[1].is_number_integer() ||
          !t[2].is_number_integer() || t[1].get<long>() < 0 || t[2].get<long>() < 0)
        throw ConfigError("poly: each term must be [coef, i, j] with non-negative integer powers");
      terms.push_back({t[0].get<double>(), t[1].get<int>(), t[2].get<int>()});
    }
    return make_polynomial(std::move(terms));
  }
  if (kind == "gaussian") {
    check_keys(body, {"amplitude", "center", "width"}, "gaussian");
    const double w = number(body, "width", "gaussian");
    if (!(w > 0.0)) throw ConfigError("gaussian: width must be positive");
    return make_gaussian(number(body, "amplitude", "gaussian"), pair(body, "center", "gaussian"), w);
  }
  if (kind == "trig") {
    check_keys(body, {"amplitude", "k", "phase"}, "trig");
    const double phase = body.contains("phase") ? number(body, "phase", "trig") : 0.0;
    return make_trig(number(body, "amplitude", "trig"), pair(body, "k", "trig"), phase);
  }
  if (kind == "sum") return make_sum(parse_list(body, "sum"));
  if (kind == "product") return make_product(parse_list(body, "product"));
  throw ConfigError("expression: unknown kind '" + kind + "'");
}

}  // namespace brt
