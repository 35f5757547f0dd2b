#include <bit>
#include <cmath>
#include <complex>
#include <numbers>

#include "brt/tensorfield.hpp"

namespace brt::tensorfield {

SymTensorField::SymTensorField(int rank, std::shared_ptr<const ConformalMetric> metric)
    : rank_(rank), metric_(std::move(metric)) {
  if (rank < 0 || rank > kMaxRank) throw std::invalid_argument("tensor rank out of range");
  if (!metric_) throw std::invalid_argument("tensor field needs a metric");
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

double contract(const ComponentJets& f, double v1, double v2) {
  const int m = f.rank;
  double s = 0.0;
  for (int j = 0; j <= m; ++j) s += binomial(m, j) * f.c[j].value() * std::pow(v1, m - j) * std::pow(v2, j);
  return s;
}

double eval_on_sm(const SymTensorField& f, const PhasePoint& p) {
  const double e = std::exp(-f.metric().phi_value(p.x));
  return contract(f.components(p.x, 0), e * std::cos(p.theta), e * std::sin(p.theta));
}

namespace {

class ExpressionField final : public SymTensorField {
 public:
  ExpressionField(std::shared_ptr<const ConformalMetric> m, int rank, std::vector<ScalarExprPtr> comps)
      : SymTensorField(rank, std::move(m)), comps_(std::move(comps)) {}

  ComponentJets components(const Vec2& x, int order) const override {
    ComponentJets out;
    out.rank = rank();
    for (int j = 0; j <= rank(); ++j)
      out.c[j] = comps_[j] ? comps_[j]->at(x.x(), x.y(), order) : Jet(0.0, order);
    return out;
  }

 private:
  std::vector<ScalarExprPtr> comps_;
};

class MetricTensor final : public SymTensorField {
 public:
  explicit MetricTensor(std::shared_ptr<const ConformalMetric> m) : SymTensorField(2, std::move(m)) {}
  ComponentJets components(const Vec2& x, int order) const override {
    const Jet e2 = exp(2.0 * metric().phi(x, order));
    ComponentJets out;
    out.rank = 2;
    out.c[0] = e2;
    out.c[1] = Jet(0.0, order);
    out.c[2] = e2;
    return out;
  }
};

class SymDerivative final : public SymTensorField {
 public:
  explicit SymDerivative(FieldPtr h) : SymTensorField(h->rank() + 1, h->metric_ptr()), h_(std::move(h)) {
    if (rank() > kMaxRank) throw std::invalid_argument("d^s output rank too large");
  }

  ComponentJets components(const Vec2& x, int order) const override {
    const int r = h_->rank();
    const ComponentJets h = h_->components(x, order + 1);
    std::array<Jet, kMaxRank + 1> dh[2];
    for (int j = 0; j <= r; ++j) {
      dh[0][j] = h.c[j].dx();
      dh[1][j] = h.c[j].dy();
    }
    const bool flat = metric().is_flat();
    Jet dphi[2];
    if (!flat) {
      const Jet p = metric().phi(x, order + 1);
      dphi[0] = p.dx();
      dphi[1] = p.dy();
    }
    // Gamma^k_ij = d^k_i phi_j + d^k_j phi_i - d_ij phi_k
    auto gamma = [&](int k, int i, int j) {
      Jet g(0.0, order);
      if (k == i) g += dphi[j];
      if (k == j) g += dphi[i];
      if (i == j) g -= dphi[k];
      return g;
    };
    ComponentJets out;
    out.rank = r + 1;
    for (int q = 0; q <= r + 1; ++q) out.c[q] = Jet(0.0, order);
    for (unsigned t = 0; t < (1u << (r + 1)); ++t) {
      const int i0 = t & 1u;
      const unsigned rest = t >> 1;
      const int q = std::popcount(t);
      const int qr = std::popcount(rest);
      Jet term = dh[i0][qr];
      if (!flat)
        for (int s = 0; s < r; ++s) {
          const int is = (rest >> s) & 1u;
          for (int k = 0; k < 2; ++k) term -= gamma(k, i0, is) * h.c[qr - is + k];
        }
      out.c[q] += term;
    }
    for (int q = 0; q <= r + 1; ++q) out.c[q] *= 1.0 / binomial(r + 1, q);
    return out;
  }

 private:
  FieldPtr h_;
};

class Combination final : public SymTensorField {
 public:
  Combination(FieldPtr a, double sa, FieldPtr b, double sb)
      : SymTensorField(a->rank(), a->metric_ptr()), a_(std::move(a)), b_(std::move(b)), sa_(sa), sb_(sb) {}
  ComponentJets components(const Vec2& x, int order) const override {
    ComponentJets out = a_->components(x, order);
    for (int j = 0; j <= rank(); ++j) out.c[j] *= sa_;
    if (b_) {
      const ComponentJets bb = b_->components(x, order);
      for (int j = 0; j <= rank(); ++j) out.c[j] += sb_ * bb.c[j];
    }
    return out;
  }

 private:
  FieldPtr a_, b_;
  double sa_, sb_;
};

}  // namespace

FieldPtr make_expression_field(std::shared_ptr<const ConformalMetric> metric, int rank,
                               std::vector<ScalarExprPtr> components) {
  components.resize(rank + 1);
  return std::make_shared<ExpressionField>(std::move(metric), rank, std::move(components));
}

FieldPtr make_metric_tensor(std::shared_ptr<const ConformalMetric> metric) {
  return std::make_shared<MetricTensor>(std::move(metric));
}

FieldPtr sym_cov_derivative(FieldPtr h) { return std::make_shared<SymDerivative>(std::move(h)); }

FieldPtr add(FieldPtr a, FieldPtr b) {
  if (a->rank() != b->rank()) throw std::invalid_argument("rank mismatch in field sum");
  return std::make_shared<Combination>(std::move(a), 1.0, std::move(b), 1.0);
}

FieldPtr scale(FieldPtr a, double s) { return std::make_shared<Combination>(std::move(a), s, nullptr, 0.0); }

std::vector<int> fiber_degrees(const SymTensorField& f, const std::vector<Vec2>& points, int n_theta) {
  std::vector<double> mass(n_theta / 2 + 1, 0.0);
  for (const Vec2& x : points) {
    std::vector<double> vals(n_theta);
    for (int k = 0; k < n_theta; ++k) vals[k] = eval_on_sm(f, {x, 2.0 * std::numbers::pi * k / n_theta});
    for (int d = 0; d <= n_theta / 2; ++d) {
      std::complex<double> c = 0.0;
      for (int k = 0; k < n_theta; ++k) c += vals[k] * std::polar(1.0, -2.0 * std::numbers::pi * d * k / n_theta);
      mass[d] += std::norm(c / static_cast<double>(n_theta));
    }
  }
  double total = 0.0;
  for (double m : mass) total += m;
  std::vector<int> out;
  if (total == 0.0) return out;
  for (int d = 0; d <= n_theta / 2; ++d)
    if (mass[d] > 1e-12 * total) out.push_back(d);
  return out;
}

std::vector<int> fiber_degrees(const SymTensorField& f) {
  return fiber_degrees(f, {Vec2(0.3, 0.2), Vec2(-0.7, 0.5), Vec2(1.1, -0.4), Vec2(-1.3, -1.0)});
}

}  // namespace brt::tensorfield
