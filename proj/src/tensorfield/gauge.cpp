#include "brt/errors.hpp"
#include "brt/tensorfield.hpp"

namespace brt::tensorfield {

namespace {

class AdmissiblePotential final : public SymTensorField {
 public:
  AdmissiblePotential(std::shared_ptr<const Domain> d, GaugeSpec s)
      : SymTensorField(s.seed->rank(), s.seed->metric_ptr()), domain_(std::move(d)), spec_(std::move(s)) {}

  ComponentJets components(const Vec2& x, int order) const override {
    const Jet X = Jet::variable(x.x(), 0, order + 1), Y = Jet::variable(x.y(), 1, order + 1);
    const Jet chi = smooth_step(-domain_->outer().level_jet(X, Y).truncated(order) / spec_.cutoff_width);
    ComponentJets h = spec_.seed->components(x, order);
    if (rank() > 0 && domain_->has_obstacle()) {
      const Jet g = domain_->obstacle()->level_jet(X, Y);
      const Jet beta = 1.0 - smooth_step(g.truncated(order) / spec_.blend_width);
      if (beta.value() != 0.0) blend(h, g, beta);
    }
    for (int j = 0; j <= rank(); ++j) h.c[j] = chi * h.c[j];
    return h;
  }

 private:
  void blend(ComponentJets& h, const Jet& g, const Jet& beta) const {
    const Jet gx = g.dx(), gy = g.dy();
    const Jet inv = reciprocal(sqrt(gx * gx + gy * gy));
    const Jet n1 = gx * inv, n2 = gy * inv;
    if (rank() == 1) {
      const Jet sn = beta * (h.c[0] * n1 + h.c[1] * n2);
      h.c[0] -= sn * n1;
      h.c[1] -= sn * n2;
    } else {
      const Jet t1 = -n2, t2 = n1;
      const Jet b = beta * (h.c[0] * n1 * t1 + h.c[1] * (n1 * t2 + n2 * t1) + h.c[2] * n2 * t2);
      h.c[0] -= b * (2.0 * n1 * t1);
      h.c[1] -= b * (n1 * t2 + n2 * t1);
      h.c[2] -= b * (2.0 * n2 * t2);
    }
  }

  std::shared_ptr<const Domain> domain_;
  GaugeSpec spec_;
};

}  // namespace

FieldPtr make_admissible_potential(std::shared_ptr<const Domain> domain, const GaugeSpec& spec) {
  if (!spec.seed) throw std::invalid_argument("gauge seed is required");
  if (spec.seed->rank() > 2) throw RankUnsupported("admissible potentials are implemented for rank <= 2");
  const double gap = domain->has_obstacle() ? domain->gap() : domain->outer().min_radius();
  if (!(spec.cutoff_width > 0.0 && spec.cutoff_width < gap && spec.blend_width > 0.0 && spec.blend_width < gap))
    throw std::invalid_argument("gauge widths must be positive and smaller than the E-R gap");
  return std::make_shared<AdmissiblePotential>(std::move(domain), spec);
}

}  // namespace brt::tensorfield
