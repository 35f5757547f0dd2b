#include <fftw3.h>

#include <array>
#include <cmath>
#include <mutex>

#include "brt/smcalculus.hpp"

namespace brt::smcalculus {

namespace {

using cplx = std::complex<double>;

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// Half-spectrum per base node: n_theta/2 + 1 coefficients; fiber_ok marks fully valid fibers.
struct Spectrum {
  GridPtr grid;
  int nh = 0;
  std::vector<cplx> c;
  std::vector<std::uint8_t> fiber_ok;
};

Spectrum forward(const SMGridFunction& u) {
  const auto& g = *u.grid;
  const int nt = g.n_theta(), nh = nt / 2 + 1;
  const int nb = static_cast<int>(g.base_size());
  Spectrum s{u.grid, nh, std::vector<cplx>(static_cast<std::size_t>(nb) * nh), std::vector<std::uint8_t>(nb, 1)};
  std::vector<double> in(u.values);
  for (int b = 0; b < nb; ++b)
    for (int k = 0; k < nt; ++k)
      if (!u.valid[static_cast<std::size_t>(b) * nt + k]) s.fiber_ok[b] = 0;
  for (int b = 0; b < nb; ++b)
    if (!s.fiber_ok[b])
      for (int k = 0; k < nt; ++k) in[static_cast<std::size_t>(b) * nt + k] = 0.0;
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = fftw_plan_many_dft_r2c(1, &nt, nb, in.data(), nullptr, 1, nt,
                                  reinterpret_cast<fftw_complex*>(s.c.data()), nullptr, 1, nh, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  return s;
}

SMGridFunction inverse(Spectrum s) {
  const auto& g = *s.grid;
  const int nt = g.n_theta();
  const int nb = static_cast<int>(g.base_size());
  SMGridFunction u(s.grid);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = fftw_plan_many_dft_c2r(1, &nt, nb, reinterpret_cast<fftw_complex*>(s.c.data()), nullptr, 1, s.nh,
                                  u.values.data(), nullptr, 1, nt, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  const double scale = 1.0 / nt;
  for (int b = 0; b < nb; ++b)
    for (int k = 0; k < nt; ++k) {
      const std::size_t n = static_cast<std::size_t>(b) * nt + k;
      u.values[n] = s.fiber_ok[b] ? u.values[n] * scale : 0.0;
      u.valid[n] = s.fiber_ok[b];
    }
  return u;
}

template <class F>
SMGridFunction spectral_map(const SMGridFunction& u, F&& multiplier) {
  Spectrum s = forward(u);
  const std::size_t nb = u.grid->base_size();
  for (std::size_t b = 0; b < nb; ++b)
    for (int k = 0; k < s.nh; ++k) s.c[b * s.nh + k] *= multiplier(k);
  return inverse(std::move(s));
}

struct Stencil {
  int first;  // offset of the first node
  std::array<double, 5> w;
};

// Fourth-order first derivative on n nodes, one-sided within two nodes of either end.
Stencil radial_stencil(int i, int n) {
  if (i == 0) return {0, {-25.0, 48.0, -36.0, 16.0, -3.0}};
  if (i == 1) return {-1, {-3.0, -10.0, 18.0, -6.0, 1.0}};
  if (i == n - 2) return {-3, {-1.0, 6.0, -18.0, 10.0, 3.0}};
  if (i == n - 1) return {-4, {3.0, -16.0, 36.0, -48.0, 25.0}};
  return {-2, {1.0, -8.0, 0.0, 8.0, -1.0}};
}

SMGridFunction d_radial(const SMGridFunction& u) {
  const auto& g = *u.grid;
  const int nr = g.n_r(), na = g.n_ang(), nt = g.n_theta();
  SMGridFunction out(u.grid);
  const double inv = 1.0 / (12.0 * g.dr());
  for (int i = 0; i < nr; ++i) {
    const Stencil st = radial_stencil(i, nr);
    for (int j = 0; j < na; ++j)
      for (int k = 0; k < nt; ++k) {
        double s = 0.0;
        std::uint8_t ok = 1;
        for (int q = 0; q < 5; ++q) {
          const std::size_t n = g.index(i + st.first + q, j, k);
          s += st.w[q] * u.values[n];
          ok &= u.valid[n];
        }
        const std::size_t n = g.index(i, j, k);
        out.values[n] = s * inv;
        out.valid[n] = ok;
      }
  }
  return out;
}

SMGridFunction d_angular(const SMGridFunction& u) {
  const auto& g = *u.grid;
  const int nr = g.n_r(), na = g.n_ang(), nt = g.n_theta();
  SMGridFunction out(u.grid);
  const double inv = 1.0 / (12.0 * g.dang());
  constexpr std::array<double, 5> w{1.0, -8.0, 0.0, 8.0, -1.0};
  for (int i = 0; i < nr; ++i)
    for (int j = 0; j < na; ++j)
      for (int k = 0; k < nt; ++k) {
        double s = 0.0;
        std::uint8_t ok = 1;
        for (int q = 0; q < 5; ++q) {
          const std::size_t n = g.index(i, (j + q - 2 + na) % na, k);
          s += w[q] * u.values[n];
          ok &= u.valid[n];
        }
        const std::size_t n = g.index(i, j, k);
        out.values[n] = s * inv;
        out.valid[n] = ok;
      }
  return out;
}

// e^{-phi} [a(theta - ang) D_r u + b(theta - ang) / r D_ang u + c(theta) V u]; perp selects X⊥.
SMGridFunction horizontal(const SMGridFunction& u, bool perp) {
  const auto& g = *u.grid;
  const SMGridFunction ur = d_radial(u), ua = d_angular(u), uv = apply_V(u);
  SMGridFunction out(u.grid);
  const int nt = g.n_theta();
  std::vector<double> ct(nt), st(nt);
  for (int k = 0; k < nt; ++k) {
    ct[k] = std::cos(g.theta(k));
    st[k] = std::sin(g.theta(k));
  }
  for (int i = 0; i < g.n_r(); ++i) {
    const double inv_r = 1.0 / g.r(i);
    for (int j = 0; j < g.n_ang(); ++j) {
      const std::size_t b = g.base(i, j);
      const double e = g.emphi(b), px = g.phix(b), py = g.phiy(b);
      for (int k = 0; k < nt; ++k) {
        const std::size_t n = b * nt + k;
        const double c = g.cos_rel(j, k), s = g.sin_rel(j, k);
        const double v = perp ? s * ur.values[n] - c * inv_r * ua.values[n] + (px * ct[k] + py * st[k]) * uv.values[n]
                              : c * ur.values[n] + s * inv_r * ua.values[n] + (-px * st[k] + py * ct[k]) * uv.values[n];
        out.values[n] = e * v;
        out.valid[n] = ur.valid[n] & ua.valid[n] & uv.valid[n];
      }
    }
  }
  return out;
}

}  // namespace

SMGridFunction apply_V(const SMGridFunction& u) {
  const int nyquist = u.grid->n_theta() / 2;
  return spectral_map(u, [&](int k) { return k == nyquist ? cplx(0.0) : cplx(0.0, k); });
}

SMGridFunction laplacian_vertical(const SMGridFunction& u) {
  return spectral_map(u, [](int k) { return cplx(static_cast<double>(k) * k); });
}

SMGridFunction apply_X(const SMGridFunction& u) { return horizontal(u, false); }
SMGridFunction apply_Xperp(const SMGridFunction& u) { return horizontal(u, true); }

SMGridFunction degree_part(const SMGridFunction& u, int k) {
  return spectral_map(u, [&](int q) { return cplx(q == k ? 1.0 : 0.0); });
}

DegreeProjection project_degree(const SMGridFunction& u, int k) {
  const auto& g = *u.grid;
  const int nt = g.n_theta();
  if (k < 0 || k > nt / 2) throw std::invalid_argument("degree out of range for the fiber grid");
  const Spectrum s = forward(u);
  DegreeProjection p{k, u.grid, std::vector<double>(g.base_size()), std::vector<double>(g.base_size())};
  const double f = (k == 0 || 2 * k == nt) ? 1.0 / nt : 2.0 / nt;
  for (std::size_t b = 0; b < g.base_size(); ++b) {
    const cplx c = s.c[b * s.nh + k];
    p.a[b] = f * c.real();
    p.b[b] = -f * c.imag();
  }
  return p;
}

SMGridFunction DegreeProjection::to_function() const {
  SMGridFunction u(grid);
  const int nt = grid->n_theta();
  for (std::size_t b = 0; b < grid->base_size(); ++b)
    for (int q = 0; q < nt; ++q) {
      const double t = grid->theta(q);
      u.values[b * nt + q] = a[b] * std::cos(k * t) + this->b[b] * std::sin(k * t);
    }
  return u;
}

std::vector<double> degree_mass(const SMGridFunction& u) {
  const Spectrum s = forward(u);
  std::vector<double> mass(s.nh, 0.0);
  for (std::size_t b = 0; b < u.grid->base_size(); ++b)
    if (s.fiber_ok[b])
      for (int k = 0; k < s.nh; ++k) mass[k] += std::norm(s.c[b * s.nh + k]);
  return mass;
}

namespace {

double leakage_of(const SMGridFunction& xu, int k) {
  const auto mass = degree_mass(xu);
  double total = 0.0, outside = 0.0;
  for (int q = 0; q < static_cast<int>(mass.size()); ++q) {
    total += mass[q];
    if (q != k - 1 && q != k + 1) outside += mass[q];
  }
  return total > 0.0 ? outside / total : 0.0;
}

}  // namespace

double degree_leakage(const SMGridFunction& uk, int k) { return leakage_of(apply_X(uk), k); }

namespace {

SMGridFunction shifted_part(const SMGridFunction& uk, int k, int target) {
  if (target < 0 || target > uk.grid->n_theta() / 2) return SMGridFunction(uk.grid);
  const SMGridFunction xu = apply_X(uk);
  if (leakage_of(xu, k) > kLeakageThreshold)
    throw DegreeLeakage("X u_k has Fourier mass outside degrees k-1, k+1");
  return degree_part(xu, target);
}

}  // namespace

SMGridFunction xplus(const SMGridFunction& uk, int k) { return shifted_part(uk, k, k + 1); }
SMGridFunction xminus(const SMGridFunction& uk, int k) {
  if (k == 0) {
    SMGridFunction z(uk.grid);
    z.valid = uk.valid;
    return z;
  }
  return shifted_part(uk, k, k - 1);
}

SMGridFunction xplus_all(const SMGridFunction& u) {
  SMGridFunction out(u.grid);
  for (int k = 0; k + 1 <= u.grid->n_theta() / 2; ++k) out += degree_part(apply_X(degree_part(u, k)), k + 1);
  return out;
}

SMGridFunction xminus_all(const SMGridFunction& u) {
  SMGridFunction out(u.grid);
  for (int k = 1; k <= u.grid->n_theta() / 2; ++k) out += degree_part(apply_X(degree_part(u, k)), k - 1);
  return out;
}

}  // namespace brt::smcalculus
