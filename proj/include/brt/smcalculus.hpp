#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>
#include <json.hpp>

#include "brt/geometry.hpp"

namespace brt::smcalculus {

using geometry::ConformalMetric;
using geometry::Domain;
using geometry::Vec2;

struct GridSpec {
  int n_r = 64;
  int n_ang = 64;
  int n_theta = 64;
  double r_min = 1.0;
  double r_max = 2.0;
};

// Polar base grid about the outer centre (rows r_min..r_max inclusive, periodic angle) times a uniform fiber grid.
class SMGrid {
 public:
  SMGrid(std::shared_ptr<const Domain> domain, std::shared_ptr<const ConformalMetric> metric, GridSpec spec);

  const GridSpec& spec() const { return spec_; }
  int n_r() const { return spec_.n_r; }
  int n_ang() const { return spec_.n_ang; }
  int n_theta() const { return spec_.n_theta; }
  double dr() const { return dr_; }
  double dang() const { return dang_; }
  double dtheta() const { return dtheta_; }
  double r(int i) const { return spec_.r_min + i * dr_; }
  double ang(int j) const { return j * dang_; }
  double theta(int k) const { return k * dtheta_; }
  Vec2 position(int i, int j) const;
  Vec2 center() const { return center_; }

  std::size_t base(int i, int j) const { return static_cast<std::size_t>(i) * spec_.n_ang + j; }
  std::size_t index(int i, int j, int k) const { return base(i, j) * spec_.n_theta + k; }
  std::size_t base_size() const { return static_cast<std::size_t>(spec_.n_r) * spec_.n_ang; }
  std::size_t size() const { return base_size() * spec_.n_theta; }

  const Domain& domain() const { return *domain_; }
  const std::shared_ptr<const Domain>& domain_ptr() const { return domain_; }
  const ConformalMetric& metric() const { return *metric_; }
  const std::shared_ptr<const ConformalMetric>& metric_ptr() const { return metric_; }

  // Per base node.
  double phi(std::size_t b) const { return phi_[b]; }
  double emphi(std::size_t b) const { return emphi_[b]; }
  double phix(std::size_t b) const { return phix_[b]; }
  double phiy(std::size_t b) const { return phiy_[b]; }
  double curvature(std::size_t b) const { return K_[b]; }
  bool in_domain(std::size_t b) const { return in_domain_[b] != 0; }

  // cos / sin of theta_k - ang_j, indexed j * n_theta + k.
  double cos_rel(int j, int k) const { return cos_rel_[j * spec_.n_theta + k]; }
  double sin_rel(int j, int k) const { return sin_rel_[j * spec_.n_theta + k]; }

 private:
  GridSpec spec_;
  std::shared_ptr<const Domain> domain_;
  std::shared_ptr<const ConformalMetric> metric_;
  Vec2 center_;
  double dr_, dang_, dtheta_;
  std::vector<double> phi_, emphi_, phix_, phiy_, K_, cos_rel_, sin_rel_;
  std::vector<std::uint8_t> in_domain_;
};

using GridPtr = std::shared_ptr<const SMGrid>;

struct SMGridFunction {
  enum Flag : std::uint8_t { kNearTangential = 1, kGrazing = 2 };

  GridPtr grid;
  std::vector<double> values;
  std::vector<std::uint8_t> valid;
  std::vector<std::uint8_t> flags;  // empty unless produced by the tracer

  SMGridFunction() = default;
  explicit SMGridFunction(GridPtr g);
  static SMGridFunction sample(GridPtr g, const std::function<double(const Vec2&, double)>& f);

  double& operator()(int i, int j, int k) { return values[grid->index(i, j, k)]; }
  double operator()(int i, int j, int k) const { return values[grid->index(i, j, k)]; }

  SMGridFunction& operator+=(const SMGridFunction& o);
  SMGridFunction& operator-=(const SMGridFunction& o);
  SMGridFunction& operator*=(double s);
};

SMGridFunction operator+(SMGridFunction a, const SMGridFunction& b);
SMGridFunction operator-(SMGridFunction a, const SMGridFunction& b);
SMGridFunction operator*(double s, SMGridFunction a);
// Multiplication by the base curvature K.
SMGridFunction times_curvature(SMGridFunction u);

class DegreeLeakage : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DegreeProjection {
  int k = 0;
  GridPtr grid;
  std::vector<double> a, b;  // per base node: u_k = a cos k theta + b sin k theta

  SMGridFunction to_function() const;
};

SMGridFunction apply_V(const SMGridFunction& u);
SMGridFunction laplacian_vertical(const SMGridFunction& u);
SMGridFunction apply_X(const SMGridFunction& u);
SMGridFunction apply_Xperp(const SMGridFunction& u);
DegreeProjection project_degree(const SMGridFunction& u, int k);
SMGridFunction degree_part(const SMGridFunction& u, int k);
// Fiber Fourier mass per degree 0..n_theta/2, summed over valid base nodes.
std::vector<double> degree_mass(const SMGridFunction& u);

inline constexpr double kLeakageThreshold = 1e-8;
// Degree k+1 / k-1 parts of X u_k; throws DegreeLeakage when X u_k has relative mass outside k +- 1 above threshold.
SMGridFunction xplus(const SMGridFunction& uk, int k);
SMGridFunction xminus(const SMGridFunction& uk, int k);
double degree_leakage(const SMGridFunction& uk, int k);
// Sum over degrees of the raising / lowering parts of X.
SMGridFunction xplus_all(const SMGridFunction& u);
SMGridFunction xminus_all(const SMGridFunction& u);

// Rows [first, last] of the base grid used for L2 quadrature.
struct RowWindow {
  int first = 0;
  int last = -1;  // -1: last row
};

double inner(const SMGridFunction& u, const SMGridFunction& w, RowWindow win = {});
double norm2(const SMGridFunction& u, RowWindow win = {});
// Integral over the boundary circle at row i of g(j, k) with respect to ds_g dtheta.
double row_integral(const SMGrid& grid, int i, const std::function<double(int, int)>& g);
// Euclidean outward normal sign of row i as a boundary of the grid region: -1 at row 0, +1 at the last row.
double row_normal_sign(const SMGrid& grid, int i);
double row_second_fundamental_form(const SMGrid& grid, int i, int j);

// ---- identity checks ----

using TestFunction = std::function<double(const Vec2&, double)>;

struct ResidualReport {
  std::string identity;
  std::vector<int> grids;             // base resolution per refinement level
  std::vector<double> residuals;      // relative residual per level
  std::vector<std::optional<double>> orders;  // between consecutive levels; empty when at round-off
  double roundoff_floor = 1e-11;

  void fill_orders();
  bool converges_at_order(double min_order) const;
  nlohmann::json to_json() const;
};

// Residuals [X,V]-X⊥, [X⊥,V]+X, [X,X⊥]+KV, [X,Δ]+(X⊥V+VX⊥) for each grid resolution (n_r = n_ang = N).
std::vector<ResidualReport> verify_structure(const std::vector<TestFunction>& batch,
                                             std::shared_ptr<const Domain> domain,
                                             std::shared_ptr<const ConformalMetric> metric,
                                             const std::vector<int>& resolutions, int n_theta, double r_min,
                                             double r_max);

struct PestovReport {
  double vxu2 = 0, xvu2 = 0, kvu2 = 0, xu2 = 0;
  double P = 0, H = 0;
  double defect = 0;          // |lhs - rhs| / largest term
  double boundary_defect = 0; // |P + H| / |H|, 0 when H = 0

  nlohmann::json to_json() const;
};

// ‖VXu‖² = ‖XVu‖² − ⟨KVu,Vu⟩ + ‖Xu‖² + P(u,u) over the full grid; boundary rows are rows 0 and n_r-1.
PestovReport pestov_check(const SMGridFunction& u);

// ([X,Δ]u)_m versus (2m+1)(Xu)_m, relative residual.
double comm_proj_check(int m, const SMGridFunction& u);

// (‖XVu‖² − ‖VXu‖² + ‖Xu‖²) − (⟨Xu,[X,Δ]u⟩ + ‖X⊥u‖²), relative to the largest term.
double vp_identity_defect(const SMGridFunction& u, RowWindow win = {});

// ⟨Xu,w⟩ + ⟨u,Xw⟩ − ∮⟨v,ν⟩uw relative to ‖Xu‖‖w‖.
double integration_by_parts_defect(const SMGridFunction& u, const SMGridFunction& w);

struct HorizontalL2 {
  double xplus2, xminus2, x2, xperp2;
  bool holds(double slack = 0.0) const { return xplus2 + xminus2 <= (1.0 + slack) * (x2 + xperp2); }
};
HorizontalL2 horizontal_l2(const SMGridFunction& u, RowWindow win = {});

// ---- standard test inputs ----

// Radial Gaussian shells about c times fiber trig modes; below 1e-7 of peak outside (r_lo, r_hi).
std::vector<TestFunction> interior_batch(const Vec2& c, double r_lo, double r_hi);
// a(r) F(theta - ang) with F(pi - s) = F(s): invariant under the reflection on circles about c.
TestFunction reflection_symmetric(const Vec2& c);
// Smooth input with no degree m-1 content.
TestFunction comm_proj_input(const Vec2& c, double r_lo, double r_hi, int m);

// Interior Pestov defect of u on each resolution, with orders, over rows [2, N-3].
ResidualReport pestov_refinement(const TestFunction& u, std::shared_ptr<const Domain> domain,
                                 std::shared_ptr<const ConformalMetric> metric, const std::vector<int>& resolutions,
                                 int n_theta, double r_min, double r_max);

// ---- constants ----

class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

mpq_class C_const(int k, int n);
mpq_class B_const(int k, int N, int n);

struct ConstantsEntry {
  int k, N, n;
  double B;    // rounded for reporting; the check itself is exact
  bool holds;
};

struct ConstantsTable {
  std::vector<ConstantsEntry> entries;
  double seconds = 0.0;
};

ConstantsTable constants(std::pair<int, int> k_range, std::pair<int, int> N_range, std::pair<int, int> n_range);
// B(k,N,n)^2 (2k+n-3) <= 2k+n-3+4N, exactly.
bool prodest_holds(int k, int N, int n, const mpq_class& B);
nlohmann::json to_json(const ConstantsTable& table);
bool prodest_check(const ConstantsTable& table);

}  // namespace brt::smcalculus
