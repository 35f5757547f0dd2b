#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <json.hpp>

#include "brt/raytracer.hpp"
#include "brt/tensorfield.hpp"

namespace brt::recon {

using geometry::ConformalMetric;
using geometry::Domain;
using geometry::Vec2;
using raytracer::BrokenRay;

// Polar base grid, rows r_min..r_max inclusive, periodic angle.
struct BaseGrid {
  Vec2 center = Vec2::Zero();
  double r_min = 1.0;
  double r_max = 2.0;
  int n_r = 64;
  int n_ang = 64;

  double dr() const { return (r_max - r_min) / (n_r - 1); }
  double dang() const;
  double r(int i) const { return r_min + i * dr(); }
  double ang(int j) const { return j * dang(); }
  Vec2 position(int i, int j) const;
  int size() const { return n_r * n_ang; }
  int node(int i, int j) const { return i * n_ang + j; }
  // Trapezoid area weight r dr dang of node (i, j).
  double area_weight(int i) const;
};

// Component c (number of indices equal to 2) of node n is values[c * size + n].
struct FieldGrid {
  int rank = 0;
  BaseGrid grid;
  Eigen::VectorXd values;
  std::string interpolation = "bilinear";

  FieldGrid() = default;
  FieldGrid(int rank, BaseGrid grid);
  static FieldGrid sample(const tensorfield::SymTensorField& f, const BaseGrid& grid);

  double& at(int c, int i, int j) { return values[c * grid.size() + grid.node(i, j)]; }
  double at(int c, int i, int j) const { return values[c * grid.size() + grid.node(i, j)]; }
};

// Area-weighted L2 norm; the component with c indices equal to 2 counts C(m, c) times.
double weighted_norm(const FieldGrid& f);

class ForwardOperator {
 public:
  ForwardOperator(const BaseGrid& grid, int rank, const ConformalMetric& metric, const std::vector<BrokenRay>& rays);

  Eigen::VectorXd apply(const FieldGrid& f) const;
  FieldGrid adjoint(const Eigen::VectorXd& d) const;
  Eigen::VectorXd apply_vector(const Eigen::VectorXd& x) const { return A_ * x; }
  Eigen::VectorXd adjoint_vector(const Eigen::VectorXd& d) const { return At_ * d; }

  int rank() const { return rank_; }
  const BaseGrid& grid() const { return grid_; }
  const Eigen::SparseMatrix<double, Eigen::RowMajor>& matrix() const { return A_; }
  const Eigen::SparseMatrix<double, Eigen::RowMajor>& transposed() const { return At_; }
  double mean_ray_length() const { return mean_length_; }

 private:
  BaseGrid grid_;
  int rank_;
  double mean_length_ = 0.0;
  Eigen::SparseMatrix<double, Eigen::RowMajor> A_;
  Eigen::SparseMatrix<double, Eigen::RowMajor> At_;
};

struct ReconConfig {
  double lambda = 1e-6;
  int max_iter = 500;
  double tol = 1e-8;
};

struct IterLog {
  int iter;
  double residual;         // ‖d − Af‖
  double normal_residual;  // ‖Aᵀ(d − Af) − λf‖
};

struct ReconResult {
  FieldGrid field;
  std::vector<IterLog> log;
  bool converged = false;
};

// CGLS on (AᵀA + λI) f = Aᵀd from f = 0.
// Stops when ‖d − Af‖/‖d‖ or ‖Aᵀr − λf‖/‖Aᵀd‖ drops below tol.
ReconResult reconstruct(const ForwardOperator& A, const Eigen::VectorXd& data, const ReconConfig& cfg);

// Generic damped CGLS on an explicit sparse matrix; used by reconstruct and gauge_compare.
struct CglsResult {
  Eigen::VectorXd x;
  std::vector<IterLog> log;
  bool converged = false;
};
CglsResult cgls(const Eigen::SparseMatrix<double, Eigen::RowMajor>& A,
                const Eigen::SparseMatrix<double, Eigen::RowMajor>& At, const Eigen::VectorXd& b, double lambda,
                int max_iter, double tol);

// Discrete d^s on the polar grid: fourth-order differences in r (one-sided at the end rows) and angle.
Eigen::SparseMatrix<double, Eigen::RowMajor> sym_derivative_matrix(const BaseGrid& grid, int h_rank,
                                                                    const ConformalMetric& metric);
FieldGrid discrete_sym_derivative(const FieldGrid& h, const ConformalMetric& metric);

struct GaugeReport {
  double residual = 0.0;         // weighted ‖(f_a − f_b) − d^s h‖ at the optimum
  double difference_norm = 0.0;  // weighted ‖f_a − f_b‖
  double reference_norm = 0.0;   // weighted ‖f_a‖
  int iterations = 0;
  bool converged = false;
  bool accessible_row = false;  // last row lies on E and carries h = 0
  bool reflecting_row = false;  // first row lies on R and carries the reflection condition
  FieldGrid h;

  nlohmann::json to_json() const;
};

GaugeReport gauge_compare(const FieldGrid& a, const FieldGrid& b, const Domain& domain,
                          const ConformalMetric& metric, int max_iter = 20000, double tol = 1e-12);

}  // namespace brt::recon
