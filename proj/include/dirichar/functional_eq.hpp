#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "dirichar/random.hpp"
#include "dirichar/reparam.hpp"

namespace dirichar {

/// A strictly positive function on (0, 1).
using Fn1 = std::function<double(double)>;

/// A strictly positive function of the free coordinates of a simplex point.
struct FnSimplex {
  std::function<double(std::span<const double>)> evaluator;
  std::size_t arity = 0;
};

/// Factor functions of the two-by-two functional equation
///   f0(y) g1(z) g2(w) = g0(x) f1(yz/x) f2(y(1-z)/(1-x)).
struct BinaryBundle {
  Fn1 f0, g1, g2, g0, f1, f2;
};

/// Factor functions of the k x n equation
///   f0(y) prod_j g_j(z_.j) = g0(x) prod_i f_i(w_i.).
/// f0 and every f_i take n-1 arguments; g0 and every g_j take k-1.
struct GeneralBundle {
  std::size_t k = 0;
  std::size_t n = 0;
  FnSimplex f0;
  std::vector<FnSimplex> g;  // n entries
  FnSimplex g0;
  std::vector<FnSimplex> f;  // k entries
};

/// Column-side coordinates of a 2 x 2 table: y = theta_.1,
/// z = theta_{1|1}, w = theta_{1|2}.
class BinaryPoint {
 public:
  BinaryPoint(double y, double z, double w);
  double y() const noexcept { return y_; }
  double z() const noexcept { return z_; }
  double w() const noexcept { return w_; }
  /// theta_1. = yz + (1-y)w
  double x() const noexcept { return y_ * z_ + (1.0 - y_) * w_; }

 private:
  double y_, z_, w_;
};

/// Free coordinates of the k x n equation in its column orientation:
/// y (n-1 entries) and z ((k-1) x n). All derived coordinates are computed
/// at construction and must lie strictly inside (0, 1).
class GeneralPoint {
 public:
  GeneralPoint(std::vector<double> y, Eigen::MatrixXd z);

  std::size_t k() const noexcept { return static_cast<std::size_t>(z_full_.rows()); }
  std::size_t n() const noexcept { return y_full_.size(); }
  /// All n column-marginal coordinates.
  const std::vector<double>& y() const noexcept { return y_full_; }
  /// k x n, including the dependent last row.
  const Eigen::MatrixXd& z() const noexcept { return z_full_; }
  /// All k row-marginal coordinates.
  const std::vector<double>& x() const noexcept { return x_full_; }
  /// k x n, w_ij = z_ij y_j / x_i, including the dependent last column.
  const Eigen::MatrixXd& w() const noexcept { return w_full_; }

 private:
  std::vector<double> y_full_;
  Eigen::MatrixXd z_full_;
  std::vector<double> x_full_;
  Eigen::MatrixXd w_full_;
};

/// Free coordinates of the same equation in its row orientation:
/// x (k-1 entries) and w (k x (n-1)).
class DualPoint {
 public:
  DualPoint(std::vector<double> x, Eigen::MatrixXd w);

  const std::vector<double>& x() const noexcept { return x_full_; }
  const Eigen::MatrixXd& w() const noexcept { return w_full_; }
  const std::vector<double>& y() const noexcept { return y_full_; }
  const Eigen::MatrixXd& z() const noexcept { return z_full_; }

 private:
  std::vector<double> x_full_;
  Eigen::MatrixXd w_full_;
  std::vector<double> y_full_;
  Eigen::MatrixXd z_full_;
};

DualPoint to_dual(const GeneralPoint& p);
GeneralPoint to_general(const DualPoint& p);

double binary_residual(const BinaryBundle& bundle, const BinaryPoint& p);

/// Residual of the column orientation at p.
double general_residual_yz(const GeneralBundle& bundle, const GeneralPoint& p);
/// Residual of the row orientation g0(x) prod_i f_i(w_i.) = f0(y) prod_j g_j(z_.j).
double general_residual_xw(const GeneralBundle& bundle, const DualPoint& p);
/// max of both orientations at p.
double general_residual(const GeneralBundle& bundle, const GeneralPoint& p);

enum class BundleForm { Binary, General };

/// The Dirichlet solution of the two-by-two equation: marginal Beta
/// densities divided by t(1-t), conditional Beta densities unchanged.
BinaryBundle dirichlet_binary_bundle(const TableDirichletParams& params);

/// The Dirichlet solution of the k x n equation: marginal Dirichlet
/// densities divided by prod y_j^(k-1) (resp. prod x_i^(n-1)).
GeneralBundle dirichlet_general_bundle(const TableDirichletParams& params);

/// Closed-form logarithmic derivatives of the binary bundle members.
struct BinaryLogDerivatives {
  std::function<double(double)> f0, g0, g1, g2;
};

BinaryLogDerivatives dirichlet_log_derivatives(const TableDirichletParams& params);

/// |h(y,z,w) g0'(x) - [z(1-z) g1'(z) + w(1-w) g2'(w) - y(1-y)(w-z) f0'(y)]|
/// with h = y(1-y)(w-z)^2 + yz(1-z) + (1-y)(1-w)w.
double verify_eq24(const BinaryLogDerivatives& derivs, const BinaryPoint& p);
double verify_eq24(const TableDirichletParams& params, const BinaryPoint& p);

/// (1-2w) g'(w) + w(1-w) g''(w) for g(w) = a ln w + b ln(1-w). Constant in w
/// and equal to -(a+b).
double ode28_lhs(double a, double b, double w);
/// |ode28_lhs(a, b, w) + (a + b)|
double verify_ode28(double a, double b, double w);

/// Test-point generators: uniform on the interior with `margin` clearance
/// from every boundary, by rejection.
BinaryPoint random_binary_point(Rng& rng, double margin = 0.01);
GeneralPoint random_general_point(std::size_t k, std::size_t n, Rng& rng, double margin = 0.01);
std::vector<double> random_simplex_free(std::size_t l, Rng& rng, double margin = 0.01);

}  // namespace dirichar
