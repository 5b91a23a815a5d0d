#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

#include <Eigen/Core>

#include "dirichar/random.hpp"

namespace dirichar {

/// FORWARD parameterizes x1 -> x2, REVERSE parameterizes x2 -> x1.
enum class Direction { Forward, Reverse };

/// Root (m, v) and regression (m_cond, b, v_cond) parameters of a
/// two-node Gaussian network. For FORWARD: x1 ~ N(m, v) and
/// x2 | x1 ~ N(m_cond + b x1, v_cond). REVERSE swaps the roles of x1, x2.
struct GaussDirectedParams {
  Direction direction = Direction::Forward;
  double m = 0.0;
  double v = 1.0;
  double m_cond = 0.0;
  double b = 0.0;
  double v_cond = 1.0;

  /// Throws DomainError unless v > 0 and v_cond > 0 (and all are finite).
  void validate() const;
  std::array<double, 5> as_array() const { return {m, v, m_cond, b, v_cond}; }
  static GaussDirectedParams from_array(Direction d, const std::array<double, 5>& a);
};

class BivariateGaussian {
 public:
  BivariateGaussian(Eigen::Vector2d mean, Eigen::Matrix2d cov);
  const Eigen::Vector2d& mean() const noexcept { return mean_; }
  const Eigen::Matrix2d& cov() const noexcept { return cov_; }

 private:
  Eigen::Vector2d mean_;
  Eigen::Matrix2d cov_;
};

/// Normal-Wishart prior on (mu, W), W the precision matrix:
///   p(W) proportional to |W|^((nu - 3) / 2) exp(-tr(T W) / 2),
///   mu | W ~ N(mu0, (kappa W)^-1).
/// Equivalently Sigma = W^-1 is inverse-Wishart with scale T and nu
/// degrees of freedom. Requires kappa > 0, nu > 1 and T symmetric positive
/// definite.
struct NormalWishart {
  Eigen::Vector2d mu0 = Eigen::Vector2d::Zero();
  double kappa = 1.0;
  double nu = 3.0;
  Eigen::Matrix2d T = Eigen::Matrix2d::Identity();

  void validate() const;
};

GaussDirectedParams forward_to_reverse(const GaussDirectedParams& p);
GaussDirectedParams reverse_to_forward(const GaussDirectedParams& p);
/// Applies whichever of the two maps matches p.direction.
GaussDirectedParams flip(const GaussDirectedParams& p);

BivariateGaussian to_joint(const GaussDirectedParams& p);
GaussDirectedParams from_joint(const BivariateGaussian& g, Direction direction);

/// ln |det| of the Jacobian of (m1, v1, m2|1, b12, v2|1) -> (m2, v2, m1|2,
/// b21, v1|2) at a FORWARD point. Equals ln(v1 / v2), which can also be
/// written 2 ln v2 + 3 ln v1|2 - 2 ln v1 - 3 ln v2|1.
double log_jacobian_factor(const GaussDirectedParams& p);

/// ln[v1^2 v2|1^3 / (v2^2 v1|2^3)] = ln(v2 / v1): the determinant of the
/// inverse map (REVERSE to FORWARD) evaluated at the image of p.
double reverse_log_jacobian_factor(const GaussDirectedParams& p);

/// 5 x 5 Jacobian of flip at p by central differences with relative step
/// `rel_step` per coordinate (absolute step rel_step for zero coordinates).
Eigen::Matrix<double, 5, 5> numerical_jacobian(const GaussDirectedParams& p, double rel_step = 1e-6);
double numerical_log_abs_det(const GaussDirectedParams& p, double rel_step = 1e-6);

/// N(m | loc, v / kappa) x InvGamma(v | shape, scale).
struct RootFactor {
  double loc = 0.0;
  double kappa = 1.0;
  double shape = 1.0;
  double scale = 1.0;
  double log_density(double m, double v) const;
};

/// N(m_cond | mu_child - b mu_parent, v_cond / kappa)
///   x N(b | b_loc, v_cond / b_precision)
///   x InvGamma(v_cond | shape, scale).
struct ConditionalFactor {
  double mu_child = 0.0;
  double mu_parent = 0.0;
  double kappa = 1.0;
  double b_loc = 0.0;
  double b_precision = 1.0;
  double shape = 1.0;
  double scale = 1.0;
  double log_density(double m_cond, double b, double v_cond) const;
};

/// Factor densities of both directions induced by a normal-Wishart prior.
/// Fields are public so callers can perturb them.
struct NwFactors {
  RootFactor f1;
  ConditionalFactor f2_given_1;
  RootFactor f2;
  ConditionalFactor f1_given_2;
};

NwFactors nw_factor_densities(const NormalWishart& nw);

/// |ln f1 + ln f2|1 - log_jacobian_factor - ln f2 - ln f1|2| at a FORWARD
/// point, the reverse coordinates being forward_to_reverse(p).
double eq8_residual(const NwFactors& factors, const GaussDirectedParams& p);

struct NwDraw {
  Eigen::Vector2d mu;
  Eigen::Matrix2d W;  // precision
};

/// Bartlett-decomposition draw of (mu, W).
NwDraw sample_normal_wishart(const NormalWishart& nw, Rng& rng);
/// FORWARD parameters of the joint normal N(mu, W^-1).
GaussDirectedParams forward_params(const NwDraw& draw);

/// (b12 - E[b12 | v2|1]) / sqrt(v2|1) = (b12 - T12 / T11) / sqrt(v2|1).
/// Under the prior this is N(0, 1 / T11) whatever v2|1 is.
double standardized_coefficient(const NormalWishart& nw, const GaussDirectedParams& forward);

struct CoefficientIndependence {
  std::size_t samples = 0;
  double dcor_standardized = 0.0;
  double p_standardized = 1.0;
  double dcor_raw = 0.0;
  double p_raw = 1.0;
};

/// Draws n_samples forward parameter sets from the prior and runs the
/// distance-correlation permutation test on (standardized coefficient,
/// v2|1) and on (b12, v2|1).
CoefficientIndependence standardized_coefficient_independence(const NormalWishart& nw,
                                                              std::size_t n_samples, Rng& rng,
                                                              std::size_t n_perm = 999);

}  // namespace dirichar
