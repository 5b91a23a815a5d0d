#include "dirichar/gaussian_net.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include "dirichar/dirichlet.hpp"
#include "dirichar/error.hpp"
#include "dirichar/indep.hpp"

namespace dirichar {

namespace {

double normal_log_density(double x, double mean, double var) {
  const double d = x - mean;
  return -0.5 * std::log(2.0 * std::numbers::pi * var) - d * d / (2.0 * var);
}

double inverse_gamma_log_density(double v, double shape, double scale) {
  return shape * std::log(scale) - log_gamma(shape) - (shape + 1.0) * std::log(v) - scale / v;
}

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    std::ostringstream msg;
    msg << name << " = " << v << " must be positive and finite";
    throw DomainError(msg.str());
  }
}

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) {
    std::ostringstream msg;
    msg << name << " = " << v << " must be finite";
    throw DomainError(msg.str());
  }
}

void require_spd(const Eigen::Matrix2d& m, const char* name) {
  if (!m.allFinite()) throw DomainError(std::string(name) + " has non-finite entries");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if (std::abs(m(0, 1) - m(1, 0)) > 1e-12 * scale) {
    throw DomainError(std::string(name) + " is not symmetric");
  }
  if (!(m(0, 0) > 0.0) || !(m.determinant() > 0.0)) {
    throw DomainError(std::string(name) + " is not positive definite");
  }
}

}  // namespace

void GaussDirectedParams::validate() const {
  require_finite(m, "m");
  require_positive(v, "v");
  require_finite(m_cond, "m_cond");
  require_finite(b, "b");
  require_positive(v_cond, "v_cond");
}

GaussDirectedParams GaussDirectedParams::from_array(Direction d, const std::array<double, 5>& a) {
  GaussDirectedParams p{d, a[0], a[1], a[2], a[3], a[4]};
  p.validate();
  return p;
}

BivariateGaussian::BivariateGaussian(Eigen::Vector2d mean, Eigen::Matrix2d cov)
    : mean_(std::move(mean)), cov_(std::move(cov)) {
  if (!mean_.allFinite()) throw DomainError("mean has non-finite entries");
  require_spd(cov_, "covariance");
}

void NormalWishart::validate() const {
  if (!mu0.allFinite()) throw DomainError("mu0 has non-finite entries");
  require_positive(kappa, "kappa");
  if (!(nu > 1.0) || !std::isfinite(nu)) throw DomainError("nu must exceed 1");
  require_spd(T, "T");
}

namespace {

// The map is its own inverse up to relabelling of the two variables.
GaussDirectedParams swap_direction(const GaussDirectedParams& p, Direction out) {
  p.validate();
  GaussDirectedParams r;
  r.direction = out;
  r.v = p.v_cond + p.v * p.b * p.b;
  r.b = p.b * p.v / r.v;
  r.v_cond = p.v_cond * p.v / r.v;
  r.m = p.m_cond + p.b * p.m;
  r.m_cond = p.m - r.b * r.m;
  return r;
}

}  // namespace

GaussDirectedParams forward_to_reverse(const GaussDirectedParams& p) {
  if (p.direction != Direction::Forward) throw DomainError("expected FORWARD parameters");
  return swap_direction(p, Direction::Reverse);
}

GaussDirectedParams reverse_to_forward(const GaussDirectedParams& p) {
  if (p.direction != Direction::Reverse) throw DomainError("expected REVERSE parameters");
  return swap_direction(p, Direction::Forward);
}

GaussDirectedParams flip(const GaussDirectedParams& p) {
  return swap_direction(p, p.direction == Direction::Forward ? Direction::Reverse : Direction::Forward);
}

BivariateGaussian to_joint(const GaussDirectedParams& p) {
  p.validate();
  const double root_mean = p.m;
  const double child_mean = p.m_cond + p.b * p.m;
  const double cross = p.b * p.v;
  const double child_var = p.v_cond + p.b * p.b * p.v;
  Eigen::Vector2d mean;
  Eigen::Matrix2d cov;
  if (p.direction == Direction::Forward) {
    mean << root_mean, child_mean;
    cov << p.v, cross, cross, child_var;
  } else {
    mean << child_mean, root_mean;
    cov << child_var, cross, cross, p.v;
  }
  return BivariateGaussian(mean, cov);
}

GaussDirectedParams from_joint(const BivariateGaussian& g, Direction direction) {
  const int r = direction == Direction::Forward ? 0 : 1;
  const int c = 1 - r;
  const Eigen::Matrix2d& s = g.cov();
  GaussDirectedParams p;
  p.direction = direction;
  p.m = g.mean()(r);
  p.v = s(r, r);
  p.b = s(r, c) / s(r, r);
  p.v_cond = s(c, c) - s(r, c) * s(r, c) / s(r, r);
  p.m_cond = g.mean()(c) - p.b * p.m;
  p.validate();
  return p;
}

double log_jacobian_factor(const GaussDirectedParams& p) {
  const GaussDirectedParams r = forward_to_reverse(p);
  return std::log(p.v) - std::log(r.v);
}

double reverse_log_jacobian_factor(const GaussDirectedParams& p) {
  const GaussDirectedParams r = forward_to_reverse(p);
  return 2.0 * std::log(p.v) + 3.0 * std::log(p.v_cond) - 2.0 * std::log(r.v) -
         3.0 * std::log(r.v_cond);
}

Eigen::Matrix<double, 5, 5> numerical_jacobian(const GaussDirectedParams& p, double rel_step) {
  p.validate();
  const std::array<double, 5> x = p.as_array();
  Eigen::Matrix<double, 5, 5> jac;
  for (int j = 0; j < 5; ++j) {
    const double h = x[static_cast<std::size_t>(j)] != 0.0 ? rel_step * std::abs(x[static_cast<std::size_t>(j)])
                                                          : rel_step;
    std::array<double, 5> hi = x, lo = x;
    hi[static_cast<std::size_t>(j)] += h;
    lo[static_cast<std::size_t>(j)] -= h;
    const auto fh = flip(GaussDirectedParams::from_array(p.direction, hi)).as_array();
    const auto fl = flip(GaussDirectedParams::from_array(p.direction, lo)).as_array();
    const double width = hi[static_cast<std::size_t>(j)] - lo[static_cast<std::size_t>(j)];
    for (int i = 0; i < 5; ++i) {
      jac(i, j) = (fh[static_cast<std::size_t>(i)] - fl[static_cast<std::size_t>(i)]) / width;
    }
  }
  return jac;
}

double numerical_log_abs_det(const GaussDirectedParams& p, double rel_step) {
  return std::log(std::abs(numerical_jacobian(p, rel_step).determinant()));
}

double RootFactor::log_density(double m, double v) const {
  require_positive(v, "v");
  return normal_log_density(m, loc, v / kappa) + inverse_gamma_log_density(v, shape, scale);
}

double ConditionalFactor::log_density(double m_cond, double b, double v_cond) const {
  require_positive(v_cond, "v_cond");
  return normal_log_density(m_cond, mu_child - b * mu_parent, v_cond / kappa) +
         normal_log_density(b, b_loc, v_cond / b_precision) +
         inverse_gamma_log_density(v_cond, shape, scale);
}

NwFactors nw_factor_densities(const NormalWishart& nw) {
  nw.validate();
  const Eigen::Matrix2d& T = nw.T;
  NwFactors f;
  f.f1 = RootFactor{nw.mu0(0), nw.kappa, (nw.nu - 1.0) / 2.0, T(0, 0) / 2.0};
  f.f2 = RootFactor{nw.mu0(1), nw.kappa, (nw.nu - 1.0) / 2.0, T(1, 1) / 2.0};
  f.f2_given_1 = ConditionalFactor{nw.mu0(1), nw.mu0(0), nw.kappa, T(0, 1) / T(0, 0), T(0, 0),
                                   nw.nu / 2.0, (T(1, 1) - T(0, 1) * T(0, 1) / T(0, 0)) / 2.0};
  f.f1_given_2 = ConditionalFactor{nw.mu0(0), nw.mu0(1), nw.kappa, T(0, 1) / T(1, 1), T(1, 1),
                                   nw.nu / 2.0, (T(0, 0) - T(0, 1) * T(0, 1) / T(1, 1)) / 2.0};
  return f;
}

double eq8_residual(const NwFactors& f, const GaussDirectedParams& p) {
  const GaussDirectedParams r = forward_to_reverse(p);
  const double forward = f.f1.log_density(p.m, p.v) + f.f2_given_1.log_density(p.m_cond, p.b, p.v_cond);
  const double reverse = f.f2.log_density(r.m, r.v) + f.f1_given_2.log_density(r.m_cond, r.b, r.v_cond);
  return std::abs(forward - log_jacobian_factor(p) - reverse);
}

NwDraw sample_normal_wishart(const NormalWishart& nw, Rng& rng) {
  nw.validate();
  // W ~ Wishart with nu degrees of freedom and scale T^-1.
  const Eigen::Matrix2d L = nw.T.inverse().llt().matrixL();
  Eigen::Matrix2d A = Eigen::Matrix2d::Zero();
  A(0, 0) = std::sqrt(2.0 * rng.gamma(nw.nu / 2.0));
  A(1, 1) = std::sqrt(2.0 * rng.gamma((nw.nu - 1.0) / 2.0));
  A(1, 0) = rng.normal();
  const Eigen::Matrix2d LA = L * A;
  NwDraw d;
  d.W = LA * LA.transpose();
  d.W(1, 0) = d.W(0, 1);
  const Eigen::Matrix2d sigma = (d.W.inverse() / nw.kappa).eval();
  const Eigen::Matrix2d C = sigma.llt().matrixL();
  Eigen::Vector2d z;
  z(0) = rng.normal();
  z(1) = rng.normal();
  d.mu = nw.mu0 + C * z;
  return d;
}

GaussDirectedParams forward_params(const NwDraw& draw) {
  Eigen::Matrix2d sigma = draw.W.inverse();
  sigma(1, 0) = sigma(0, 1);
  return from_joint(BivariateGaussian(draw.mu, sigma), Direction::Forward);
}

double standardized_coefficient(const NormalWishart& nw, const GaussDirectedParams& forward) {
  if (forward.direction != Direction::Forward) throw DomainError("expected FORWARD parameters");
  return (forward.b - nw.T(0, 1) / nw.T(0, 0)) / std::sqrt(forward.v_cond);
}

CoefficientIndependence standardized_coefficient_independence(const NormalWishart& nw,
                                                              std::size_t n_samples, Rng& rng,
                                                              std::size_t n_perm) {
  nw.validate();
  std::vector<double> standardized(n_samples), raw(n_samples), vcond(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) {
    const GaussDirectedParams p = forward_params(sample_normal_wishart(nw, rng));
    standardized[i] = standardized_coefficient(nw, p);
    raw[i] = p.b;
    vcond[i] = p.v_cond;
  }
  const SampleBlock s = SampleBlock::from_values(standardized, "standardized b12");
  const SampleBlock b = SampleBlock::from_values(raw, "b12");
  const SampleBlock v = SampleBlock::from_values(vcond, "v2|1");
  PermutationOptions opts;
  opts.n_perm = n_perm;
  const std::uint64_t seed_s = rng.next_u64();
  const std::uint64_t seed_b = rng.next_u64();
  const PermutationTest ts = permutation_test(s, v, opts, seed_s);
  const PermutationTest tb = permutation_test(b, v, opts, seed_b);
  CoefficientIndependence out;
  out.samples = n_samples;
  out.dcor_standardized = ts.statistic;
  out.p_standardized = ts.p_value;
  out.dcor_raw = tb.statistic;
  out.p_raw = tb.p_value;
  return out;
}

}  // namespace dirichar
