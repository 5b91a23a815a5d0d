#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Core>

#include "dirichar/functional_eq.hpp"
#include "dirichar/random.hpp"
#include "dirichar/reparam.hpp"

namespace dirichar {

/// Positive modulating function of the cross-ratio theta11 theta22 / (theta12 theta21).
using CrossRatioFn = std::function<double(double)>;

/// Law on 2 x 2 tables with density
///   K prod (theta_ij)^(alpha_ij - 1) H(theta11 theta22 / (theta12 theta21)).
/// H must be bounded by the supplied H_sup; the bound is spot-checked at
/// 10^4 log-spaced arguments on construction.
class HyperMarkov2x2 {
 public:
  HyperMarkov2x2(Eigen::Matrix2d alphas, CrossRatioFn h, double h_sup);

  /// H(r) = exp(-lambda (ln r)^2), lambda >= 0, H_sup = 1.
  static HyperMarkov2x2 cross_ratio_gaussian(Eigen::Matrix2d alphas, double lambda);
  /// H(r) = c.
  static HyperMarkov2x2 constant(Eigen::Matrix2d alphas, double c = 1.0);

  const Eigen::Matrix2d& alphas() const noexcept { return alphas_; }
  double h(double r) const { return h_(r); }
  double h_sup() const noexcept { return h_sup_; }

  /// Log normalizer, computed once by quadrature and cached. Safe to call
  /// from several threads.
  double log_K() const;

  /// Log density without the normalizer.
  double unnormalized_log_density(const ProbTable& table) const;

 private:
  struct Cache;
  Eigen::Matrix2d alphas_;
  CrossRatioFn h_;
  double h_sup_;
  std::shared_ptr<Cache> cache_;
};

/// Arguments of the spot check on H.
inline constexpr std::size_t kEnvelopeCheckPoints = 10000;
inline constexpr double kEnvelopeCheckLogRange = 20.0;  // r in [e^-20, e^20]
/// Absolute error target for the normalizing integral.
inline constexpr double kNormalizeTolerance = 1e-6;

/// Returns log K. The integral over the cube of (y, z, w) coordinates is
/// evaluated as a closed-form Beta integral in y times an adaptive
/// double-exponential quadrature over (z, w).
double normalize(const HyperMarkov2x2& law);

double log_density(const HyperMarkov2x2& law, const ProbTable& table);

/// Exact rejection sampler: Dirichlet(alpha) proposal accepted with
/// probability H(r) / H_sup.
ProbTable sample(const HyperMarkov2x2& law, Rng& rng);

struct SampleBatch {
  std::vector<ProbTable> tables;
  std::size_t proposals = 0;
  double acceptance_rate() const {
    return proposals == 0 ? 0.0 : static_cast<double>(tables.size()) / static_cast<double>(proposals);
  }
};

/// Draws `count` tables. Throws EnvelopeError once 10^6 proposals have been
/// made with an acceptance rate below 1e-4.
SampleBatch sample_many(const HyperMarkov2x2& law, std::size_t count, Rng& rng);

inline constexpr std::size_t kEnvelopeProposalWindow = 1000000;
inline constexpr double kMinAcceptanceRate = 1e-4;

/// Table whose (marginal, first conditional, second conditional) along
/// `axis` are (p.y(), p.z(), p.w()). With Axis::Columns these are
/// (theta_.1, theta_{1|1}, theta_{1|2}).
ProbTable table_from_point(const BinaryPoint& p, Axis axis = Axis::Columns);
BinaryPoint point_from_table(const ProbTable& table, Axis axis = Axis::Columns);

/// Log density of the (marginal, conditional, conditional) coordinates:
/// log_density of the reassembled table plus ln[y(1-y)].
double transformed_log_density(const HyperMarkov2x2& law, const BinaryPoint& p,
                               Axis axis = Axis::Columns);

using Coords3 = std::array<double, 3>;
using LogDensity3 = std::function<double(const Coords3&)>;

/// Two disjoint blocks of coordinate indices (0, 1, 2). Coordinates in
/// neither block stay at their value in the first point.
struct CoordinateSplit {
  std::vector<int> a;
  std::vector<int> b;
};

/// |logf(a,b) + logf(a',b') - logf(a,b') - logf(a',b)| where (a, b) come
/// from p and (a', b') from q. Zero for every quadruple iff logf separates
/// additively across the split.
double rectangle_residual(const LogDensity3& logf, const CoordinateSplit& split, const Coords3& p,
                          const Coords3& q);

/// CDF of the marginal coordinate (theta_.1 for Axis::Columns, theta_1. for
/// Axis::Rows), tabulated by quadrature of the law's marginal density and
/// interpolated with cubic Hermite splines.
class MarginalCdf {
 public:
  MarginalCdf(const HyperMarkov2x2& law, Axis axis = Axis::Columns, std::size_t panels = 512);
  double operator()(double t) const;
  /// Marginal density at t.
  double density(double t) const;

 private:
  double log_scale_ = 0.0;
  double a_ = 1.0, b_ = 1.0;
  std::vector<double> nodes_, cdf_, pdf_;
};

}  // namespace dirichar
