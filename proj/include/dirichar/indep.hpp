#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "dirichar/dirichlet.hpp"
#include "dirichar/random.hpp"

namespace dirichar {

inline constexpr std::size_t kMinSampleRows = 100;
inline constexpr std::size_t kMinPermutations = 200;

/// n x d samples of one parameter block.
class SampleBlock {
 public:
  SampleBlock(Eigen::MatrixXd rows, std::string label);
  /// Embeds simplex points by dropping their last coordinate.
  static SampleBlock from_simplex_points(const std::vector<SimplexPoint>& points, std::string label);
  static SampleBlock from_values(const std::vector<double>& values, std::string label);

  const Eigen::MatrixXd& rows() const noexcept { return rows_; }
  const std::string& label() const noexcept { return label_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(rows_.rows()); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(rows_.cols()); }

 private:
  Eigen::MatrixXd rows_;
  std::string label_;
};

/// Column-wise concatenation of blocks with equal sample counts.
SampleBlock concatenate(const std::vector<SampleBlock>& blocks, std::string label);

/// Sample distance correlation (V-statistic form), in [0, 1].
/// Throws DegenerateError if either block is constant.
double distance_correlation(const SampleBlock& a, const SampleBlock& b);

struct PermutationOptions {
  std::size_t n_perm = 999;
  /// Stop once this many permuted statistics reach the observed one
  /// (sequential Monte Carlo p-value). 0 runs all n_perm permutations.
  std::size_t stop_after_exceedances = 0;
};

struct PermutationTest {
  double statistic = 0.0;  // observed distance correlation
  double p_value = 1.0;
  std::size_t permutations_run = 0;
  std::size_t exceedances = 0;
};

/// Permutation test of independence based on distance covariance. The
/// k-th permutation is drawn from Rng::derive(master_seed, k), so results do
/// not depend on how the work is scheduled. With every permutation run the
/// p-value is (G + 1) / (n_perm + 1), G being the number of permuted
/// statistics >= the observed one; after an early stop at h exceedances in
/// L permutations it is h / L.
PermutationTest permutation_test(const SampleBlock& a, const SampleBlock& b,
                                 const PermutationOptions& options, std::uint64_t master_seed);

/// p-value over all n_perm permutations (n_perm >= 200); the master seed is
/// the next draw of `rng`.
double permutation_pvalue(const SampleBlock& a, const SampleBlock& b, std::size_t n_perm, Rng& rng);

struct IndependenceCheck {
  std::string name;
  std::vector<std::size_t> left;   // block indices
  std::vector<std::size_t> right;
  PermutationTest result;
  bool rejected = false;
};

struct IndependenceReportOptions {
  double alpha = 0.01;
  /// Early stop used for every test in the report; 0 disables it.
  std::size_t stop_after_exceedances = 20;
};

struct IndependenceReport {
  std::vector<IndependenceCheck> pairwise;
  /// Each block against all the others; empty for two blocks, where it
  /// would repeat the single pairwise test.
  std::vector<IndependenceCheck> each_vs_rest;
  double alpha = 0.01;
  /// Bonferroni-corrected level alpha / (number of tests).
  double threshold = 0.01;
  bool consistent = true;  // no test rejects at `threshold`
  double min_p_value() const;
};

/// Pairwise and each-vs-rest permutation tests. Master seeds are drawn from
/// `rng` in the order the tests are listed.
IndependenceReport mutual_independence_report(const std::vector<SampleBlock>& blocks,
                                              std::size_t n_perm, Rng& rng,
                                              const IndependenceReportOptions& options = {});

/// Uniform random permutation of 0..n-1 (Fisher-Yates).
std::vector<std::uint32_t> random_permutation(std::size_t n, Rng& rng);

}  // namespace dirichar
