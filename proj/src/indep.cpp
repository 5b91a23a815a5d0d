#include "dirichar/indep.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <numeric>
#include <sstream>

#include "dcov_kernel.hpp"
#include "dirichar/error.hpp"

namespace dirichar {

SampleBlock::SampleBlock(Eigen::MatrixXd rows, std::string label)
    : rows_(std::move(rows)), label_(std::move(label)) {
  if (static_cast<std::size_t>(rows_.rows()) < kMinSampleRows) {
    std::ostringstream msg;
    msg << "block '" << label_ << "' has " << rows_.rows() << " rows, need at least " << kMinSampleRows;
    throw DomainError(msg.str());
  }
  if (rows_.cols() < 1) throw DimensionError("block '" + label_ + "' has no columns");
  if (!rows_.allFinite()) throw DomainError("block '" + label_ + "' has non-finite entries");
}

SampleBlock SampleBlock::from_simplex_points(const std::vector<SimplexPoint>& points,
                                             std::string label) {
  if (points.empty()) throw DomainError("no simplex points");
  const std::size_t l = points.front().size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(points.size()), static_cast<Eigen::Index>(l - 1));
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].size() != l) throw DimensionError("simplex points differ in size");
    for (std::size_t c = 0; c + 1 < l; ++c) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = points[i][c];
    }
  }
  return SampleBlock(std::move(m), std::move(label));
}

SampleBlock SampleBlock::from_values(const std::vector<double>& values, std::string label) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(values.size()), 1);
  for (std::size_t i = 0; i < values.size(); ++i) m(static_cast<Eigen::Index>(i), 0) = values[i];
  return SampleBlock(std::move(m), std::move(label));
}

SampleBlock concatenate(const std::vector<SampleBlock>& blocks, std::string label) {
  if (blocks.empty()) throw DomainError("nothing to concatenate");
  const auto n = static_cast<Eigen::Index>(blocks.front().size());
  Eigen::Index cols = 0;
  for (const auto& b : blocks) {
    if (static_cast<Eigen::Index>(b.size()) != n) throw DimensionError("blocks differ in sample count");
    cols += b.rows().cols();
  }
  Eigen::MatrixXd m(n, cols);
  Eigen::Index c = 0;
  for (const auto& b : blocks) {
    m.middleCols(c, b.rows().cols()) = b.rows();
    c += b.rows().cols();
  }
  return SampleBlock(std::move(m), std::move(label));
}

std::vector<std::uint32_t> random_permutation(std::size_t n, Rng& rng) {
  std::vector<std::uint32_t> p(n);
  std::iota(p.begin(), p.end(), 0u);
  for (std::size_t i = n; i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i));
    std::swap(p[i - 1], p[j]);
  }
  return p;
}

namespace {

void require_same_size(const SampleBlock& a, const SampleBlock& b) {
  if (a.size() != b.size()) {
    std::ostringstream msg;
    msg << "blocks '" << a.label() << "' and '" << b.label() << "' have " << a.size() << " and "
        << b.size() << " samples";
    throw DimensionError(msg.str());
  }
}

bool is_constant(const SampleBlock& b) {
  const Eigen::MatrixXd& m = b.rows();
  for (Eigen::Index i = 1; i < m.rows(); ++i) {
    if (m.row(i) != m.row(0)) return false;
  }
  return true;
}

void require_nondegenerate(const SampleBlock& b) {
  if (is_constant(b)) throw DegenerateError("block '" + b.label() + "' is constant");
}

// Mean distance from each row to all rows, and the grand mean.
struct RowMeans {
  std::vector<double> row;
  double grand = 0.0;
};

RowMeans row_means_univariate(const Eigen::VectorXd& x) {
  const std::size_t n = static_cast<std::size_t>(x.size());
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return x(i) < x(j); });
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += x(static_cast<Eigen::Index>(i));
  RowMeans out;
  out.row.assign(n, 0.0);
  double below = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const double v = x(static_cast<Eigen::Index>(order[t]));
    const double above = total - below - v;
    const double s = v * static_cast<double>(t) - below + above - v * static_cast<double>(n - 1 - t);
    out.row[order[t]] = s / static_cast<double>(n);
    below += v;
  }
  out.grand = std::accumulate(out.row.begin(), out.row.end(), 0.0) / static_cast<double>(n);
  return out;
}

RowMeans row_means_general(const Eigen::MatrixXd& x) {
  const std::size_t n = static_cast<std::size_t>(x.rows());
  const Eigen::MatrixXd xt = x.transpose();
  RowMeans out;
  out.row.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = (xt.col(static_cast<Eigen::Index>(i)) - xt.col(static_cast<Eigen::Index>(j))).norm();
      out.row[i] += d;
      out.row[j] += d;
    }
  }
  for (double& v : out.row) v /= static_cast<double>(n);
  out.grand = std::accumulate(out.row.begin(), out.row.end(), 0.0) / static_cast<double>(n);
  return out;
}

RowMeans row_means(const Eigen::MatrixXd& x) {
  return x.cols() == 1 ? row_means_univariate(x.col(0)) : row_means_general(x);
}

// Squared distance variance: (1/n^2) sum a_ij^2 + abar^2 - (2/n) sum abar_i^2.
double distance_variance(const Eigen::MatrixXd& x, const RowMeans& m) {
  const double n = static_cast<double>(x.rows());
  const Eigen::RowVectorXd centre = x.colwise().mean();
  const double ss = (x.rowwise() - centre).squaredNorm();
  double rowsq = 0.0;
  for (double v : m.row) rowsq += v * v;
  return 2.0 * n * ss / (n * n) + m.grand * m.grand - 2.0 * rowsq / n;
}

// Sum over i < j of |x_i - x_j| |y_{p(i)} - y_{p(j)}| in O(n log n).
class UnivariateCross {
 public:
  UnivariateCross(const Eigen::VectorXd& x, const Eigen::VectorXd& y)
      : n_(static_cast<std::size_t>(x.size())), order_(n_), xs_(n_), yc_(n_), rank_(n_), tree_(n_ + 1) {
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::stable_sort(order_.begin(), order_.end(),
                     [&](std::size_t i, std::size_t j) { return x(i) < x(j); });
    const double xm = x.mean(), ym = y.mean();
    for (std::size_t t = 0; t < n_; ++t) xs_[t] = x(static_cast<Eigen::Index>(order_[t])) - xm;
    for (std::size_t i = 0; i < n_; ++i) yc_[i] = y(static_cast<Eigen::Index>(i)) - ym;
    std::vector<std::size_t> by_y(n_);
    std::iota(by_y.begin(), by_y.end(), std::size_t{0});
    std::stable_sort(by_y.begin(), by_y.end(), [&](std::size_t i, std::size_t j) { return y(i) < y(j); });
    for (std::size_t r = 0; r < n_; ++r) rank_[by_y[r]] = r + 1;
  }

  double sum(const std::uint32_t* perm) {
    std::fill(tree_.begin(), tree_.end(), Node{});
    Node total{};
    double s = 0.0;
    for (std::size_t t = 0; t < n_; ++t) {
      const std::size_t i = order_[t];
      const std::size_t k = perm != nullptr ? perm[i] : i;
      const double xv = xs_[t];
      const double yv = yc_[k];
      const std::size_t r = rank_[k];
      const Node lo = query(r);
      const Node hi{total[0] - lo[0], total[1] - lo[1], total[2] - lo[2], total[3] - lo[3]};
      // Earlier points have x_k <= xv. Below in y: (xv - x_k)(yv - y_k);
      // above: (xv - x_k)(y_k - yv).
      const double below = lo[0] * xv * yv - xv * lo[1] - yv * lo[2] + lo[3];
      const double above = hi[0] * xv * yv - xv * hi[1] - yv * hi[2] + hi[3];
      s += below - above;
      const Node add{1.0, yv, xv, xv * yv};
      for (std::size_t q = r; q <= n_; q += q & (~q + 1)) {
        for (int c = 0; c < 4; ++c) tree_[q][c] += add[c];
      }
      for (int c = 0; c < 4; ++c) total[c] += add[c];
    }
    return s;
  }

 private:
  using Node = std::array<double, 4>;  // count, sum y, sum x, sum xy
  Node query(std::size_t r) const {
    Node out{};
    for (std::size_t q = r; q > 0; q -= q & (~q + 1)) {
      for (int c = 0; c < 4; ++c) out[c] += tree_[q][c];
    }
    return out;
  }

  std::size_t n_;
  std::vector<std::size_t> order_;
  std::vector<double> xs_, yc_;
  std::vector<std::size_t> rank_;
  std::vector<Node> tree_;
};

// Squared distance covariance of (fixed, permuted) for batches of
// permutations of the second block.
class CovarianceEngine {
 public:
  CovarianceEngine(const SampleBlock& fixed, const SampleBlock& permuted)
      : n_(fixed.size()), fm_(row_means(fixed.rows())), pm_(row_means(permuted.rows())) {}
  virtual ~CovarianceEngine() = default;

  virtual std::size_t batch() const = 0;
  /// perms[p] == nullptr denotes the identity.
  virtual void cross(const std::vector<const std::uint32_t*>& perms, double* sums) = 0;

  void evaluate(const std::vector<const std::uint32_t*>& perms, double* out) {
    std::array<double, detail::kLanes> sums{};
    cross(perms, sums.data());
    const double nn = static_cast<double>(n_);
    for (std::size_t p = 0; p < perms.size(); ++p) {
      double s3 = 0.0;
      for (std::size_t i = 0; i < n_; ++i) {
        const std::size_t k = perms[p] != nullptr ? perms[p][i] : i;
        s3 += fm_.row[i] * pm_.row[k];
      }
      out[p] = 2.0 * sums[p] / (nn * nn) + fm_.grand * pm_.grand - 2.0 * s3 / nn;
    }
  }

 protected:
  std::size_t n_;
  RowMeans fm_, pm_;
};

class UnivariateEngine final : public CovarianceEngine {
 public:
  UnivariateEngine(const SampleBlock& a, const SampleBlock& b)
      : CovarianceEngine(a, b), cross_(a.rows().col(0), b.rows().col(0)) {}
  std::size_t batch() const override { return 1; }
  void cross(const std::vector<const std::uint32_t*>& perms, double* sums) override {
    for (std::size_t p = 0; p < perms.size(); ++p) sums[p] = cross_.sum(perms[p]);
  }

 private:
  UnivariateCross cross_;
};

constexpr std::size_t kMaxPackedBytes = std::size_t{1} << 30;

class GeneralEngine final : public CovarianceEngine {
 public:
  GeneralEngine(const SampleBlock& fixed, const SampleBlock& permuted)
      : CovarianceEngine(fixed, permuted), df_(permuted.dim()) {
    const std::size_t pairs = n_ * (n_ - 1) / 2;
    if (pairs * sizeof(float) > kMaxPackedBytes) {
      std::ostringstream msg;
      msg << n_ << " samples need " << pairs * sizeof(float) << " bytes of distance storage";
      throw CapacityError(msg.str());
    }
    {
      const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = fixed.rows();
      packed_ = detail::pack_distances(rm.data(), n_, static_cast<std::size_t>(rm.cols()));
    }
    values_.resize(n_ * df_);
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t c = 0; c < df_; ++c) {
        values_[i * df_ + c] = static_cast<float>(
            permuted.rows()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)));
      }
    }
    lanes_.resize(n_ * df_ * detail::kLanes);
  }

  std::size_t batch() const override { return detail::kLanes; }

  void cross(const std::vector<const std::uint32_t*>& perms, double* sums) override {
    constexpr std::size_t L = detail::kLanes;
    for (std::size_t p = 0; p < L; ++p) {
      // Unused lanes repeat the last permutation.
      const std::uint32_t* perm = perms[std::min(p, perms.size() - 1)];
      for (std::size_t i = 0; i < n_; ++i) {
        const std::size_t k = perm != nullptr ? perm[i] : i;
        for (std::size_t c = 0; c < df_; ++c) lanes_[(i * df_ + c) * L + p] = values_[k * df_ + c];
      }
    }
    double all[L];
    detail::cross_sums(packed_, lanes_.data(), df_, all);
    for (std::size_t p = 0; p < perms.size(); ++p) sums[p] = all[p];
  }

 private:
  std::size_t df_;
  detail::PackedDistances packed_;
  std::vector<float> values_;
  std::vector<float> lanes_;
};

std::unique_ptr<CovarianceEngine> make_engine(const SampleBlock& a, const SampleBlock& b) {
  if (a.dim() == 1 && b.dim() == 1) return std::make_unique<UnivariateEngine>(a, b);
  // Cache the wider block; permute and recompute the narrower one.
  if (a.dim() >= b.dim()) return std::make_unique<GeneralEngine>(a, b);
  return std::make_unique<GeneralEngine>(b, a);
}

}  // namespace

double distance_correlation(const SampleBlock& a, const SampleBlock& b) {
  require_same_size(a, b);
  require_nondegenerate(a);
  require_nondegenerate(b);
  const std::size_t n = a.size();
  const RowMeans am = row_means(a.rows());
  const RowMeans bm = row_means(b.rows());
  double cross = 0.0;
  if (a.dim() == 1 && b.dim() == 1) {
    UnivariateCross uc(a.rows().col(0), b.rows().col(0));
    cross = uc.sum(nullptr);
  } else {
    const Eigen::MatrixXd at = a.rows().transpose();
    const Eigen::MatrixXd bt = b.rows().transpose();
    for (std::size_t i = 0; i < n; ++i) {
      const auto ai = at.col(static_cast<Eigen::Index>(i));
      const auto bi = bt.col(static_cast<Eigen::Index>(i));
      double r = 0.0;
      for (std::size_t j = i + 1; j < n; ++j) {
        r += (ai - at.col(static_cast<Eigen::Index>(j))).norm() *
             (bi - bt.col(static_cast<Eigen::Index>(j))).norm();
      }
      cross += r;
    }
  }
  const double nn = static_cast<double>(n);
  double s3 = 0.0;
  for (std::size_t i = 0; i < n; ++i) s3 += am.row[i] * bm.row[i];
  const double dcov2 = 2.0 * cross / (nn * nn) + am.grand * bm.grand - 2.0 * s3 / nn;
  const double va = distance_variance(a.rows(), am);
  const double vb = distance_variance(b.rows(), bm);
  if (!(va > 0.0) || !(vb > 0.0)) throw DegenerateError("distance variance is zero");
  const double r2 = std::max(0.0, dcov2) / std::sqrt(va * vb);
  return std::min(1.0, std::sqrt(r2));
}

PermutationTest permutation_test(const SampleBlock& a, const SampleBlock& b,
                                 const PermutationOptions& options, std::uint64_t master_seed) {
  require_same_size(a, b);
  if (options.n_perm < kMinPermutations) {
    std::ostringstream msg;
    msg << "n_perm = " << options.n_perm << ", need at least " << kMinPermutations;
    throw DomainError(msg.str());
  }
  PermutationTest out;
  out.statistic = distance_correlation(a, b);

  auto engine = make_engine(a, b);
  const std::size_t n = a.size();
  const std::size_t total = options.n_perm + 1;  // position 0 is the identity
  const std::size_t chunk = engine->batch();
  std::vector<std::vector<std::uint32_t>> storage(chunk);
  std::vector<const std::uint32_t*> perms;
  std::vector<double> stats(chunk);
  double observed = 0.0;
  std::size_t exceed = 0;
  for (std::size_t start = 0; start < total; start += chunk) {
    const std::size_t count = std::min(chunk, total - start);
    perms.clear();
    for (std::size_t q = 0; q < count; ++q) {
      const std::size_t pos = start + q;
      if (pos == 0) {
        perms.push_back(nullptr);
      } else {
        Rng stream = Rng::derive(master_seed, pos - 1);
        storage[q] = random_permutation(n, stream);
        perms.push_back(storage[q].data());
      }
    }
    engine->evaluate(perms, stats.data());
    for (std::size_t q = 0; q < count; ++q) {
      const std::size_t pos = start + q;
      if (pos == 0) {
        observed = stats[q];
        continue;
      }
      if (stats[q] >= observed) ++exceed;
      if (options.stop_after_exceedances > 0 && exceed >= options.stop_after_exceedances) {
        out.permutations_run = pos;
        out.exceedances = exceed;
        out.p_value = static_cast<double>(exceed) / static_cast<double>(pos);
        return out;
      }
    }
  }
  out.permutations_run = options.n_perm;
  out.exceedances = exceed;
  out.p_value = static_cast<double>(exceed + 1) / static_cast<double>(options.n_perm + 1);
  return out;
}

double permutation_pvalue(const SampleBlock& a, const SampleBlock& b, std::size_t n_perm, Rng& rng) {
  PermutationOptions opts;
  opts.n_perm = n_perm;
  return permutation_test(a, b, opts, rng.next_u64()).p_value;
}

double IndependenceReport::min_p_value() const {
  double m = 1.0;
  for (const auto& c : pairwise) m = std::min(m, c.result.p_value);
  for (const auto& c : each_vs_rest) m = std::min(m, c.result.p_value);
  return m;
}

IndependenceReport mutual_independence_report(const std::vector<SampleBlock>& blocks,
                                              std::size_t n_perm, Rng& rng,
                                              const IndependenceReportOptions& options) {
  if (blocks.size() < 2) throw DomainError("need at least two blocks");
  for (const auto& b : blocks) require_same_size(blocks.front(), b);
  const std::size_t m = blocks.size();
  IndependenceReport rep;
  rep.alpha = options.alpha;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      rep.pairwise.push_back({blocks[i].label() + " vs " + blocks[j].label(), {i}, {j}, {}, false});
    }
  }
  if (m > 2) {
    for (std::size_t i = 0; i < m; ++i) {
      std::vector<std::size_t> rest;
      for (std::size_t j = 0; j < m; ++j) {
        if (j != i) rest.push_back(j);
      }
      rep.each_vs_rest.push_back({blocks[i].label() + " vs rest", {i}, rest, {}, false});
    }
  }
  const std::size_t tests = rep.pairwise.size() + rep.each_vs_rest.size();
  rep.threshold = options.alpha / static_cast<double>(tests);

  PermutationOptions popts;
  popts.n_perm = n_perm;
  popts.stop_after_exceedances = options.stop_after_exceedances;
  auto run = [&](IndependenceCheck& c) {
    const std::uint64_t seed = rng.next_u64();
    std::vector<SampleBlock> left, right;
    for (std::size_t i : c.left) left.push_back(blocks[i]);
    for (std::size_t j : c.right) right.push_back(blocks[j]);
    const SampleBlock lb = left.size() == 1 ? left.front() : concatenate(left, "left");
    const SampleBlock rb = right.size() == 1 ? right.front() : concatenate(right, "rest");
    c.result = permutation_test(lb, rb, popts, seed);
    c.rejected = c.result.p_value <= rep.threshold;
    if (c.rejected) rep.consistent = false;
  };
  for (auto& c : rep.pairwise) run(c);
  for (auto& c : rep.each_vs_rest) run(c);
  return rep;
}

}  // namespace dirichar
