#include "dirichar/hyper_markov.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "dirichar/error.hpp"

namespace dirichar {

struct HyperMarkov2x2::Cache {
  std::once_flag once;
  double log_K = 0.0;
};

namespace {

using boost::math::quadrature::tanh_sinh;

// Exponents of the (marginal, first conditional, second conditional)
// coordinates along an axis.
struct AxisExponents {
  double ay, by;  // marginal Beta
  double az, bz;  // first conditional
  double aw, bw;  // second conditional
};

AxisExponents axis_exponents(const Eigen::Matrix2d& a, Axis axis) {
  if (axis == Axis::Columns) {
    return {a(0, 0) + a(1, 0), a(0, 1) + a(1, 1), a(0, 0), a(1, 0), a(0, 1), a(1, 1)};
  }
  return {a(0, 0) + a(0, 1), a(1, 0) + a(1, 1), a(0, 0), a(0, 1), a(1, 0), a(1, 1)};
}

// Integral over (0, 1) of g(t, 1 - t). The upper half is integrated in the
// variable u = 1 - t so that both t and 1 - t stay accurate near the ends.
template <class G>
double integrate_unit(tanh_sinh<double>& q, G g, double tol, double* err_out) {
  double e1 = 0.0, e2 = 0.0;
  const double lo = q.integrate([&](double t) { return g(t, 1.0 - t); }, 0.0, 0.5, tol, &e1);
  const double hi = q.integrate([&](double u) { return g(1.0 - u, u); }, 0.0, 0.5, tol, &e2);
  if (err_out != nullptr) *err_out = e1 + e2;
  return lo + hi;
}

// Integral of z^(az-1) (1-z)^(bz-1) w^(aw-1) (1-w)^(bw-1) H(z(1-w)/(w(1-z))) over the unit square.
double conditional_integral(const HyperMarkov2x2& law, const AxisExponents& e) {
  tanh_sinh<double> q;
  // Inner integral over w at fixed z, with its error estimate. The z factor
  // is applied outside, so the inner value is bounded by B(aw, bw) H_sup.
  auto inner = [&](double z, double zc, double* err) {
    auto g = [&](double w, double wc) {
      const double r = (z * wc) / (w * zc);
      const double hv = law.h(r);
      if (!(hv > 0.0) || !std::isfinite(hv)) return 0.0;
      return std::exp((e.aw - 1.0) * std::log(w) + (e.bw - 1.0) * std::log(wc) + std::log(hv));
    };
    return integrate_unit(q, g, 1e-10, err);
  };
  auto z_factor = [&](double z, double zc) {
    return std::exp((e.az - 1.0) * std::log(z) + (e.bz - 1.0) * std::log(zc));
  };
  // Inner integrals must reach kInnerRelTolerance unless their weighted
  // value is negligible; their combined error is then at most that
  // fraction of the total.
  constexpr double kInnerRelTolerance = 1e-8;
  std::size_t unconverged = 0;
  double outer_err = 0.0;
  const double total = integrate_unit(
      q,
      [&](double z, double zc) {
        double ierr = 0.0;
        const double v = inner(z, zc, &ierr);
        const double f = z_factor(z, zc);
        if (ierr > kInnerRelTolerance * v && f * ierr > 1e-14) ++unconverged;
        return f * v;
      },
      1e-9, &outer_err);
  if (!std::isfinite(total) || !(total > 0.0)) {
    throw IntegrationError("normalizing integral is not a positive finite number");
  }
  if (unconverged > 0) {
    std::ostringstream msg;
    msg << unconverged << " inner integrals did not converge";
    throw IntegrationError(msg.str());
  }
  const double inner_err = kInnerRelTolerance * total;
  const double err = outer_err + inner_err;
  if (!(err <= kNormalizeTolerance)) {
    std::ostringstream msg;
    msg << "normalizing integral did not converge (error estimate " << err << ")";
    throw IntegrationError(msg.str());
  }
  return total;
}

double log_beta2(double a, double b) { return log_gamma(a) + log_gamma(b) - log_gamma(a + b); }

double cross_ratio(const ProbTable& t) { return t(0, 0) * t(1, 1) / (t(0, 1) * t(1, 0)); }

void require_2x2(const ProbTable& t) {
  if (t.rows() != 2 || t.cols() != 2) throw DimensionError("expected a 2 x 2 table");
}

}  // namespace

HyperMarkov2x2::HyperMarkov2x2(Eigen::Matrix2d alphas, CrossRatioFn h, double h_sup)
    : alphas_(std::move(alphas)), h_(std::move(h)), h_sup_(h_sup), cache_(std::make_shared<Cache>()) {
  for (Eigen::Index i = 0; i < 4; ++i) {
    const double a = alphas_.data()[i];
    if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("exponents must be positive and finite");
  }
  if (!h_) throw DomainError("modulating function is empty");
  if (!(h_sup_ > 0.0) || !std::isfinite(h_sup_)) {
    throw EnvelopeError("H_sup must be positive and finite");
  }
  const double step = 2.0 * kEnvelopeCheckLogRange / static_cast<double>(kEnvelopeCheckPoints - 1);
  for (std::size_t i = 0; i < kEnvelopeCheckPoints; ++i) {
    const double r = std::exp(-kEnvelopeCheckLogRange + step * static_cast<double>(i));
    const double v = h_(r);
    if (!(v > 0.0) || !std::isfinite(v)) {
      std::ostringstream msg;
      msg << "H(" << r << ") = " << v << " is not positive";
      throw DomainError(msg.str());
    }
    if (v > h_sup_ * (1.0 + 1e-12)) {
      std::ostringstream msg;
      msg << "H(" << r << ") = " << v << " exceeds the supplied bound " << h_sup_;
      throw EnvelopeError(msg.str());
    }
  }
}

HyperMarkov2x2 HyperMarkov2x2::cross_ratio_gaussian(Eigen::Matrix2d alphas, double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw DomainError("lambda must be >= 0");
  return HyperMarkov2x2(
      std::move(alphas),
      [lambda](double r) {
        const double l = std::log(r);
        return std::exp(-lambda * l * l);
      },
      1.0);
}

HyperMarkov2x2 HyperMarkov2x2::constant(Eigen::Matrix2d alphas, double c) {
  if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("constant must be positive");
  return HyperMarkov2x2(std::move(alphas), [c](double) { return c; }, c);
}

double HyperMarkov2x2::log_K() const {
  std::call_once(cache_->once, [this] {
    const AxisExponents e = axis_exponents(alphas_, Axis::Columns);
    cache_->log_K = -(log_beta2(e.ay, e.by) + std::log(conditional_integral(*this, e)));
  });
  return cache_->log_K;
}

double HyperMarkov2x2::unnormalized_log_density(const ProbTable& table) const {
  require_2x2(table);
  const double r = cross_ratio(table);
  const double hv = h_(r);
  if (!(hv > 0.0) || !std::isfinite(hv)) {
    std::ostringstream msg;
    msg << "H is not positive at cross-ratio " << r;
    throw DomainError(msg.str());
  }
  double s = std::log(hv);
  for (Eigen::Index i = 0; i < 2; ++i) {
    for (Eigen::Index j = 0; j < 2; ++j) s += (alphas_(i, j) - 1.0) * std::log(table(i, j));
  }
  return s;
}

double normalize(const HyperMarkov2x2& law) { return law.log_K(); }

double log_density(const HyperMarkov2x2& law, const ProbTable& table) {
  return law.log_K() + law.unnormalized_log_density(table);
}

namespace {

struct Proposer {
  const HyperMarkov2x2& law;
  DirichletParams proposal;
  explicit Proposer(const HyperMarkov2x2& l)
      : law(l),
        proposal({l.alphas()(0, 0), l.alphas()(0, 1), l.alphas()(1, 0), l.alphas()(1, 1)}) {}

  // One proposal; returns true and fills `out` on acceptance.
  bool propose(Rng& rng, Eigen::Matrix2d& out) const {
    const SimplexPoint p = sample(proposal, rng);
    out << p[0], p[1], p[2], p[3];
    const double r = out(0, 0) * out(1, 1) / (out(0, 1) * out(1, 0));
    return rng.uniform() * law.h_sup() < law.h(r);
  }
};

void check_rate(std::size_t accepted, std::size_t proposals) {
  if (proposals >= kEnvelopeProposalWindow &&
      static_cast<double>(accepted) < kMinAcceptanceRate * static_cast<double>(proposals)) {
    std::ostringstream msg;
    msg << "acceptance rate " << static_cast<double>(accepted) / static_cast<double>(proposals)
        << " over " << proposals << " proposals; envelope too loose";
    throw EnvelopeError(msg.str());
  }
}

}  // namespace

ProbTable sample(const HyperMarkov2x2& law, Rng& rng) {
  const Proposer prop(law);
  Eigen::Matrix2d m;
  for (std::size_t n = 1;; ++n) {
    if (prop.propose(rng, m)) return ProbTable(m);
    check_rate(0, n);
  }
}

SampleBatch sample_many(const HyperMarkov2x2& law, std::size_t count, Rng& rng) {
  const Proposer prop(law);
  SampleBatch batch;
  batch.tables.reserve(count);
  Eigen::Matrix2d m;
  while (batch.tables.size() < count) {
    ++batch.proposals;
    if (prop.propose(rng, m)) batch.tables.emplace_back(m);
    check_rate(batch.tables.size(), batch.proposals);
  }
  return batch;
}

ProbTable table_from_point(const BinaryPoint& p, Axis axis) {
  const double y = p.y(), z = p.z(), w = p.w();
  Eigen::Matrix2d m;
  if (axis == Axis::Columns) {
    m << y * z, (1.0 - y) * w, y * (1.0 - z), (1.0 - y) * (1.0 - w);
  } else {
    m << y * z, y * (1.0 - z), (1.0 - y) * w, (1.0 - y) * (1.0 - w);
  }
  return ProbTable(m);
}

BinaryPoint point_from_table(const ProbTable& t, Axis axis) {
  require_2x2(t);
  if (axis == Axis::Columns) {
    const double y = t(0, 0) + t(1, 0);
    return BinaryPoint(y, t(0, 0) / y, t(0, 1) / (t(0, 1) + t(1, 1)));
  }
  const double x = t(0, 0) + t(0, 1);
  return BinaryPoint(x, t(0, 0) / x, t(1, 0) / (t(1, 0) + t(1, 1)));
}

double transformed_log_density(const HyperMarkov2x2& law, const BinaryPoint& p, Axis axis) {
  return log_density(law, table_from_point(p, axis)) + std::log(p.y()) + std::log1p(-p.y());
}

double rectangle_residual(const LogDensity3& logf, const CoordinateSplit& split, const Coords3& p,
                          const Coords3& q) {
  std::array<int, 3> owner{0, 0, 0};
  for (int i : split.a) {
    if (i < 0 || i > 2 || owner[static_cast<std::size_t>(i)] != 0) {
      throw DomainError("split blocks must be disjoint coordinate indices in 0..2");
    }
    owner[static_cast<std::size_t>(i)] = 1;
  }
  for (int i : split.b) {
    if (i < 0 || i > 2 || owner[static_cast<std::size_t>(i)] != 0) {
      throw DomainError("split blocks must be disjoint coordinate indices in 0..2");
    }
    owner[static_cast<std::size_t>(i)] = 2;
  }
  if (split.a.empty() || split.b.empty()) throw DomainError("split blocks must be non-empty");
  auto combine = [&](bool a_from_q, bool b_from_q) {
    Coords3 c = p;
    for (std::size_t i = 0; i < 3; ++i) {
      if ((owner[i] == 1 && a_from_q) || (owner[i] == 2 && b_from_q)) c[i] = q[i];
    }
    for (double v : c) {
      if (!(v > 0.0) || !(v < 1.0)) throw DomainError("recombined point is not interior");
    }
    return c;
  };
  const double v = logf(combine(false, false)) + logf(combine(true, true)) -
                   logf(combine(false, true)) - logf(combine(true, false));
  return std::abs(v);
}

MarginalCdf::MarginalCdf(const HyperMarkov2x2& law, Axis axis, std::size_t panels) {
  if (panels < 4) throw DomainError("need at least four panels");
  const AxisExponents e = axis_exponents(law.alphas(), axis);
  a_ = e.ay;
  b_ = e.by;
  log_scale_ = law.log_K() + std::log(conditional_integral(law, e));

  tanh_sinh<double> q;
  nodes_.resize(panels + 1);
  cdf_.assign(panels + 1, 0.0);
  pdf_.assign(panels + 1, 0.0);
  for (std::size_t i = 0; i <= panels; ++i) {
    nodes_[i] = static_cast<double>(i) / static_cast<double>(panels);
  }
  auto g = [this](double t, double tc) {
    return std::exp(log_scale_ + (a_ - 1.0) * std::log(t) + (b_ - 1.0) * std::log(tc));
  };
  for (std::size_t i = 0; i < panels; ++i) {
    const double t0 = nodes_[i], t1 = nodes_[i + 1];
    double piece;
    if (t1 <= 0.5) {
      piece = q.integrate([&](double t) { return g(t, 1.0 - t); }, t0, t1, 1e-12);
    } else {
      piece = q.integrate([&](double u) { return g(1.0 - u, u); }, 1.0 - t1, 1.0 - t0, 1e-12);
    }
    cdf_[i + 1] = cdf_[i] + piece;
  }
  for (std::size_t i = 1; i < panels; ++i) pdf_[i] = density(nodes_[i]);
}

double MarginalCdf::density(double t) const {
  if (!(t > 0.0) || !(t < 1.0)) return 0.0;
  return std::exp(log_scale_ + (a_ - 1.0) * std::log(t) + (b_ - 1.0) * std::log1p(-t));
}

double MarginalCdf::operator()(double t) const {
  if (!(t > 0.0)) return 0.0;
  if (!(t < 1.0)) return cdf_.back();
  const std::size_t panels = nodes_.size() - 1;
  std::size_t i = std::min(panels - 1, static_cast<std::size_t>(t * static_cast<double>(panels)));
  const double t0 = nodes_[i], t1 = nodes_[i + 1];
  if (i == 0 || i + 1 == panels) {
    // End panels may hold an integrable singularity; integrate directly.
    static thread_local tanh_sinh<double> q;
    auto g = [this](double s) { return density(s); };
    if (i == 0) return q.integrate(g, 0.0, t, 1e-12);
    return cdf_.back() - q.integrate([this](double u) {
      return std::exp(log_scale_ + (a_ - 1.0) * std::log1p(-u) + (b_ - 1.0) * std::log(u));
    }, 0.0, 1.0 - t, 1e-12);
  }
  const double h = t1 - t0;
  const double s = (t - t0) / h;
  const double s2 = s * s, s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * cdf_[i] + (s3 - 2 * s2 + s) * h * pdf_[i] +
         (-2 * s3 + 3 * s2) * cdf_[i + 1] + (s3 - s2) * h * pdf_[i + 1];
}

}  // namespace dirichar
