#include "dirichar/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "dirichar/error.hpp"
#include "dirichar/functional_eq.hpp"
#include "dirichar/gaussian_net.hpp"
#include "dirichar/hyper_markov.hpp"
#include "dirichar/reparam.hpp"

namespace dirichar {

bool SuiteReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"lemma1", "funceq", "hypermarkov", "gaussian", "appendix"};
  return names;
}

namespace {

class Builder {
 public:
  Builder(const std::string& suite, const RunConfig& cfg) : cfg_(cfg) {
    report_.suite = suite;
    report_.seed = cfg.seed;
  }

  /// Stream for the next check, independent of how many draws earlier
  /// checks made.
  Rng stream() { return Rng::derive(cfg_.seed, next_stream_++); }

  void add(const std::string& name, const std::string& anchor, double value, double threshold,
           Relation rel) {
    if (auto it = cfg_.tolerances.find(name); it != cfg_.tolerances.end()) {
      threshold = it->second;
      used_.insert(name);
    }
    Check c{name, anchor, value, threshold, rel, false};
    c.passed = std::isfinite(value) && (rel == Relation::Below ? value < threshold : value > threshold);
    report_.checks.push_back(c);
  }

  SuiteReport finish() {
    for (const auto& [name, v] : cfg_.tolerances) {
      if (!used_.count(name)) throw DomainError("suite '" + report_.suite + "' has no check named '" + name + "'");
    }
    return report_;
  }

 private:
  const RunConfig& cfg_;
  SuiteReport report_;
  std::uint64_t next_stream_ = 0;
  std::set<std::string> used_;
};

double uniform_in(Rng& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

TableDirichletParams random_alphas(Rng& rng, Eigen::Index k, Eigen::Index n, double lo = 0.5,
                                   double hi = 5.0) {
  Eigen::MatrixXd a(k, n);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = uniform_in(rng, lo, hi);
  }
  return TableDirichletParams(a);
}

ProbTable random_table(Rng& rng, Eigen::Index k, Eigen::Index n) {
  const SimplexPoint p = sample(DirichletParams(std::vector<double>(static_cast<std::size_t>(k * n), 1.0)), rng);
  Eigen::MatrixXd m(k, n);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = p[static_cast<std::size_t>(i * n + j)];
  }
  return ProbTable(m);
}

// ---------------------------------------------------------------- lemma1

void lemma1_suite(Builder& b) {
  const char* anchor = "joint Dirichlet factorizes into Dirichlet marginal and conditionals";
  for (Axis axis : {Axis::Rows, Axis::Columns}) {
    Rng rng = b.stream();
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
      const auto k = static_cast<Eigen::Index>(2 + rng.below(4));
      const auto n = static_cast<Eigen::Index>(2 + rng.below(4));
      const TableDirichletParams params = random_alphas(rng, k, n);
      for (int p = 0; p < 20; ++p) {
        worst = std::max(worst, verify_change_of_variables(params, random_table(rng, k, n), axis));
      }
    }
    b.add(axis == Axis::Rows ? "change_of_variables_rows" : "change_of_variables_columns", anchor, worst,
          1e-9, Relation::Below);
  }
  {
    Rng rng = b.stream();
    double worst = 0.0;
    for (Eigen::Index k : {2, 3}) {
      for (Eigen::Index n : {2, 3}) {
        for (int p = 0; p < 50; ++p) {
          const Axis axis = p % 2 == 0 ? Axis::Rows : Axis::Columns;
          const Decomposition dec = decompose_table(random_table(rng, k, n), axis);
          const int len = static_cast<int>(dec.conditionals.front().size());
          const double closed = log_jacobian(dec.marginal, len);
          const double fd = numerical_log_jacobian(dec, axis);
          worst = std::max(worst, std::abs(std::expm1(fd - closed)));
        }
      }
    }
    b.add("jacobian_closed_form_vs_finite_difference", "Jacobian of the table reparameterization", worst,
          1e-5, Relation::Below);
  }
  {
    Rng rng = b.stream();
    double worst = 0.0;
    for (int t = 0; t < 50; ++t) {
      const auto k = static_cast<Eigen::Index>(2 + rng.below(4));
      const auto n = static_cast<Eigen::Index>(2 + rng.below(4));
      const TableDirichletParams params = random_alphas(rng, k, n);
      const Axis axis = t % 2 == 0 ? Axis::Rows : Axis::Columns;
      const DirichletFactors f = decompose_dirichlet(params, axis);
      const TableDirichletParams back = compose_dirichlet(f.marginal, f.conditionals, axis);
      worst = std::max(worst, (back.alphas() - params.alphas()).cwiseAbs().maxCoeff());
    }
    b.add("dirichlet_factor_round_trip", "marginal exponents are sums of table exponents", worst, 1e-12,
          Relation::Below);
  }
}

// ---------------------------------------------------------------- funceq

Fn1 scaled(Fn1 f, double eps) {
  return [f = std::move(f), eps](double t) { return f(t) * (1.0 + eps * t); };
}

FnSimplex scaled(FnSimplex f, double eps) {
  return FnSimplex{[g = f.evaluator, eps](std::span<const double> x) { return g(x) * (1.0 + eps * x[0]); },
                   f.arity};
}

void funceq_suite(Builder& b) {
  const char* binary_anchor = "two-by-two functional equation";
  const char* general_anchor = "k-by-n functional equation";
  {
    Rng rng = b.stream();
    double worst = 0.0;
    for (int t = 0; t < 10; ++t) {
      const BinaryBundle bundle = dirichlet_binary_bundle(random_alphas(rng, 2, 2));
      for (int p = 0; p < 100; ++p) worst = std::max(worst, binary_residual(bundle, random_binary_point(rng)));
    }
    b.add("binary_dirichlet_residual", binary_anchor, worst, 1e-9, Relation::Below);
  }
  {
    Rng rng = b.stream();
    double worst = 0.0, sym = 0.0;
    for (std::size_t k = 2; k <= 4; ++k) {
      for (std::size_t n = 2; n <= 4; ++n) {
        const GeneralBundle bundle =
            dirichlet_general_bundle(random_alphas(rng, static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(n)));
        for (int p = 0; p < 100; ++p) {
          const GeneralPoint pt = random_general_point(k, n, rng);
          const double yz = general_residual_yz(bundle, pt);
          const double xw = general_residual_xw(bundle, to_dual(pt));
          worst = std::max({worst, yz, xw});
          sym = std::max(sym, std::abs(yz - xw));
        }
      }
    }
    b.add("general_dirichlet_residual", general_anchor, worst, 1e-9, Relation::Below);
    b.add("orientation_symmetry", "symmetric (x, w) form of the k-by-n equation", sym, 1e-10, Relation::Below);
  }
  {
    // Each perturbation multiplies one bundle member by (1 + 0.1 * coordinate).
    Rng rng = b.stream();
    const TableDirichletParams params = random_alphas(rng, 2, 2);
    double weakest = std::numeric_limits<double>::infinity();
    for (int member = 0; member < 6; ++member) {
      BinaryBundle bundle = dirichlet_binary_bundle(params);
      Fn1* slots[] = {&bundle.f0, &bundle.g1, &bundle.g2, &bundle.g0, &bundle.f1, &bundle.f2};
      *slots[member] = scaled(*slots[member], 0.1);
      double worst = 0.0;
      for (int p = 0; p < 1000; ++p) worst = std::max(worst, binary_residual(bundle, random_binary_point(rng)));
      weakest = std::min(weakest, worst);
    }
    const TableDirichletParams p3 = random_alphas(rng, 3, 3);
    for (int member = 0; member < 4; ++member) {
      GeneralBundle bundle = dirichlet_general_bundle(p3);
      switch (member) {
        case 0: bundle.f0 = scaled(bundle.f0, 0.1); break;
        case 1: bundle.g[1] = scaled(bundle.g[1], 0.1); break;
        case 2: bundle.g0 = scaled(bundle.g0, 0.1); break;
        default: bundle.f[2] = scaled(bundle.f[2], 0.1); break;
      }
      double worst = 0.0;
      for (int p = 0; p < 1000; ++p) worst = std::max(worst, general_residual(bundle, random_general_point(3, 3, rng)));
      weakest = std::min(weakest, worst);
    }
    b.add("perturbation_detected", "only Dirichlet bundles solve the equations", weakest, 1e-3, Relation::Above);
  }
}

// ---------------------------------------------------------------- hypermarkov

Eigen::Matrix2d ones2() { return Eigen::Matrix2d::Constant(1.0); }

void hypermarkov_suite(Builder& b) {
  {
    const HyperMarkov2x2 flat = HyperMarkov2x2::constant(ones2());
    b.add("normalizer_constant_modulator", "normalizer of the cross-ratio family",
          std::abs(normalize(flat) - std::log(6.0)), 1e-6, Relation::Below);
  }
  const HyperMarkov2x2 law = HyperMarkov2x2::cross_ratio_gaussian(ones2(), 1.0);
  auto random_coords = [](Rng& rng) {
    const BinaryPoint p = random_binary_point(rng);
    return Coords3{p.y(), p.z(), p.w()};
  };
  for (Axis axis : {Axis::Columns, Axis::Rows}) {
    Rng rng = b.stream();
    const LogDensity3 f = [&law, axis](const Coords3& c) {
      return transformed_log_density(law, BinaryPoint(c[0], c[1], c[2]), axis);
    };
    double worst = 0.0;
    for (int q = 0; q < 1000; ++q) {
      worst = std::max(worst, rectangle_residual(f, {{0}, {1, 2}}, random_coords(rng), random_coords(rng)));
    }
    b.add(axis == Axis::Columns ? "global_split_residual_columns" : "global_split_residual_rows",
          "global parameter independence of the cross-ratio family", worst, 1e-9, Relation::Below);
  }
  {
    Rng rng = b.stream();
    const LogDensity3 f = [&law](const Coords3& c) {
      return transformed_log_density(law, BinaryPoint(c[0], c[1], c[2]));
    };
    double best = 0.0;
    for (int q = 0; q < 10000; ++q) {
      best = std::max(best, rectangle_residual(f, {{1}, {2}}, random_coords(rng), random_coords(rng)));
    }
    b.add("local_split_residual", "cross-ratio modulation breaks local independence", best, 1e-2,
          Relation::Above);
  }
  {
    Rng rng = b.stream();
    const Eigen::Matrix2d a = random_alphas(rng, 2, 2).alphas();
    const HyperMarkov2x2 flat = HyperMarkov2x2::constant(a);
    const TableDirichletParams params{Eigen::MatrixXd(a)};
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int t = 0; t < 100; ++t) {
      const ProbTable tab = random_table(rng, 2, 2);
      const double d = log_density(flat, tab) - table_log_density(params, tab);
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
    b.add("constant_modulator_matches_dirichlet", "constant modulator reduces to the joint Dirichlet", hi - lo,
          1e-12, Relation::Below);
  }
  {
    Rng rng = b.stream();
    const std::size_t n = 20000;
    const SampleBatch batch = sample_many(law, n, rng);
    std::vector<double> ys;
    ys.reserve(n);
    for (const auto& t : batch.tables) ys.push_back(t(0, 0) + t(1, 0));
    std::sort(ys.begin(), ys.end());
    const MarginalCdf cdf(law);
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double f = cdf(ys[i]);
      d = std::max({d, f - static_cast<double>(i) / static_cast<double>(n),
                    static_cast<double>(i + 1) / static_cast<double>(n) - f});
    }
    // sqrt(n) D against the 1% Kolmogorov critical value.
    b.add("sampler_marginal_ks", "rejection sampler draws from the cross-ratio law",
          d * std::sqrt(static_cast<double>(n)), 1.628, Relation::Below);
  }
}

// ---------------------------------------------------------------- gaussian

GaussDirectedParams random_forward(Rng& rng) {
  GaussDirectedParams p;
  p.direction = Direction::Forward;
  p.m = uniform_in(rng, -5, 5);
  p.v = uniform_in(rng, 0.1, 10);
  p.m_cond = uniform_in(rng, -5, 5);
  p.b = uniform_in(rng, -3, 3);
  p.v_cond = uniform_in(rng, 0.1, 10);
  return p;
}

NormalWishart random_prior(Rng& rng) {
  NormalWishart nw;
  nw.mu0 << uniform_in(rng, -2, 2), uniform_in(rng, -2, 2);
  nw.kappa = uniform_in(rng, 0.5, 5);
  nw.nu = uniform_in(rng, 3, 10);
  Eigen::Matrix2d a;
  a << rng.normal(), rng.normal(), rng.normal(), rng.normal();
  nw.T = a * a.transpose() + 0.5 * Eigen::Matrix2d::Identity();
  return nw;
}

double max_abs_diff(const std::array<double, 5>& a, const std::array<double, 5>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < 5; ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

void gaussian_suite(Builder& b) {
  const char* relations = "path-analysis relations between the two directions";
  {
    Rng rng = b.stream();
    double trip = 0.0, joint = 0.0;
    for (int t = 0; t < 100; ++t) {
      const GaussDirectedParams p = random_forward(rng);
      const GaussDirectedParams r = forward_to_reverse(p);
      trip = std::max(trip, max_abs_diff(reverse_to_forward(r).as_array(), p.as_array()));
      const BivariateGaussian a = to_joint(p), c = to_joint(r);
      joint = std::max({joint, (a.mean() - c.mean()).cwiseAbs().maxCoeff(), (a.cov() - c.cov()).cwiseAbs().maxCoeff()});
    }
    b.add("round_trip_error", relations, trip, 1e-12, Relation::Below);
    b.add("joint_direction_invariance", relations, joint, 1e-12, Relation::Below);
  }
  {
    Rng rng = b.stream();
    double fwd = 0.0, rev = 0.0;
    for (int t = 0; t < 50; ++t) {
      const GaussDirectedParams p = random_forward(rng);
      fwd = std::max(fwd, std::abs(std::expm1(numerical_log_abs_det(p) - log_jacobian_factor(p))));
      const GaussDirectedParams r = forward_to_reverse(p);
      rev = std::max(rev, std::abs(std::expm1(numerical_log_abs_det(r) - reverse_log_jacobian_factor(p))));
    }
    b.add("jacobian_factor_vs_finite_difference", "Jacobian factor between the two directions", fwd, 1e-5,
          Relation::Below);
    b.add("reverse_jacobian_factor_vs_finite_difference", "Jacobian factor between the two directions", rev,
          1e-5, Relation::Below);
  }
  {
    Rng rng = b.stream();
    double worst = 0.0, perturbed = 0.0;
    for (int q = 0; q < 10; ++q) {
      const NormalWishart nw = random_prior(rng);
      const NwFactors f = nw_factor_densities(nw);
      NwFactors g = f;
      g.f1.shape += 0.5;
      for (int t = 0; t < 100; ++t) {
        const GaussDirectedParams p = random_forward(rng);
        worst = std::max(worst, eq8_residual(f, p));
        perturbed = std::max(perturbed, eq8_residual(g, p));
      }
    }
    const char* anchor = "normal-Wishart factors solve the Gaussian functional equation";
    b.add("normal_wishart_residual", anchor, worst, 1e-8, Relation::Below);
    b.add("perturbed_factor_residual", anchor, perturbed, 1e-3, Relation::Above);
  }
  {
    Rng rng = b.stream();
    NormalWishart nw;
    nw.mu0 << 0.5, -0.5;
    nw.kappa = 0.2;
    nw.nu = 4.0;
    nw.T << 2.0, 0.6, 0.6, 1.0;
    const CoefficientIndependence r = standardized_coefficient_independence(nw, 5000, rng);
    const char* anchor = "standardized regression coefficient is independent of the conditional variance";
    b.add("standardized_coefficient_pvalue", anchor, r.p_standardized, 0.01, Relation::Above);
    b.add("raw_coefficient_pvalue", anchor, r.p_raw, 0.01, Relation::Below);
  }
}

// ---------------------------------------------------------------- appendix

void appendix_suite(Builder& b) {
  {
    Rng rng = b.stream();
    double worst = 0.0;
    for (int t = 0; t < 10; ++t) {
      const TableDirichletParams params = random_alphas(rng, 2, 2);
      for (int p = 0; p < 100; ++p) worst = std::max(worst, verify_eq24(params, random_binary_point(rng)));
    }
    b.add("log_derivative_identity", "differentiated two-by-two equation", worst, 1e-8, Relation::Below);
  }
  {
    Rng rng = b.stream();
    double worst = 0.0;
    for (int t = 0; t < 10; ++t) {
      const double a = uniform_in(rng, 0.5, 5), c = uniform_in(rng, 0.5, 5);
      for (int p = 0; p < 100; ++p) worst = std::max(worst, verify_ode28(a, c, uniform_in(rng, 0.01, 0.99)));
    }
    b.add("second_order_ode_residual", "second-order equation for the conditional log density", worst, 1e-10,
          Relation::Below);
  }
  b.add("second_order_ode_constant", "second-order equation constant equals -(a + b)",
        std::abs(ode28_lhs(1.0, 1.0, 0.5) + 2.0), 1e-12, Relation::Below);
}

}  // namespace

SuiteReport run_suite(const std::string& suite, const RunConfig& config) {
  Builder b(suite, config);
  if (suite == "lemma1") {
    lemma1_suite(b);
  } else if (suite == "funceq") {
    funceq_suite(b);
  } else if (suite == "hypermarkov") {
    hypermarkov_suite(b);
  } else if (suite == "gaussian") {
    gaussian_suite(b);
  } else if (suite == "appendix") {
    appendix_suite(b);
  } else {
    throw DomainError("unknown suite '" + suite + "'");
  }
  return b.finish();
}

}  // namespace dirichar
