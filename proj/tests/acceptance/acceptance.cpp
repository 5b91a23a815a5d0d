// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "dirichar/bn_scoring.hpp"
#include "dirichar/functional_eq.hpp"
#include "dirichar/gaussian_net.hpp"
#include "dirichar/hyper_markov.hpp"
#include "dirichar/indep.hpp"
#include "dirichar/reparam.hpp"
#include "oracles.hpp"

using namespace dirichar;

namespace {

constexpr std::uint64_t kMasterSeed = 20240917;
constexpr int kSeeds = 20;
constexpr int kRequired = 18;

// Every measured number is appended in hex-float form, so two runs agree
// exactly iff their fingerprints are equal strings.
class Fingerprint {
 public:
  void add(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%a ", x);
    text_ += buf;
  }
  void add(std::size_t x) { add(static_cast<double>(x)); }
  const std::string& str() const { return text_; }

 private:
  std::string text_;
};

struct Outcome {
  bool pass = false;
  std::string detail;
  std::string fingerprint;
};

std::string fmt(const char* f, double a) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

Rng stream(int criterion, std::uint64_t index = 0) {
  return Rng::derive(kMasterSeed, static_cast<std::uint64_t>(criterion) * 1000 + index);
}

Eigen::Index dim(Rng& rng, int lo, int hi) { return static_cast<Eigen::Index>(lo + static_cast<int>(rng.below(hi - lo + 1))); }

// ---------------------------------------------------------------- 1
Outcome change_of_variables() {
  Rng rng = stream(1);
  Fingerprint fp;
  double worst[2] = {0.0, 0.0};
  for (int t = 0; t < 200; ++t) {
    const Eigen::Index k = dim(rng, 2, 5), n = dim(rng, 2, 5);
    const TableDirichletParams params(oracle::random_alpha_matrix(rng, k, n));
    for (int i = 0; i < 100; ++i) {
      const auto table = oracle::random_table(rng, k, n);
      for (int a = 0; a < 2; ++a) {
        const double r = verify_change_of_variables(params, table, a == 0 ? Axis::Rows : Axis::Columns);
        worst[a] = std::max(worst[a], r);
      }
    }
  }
  fp.add(worst[0]);
  fp.add(worst[1]);
  const bool pass = worst[0] < 1e-9 && worst[1] < 1e-9;
  return {pass,
          "change of variables, 200 tables x 100 points, k,n <= 5: max residual rows " + fmt("%.3g", worst[0]) +
              ", columns " + fmt("%.3g", worst[1]) + " (< 1e-9)",
          fp.str()};
}

// ---------------------------------------------------------------- 2
Outcome jacobian_closed_form() {
  Rng rng = stream(2);
  Fingerprint fp;
  double worst = 0.0;
  for (Eigen::Index k : {2, 3})
    for (Eigen::Index n : {2, 3})
      for (int p = 0; p < 50; ++p)
        for (Axis axis : {Axis::Rows, Axis::Columns}) {
          const auto dec = decompose_table(oracle::random_table(rng, k, n), axis);
          const int len = static_cast<int>(dec.conditionals.front().size());
          const double closed = log_jacobian(dec.marginal, len);
          const double rel = std::abs(std::expm1(oracle::table_map_fd_log_det(dec, k, n, axis) - closed));
          worst = std::max(worst, rel);
          fp.add(closed);
        }
  fp.add(worst);
  return {worst < 1e-5,
          "Jacobian closed form vs finite-difference determinant, 50 points per (k,n) in {2,3}^2, both axes: "
          "max relative error " + fmt("%.3g", worst) + " (< 1e-5)",
          fp.str()};
}

// ---------------------------------------------------------------- 3
FnSimplex times_linear(FnSimplex f, std::size_t coord, double eps) {
  auto inner = f.evaluator;
  f.evaluator = [inner, coord, eps](std::span<const double> v) { return inner(v) * (1.0 + eps * v[coord]); };
  return f;
}

double max_general(const GeneralBundle& b, Rng& rng, int points) {
  double worst = 0.0;
  for (int i = 0; i < points; ++i) worst = std::max(worst, general_residual(b, random_general_point(b.k, b.n, rng)));
  return worst;
}

Outcome functional_equations() {
  Rng rng = stream(3);
  Fingerprint fp;
  double binary = 0.0;
  for (int t = 0; t < 10; ++t) {
    const auto b = dirichlet_binary_bundle(TableDirichletParams(oracle::random_alpha_matrix(rng, 2, 2)));
    for (int i = 0; i < 100; ++i) binary = std::max(binary, binary_residual(b, random_binary_point(rng)));
  }
  double general = 0.0;
  for (Eigen::Index k : {2, 3, 4})
    for (Eigen::Index n : {2, 3, 4})
      general = std::max(general, max_general(dirichlet_general_bundle(TableDirichletParams(oracle::random_alpha_matrix(rng, k, n))), rng, 100));
  int detected = 0;
  double weakest = 1e300;
  for (int t = 0; t < 10; ++t) {
    const Eigen::Index k = dim(rng, 2, 4), n = dim(rng, 2, 4);
    auto b = dirichlet_general_bundle(TableDirichletParams(oracle::random_alpha_matrix(rng, k, n)));
    const std::size_t members = 2 + b.g.size() + b.f.size();
    const std::size_t which = rng.below(members);
    FnSimplex* target = which == 0                  ? &b.f0
                        : which == 1                ? &b.g0
                        : which < 2 + b.g.size()    ? &b.g[which - 2]
                                                    : &b.f[which - 2 - b.g.size()];
    *target = times_linear(*target, rng.below(target->arity), 0.1);
    const double r = max_general(b, rng, 1000);
    weakest = std::min(weakest, r);
    detected += r > 1e-3;
  }
  fp.add(binary);
  fp.add(general);
  fp.add(weakest);
  const bool pass = binary < 1e-9 && general < 1e-9 && detected == 10;
  return {pass,
          "functional equations: Dirichlet binary residual " + fmt("%.3g", binary) + ", general residual (k,n in {2,3,4}) " +
              fmt("%.3g", general) + " (< 1e-9); perturbations detected " + std::to_string(detected) +
              "/10, smallest max residual " + fmt("%.3g", weakest) + " (> 1e-3)",
          fp.str()};
}

// ---------------------------------------------------------------- 4
Outcome appendix_identities() {
  Rng rng = stream(4);
  Fingerprint fp;
  double eq24 = 0.0, ode = 0.0;
  for (int t = 0; t < 10; ++t) {
    const Eigen::MatrixXd a = oracle::random_alpha_matrix(rng, 2, 2);
    const TableDirichletParams p(a);
    for (int i = 0; i < 100; ++i) {
      const auto pt = random_binary_point(rng);
      eq24 = std::max(eq24, verify_eq24(p, pt));
      // the second-order identity for each pair of exponents sharing a row
      for (Eigen::Index r = 0; r < 2; ++r) ode = std::max(ode, verify_ode28(a(r, 0), a(r, 1), pt.w()));
    }
  }
  double constant_dev = 0.0;
  for (int i = 0; i < 100; ++i) constant_dev = std::max(constant_dev, std::abs(ode28_lhs(1, 1, oracle::uniform_in(rng, 0.01, 0.99)) + 2.0));
  fp.add(eq24);
  fp.add(ode);
  fp.add(constant_dev);
  const bool pass = eq24 < 1e-8 && ode < 1e-10 && constant_dev < 1e-10;
  return {pass,
          "log-derivative identity residual " + fmt("%.3g", eq24) + " (< 1e-8); second-order identity residual " +
              fmt("%.3g", ode) + " (< 1e-10); constant at alpha=beta=1 deviates from -2 by " + fmt("%.3g", constant_dev) +
              " (< 1e-10)",
          fp.str()};
}

// ---------------------------------------------------------------- 5
Coords3 random_coords(Rng& rng) {
  return {oracle::uniform_in(rng, 0.01, 0.99), oracle::uniform_in(rng, 0.01, 0.99), oracle::uniform_in(rng, 0.01, 0.99)};
}

Outcome hyper_markov_family() {
  Rng rng = stream(5);
  Fingerprint fp;
  const auto law = HyperMarkov2x2::cross_ratio_gaussian(Eigen::Matrix2d::Ones(), 1.0);
  double global = 0.0;
  for (Axis axis : {Axis::Columns, Axis::Rows}) {
    const LogDensity3 f = [&law, axis](const Coords3& c) {
      return transformed_log_density(law, BinaryPoint(c[0], c[1], c[2]), axis);
    };
    for (int i = 0; i < 1000; ++i) global = std::max(global, rectangle_residual(f, {{0}, {1, 2}}, random_coords(rng), random_coords(rng)));
  }
  const LogDensity3 f = [&law](const Coords3& c) { return transformed_log_density(law, BinaryPoint(c[0], c[1], c[2])); };
  double local = 0.0;
  for (int i = 0; i < 10000; ++i) {
    Coords3 p = random_coords(rng), q = random_coords(rng);
    q[0] = p[0];
    local = std::max(local, rectangle_residual(f, {{1}, {2}}, p, q));
  }
  double spread = 0.0;
  for (int t = 0; t < 10; ++t) {
    Eigen::Matrix2d a;
    for (int i = 0; i < 4; ++i) a(i / 2, i % 2) = oracle::uniform_in(rng, 0.5, 5);
    const auto flat = HyperMarkov2x2::constant(a, 1.0);
    const TableDirichletParams dp(a);
    double lo = 1e300, hi = -1e300;
    for (int i = 0; i < 200; ++i) {
      const auto tab = oracle::random_table(rng, 2, 2);
      const double diff = log_density(flat, tab) - table_log_density(dp, tab);
      lo = std::min(lo, diff);
      hi = std::max(hi, diff);
    }
    spread = std::max(spread, hi - lo);
  }
  fp.add(global);
  fp.add(local);
  fp.add(spread);
  const bool pass = global < 1e-9 && local > 1e-2 && spread <= 1e-12;
  return {pass,
          "cross-ratio law: global split residual " + fmt("%.3g", global) + " (< 1e-9, 1000 quadruples per axis); local split max residual " +
              fmt("%.3g", local) + " (> 1e-2 among 1e4); constant modulator offset spread " + fmt("%.3g", spread) + " (<= 1e-12)",
          fp.str()};
}

// ---------------------------------------------------------------- 6
std::vector<SampleBlock> decomposed_blocks(const std::vector<ProbTable>& tables) {
  std::vector<SimplexPoint> m, c1, c2;
  for (const auto& t : tables) {
    auto d = decompose_table(t, Axis::Rows);
    m.push_back(d.marginal);
    c1.push_back(d.conditionals[0]);
    c2.push_back(d.conditionals[1]);
  }
  return {SampleBlock::from_simplex_points(m, "marginal"), SampleBlock::from_simplex_points(c1, "cond1"),
          SampleBlock::from_simplex_points(c2, "cond2")};
}

void add_report(Fingerprint& fp, const IndependenceReport& rep) {
  for (const auto* group : {&rep.pairwise, &rep.each_vs_rest})
    for (const auto& c : *group) {
      fp.add(c.result.statistic);
      fp.add(c.result.p_value);
      fp.add(c.result.permutations_run);
    }
}

// One seed of the Dirichlet half: true if the report finds no dependence.
bool dirichlet_seed(std::uint64_t s, Fingerprint& fp) {
  Rng rng = stream(6, s);
  const auto flat = TableDirichletParams(oracle::random_alpha_matrix(rng, 2, 2)).flattened();
  std::vector<ProbTable> tables;
  for (int i = 0; i < 5000; ++i) {
    const auto p = sample(flat, rng);
    Eigen::MatrixXd t(2, 2);
    t << p[0], p[1], p[2], p[3];
    tables.emplace_back(t);
  }
  const auto rep = mutual_independence_report(decomposed_blocks(tables), 999, rng);
  add_report(fp, rep);
  return rep.consistent;
}

// One seed of the mixture half: true if independence is rejected with p < 0.01.
bool mixture_seed(std::uint64_t s, Fingerprint& fp) {
  Rng rng = stream(6, 500 + s);
  Eigen::MatrixXd a1(2, 2), a2(2, 2);
  a1 << 10, 1, 1, 1;
  a2 << 1, 1, 1, 10;
  const std::vector<Variable> vars{{"s", 2}, {"t", 2}};
  const MixturePrior mix(vars, {{0.5, TableDirichletParams(a1)}, {0.5, TableDirichletParams(a2)}});
  const auto rep = mixture_independence_violation(mix, 5000, rng);
  double min_p = 1.0;
  for (const auto& t : rep.tests) {
    fp.add(t.statistic);
    fp.add(t.p_value);
    min_p = std::min(min_p, t.p_value);
  }
  return rep.independence_rejected && min_p < 0.01;
}

struct SeededRun {
  Outcome outcome;
  std::string first_seed;  // fingerprint of seed 0, rerun by criterion 10
};

SeededRun sample_independence() {
  int kept = 0, rejected = 0;
  std::string first;
  Fingerprint all;
  for (int s = 0; s < kSeeds; ++s) {
    Fingerprint fp;
    kept += dirichlet_seed(static_cast<std::uint64_t>(s), fp);
    rejected += mixture_seed(static_cast<std::uint64_t>(s), fp);
    if (s == 0) first = fp.str();
    all.add(static_cast<double>(s));
  }
  const bool pass = kept >= kRequired && rejected >= kRequired;
  return {{pass,
           "sample independence at n=5000: Dirichlet blocks consistent in " + std::to_string(kept) +
               "/20 seeds (>= 18); separated mixture rejected in " + std::to_string(rejected) + "/20 seeds (>= 18)",
           all.str()},
          first};
}

// ---------------------------------------------------------------- 7, 8
std::vector<std::vector<int>> configurations(const std::vector<Variable>& vars) {
  std::vector<std::vector<int>> out{{}};
  for (const auto& v : vars) {
    std::vector<std::vector<int>> next;
    for (const auto& prefix : out)
      for (int x = 0; x < v.arity; ++x) {
        auto c = prefix;
        c.push_back(x);
        next.push_back(c);
      }
    out = next;
  }
  return out;
}

// Dirichlet-multinomial over joint configurations, last variable fastest.
double joint_oracle(const DiscreteDataset& d, const std::vector<double>& base, double ess) {
  const auto configs = configurations(d.variables());
  std::vector<double> alpha, counts(configs.size(), 0.0);
  for (double b : base) alpha.push_back(ess * b);
  for (const auto& c : d.cases())
    counts[static_cast<std::size_t>(std::find(configs.begin(), configs.end(), c) - configs.begin())] += 1;
  return oracle::dirichlet_multinomial(alpha, counts);
}

std::vector<double> random_base(Rng& rng, std::size_t size) {
  std::vector<double> b(size);
  double s = 0.0;
  for (auto& x : b) s += (x = oracle::uniform_in(rng, 0.05, 1.0));
  for (auto& x : b) x /= s;
  return b;
}

DiscreteDataset random_cases(Rng& rng, const std::vector<Variable>& vars, std::size_t cases) {
  std::vector<std::vector<int>> rows;
  for (std::size_t i = 0; i < cases; ++i) {
    std::vector<int> r;
    for (const auto& v : vars) r.push_back(static_cast<int>(rng.below(static_cast<std::uint64_t>(v.arity))));
    rows.push_back(r);
  }
  return DiscreteDataset(vars, rows);
}

Outcome hypothesis_equivalence() {
  Rng rng = stream(7);
  Fingerprint fp;
  double diff = 0.0, oracle_gap = 0.0;
  for (int b = 0; b < 10; ++b) {
    const std::vector<Variable> vars{{"s", static_cast<int>(dim(rng, 2, 4))}, {"t", static_cast<int>(dim(rng, 2, 4))}};
    const auto base = random_base(rng, joint_size(vars));
    const double ess = oracle::uniform_in(rng, 0.5, 10);
    const BDePrior prior(vars, ess, base);
    for (int d = 0; d < 100; ++d) {
      const auto data = random_cases(rng, vars, 1 + rng.below(40));
      const auto fwd = bde_log_score(NetworkStructure::parse("s->t", {"s", "t"}), data, prior);
      const auto rev = bde_log_score(NetworkStructure::parse("t->s", {"s", "t"}), data, prior);
      const double expected = joint_oracle(data, base, ess);
      diff = std::max(diff, std::abs(fwd - rev));
      oracle_gap = std::max({oracle_gap, std::abs(fwd - expected), std::abs(rev - expected)});
      fp.add(fwd);
      fp.add(rev);
    }
  }
  const bool pass = diff < 1e-10 && oracle_gap < 1e-10;
  return {pass,
          "score equivalence over 10 bases x 100 datasets: max |s->t - t->s| " + fmt("%.3g", diff) +
              ", max gap to the joint oracle " + fmt("%.3g", oracle_gap) + " (< 1e-10)",
          fp.str()};
}

Outcome equivalent_database() {
  Rng rng = stream(8);
  Fingerprint fp;
  const std::vector<Variable> vars{{"a", 2}, {"b", 2}, {"c", 2}};
  double enum_gap = 0.0;
  for (std::size_t missing = 0; missing <= kMaxMissingCells; ++missing) {
    const auto base = random_base(rng, 8);
    const double ess = oracle::uniform_in(rng, 0.5, 5);
    const BDePrior prior(vars, ess, base);
    auto rows = random_cases(rng, vars, 8).cases();
    std::vector<std::pair<std::size_t, std::size_t>> holes;
    while (holes.size() < missing) {
      const std::size_t r = rng.below(rows.size()), c = rng.below(3);
      if (rows[r][c] == kMissing) continue;
      rows[r][c] = kMissing;
      holes.push_back({r, c});
    }
    const DiscreteDataset incomplete(vars, rows);
    const auto real = random_cases(rng, vars, 5);
    std::vector<double> terms;
    for (std::size_t bits = 0; bits < (std::size_t{1} << missing); ++bits) {
      auto filled = rows;
      for (std::size_t h = 0; h < missing; ++h) filled[holes[h].first][holes[h].second] = static_cast<int>((bits >> h) & 1u);
      terms.push_back(joint_oracle(DiscreteDataset(vars, filled).concatenated(real), base, ess));
    }
    const double got = equivalent_database_score(real, incomplete, prior);
    enum_gap = std::max(enum_gap, std::abs(got - oracle::log_sum_exp(terms)));
    fp.add(got);
  }
  double chain_gap = 0.0;
  for (int t = 0; t < 20; ++t) {
    const BDePrior prior(vars, oracle::uniform_in(rng, 0.5, 5), random_base(rng, 8));
    auto rows = random_cases(rng, vars, 6).cases();
    for (int h = 0; h < 6; ++h) rows[rng.below(rows.size())][rng.below(3)] = kMissing;
    const DiscreteDataset de(vars, rows);
    const auto d = random_cases(rng, vars, 10);
    const double lhs = equivalent_database_score(d, de, prior);
    const double rhs = equivalent_database_score(DiscreteDataset(vars), de, prior) +
                       mixture_log_score(posterior_mixture(de, prior), d);
    chain_gap = std::max(chain_gap, std::abs(lhs - rhs));
    fp.add(lhs);
  }
  const bool pass = enum_gap < 1e-10 && chain_gap < 1e-10;
  return {pass,
          "equivalent database: enumeration vs brute force for 0..12 missing binary cells, max gap " + fmt("%.3g", enum_gap) +
              "; chain rule max gap " + fmt("%.3g", chain_gap) + " (< 1e-10)",
          fp.str()};
}

// ---------------------------------------------------------------- 9
GaussDirectedParams random_forward(Rng& rng) {
  GaussDirectedParams p;
  p.m = oracle::uniform_in(rng, -5, 5);
  p.v = oracle::uniform_in(rng, 0.1, 10);
  p.m_cond = oracle::uniform_in(rng, -5, 5);
  p.b = oracle::uniform_in(rng, -3, 3);
  p.v_cond = oracle::uniform_in(rng, 0.1, 10);
  return p;
}

NormalWishart random_prior(Rng& rng) {
  NormalWishart nw;
  nw.mu0 << oracle::uniform_in(rng, -2, 2), oracle::uniform_in(rng, -2, 2);
  nw.kappa = oracle::uniform_in(rng, 0.1, 5);
  nw.nu = oracle::uniform_in(rng, 2.5, 10);
  const double a = oracle::uniform_in(rng, 0.5, 3), d = oracle::uniform_in(rng, 0.5, 3);
  const double c = oracle::uniform_in(rng, -0.9, 0.9) * std::sqrt(a * d);
  nw.T << a, c, c, d;
  return nw;
}

oracle::Vec5 as_vec(const GaussDirectedParams& p) {
  const auto a = p.as_array();
  return Eigen::Map<const oracle::Vec5>(a.data());
}

NormalWishart coefficient_prior() {
  NormalWishart nw;
  nw.mu0 << 0.5, -0.5;
  nw.kappa = 0.2;
  nw.nu = 4.0;
  nw.T << 2.0, 0.6, 0.6, 1.0;
  return nw;
}

// One seed of the coefficient test: {standardized kept, raw rejected}.
std::pair<bool, bool> coefficient_seed(std::uint64_t s, Fingerprint& fp) {
  Rng rng = stream(9, 100 + s);
  const auto r = standardized_coefficient_independence(coefficient_prior(), 5000, rng);
  fp.add(r.dcor_standardized);
  fp.add(r.p_standardized);
  fp.add(r.dcor_raw);
  fp.add(r.p_raw);
  return {r.p_standardized >= 0.01, r.p_raw < 0.01};
}

struct GaussianRun {
  SeededRun run;
  std::string info;
};

GaussianRun gaussian_network() {
  Rng rng = stream(9);
  Fingerprint fp;
  double round_trip = 0.0;
  double printed_vs_back = 0.0, true_vs_forward = 0.0, printed_vs_forward = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const auto f = random_forward(rng);
    const auto r = forward_to_reverse(f);
    round_trip = std::max(round_trip, (as_vec(reverse_to_forward(r)) - as_vec(f)).cwiseAbs().maxCoeff());
    if (i >= 200) continue;
    // v1^2 v2|1^3 / (v2^2 v1|2^3), written out from the two parameter sets
    const double printed = 2 * std::log(f.v) + 3 * std::log(f.v_cond) - 2 * std::log(r.v) - 3 * std::log(r.v_cond);
    const double fd_forward = oracle::gaussian_flip_fd_log_det(as_vec(f));
    const double fd_back = oracle::gaussian_flip_fd_log_det(as_vec(r));
    printed_vs_back = std::max({printed_vs_back, std::abs(std::expm1(fd_back - printed)),
                                std::abs(std::expm1(reverse_log_jacobian_factor(f) - printed))});
    true_vs_forward = std::max(true_vs_forward, std::abs(std::expm1(fd_forward - log_jacobian_factor(f))));
    printed_vs_forward = std::max(printed_vs_forward, std::abs(std::expm1(fd_forward - printed)));
    fp.add(printed);
    fp.add(log_jacobian_factor(f));
  }
  double eq8 = 0.0, eq8_printed = 0.0;
  for (int t = 0; t < 10; ++t) {
    const auto nw = random_prior(rng);
    const auto fac = nw_factor_densities(nw);
    for (int i = 0; i < 100; ++i) {
      const auto f = random_forward(rng);
      eq8 = std::max(eq8, eq8_residual(fac, f));
      const auto r = forward_to_reverse(f);
      const double lhs = fac.f1.log_density(f.m, f.v) + fac.f2_given_1.log_density(f.m_cond, f.b, f.v_cond);
      const double rhs = fac.f2.log_density(r.m, r.v) + fac.f1_given_2.log_density(r.m_cond, r.b, r.v_cond);
      eq8_printed = std::max(eq8_printed, std::abs(lhs - reverse_log_jacobian_factor(f) - rhs));
    }
  }
  fp.add(round_trip);
  fp.add(eq8);
  int kept = 0, raw_rejected = 0;
  std::string first;
  for (int s = 0; s < kSeeds; ++s) {
    Fingerprint seed_fp;
    const auto [k, r] = coefficient_seed(static_cast<std::uint64_t>(s), seed_fp);
    kept += k;
    raw_rejected += r;
    if (s == 0) first = seed_fp.str();
  }
  fp.add(static_cast<double>(kept));
  fp.add(static_cast<double>(raw_rejected));
  const bool pass = round_trip < 1e-12 && printed_vs_back < 1e-5 && true_vs_forward < 1e-5 && eq8 < 1e-8 &&
                    kept >= kRequired && raw_rejected == kSeeds;
  std::string detail = "Gaussian network: round trip " + fmt("%.3g", round_trip) +
                       " (< 1e-12); printed factor vs finite-difference determinant of the reverse-to-forward map at the image point, "
                       "max relative error " + fmt("%.3g", printed_vs_back) +
                       " (< 1e-5); forward-to-reverse determinant vs its finite difference " + fmt("%.3g", true_vs_forward) +
                       " (< 1e-5); normal-Wishart residual " + fmt("%.3g", eq8) +
                       " (< 1e-8, 100 points x 10 priors); standardized coefficient kept in " + std::to_string(kept) +
                       "/20 seeds (>= 18), raw pair rejected in " + std::to_string(raw_rejected) + "/20 (= 20)";
  std::string info = "INFO [9] the printed factor equals v2/v1, the reciprocal of the forward-to-reverse determinant v1/v2: "
                     "max relative gap to that determinant " + fmt("%.3g", printed_vs_forward) +
                     "; substituting it into the normal-Wishart identity leaves a residual of " + fmt("%.3g", eq8_printed);
  return {{{pass, detail, fp.str()}, first}, info};
}

void report(int id, const Outcome& o, bool& all) {
  std::printf("%s [%d] %s\n", o.pass ? "PASS" : "FAIL", id, o.detail.c_str());
  std::fflush(stdout);
  all = all && o.pass;
}

}  // namespace

int main() {
  bool all = true;
  using Plain = std::function<Outcome()>;
  const std::vector<std::pair<int, Plain>> plain{{1, change_of_variables}, {2, jacobian_closed_form},
                                                 {3, functional_equations}, {4, appendix_identities},
                                                 {5, hyper_markov_family}};
  std::vector<std::pair<int, std::string>> prints;
  for (const auto& [id, fn] : plain) {
    const auto o = fn();
    report(id, o, all);
    prints.push_back({id, o.fingerprint});
  }
  const auto six = sample_independence();
  report(6, six.outcome, all);
  for (const auto& [id, fn] : std::vector<std::pair<int, Plain>>{{7, hypothesis_equivalence}, {8, equivalent_database}}) {
    const auto o = fn();
    report(id, o, all);
    prints.push_back({id, o.fingerprint});
  }
  const auto nine = gaussian_network();
  report(9, nine.run.outcome, all);
  std::printf("%s\n", nine.info.c_str());

  // Rerun each criterion (one seed of the seeded ones) and compare fingerprints.
  std::vector<int> mismatched;
  std::size_t compared = 0;
  for (const auto& [id, print] : prints) {
    const Plain fn = id == 1 ? Plain(change_of_variables)
                     : id == 2 ? Plain(jacobian_closed_form)
                     : id == 3 ? Plain(functional_equations)
                     : id == 4 ? Plain(appendix_identities)
                     : id == 5 ? Plain(hyper_markov_family)
                     : id == 7 ? Plain(hypothesis_equivalence)
                               : Plain(equivalent_database);
    compared += print.size();
    if (fn().fingerprint != print) mismatched.push_back(id);
  }
  Fingerprint six_again;
  dirichlet_seed(0, six_again);
  mixture_seed(0, six_again);
  compared += six.first_seed.size();
  if (six_again.str() != six.first_seed) mismatched.push_back(6);
  Fingerprint nine_again;
  coefficient_seed(0, nine_again);
  compared += nine.run.first_seed.size();
  if (nine_again.str() != nine.run.first_seed) mismatched.push_back(9);

  std::string which;
  for (int id : mismatched) which += " " + std::to_string(id);
  const Outcome ten{mismatched.empty(),
                    "reproducibility: reran criteria 1-5, 7, 8 and seed 0 of 6 and 9, " + std::to_string(compared) +
                        " bytes of hex-float output compared, mismatches:" + (which.empty() ? std::string(" none") : which),
                    ""};
  report(10, ten, all);
  std::printf("%s\n", all ? "ALL PASS" : "SOME CRITERIA FAILED");
  return all ? 0 : 1;
}
