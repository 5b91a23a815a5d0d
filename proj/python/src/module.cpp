#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dirichar/bn_scoring.hpp"
#include "dirichar/dirichlet.hpp"
#include "dirichar/error.hpp"
#include "dirichar/gaussian_net.hpp"
#include "dirichar/hyper_markov.hpp"
#include "dirichar/indep.hpp"
#include "dirichar/reparam.hpp"
#include "dirichar/verify.hpp"

namespace py = pybind11;
using namespace dirichar;

namespace {

Axis parse_axis(const std::string& s) {
  if (s == "rows") return Axis::Rows;
  if (s == "columns") return Axis::Columns;
  throw DomainError("axis must be 'rows' or 'columns', got '" + s + "'");
}

std::vector<double> values(const SimplexPoint& p) { return {p.values().begin(), p.values().end()}; }
std::vector<double> values(const DirichletParams& p) { return {p.alphas().begin(), p.alphas().end()}; }

py::tuple decomposition_tuple(const Decomposition& d) {
  std::vector<std::vector<double>> conds;
  for (const auto& c : d.conditionals) conds.push_back(values(c));
  return py::make_tuple(values(d.marginal), conds);
}

Decomposition decomposition_from(const std::vector<double>& marginal, const std::vector<std::vector<double>>& conds) {
  std::vector<SimplexPoint> c;
  for (const auto& v : conds) c.emplace_back(v);
  return {SimplexPoint(marginal), std::move(c)};
}

GaussDirectedParams gauss_from(const std::array<double, 5>& a, const std::string& direction) {
  if (direction != "forward" && direction != "reverse")
    throw DomainError("direction must be 'forward' or 'reverse', got '" + direction + "'");
  return GaussDirectedParams::from_array(direction == "forward" ? Direction::Forward : Direction::Reverse, a);
}

NormalWishart nw_from(const Eigen::Vector2d& mu0, double kappa, double nu, const Eigen::Matrix2d& T) {
  NormalWishart nw;
  nw.mu0 = mu0;
  nw.kappa = kappa;
  nw.nu = nu;
  nw.T = T;
  nw.validate();
  return nw;
}

py::dict report_dict(const SuiteReport& r) {
  py::list checks;
  for (const auto& c : r.checks) {
    py::dict d;
    d["name"] = c.name;
    d["anchor"] = c.anchor;
    d["value"] = c.value;
    d["threshold"] = c.threshold;
    d["relation"] = c.relation == Relation::Below ? "below" : "above";
    d["passed"] = c.passed;
    checks.append(d);
  }
  py::dict out;
  out["suite"] = r.suite;
  out["seed"] = r.seed;
  out["passed"] = r.all_passed();
  out["checks"] = checks;
  return out;
}

}  // namespace

PYBIND11_MODULE(_dirichar, m) {
  m.doc() = "Dirichlet characterization toolkit";

  auto base = py::register_exception<Error>(m, "Error", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<DimensionError>(m, "DimensionError", base.ptr());
  py::register_exception<ConsistencyError>(m, "ConsistencyError", base.ptr());
  py::register_exception<IntegrationError>(m, "IntegrationError", base.ptr());
  py::register_exception<EnvelopeError>(m, "EnvelopeError", base.ptr());
  py::register_exception<CompletenessError>(m, "CompletenessError", base.ptr());
  py::register_exception<CapacityError>(m, "CapacityError", base.ptr());
  py::register_exception<DegenerateError>(m, "DegenerateError", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());

  // Dirichlet
  m.def("log_gamma", &log_gamma, py::arg("x"));
  m.def(
      "dirichlet_log_density",
      [](const std::vector<double>& alpha, const std::vector<double>& point) {
        return log_density(DirichletParams(alpha), SimplexPoint(point));
      },
      py::arg("alpha"), py::arg("point"));
  m.def(
      "dirichlet_mean", [](const std::vector<double>& alpha) { return values(mean(DirichletParams(alpha))); },
      py::arg("alpha"));
  m.def(
      "dirichlet_sample",
      [](const std::vector<double>& alpha, std::size_t count, std::uint64_t seed) {
        const DirichletParams params(alpha);
        Rng rng(seed);
        Eigen::MatrixXd out(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(alpha.size()));
        for (Eigen::Index i = 0; i < out.rows(); ++i) {
          const auto p = sample(params, rng);
          for (Eigen::Index j = 0; j < out.cols(); ++j) out(i, j) = p[static_cast<std::size_t>(j)];
        }
        return out;
      },
      py::arg("alpha"), py::arg("count"), py::arg("seed"));

  // Reparameterization
  m.def(
      "decompose_table",
      [](const Eigen::MatrixXd& table, const std::string& axis) {
        return decomposition_tuple(decompose_table(ProbTable(table), parse_axis(axis)));
      },
      py::arg("table"), py::arg("axis") = "rows");
  m.def(
      "compose_table",
      [](const std::vector<double>& marginal, const std::vector<std::vector<double>>& conds, const std::string& axis) {
        return compose_table(decomposition_from(marginal, conds), parse_axis(axis)).entries();
      },
      py::arg("marginal"), py::arg("conditionals"), py::arg("axis") = "rows");
  m.def(
      "log_jacobian",
      [](const std::vector<double>& marginal, int n) { return log_jacobian(SimplexPoint(marginal), n); },
      py::arg("marginal"), py::arg("n"));
  m.def(
      "decompose_dirichlet",
      [](const Eigen::MatrixXd& alphas, const std::string& axis) {
        const auto f = decompose_dirichlet(TableDirichletParams(alphas), parse_axis(axis));
        std::vector<std::vector<double>> conds;
        for (const auto& c : f.conditionals) conds.push_back(values(c));
        return py::make_tuple(values(f.marginal), conds);
      },
      py::arg("alphas"), py::arg("axis") = "rows");
  m.def(
      "compose_dirichlet",
      [](const std::vector<double>& marginal, const std::vector<std::vector<double>>& conds, const std::string& axis) {
        std::vector<DirichletParams> c;
        for (const auto& v : conds) c.emplace_back(v);
        return compose_dirichlet(DirichletParams(marginal), c, parse_axis(axis)).alphas();
      },
      py::arg("marginal"), py::arg("conditionals"), py::arg("axis") = "rows");
  m.def(
      "verify_change_of_variables",
      [](const Eigen::MatrixXd& alphas, const Eigen::MatrixXd& table, const std::string& axis) {
        return verify_change_of_variables(TableDirichletParams(alphas), ProbTable(table), parse_axis(axis));
      },
      py::arg("alphas"), py::arg("table"), py::arg("axis") = "rows");

  // Hyper-Markov laws on 2 x 2 tables
  m.def(
      "cross_ratio_log_normalizer",
      [](const Eigen::Matrix2d& alphas, double lam) { return HyperMarkov2x2::cross_ratio_gaussian(alphas, lam).log_K(); },
      py::arg("alphas"), py::arg("lam"));
  m.def(
      "cross_ratio_log_density",
      [](const Eigen::Matrix2d& alphas, double lam, const Eigen::MatrixXd& table) {
        return log_density(HyperMarkov2x2::cross_ratio_gaussian(alphas, lam), ProbTable(table));
      },
      py::arg("alphas"), py::arg("lam"), py::arg("table"));
  m.def(
      "cross_ratio_sample",
      [](const Eigen::Matrix2d& alphas, double lam, std::size_t count, std::uint64_t seed) {
        Rng rng(seed);
        const auto batch = sample_many(HyperMarkov2x2::cross_ratio_gaussian(alphas, lam), count, rng);
        Eigen::MatrixXd out(static_cast<Eigen::Index>(count), 4);
        for (Eigen::Index i = 0; i < out.rows(); ++i) {
          const auto& t = batch.tables[static_cast<std::size_t>(i)];
          out.row(i) << t(0, 0), t(0, 1), t(1, 0), t(1, 1);
        }
        return py::make_tuple(out, batch.acceptance_rate());
      },
      py::arg("alphas"), py::arg("lam"), py::arg("count"), py::arg("seed"));

  // Gaussian networks
  m.def(
      "flip",
      [](const std::array<double, 5>& params, const std::string& direction) {
        return flip(gauss_from(params, direction)).as_array();
      },
      py::arg("params"), py::arg("direction") = "forward");
  m.def(
      "log_jacobian_factor",
      [](const std::array<double, 5>& forward) { return log_jacobian_factor(gauss_from(forward, "forward")); },
      py::arg("forward"));
  m.def(
      "normal_wishart_residual",
      [](const Eigen::Vector2d& mu0, double kappa, double nu, const Eigen::Matrix2d& T, const std::array<double, 5>& forward) {
        return eq8_residual(nw_factor_densities(nw_from(mu0, kappa, nu, T)), gauss_from(forward, "forward"));
      },
      py::arg("mu0"), py::arg("kappa"), py::arg("nu"), py::arg("T"), py::arg("forward"));

  // Network scoring
  m.def(
      "bde_log_score",
      [](const std::string& data_text, const std::string& structure, double ess) {
        const auto data = DiscreteDataset::parse_string(data_text);
        std::vector<std::string> names;
        for (const auto& v : data.variables()) names.push_back(v.name);
        return bde_log_score(NetworkStructure::parse(structure, names), data, BDePrior::uniform(data.variables(), ess));
      },
      py::arg("data"), py::arg("structure"), py::arg("ess") = 1.0);
  m.def(
      "joint_log_score",
      [](const std::string& data_text, double ess) {
        const auto data = DiscreteDataset::parse_string(data_text);
        return joint_log_score(data, BDePrior::uniform(data.variables(), ess));
      },
      py::arg("data"), py::arg("ess") = 1.0);
  m.def(
      "equivalent_database_score",
      [](const std::string& data_text, const std::string& prior_text, double ess) {
        const auto data = DiscreteDataset::parse_string(data_text);
        const auto de = DiscreteDataset::parse_string(prior_text);
        return equivalent_database_score(data, de, BDePrior::uniform(data.variables(), ess));
      },
      py::arg("data"), py::arg("equivalent_db"), py::arg("ess") = 1.0);

  // Independence testing
  m.def(
      "distance_correlation",
      [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
        return distance_correlation(SampleBlock(a, "a"), SampleBlock(b, "b"));
      },
      py::arg("a"), py::arg("b"));
  m.def(
      "permutation_test",
      [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, std::size_t n_perm, std::uint64_t seed) {
        PermutationOptions opts;
        opts.n_perm = n_perm;
        const auto r = permutation_test(SampleBlock(a, "a"), SampleBlock(b, "b"), opts, seed);
        py::dict d;
        d["statistic"] = r.statistic;
        d["p_value"] = r.p_value;
        d["permutations_run"] = r.permutations_run;
        d["exceedances"] = r.exceedances;
        return d;
      },
      py::arg("a"), py::arg("b"), py::arg("n_perm") = 999, py::arg("seed") = 0);

  // Verification suites
  m.def("suite_names", &suite_names);
  m.def(
      "run_suite",
      [](const std::string& suite, std::uint64_t seed, const std::map<std::string, double>& tolerances) {
        RunConfig cfg;
        cfg.seed = seed;
        cfg.tolerances = tolerances;
        return report_dict(run_suite(suite, cfg));
      },
      py::arg("suite"), py::arg("seed") = 0, py::arg("tolerances") = std::map<std::string, double>{});
}
