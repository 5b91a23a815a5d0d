#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "dirichar/bn_scoring.hpp"
#include "dirichar/dirichlet.hpp"
#include "dirichar/error.hpp"
#include "dirichar/gaussian_net.hpp"
#include "dirichar/hyper_markov.hpp"
#include "dirichar/random.hpp"
#include "dirichar/verify.hpp"

namespace dirichar::cli {
namespace {

using Json = nlohmann::ordered_json;

constexpr const char* kToolName = "dirichar";
constexpr const char* kVersion = "0.1.0";

constexpr const char* kConventions =
    "Conventions:\n"
    "  All logarithms and log scores are natural logarithms.\n"
    "  Wishart: W is a 2x2 precision matrix with density proportional to\n"
    "  |W|^((nu - 3) / 2) exp(-tr(T W) / 2), and mu | W ~ N(mu0, (kappa W)^-1).\n"
    "\n"
    "Exit status: 0 when every check passes, 1 when a check fails,\n"
    "2 on usage, input or parameter errors.\n";

// Errors that map to exit status 2 after a message.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string utc_timestamp() {
  auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Json header() {
  return Json{{"tool", kToolName}, {"version", kVersion}, {"timestamp", utc_timestamp()}};
}

Json check_json(const Check& c) {
  return Json{{"name", c.name},
              {"anchor", c.anchor},
              {"value", c.value},
              {"threshold", c.threshold},
              {"relation", c.relation == Relation::Below ? "below" : "above"},
              {"status", c.passed ? "pass" : "fail"}};
}

std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<double> parse_reals(const std::string& text, const std::string& flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      double v = std::stod(item, &used);
      while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::logic_error&) {
      throw UsageError(flag + ": '" + item + "' is not a number");
    }
  }
  return out;
}

std::map<std::string, double> parse_tolerances(const std::vector<std::string>& specs) {
  std::map<std::string, double> out;
  for (const auto& s : specs) {
    auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("--tol expects name=value, got '" + s + "'");
    auto vals = parse_reals(s.substr(eq + 1), "--tol " + s.substr(0, eq));
    if (vals.size() != 1) throw UsageError("--tol expects a single value, got '" + s + "'");
    out[s.substr(0, eq)] = vals[0];
  }
  return out;
}

// Writes `text` to `path`, or to `fallback` when no path was given.
void emit(const std::string& text, const std::string& path, std::ostream& fallback) {
  if (path.empty()) {
    fallback << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw UsageError("failed writing '" + path + "'");
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------

struct VerifyArgs {
  std::string suite;
  std::uint64_t seed = 0;
  std::string out;
  std::vector<std::string> tol;
  int verbosity = 0;
};

int cmd_verify(const VerifyArgs& a, std::ostream& out, std::ostream& err) {
  const auto& names = suite_names();
  if (std::find(names.begin(), names.end(), a.suite) == names.end()) {
    std::string list;
    for (const auto& n : names) list += (list.empty() ? "" : ", ") + n;
    throw UsageError("unknown suite '" + a.suite + "' (expected one of " + list + ")");
  }
  RunConfig cfg;
  cfg.seed = a.seed;
  cfg.tolerances = parse_tolerances(a.tol);
  cfg.verbosity = a.verbosity;

  SuiteReport rep;
  try {
    rep = run_suite(a.suite, cfg);
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }

  Json checks = Json::array();
  for (const auto& c : rep.checks) {
    checks.push_back(check_json(c));
    if (a.verbosity > 0)
      err << (c.passed ? "PASS " : "FAIL ") << c.name << " value=" << format_real(c.value)
          << " threshold=" << format_real(c.threshold) << "\n";
  }
  Json j{{"header", header()},
         {"command", "verify"},
         {"suite", rep.suite},
         {"seed", rep.seed},
         {"status", rep.all_passed() ? "pass" : "fail"},
         {"checks", checks}};
  emit(dump(j), a.out, out);
  return rep.all_passed() ? kExitOk : kExitCheckFailed;
}

// ---------------------------------------------------------------------------

struct ScoreArgs {
  std::string data;
  std::string structure;
  double ess = 1.0;
  std::string base;
  bool equivalence = false;
  std::string equivalent_db;
  std::string out;
  std::vector<std::string> tol;
};

BDePrior make_prior(const std::vector<Variable>& vars, double ess, const std::string& base_path) {
  if (base_path.empty()) return BDePrior::uniform(vars, ess);
  std::ifstream f(base_path);
  if (!f) throw UsageError("cannot open base table '" + base_path + "'");
  std::vector<double> base;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) {
      try {
        std::size_t used = 0;
        base.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::logic_error&) {
        throw ParseError(lineno, "'" + tok + "' is not a number");
      }
    }
  }
  if (base.size() != joint_size(vars))
    throw DimensionError("base table has " + std::to_string(base.size()) + " entries, expected " +
                         std::to_string(joint_size(vars)));
  double total = 0.0;
  for (double b : base) {
    if (!(b > 0.0) || !std::isfinite(b)) throw DomainError("base table entries must be positive");
    total += b;
  }
  for (double& b : base) b /= total;
  return BDePrior(vars, ess, std::move(base));
}

int cmd_score(const ScoreArgs& a, std::ostream& out, std::ostream&) {
  auto tolerances = parse_tolerances(a.tol);
  const double equiv_threshold = [&] {
    auto it = tolerances.find("score_equivalence");
    if (it != tolerances.end()) {
      tolerances.erase(it);
      return it->second;
    }
    return 1e-10;
  }();
  if (!tolerances.empty()) throw UsageError("unknown check '" + tolerances.begin()->first + "' in --tol");
  if (!a.equivalent_db.empty() && (a.equivalence || !a.structure.empty()))
    throw UsageError("--equivalent-db scores the joint table and takes neither --structure nor --equivalence");

  auto data = DiscreteDataset::read_file(a.data);
  auto prior = make_prior(data.variables(), a.ess, a.base);

  Json j{{"header", header()}, {"command", "score"}, {"data", a.data}, {"ess", a.ess}};
  Json checks = Json::array();
  bool ok = true;

  if (!a.equivalent_db.empty()) {
    auto d_e = DiscreteDataset::read_file(a.equivalent_db);
    if (!(d_e.variables() == data.variables()))
      throw UsageError("equivalent database declares different variables than the data");
    if (!data.is_complete()) throw CompletenessError("data must be complete; only the equivalent database may have missing values");
    DiscreteDataset none(data.variables());
    double prior_only = equivalent_database_score(none, d_e, prior);
    double combined = equivalent_database_score(data, d_e, prior);
    j["equivalent_db"] = a.equivalent_db;
    j["missing_cells"] = d_e.missing_cells();
    j["log_score"] = combined - prior_only;
    j["equivalent_db_log_score"] = prior_only;
    j["combined_log_score"] = combined;
  } else {
    if (!data.is_complete())
      throw CompletenessError("data has " + std::to_string(data.missing_cells()) +
                              " missing cells; use --equivalent-db to score an incomplete prior database");
    std::vector<std::string> names;
    for (const auto& v : data.variables()) names.push_back(v.name);
    auto structure = NetworkStructure::parse(a.structure, names);
    double score = bde_log_score(structure, data, prior);
    j["structure"] = a.structure;
    j["log_score"] = score;
    if (a.equivalence) {
      if (data.num_variables() != 2 || structure.edges().size() != 1)
        throw UsageError("--equivalence needs two variables and a structure with one edge");
      auto [s, t] = structure.edges().front();
      NetworkStructure paired(names, {{t, s}});
      double paired_score = bde_log_score(paired, data, prior);
      Check c;
      c.name = "score_equivalence";
      c.anchor = "equivalent structures receive equal scores";
      c.value = std::abs(score - paired_score);
      c.threshold = equiv_threshold;
      c.relation = Relation::Below;
      c.passed = c.value < c.threshold;
      ok = c.passed;
      j["paired_structure"] = t + "->" + s;
      j["paired_log_score"] = paired_score;
      j["difference"] = score - paired_score;
      checks.push_back(check_json(c));
    }
  }
  j["status"] = ok ? "pass" : "fail";
  j["checks"] = checks;
  emit(dump(j), a.out, out);
  return ok ? kExitOk : kExitCheckFailed;
}

// ---------------------------------------------------------------------------

struct SampleArgs {
  std::string law;
  std::size_t samples = 1000;
  std::uint64_t seed = 0;
  std::string out;
  std::string report;
  std::string alpha;
  double lambda = 1.0;
  std::string mu0 = "0,0";
  double kappa = 1.0;
  double nu = 3.0;
  std::string t = "1,0,0,1";
};

void csv_row(std::string& buf, std::span<const double> xs) {
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) buf += ',';
    buf += format_real(xs[i]);
  }
  buf += '\n';
}

int cmd_sample(const SampleArgs& a, std::ostream& out, std::ostream& err) {
  Rng rng(a.seed);
  std::string csv;
  Json params;
  Json j{{"header", header()}, {"command", "sample"}, {"law", a.law}, {"seed", a.seed},
         {"samples", a.samples}};

  try {
    if (a.law == "dirichlet") {
      auto alphas = parse_reals(a.alpha.empty() ? "1,1,1" : a.alpha, "--alpha");
      DirichletParams dp(alphas);
      params["alpha"] = alphas;
      for (std::size_t i = 0; i < alphas.size(); ++i) csv += (i ? ",phi" : "phi") + std::to_string(i + 1);
      csv += '\n';
      for (std::size_t s = 0; s < a.samples; ++s) csv_row(csv, sample(dp, rng).values());
    } else if (a.law == "hypermarkov") {
      auto alphas = parse_reals(a.alpha.empty() ? "1,1,1,1" : a.alpha, "--alpha");
      if (alphas.size() != 4) throw DimensionError("--alpha needs four exponents (row-major 2x2)");
      Eigen::Matrix2d am;
      am << alphas[0], alphas[1], alphas[2], alphas[3];
      auto law = HyperMarkov2x2::cross_ratio_gaussian(am, a.lambda);
      params["alpha"] = alphas;
      params["lambda"] = a.lambda;
      auto batch = sample_many(law, a.samples, rng);
      csv += "theta11,theta12,theta21,theta22\n";
      for (const auto& tab : batch.tables) {
        const auto& e = tab.entries();
        double row[4] = {e(0, 0), e(0, 1), e(1, 0), e(1, 1)};
        csv_row(csv, row);
      }
      j["proposals"] = batch.proposals;
      j["acceptance_rate"] = batch.acceptance_rate();
      err << "acceptance rate " << format_real(batch.acceptance_rate()) << " (" << batch.tables.size()
          << " of " << batch.proposals << " proposals)\n";
    } else {
      auto mu = parse_reals(a.mu0, "--mu0");
      auto tv = parse_reals(a.t, "--T");
      if (mu.size() != 2) throw DimensionError("--mu0 needs two values");
      if (tv.size() != 4) throw DimensionError("--T needs four values (row-major 2x2)");
      NormalWishart nw;
      nw.mu0 << mu[0], mu[1];
      nw.kappa = a.kappa;
      nw.nu = a.nu;
      nw.T << tv[0], tv[1], tv[2], tv[3];
      nw.validate();
      params["mu0"] = mu;
      params["kappa"] = a.kappa;
      params["nu"] = a.nu;
      params["T"] = tv;
      csv += "m1,v1,m2_given_1,b12,v2_given_1\n";
      for (std::size_t s = 0; s < a.samples; ++s) {
        auto row = forward_params(sample_normal_wishart(nw, rng)).as_array();
        csv_row(csv, row);
      }
    }
  } catch (const DomainError& e) {
    throw UsageError(std::string("invalid parameters: ") + e.what());
  } catch (const DimensionError& e) {
    throw UsageError(std::string("invalid parameters: ") + e.what());
  } catch (const ConsistencyError& e) {
    throw UsageError(std::string("invalid parameters: ") + e.what());
  }

  emit(csv, a.out, out);
  j["parameters"] = params;
  j["output"] = a.out.empty() ? "-" : a.out;
  j["status"] = "pass";
  j["checks"] = Json::array();
  if (!a.report.empty()) emit(dump(j), a.report, out);
  else if (!a.out.empty()) out << dump(j);
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dirichlet parameter-independence toolkit: verification suites, BDe scoring, samplers.",
               kToolName};
  app.footer(kConventions);
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "Run a verification suite and write a JSON report");
  verify->add_option("suite", va.suite, "lemma1, funceq, hypermarkov, gaussian or appendix")->required();
  verify->add_option("--seed", va.seed, "Master seed (default 0)");
  verify->add_option("--out", va.out, "Report path (default stdout)");
  verify->add_option("--tol", va.tol, "Threshold override, name=value (repeatable)");
  verify->add_flag("-v,--verbose", va.verbosity, "Print one line per check to stderr");

  ScoreArgs sa;
  auto* score = app.add_subcommand("score", "Log marginal likelihood of discrete data (natural log)");
  score->add_option("data", sa.data, "Dataset file (header name:arity,...; '?' marks missing)")->required();
  score->add_option("--structure", sa.structure, "Edges such as \"a->b,c->b\" (default: no edges)");
  score->add_option("--ess", sa.ess, "Equivalent sample size N (default 1)");
  score->add_option("--base", sa.base,
                    "Joint base table, one positive value per configuration, last variable fastest; rescaled to sum to one");
  score->add_flag("--equivalence", sa.equivalence, "Also score the reversed edge of a two-variable structure");
  score->add_option("--equivalent-db", sa.equivalent_db,
                    "Prior database (may be incomplete); scores the data given it under the joint model");
  score->add_option("--out", sa.out, "Report path (default stdout)");
  score->add_option("--tol", sa.tol, "Threshold override, name=value");

  SampleArgs pa;
  auto* samp = app.add_subcommand("sample", "Draw samples and write them as CSV");
  samp->add_option("law", pa.law, "dirichlet, hypermarkov or normalwishart")
      ->required()
      ->check(CLI::IsMember({"dirichlet", "hypermarkov", "normalwishart"}));
  samp->add_option("--samples", pa.samples, "Number of draws (default 1000)");
  samp->add_option("--seed", pa.seed, "Seed (default 0)");
  samp->add_option("--out", pa.out, "CSV path (default stdout)");
  samp->add_option("--report", pa.report, "JSON report path (default stdout when --out is set)");
  samp->add_option("--alpha", pa.alpha, "Exponents, comma separated (2x2 row-major for hypermarkov)");
  samp->add_option("--lambda", pa.lambda, "Cross-ratio modulator H(r) = exp(-lambda ln(r)^2) (default 1)");
  samp->add_option("--mu0", pa.mu0, "Normal-Wishart location (default 0,0)");
  samp->add_option("--kappa", pa.kappa, "Normal-Wishart mean precision scale (default 1)");
  samp->add_option("--nu", pa.nu, "Wishart degrees of freedom (default 3)");
  samp->add_option("--T", pa.t, "Wishart scale matrix, row-major (default 1,0,0,1)");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*verify) return cmd_verify(va, out, err);
    if (*score) return cmd_score(sa, out, err);
    return cmd_sample(pa, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return kExitUsage;
}

}  // namespace dirichar::cli
