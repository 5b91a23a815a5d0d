#include "dirichar/bn_scoring.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "dirichar/error.hpp"

namespace dirichar {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

void validate_variables(const std::vector<Variable>& vars) {
  std::set<std::string> seen;
  for (const auto& v : vars) {
    if (v.name.empty()) throw DomainError("variable name is empty");
    if (v.arity < 2) throw DomainError("variable '" + v.name + "' has arity below 2");
    if (!seen.insert(v.name).second) throw DomainError("variable '" + v.name + "' is declared twice");
  }
}

void validate_case(const std::vector<Variable>& vars, const std::vector<int>& c) {
  if (c.size() != vars.size()) {
    std::ostringstream msg;
    msg << "case has " << c.size() << " values, expected " << vars.size();
    throw DimensionError(msg.str());
  }
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c[i] == kMissing) continue;
    if (c[i] < 0 || c[i] >= vars[i].arity) {
      std::ostringstream msg;
      msg << "value " << c[i] << " of '" << vars[i].name << "' is outside 0.." << vars[i].arity - 1;
      throw DomainError(msg.str());
    }
  }
}

double lse_pair(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

// Pairwise tree reduction, so the result depends only on the term order.
double log_sum_exp(std::vector<double> terms) {
  if (terms.empty()) return -std::numeric_limits<double>::infinity();
  while (terms.size() > 1) {
    std::vector<double> next;
    next.reserve((terms.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < terms.size(); i += 2) next.push_back(lse_pair(terms[i], terms[i + 1]));
    if (terms.size() % 2 == 1) next.push_back(terms.back());
    terms.swap(next);
  }
  return terms.front();
}

// log of the Dirichlet-multinomial probability of a particular sequence
// with the given counts.
double dirichlet_multinomial(const std::vector<double>& alpha, const std::vector<double>& counts) {
  double a = 0.0, m = 0.0, s = 0.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    a += alpha[i];
    m += counts[i];
    if (counts[i] > 0.0) s += log_gamma(alpha[i] + counts[i]) - log_gamma(alpha[i]);
  }
  if (m == 0.0) return 0.0;
  return s + log_gamma(a) - log_gamma(a + m);
}

void require_same_variables(const std::vector<Variable>& a, const std::vector<Variable>& b) {
  if (a != b) throw DimensionError("dataset and prior declare different variables");
}

void require_complete(const DiscreteDataset& d) {
  if (!d.is_complete()) {
    std::ostringstream msg;
    msg << "dataset has " << d.missing_cells() << " missing cells; complete data required";
    throw CompletenessError(msg.str());
  }
}

std::vector<double> joint_counts(const DiscreteDataset& data) {
  std::vector<double> counts(joint_size(data.variables()), 0.0);
  for (const auto& c : data.cases()) counts[joint_index(data.variables(), c)] += 1.0;
  return counts;
}

std::vector<double> joint_alpha(const BDePrior& prior) {
  std::vector<double> a(prior.base().size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = prior.alpha(i);
  return a;
}

// Missing-cell enumeration over the incomplete cases of d_e. `visit` gets
// the joint index of every incomplete case under each completion, in
// mixed-radix order over the missing cells (last cell fastest).
struct Completions {
  std::vector<std::pair<std::size_t, std::size_t>> cells;  // (case, variable)
  std::vector<std::size_t> incomplete_cases;
  std::size_t count = 1;
};

Completions plan_completions(const DiscreteDataset& d_e) {
  Completions plan;
  for (std::size_t r = 0; r < d_e.num_cases(); ++r) {
    bool any = false;
    for (std::size_t v = 0; v < d_e.num_variables(); ++v) {
      if (d_e.cases()[r][v] == kMissing) {
        plan.cells.emplace_back(r, v);
        any = true;
      }
    }
    if (any) plan.incomplete_cases.push_back(r);
  }
  if (plan.cells.size() > kMaxMissingCells) {
    std::ostringstream msg;
    msg << plan.cells.size() << " missing cells exceed the enumeration limit of " << kMaxMissingCells;
    throw CapacityError(msg.str());
  }
  for (const auto& [r, v] : plan.cells) {
    plan.count *= static_cast<std::size_t>(d_e.variables()[v].arity);
    if (plan.count > kMaxCompletions) throw CapacityError("too many completions to enumerate");
  }
  return plan;
}

// Adds the counts of the completed incomplete cases for completion `k`.
void add_completion(const DiscreteDataset& d_e, const Completions& plan, std::size_t k,
                    std::vector<double>& counts) {
  std::vector<std::vector<int>> filled;
  filled.reserve(plan.incomplete_cases.size());
  std::map<std::size_t, std::size_t> slot;
  for (std::size_t r : plan.incomplete_cases) {
    slot[r] = filled.size();
    filled.push_back(d_e.cases()[r]);
  }
  std::size_t rem = k;
  for (std::size_t c = plan.cells.size(); c-- > 0;) {
    const auto [r, v] = plan.cells[c];
    const auto ar = static_cast<std::size_t>(d_e.variables()[v].arity);
    filled[slot[r]][v] = static_cast<int>(rem % ar);
    rem /= ar;
  }
  for (const auto& c : filled) counts[joint_index(d_e.variables(), c)] += 1.0;
}

std::vector<double> complete_case_counts(const DiscreteDataset& d) {
  std::vector<double> counts(joint_size(d.variables()), 0.0);
  for (const auto& c : d.cases()) {
    if (std::find(c.begin(), c.end(), kMissing) == c.end()) counts[joint_index(d.variables(), c)] += 1.0;
  }
  return counts;
}

}  // namespace

DiscreteDataset::DiscreteDataset(std::vector<Variable> variables, std::vector<std::vector<int>> cases)
    : variables_(std::move(variables)), cases_(std::move(cases)) {
  if (variables_.empty()) throw DomainError("dataset declares no variables");
  validate_variables(variables_);
  for (const auto& c : cases_) validate_case(variables_, c);
}

std::size_t DiscreteDataset::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    if (variables_[i].name == name) return i;
  }
  throw DomainError("unknown variable '" + name + "'");
}

bool DiscreteDataset::is_complete() const noexcept { return missing_cells() == 0; }

std::size_t DiscreteDataset::missing_cells() const noexcept {
  std::size_t n = 0;
  for (const auto& c : cases_) n += static_cast<std::size_t>(std::count(c.begin(), c.end(), kMissing));
  return n;
}

DiscreteDataset DiscreteDataset::concatenated(const DiscreteDataset& other) const {
  require_same_variables(variables_, other.variables_);
  auto cases = cases_;
  cases.insert(cases.end(), other.cases_.begin(), other.cases_.end());
  return DiscreteDataset(variables_, std::move(cases));
}

DiscreteDataset DiscreteDataset::parse(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  std::vector<Variable> vars;
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    if (trim(line).empty()) continue;
    for (const auto& decl : split(trim(line), ',')) {
      const auto colon = decl.find(':');
      if (colon == std::string::npos) throw ParseError(lineno, "expected name:arity, got '" + decl + "'");
      Variable v;
      v.name = trim(decl.substr(0, colon));
      const std::string ar = trim(decl.substr(colon + 1));
      const auto res = std::from_chars(ar.data(), ar.data() + ar.size(), v.arity);
      if (res.ec != std::errc() || res.ptr != ar.data() + ar.size()) {
        throw ParseError(lineno, "arity '" + ar + "' is not an integer");
      }
      vars.push_back(v);
    }
    try {
      validate_variables(vars);
    } catch (const Error& e) {
      throw ParseError(lineno, e.what());
    }
    break;
  }
  if (vars.empty()) throw ParseError(lineno == 0 ? 1 : lineno, "missing variable declarations");
  std::vector<std::vector<int>> cases;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto fields = split(trim(line), ',');
    if (fields.size() != vars.size()) {
      std::ostringstream msg;
      msg << "expected " << vars.size() << " values, got " << fields.size();
      throw ParseError(lineno, msg.str());
    }
    std::vector<int> c(vars.size());
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (fields[i] == "?") {
        c[i] = kMissing;
        continue;
      }
      const auto res = std::from_chars(fields[i].data(), fields[i].data() + fields[i].size(), c[i]);
      if (res.ec != std::errc() || res.ptr != fields[i].data() + fields[i].size()) {
        throw ParseError(lineno, "value '" + fields[i] + "' is not an integer or '?'");
      }
      if (c[i] < 0 || c[i] >= vars[i].arity) {
        std::ostringstream msg;
        msg << "value " << c[i] << " of '" << vars[i].name << "' is outside 0.." << vars[i].arity - 1;
        throw ParseError(lineno, msg.str());
      }
    }
    cases.push_back(std::move(c));
  }
  return DiscreteDataset(std::move(vars), std::move(cases));
}

DiscreteDataset DiscreteDataset::parse_string(const std::string& text) {
  std::istringstream in(text);
  return parse(in);
}

DiscreteDataset DiscreteDataset::read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  return parse(in);
}

void DiscreteDataset::write(std::ostream& out) const {
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    out << (i ? "," : "") << variables_[i].name << ':' << variables_[i].arity;
  }
  out << '\n';
  for (const auto& c : cases_) {
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (i) out << ',';
      if (c[i] == kMissing) {
        out << '?';
      } else {
        out << c[i];
      }
    }
    out << '\n';
  }
}

NetworkStructure::NetworkStructure(std::vector<std::string> nodes,
                                   std::vector<std::pair<std::string, std::string>> edges)
    : nodes_(std::move(nodes)), edges_(std::move(edges)) {
  std::map<std::string, std::size_t> idx;
  for (const auto& n : nodes_) {
    if (!idx.emplace(n, idx.size()).second) throw DomainError("node '" + n + "' is listed twice");
  }
  std::set<std::pair<std::string, std::string>> seen;
  std::vector<std::vector<std::size_t>> out(nodes_.size());
  std::vector<std::size_t> indeg(nodes_.size(), 0);
  for (const auto& [a, b] : edges_) {
    if (!idx.count(a) || !idx.count(b)) throw DomainError("edge " + a + "->" + b + " names an unknown node");
    if (a == b) throw DomainError("self-loop on '" + a + "'");
    if (!seen.insert({a, b}).second) throw DomainError("edge " + a + "->" + b + " is listed twice");
    out[idx[a]].push_back(idx[b]);
    ++indeg[idx[b]];
  }
  std::vector<std::size_t> ready;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (indeg[i] == 0) ready.push_back(i);
  }
  std::size_t visited = 0;
  while (!ready.empty()) {
    const std::size_t u = ready.back();
    ready.pop_back();
    ++visited;
    for (std::size_t v : out[u]) {
      if (--indeg[v] == 0) ready.push_back(v);
    }
  }
  if (visited != nodes_.size()) throw DomainError("structure contains a directed cycle");
}

NetworkStructure NetworkStructure::parse(const std::string& spec, std::vector<std::string> nodes) {
  std::vector<std::pair<std::string, std::string>> edges;
  const std::string s = trim(spec);
  if (!s.empty()) {
    for (const auto& e : split(s, ',')) {
      const auto arrow = e.find("->");
      if (arrow == std::string::npos) throw DomainError("edge '" + e + "' is not of the form a->b");
      edges.emplace_back(trim(e.substr(0, arrow)), trim(e.substr(arrow + 2)));
    }
  }
  return NetworkStructure(std::move(nodes), std::move(edges));
}

std::vector<std::string> NetworkStructure::parents(const std::string& node) const {
  if (!has_node(node)) throw DomainError("unknown node '" + node + "'");
  std::vector<std::string> out;
  for (const auto& [a, b] : edges_) {
    if (b == node) out.push_back(a);
  }
  return out;
}

bool NetworkStructure::has_node(const std::string& node) const {
  return std::find(nodes_.begin(), nodes_.end(), node) != nodes_.end();
}

std::size_t joint_size(const std::vector<Variable>& variables) {
  std::size_t s = 1;
  for (const auto& v : variables) s *= static_cast<std::size_t>(v.arity);
  return s;
}

std::size_t joint_index(const std::vector<Variable>& variables, const std::vector<int>& values) {
  std::size_t idx = 0;
  for (std::size_t i = 0; i < variables.size(); ++i) {
    if (values[i] == kMissing) throw CompletenessError("case has a missing value");
    idx = idx * static_cast<std::size_t>(variables[i].arity) + static_cast<std::size_t>(values[i]);
  }
  return idx;
}

BDePrior::BDePrior(std::vector<Variable> variables, double ess, std::vector<double> base)
    : variables_(std::move(variables)), ess_(ess), base_(std::move(base)) {
  validate_variables(variables_);
  if (!(ess_ > 0.0) || !std::isfinite(ess_)) throw DomainError("equivalent sample size must be positive");
  if (base_.size() != joint_size(variables_)) {
    std::ostringstream msg;
    msg << "base has " << base_.size() << " entries, expected " << joint_size(variables_);
    throw DimensionError(msg.str());
  }
  double s = 0.0;
  for (double b : base_) {
    if (!(b > 0.0) || !std::isfinite(b)) throw DomainError("base entries must be positive");
    s += b;
  }
  if (std::abs(s - 1.0) > 1e-12) throw DomainError("base entries must sum to 1");
}

BDePrior BDePrior::uniform(std::vector<Variable> variables, double ess) {
  const std::size_t n = joint_size(variables);
  return BDePrior(std::move(variables), ess, std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

namespace {

// Prior variable indices of the node's parents, in prior order.
std::vector<std::size_t> parent_indices(const NetworkStructure& s, const std::vector<Variable>& vars,
                                        const std::string& node) {
  std::vector<std::size_t> out;
  for (const auto& p : s.parents(node)) {
    const auto it = std::find_if(vars.begin(), vars.end(), [&](const Variable& v) { return v.name == p; });
    if (it == vars.end()) throw DomainError("parent '" + p + "' is not a prior variable");
    out.push_back(static_cast<std::size_t>(it - vars.begin()));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t variable_index(const std::vector<Variable>& vars, const std::string& node) {
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (vars[i].name == node) return i;
  }
  throw DomainError("node '" + node + "' is not a prior variable");
}

std::size_t parent_config(const std::vector<Variable>& vars, const std::vector<std::size_t>& parents,
                          const std::vector<int>& values) {
  std::size_t c = 0;
  for (std::size_t p : parents) {
    c = c * static_cast<std::size_t>(vars[p].arity) + static_cast<std::size_t>(values[p]);
  }
  return c;
}

}  // namespace

std::vector<DirichletParams> modular_node_prior(const NetworkStructure& structure,
                                                const BDePrior& prior, const std::string& node) {
  const auto& vars = prior.variables();
  const std::size_t x = variable_index(vars, node);
  const std::vector<std::size_t> pa = parent_indices(structure, vars, node);
  std::size_t configs = 1;
  for (std::size_t p : pa) configs *= static_cast<std::size_t>(vars[p].arity);
  const auto ax = static_cast<std::size_t>(vars[x].arity);
  std::vector<std::vector<double>> acc(configs, std::vector<double>(ax, 0.0));
  const std::size_t total = joint_size(vars);
  std::vector<int> values(vars.size(), 0);
  for (std::size_t j = 0; j < total; ++j) {
    acc[parent_config(vars, pa, values)][static_cast<std::size_t>(values[x])] += prior.alpha(j);
    for (std::size_t i = vars.size(); i-- > 0;) {
      if (++values[i] < vars[i].arity) break;
      values[i] = 0;
    }
  }
  std::vector<DirichletParams> out;
  out.reserve(configs);
  for (auto& a : acc) out.emplace_back(std::move(a));
  return out;
}

double bde_log_score(const NetworkStructure& structure, const DiscreteDataset& data,
                     const BDePrior& prior) {
  require_same_variables(data.variables(), prior.variables());
  require_complete(data);
  const auto& vars = prior.variables();
  if (structure.nodes().size() != vars.size()) throw DimensionError("structure and data differ in variables");
  for (const auto& v : vars) {
    if (!structure.has_node(v.name)) throw DimensionError("structure lacks node '" + v.name + "'");
  }
  double score = 0.0;
  for (std::size_t x = 0; x < vars.size(); ++x) {
    const auto params = modular_node_prior(structure, prior, vars[x].name);
    const auto pa = parent_indices(structure, vars, vars[x].name);
    const auto ax = static_cast<std::size_t>(vars[x].arity);
    std::vector<std::vector<double>> counts(params.size(), std::vector<double>(ax, 0.0));
    for (const auto& c : data.cases()) counts[parent_config(vars, pa, c)][static_cast<std::size_t>(c[x])] += 1.0;
    for (std::size_t k = 0; k < params.size(); ++k) {
      const std::vector<double> alpha(params[k].alphas().begin(), params[k].alphas().end());
      score += dirichlet_multinomial(alpha, counts[k]);
    }
  }
  return score;
}

double joint_log_score(const DiscreteDataset& data, const BDePrior& prior) {
  require_same_variables(data.variables(), prior.variables());
  require_complete(data);
  return dirichlet_multinomial(joint_alpha(prior), joint_counts(data));
}

EquivalenceReport equivalence_check(const DiscreteDataset& data, const BDePrior& prior) {
  if (data.num_variables() != 2) throw DimensionError("equivalence check needs exactly two variables");
  const std::string s = data.variables()[0].name, t = data.variables()[1].name;
  const std::vector<std::string> nodes{s, t};
  EquivalenceReport r;
  r.score_forward = bde_log_score(NetworkStructure(nodes, {{s, t}}), data, prior);
  r.score_reverse = bde_log_score(NetworkStructure(nodes, {{t, s}}), data, prior);
  r.score_empty = bde_log_score(NetworkStructure(nodes, {}), data, prior);
  r.score_joint = joint_log_score(data, prior);
  r.difference = std::abs(r.score_forward - r.score_reverse);
  return r;
}

double equivalent_database_score(const DiscreteDataset& real_data, const DiscreteDataset& d_e,
                                 const BDePrior& uninformative) {
  require_same_variables(real_data.variables(), uninformative.variables());
  require_same_variables(d_e.variables(), uninformative.variables());
  require_complete(real_data);
  const Completions plan = plan_completions(d_e);
  const std::vector<double> alpha = joint_alpha(uninformative);
  std::vector<double> fixed = complete_case_counts(d_e);
  const std::vector<double> real = joint_counts(real_data);
  for (std::size_t i = 0; i < fixed.size(); ++i) fixed[i] += real[i];
  std::vector<double> terms(plan.count);
  for (std::size_t k = 0; k < plan.count; ++k) {
    std::vector<double> counts = fixed;
    add_completion(d_e, plan, k, counts);
    terms[k] = dirichlet_multinomial(alpha, counts);
  }
  return log_sum_exp(std::move(terms));
}

MixturePrior::MixturePrior(std::vector<Variable> variables, std::vector<MixtureComponent> components)
    : variables_(std::move(variables)), components_(std::move(components)) {
  validate_variables(variables_);
  if (variables_.size() < 2) throw DimensionError("a mixture over tables needs at least two variables");
  if (components_.empty()) throw DomainError("mixture has no components");
  const auto k = static_cast<Eigen::Index>(variables_.front().arity);
  const auto n = static_cast<Eigen::Index>(joint_size(variables_) / static_cast<std::size_t>(k));
  double s = 0.0;
  for (const auto& c : components_) {
    if (!(c.weight > 0.0)) throw DomainError("mixture weights must be positive");
    if (c.params.rows() != k || c.params.cols() != n) throw DimensionError("component shape mismatch");
    s += c.weight;
  }
  if (std::abs(s - 1.0) > 1e-12) throw DomainError("mixture weights must sum to 1");
}

MixturePrior posterior_mixture(const DiscreteDataset& d_e, const BDePrior& uninformative) {
  require_same_variables(d_e.variables(), uninformative.variables());
  const auto& vars = uninformative.variables();
  if (vars.size() < 2) throw DimensionError("a mixture over tables needs at least two variables");
  const Completions plan = plan_completions(d_e);
  const std::vector<double> alpha = joint_alpha(uninformative);
  const std::vector<double> fixed = complete_case_counts(d_e);
  const auto k = static_cast<Eigen::Index>(vars.front().arity);
  const auto n = static_cast<Eigen::Index>(alpha.size() / static_cast<std::size_t>(k));
  std::vector<double> log_w(plan.count);
  std::vector<Eigen::MatrixXd> params;
  params.reserve(plan.count);
  for (std::size_t c = 0; c < plan.count; ++c) {
    std::vector<double> counts = fixed;
    add_completion(d_e, plan, c, counts);
    log_w[c] = dirichlet_multinomial(alpha, counts);
    Eigen::MatrixXd m(k, n);
    for (Eigen::Index i = 0; i < k; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        const auto x = static_cast<std::size_t>(i * n + j);
        m(i, j) = alpha[x] + counts[x];
      }
    }
    params.push_back(std::move(m));
  }
  const double total = log_sum_exp(log_w);
  std::vector<MixtureComponent> comps;
  comps.reserve(plan.count);
  double wsum = 0.0;
  for (std::size_t c = 0; c < plan.count; ++c) {
    comps.push_back({std::exp(log_w[c] - total), TableDirichletParams(std::move(params[c]))});
    wsum += comps.back().weight;
  }
  for (auto& c : comps) c.weight /= wsum;
  return MixturePrior(vars, std::move(comps));
}

double mixture_log_score(const MixturePrior& mixture, const DiscreteDataset& data) {
  require_same_variables(data.variables(), mixture.variables());
  require_complete(data);
  const std::vector<double> counts = joint_counts(data);
  std::vector<double> terms;
  terms.reserve(mixture.components().size());
  for (const auto& c : mixture.components()) {
    const auto& m = c.params.alphas();
    std::vector<double> alpha(counts.size());
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) alpha[static_cast<std::size_t>(i * m.cols() + j)] = m(i, j);
    }
    terms.push_back(std::log(c.weight) + dirichlet_multinomial(alpha, counts));
  }
  return log_sum_exp(std::move(terms));
}

ProbTable sample_mixture(const MixturePrior& mixture, Rng& rng) {
  const auto& comps = mixture.components();
  const double u = rng.uniform();
  std::size_t pick = comps.size() - 1;
  double cum = 0.0;
  for (std::size_t i = 0; i < comps.size(); ++i) {
    cum += comps[i].weight;
    if (u < cum) {
      pick = i;
      break;
    }
  }
  const TableDirichletParams& p = comps[pick].params;
  const SimplexPoint draw = sample(p.flattened(), rng);
  Eigen::MatrixXd m(p.rows(), p.cols());
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    for (Eigen::Index j = 0; j < p.cols(); ++j) m(i, j) = draw[static_cast<std::size_t>(i * p.cols() + j)];
  }
  return ProbTable(std::move(m));
}

MixtureViolationReport mixture_independence_violation(const MixturePrior& mixture,
                                                      std::size_t n_samples, Rng& rng,
                                                      std::size_t n_perm, double alpha) {
  std::vector<SimplexPoint> marginals;
  std::vector<std::vector<SimplexPoint>> conditionals;
  marginals.reserve(n_samples);
  for (std::size_t s = 0; s < n_samples; ++s) {
    Decomposition d = decompose_table(sample_mixture(mixture, rng), Axis::Rows);
    if (conditionals.empty()) conditionals.resize(d.conditionals.size());
    marginals.push_back(std::move(d.marginal));
    for (std::size_t i = 0; i < d.conditionals.size(); ++i) conditionals[i].push_back(std::move(d.conditionals[i]));
  }
  const SampleBlock marginal = SampleBlock::from_simplex_points(marginals, "theta_I");
  MixtureViolationReport rep;
  rep.threshold = alpha / static_cast<double>(conditionals.size());
  PermutationOptions opts;
  opts.n_perm = n_perm;
  for (std::size_t i = 0; i < conditionals.size(); ++i) {
    const std::string label = "theta_J|" + std::to_string(i + 1);
    const SampleBlock cond = SampleBlock::from_simplex_points(conditionals[i], label);
    rep.tests.push_back(permutation_test(marginal, cond, opts, rng.next_u64()));
    rep.labels.push_back("theta_I vs " + label);
    if (rep.tests.back().p_value <= rep.threshold) rep.independence_rejected = true;
  }
  return rep;
}

}  // namespace dirichar
