#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "dirichar/dirichlet.hpp"
#include "dirichar/indep.hpp"
#include "dirichar/random.hpp"
#include "dirichar/reparam.hpp"

namespace dirichar {

inline constexpr int kMissing = -1;

struct Variable {
  std::string name;
  int arity = 2;
  friend bool operator==(const Variable&, const Variable&) = default;
};

/// Cases over discrete variables; a cell is a value index or kMissing.
class DiscreteDataset {
 public:
  DiscreteDataset(std::vector<Variable> variables, std::vector<std::vector<int>> cases = {});

  const std::vector<Variable>& variables() const noexcept { return variables_; }
  const std::vector<std::vector<int>>& cases() const noexcept { return cases_; }
  std::size_t num_variables() const noexcept { return variables_.size(); }
  std::size_t num_cases() const noexcept { return cases_.size(); }
  /// Index of the named variable; throws DomainError if absent.
  std::size_t index_of(const std::string& name) const;
  bool is_complete() const noexcept;
  std::size_t missing_cells() const noexcept;
  /// This dataset's cases followed by `other`'s (same variables required).
  DiscreteDataset concatenated(const DiscreteDataset& other) const;

  /// Text format: a header line of `name:arity` declarations separated by
  /// commas, then one case per line with comma-separated value indices and
  /// `?` for a missing value. Blank lines are ignored.
  static DiscreteDataset parse(std::istream& in);
  static DiscreteDataset parse_string(const std::string& text);
  static DiscreteDataset read_file(const std::string& path);
  void write(std::ostream& out) const;

 private:
  std::vector<Variable> variables_;
  std::vector<std::vector<int>> cases_;
};

/// Directed acyclic graph over named nodes.
class NetworkStructure {
 public:
  NetworkStructure(std::vector<std::string> nodes,
                   std::vector<std::pair<std::string, std::string>> edges);
  /// Parses "a->b,c->b" over the given nodes; an empty spec is the empty graph.
  static NetworkStructure parse(const std::string& spec, std::vector<std::string> nodes);

  const std::vector<std::string>& nodes() const noexcept { return nodes_; }
  const std::vector<std::pair<std::string, std::string>>& edges() const noexcept { return edges_; }
  std::vector<std::string> parents(const std::string& node) const;
  bool has_node(const std::string& node) const;

 private:
  std::vector<std::string> nodes_;
  std::vector<std::pair<std::string, std::string>> edges_;
};

/// Equivalent sample size N and a strictly positive joint base table. The
/// base is indexed in mixed radix over the variables with the last variable
/// varying fastest. Joint Dirichlet exponents are N * base.
class BDePrior {
 public:
  BDePrior(std::vector<Variable> variables, double ess, std::vector<double> base);
  static BDePrior uniform(std::vector<Variable> variables, double ess = 1.0);

  const std::vector<Variable>& variables() const noexcept { return variables_; }
  double ess() const noexcept { return ess_; }
  const std::vector<double>& base() const noexcept { return base_; }
  double alpha(std::size_t joint_index) const { return ess_ * base_[joint_index]; }

 private:
  std::vector<Variable> variables_;
  double ess_;
  std::vector<double> base_;
};

/// Number of joint configurations and the mixed-radix index of a complete case.
std::size_t joint_size(const std::vector<Variable>& variables);
std::size_t joint_index(const std::vector<Variable>& variables, const std::vector<int>& values);

/// Dirichlet parameters of `node` for each parent configuration:
/// alpha(node = v | parents = c) = N * sum of base over joint configurations
/// consistent with (v, c). Parents are ordered by their position in the
/// prior's variable list, and parent configurations enumerate in mixed radix
/// with the last parent fastest.
std::vector<DirichletParams> modular_node_prior(const NetworkStructure& structure,
                                                const BDePrior& prior, const std::string& node);

/// log p(D | structure) with node priors from modular_node_prior. The
/// structure prior is uniform and left out.
double bde_log_score(const NetworkStructure& structure, const DiscreteDataset& data,
                     const BDePrior& prior);

/// log p(D) under a single Dirichlet(N * base) on the joint table.
double joint_log_score(const DiscreteDataset& data, const BDePrior& prior);

struct EquivalenceReport {
  double score_forward = 0.0;   // first variable -> second
  double score_reverse = 0.0;   // second -> first
  double score_joint = 0.0;
  double score_empty = 0.0;     // no edge
  double difference = 0.0;      // |forward - reverse|
};

/// Requires a complete two-variable dataset.
EquivalenceReport equivalence_check(const DiscreteDataset& data, const BDePrior& prior);

/// Largest number of missing cells handled by exact enumeration.
inline constexpr std::size_t kMaxMissingCells = 12;
/// Largest number of completions enumerated (reached with high arities).
inline constexpr std::size_t kMaxCompletions = std::size_t{1} << 20;

/// log p(D_e and D) under the joint Dirichlet(N * base), summing exactly over
/// all completions of D_e's missing cells.
double equivalent_database_score(const DiscreteDataset& real_data, const DiscreteDataset& d_e,
                                 const BDePrior& uninformative);

struct MixtureComponent {
  double weight;
  TableDirichletParams params;
};

/// Mixture of Dirichlet distributions over the joint table, arranged as
/// arity(first variable) rows by the product of the other arities columns.
class MixturePrior {
 public:
  MixturePrior(std::vector<Variable> variables, std::vector<MixtureComponent> components);
  const std::vector<Variable>& variables() const noexcept { return variables_; }
  const std::vector<MixtureComponent>& components() const noexcept { return components_; }

 private:
  std::vector<Variable> variables_;
  std::vector<MixtureComponent> components_;
};

/// One component per completion of D_e, weighted by that completion's
/// marginal likelihood, with parameters N * base + completion counts.
MixturePrior posterior_mixture(const DiscreteDataset& d_e, const BDePrior& uninformative);

/// log p(D) for complete D under a mixture prior on the joint table.
double mixture_log_score(const MixturePrior& mixture, const DiscreteDataset& data);

/// Draws one joint table from the mixture.
ProbTable sample_mixture(const MixturePrior& mixture, Rng& rng);

struct MixtureViolationReport {
  std::vector<PermutationTest> tests;  // theta_I vs theta_{J|i}, i = 1..k
  std::vector<std::string> labels;
  double threshold = 0.01;  // Bonferroni level alpha / k
  bool independence_rejected = false;
};

/// Samples tables from the mixture, decomposes them along rows, and tests
/// the row marginal against each row conditional.
MixtureViolationReport mixture_independence_violation(const MixturePrior& mixture,
                                                      std::size_t n_samples, Rng& rng,
                                                      std::size_t n_perm = 999, double alpha = 0.01);

}  // namespace dirichar
