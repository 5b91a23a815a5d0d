#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace dirichar {

/// How a measured value is compared with its threshold.
enum class Relation { Below, Above };

struct Check {
  std::string name;
  std::string anchor;  // the identity or claim being checked
  double value = 0.0;
  double threshold = 0.0;
  Relation relation = Relation::Below;
  bool passed = false;
};

struct RunConfig {
  std::uint64_t seed = 0;
  /// Threshold overrides keyed by check name.
  std::map<std::string, double> tolerances;
  int verbosity = 0;
};

struct SuiteReport {
  std::string suite;
  std::uint64_t seed = 0;
  std::vector<Check> checks;
  bool all_passed() const;
};

/// Names accepted by run_suite: lemma1, funceq, hypermarkov, gaussian, appendix.
const std::vector<std::string>& suite_names();

/// Runs one verification suite. Throws DomainError for an unknown suite name
/// or an override naming a check the suite does not have.
SuiteReport run_suite(const std::string& suite, const RunConfig& config);

}  // namespace dirichar
