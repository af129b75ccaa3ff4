#pragma once

// Analytic-vs-simulation cross-checks bundled into named suites, one per
// pillar of the model: fixed-geometry capture, route capture probabilities,
// mean local delay, end-to-end delay, external interferer fields, and the
// grid-stabilized route. Each check compares a closed form against an
// independent Monte Carlo estimate (3 sigma) or asserts an exact ordering
// or diagnostic flag.

#include <string>
#include <vector>

#include "alohar/config.hpp"

namespace alohar {

struct CheckResult {
  std::string name;
  double expected = 0.0;  // analytic target (1 for boolean predicates)
  double observed = 0.0;  // MC estimate or predicate outcome
  double sigma = 0.0;     // MC standard error; 0 for exact predicates
  double z = 0.0;         // standardized deviation when sigma > 0
  bool pass = false;
};

struct SuiteResult {
  std::string suite;
  std::vector<CheckResult> checks;
  bool pass = false;
};

// Suite names accepted by run_validation_suite, in canonical order:
// fixed, capture, local-delay, e2e, fields, lattice.
const std::vector<std::string>& all_validation_suites();

// Runs one named suite with deterministic per-check substreams derived from
// cfg.seed. Unknown names throw std::invalid_argument.
SuiteResult run_validation_suite(const std::string& suite, const RunConfig& cfg);

// Human-readable report: one PASS/FAIL line per check with expected value,
// observed value, standard error and z-score, then a suite verdict line.
std::string format_suite_report(const SuiteResult& result);

}  // namespace alohar
