#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace banditlab {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  std::uint64_t seed = 20240611;
  int jobs = 1;
  /// Called after each criterion finishes (for streaming output).
  std::function<void(const CriterionResult&)> on_result;
  /// Free-form progress lines from long-running criteria.
  std::function<void(const std::string&)> on_progress;
};

/// delta1, oracle, lemma1, phases, fano, separation, toolkit, all.
std::vector<std::string_view> acceptance_suites();

/// Criterion ids covered by a suite. Throws std::invalid_argument for unknown names.
std::vector<int> suite_criteria(std::string_view suite);

/// Runs the criteria of a suite in id order. Criteria 4 to 6 share one sweep.
std::vector<CriterionResult> run_acceptance(std::string_view suite, const AcceptanceOptions& options = {});

}  // namespace banditlab
