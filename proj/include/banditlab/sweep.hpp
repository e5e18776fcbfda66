#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "banditlab/algorithms.hpp"

namespace banditlab {

/// One log-spaced stretch of the budget grid. Bounds are in pulls, or in
/// units of t * delta^2 when `regime_units` is set.
struct LogSegment {
  double lo = 1.0;
  double hi = 1.0;
  int points = 2;
  bool regime_units = false;
};

struct BudgetGrid {
  std::vector<std::int64_t> explicit_values;
  std::vector<LogSegment> segments;
};

/// Sorted, deduplicated budgets for one gap value.
std::vector<std::int64_t> resolve_budgets(const BudgetGrid& grid, double delta);

enum class Regime { first_linear, quadratic, second_linear };

/// first_linear for t delta^2 <= 1, quadratic up to ln n, second_linear above.
Regime classify_regime(double t_delta_sq, int arms);

struct TrialPolicy {
  std::int64_t base = 10000;
  /// Scale trials by (ln n)^2 / f(t delta^2), where f follows the predicted
  /// growth of the mutual information in each regime; clamped to [base, cap].
  bool auto_scale = false;
  std::int64_t cap = 1000000;
  std::optional<std::int64_t> first_linear;
  std::optional<std::int64_t> quadratic;
  std::optional<std::int64_t> second_linear;
};

std::int64_t trials_for(const TrialPolicy& policy, std::int64_t budget, double delta, int arms);

struct SweepConfig {
  AlgorithmConfig algorithm;  // budget is overwritten per cell
  std::vector<int> arms;
  std::vector<double> deltas;
  BudgetGrid budgets;
  TrialPolicy trials;
  std::uint64_t seed = 0;
  bool success = true;
  bool mutual_info = true;
  std::string output;  // empty: caller decides
  int jobs = 1;

  /// Throws std::invalid_argument on empty lists or out-of-range values.
  void validate() const;
};

/// Parses the JSON config format. Unknown keys are rejected.
SweepConfig sweep_config_from_json(const nlohmann::json& doc);
nlohmann::json sweep_config_to_json(const SweepConfig& cfg);

struct SweepRow {
  std::string alg;
  std::string model;
  int n = 0;
  double delta = 0.0;
  std::int64_t t = 0;
  std::int64_t trials = 0;
  std::uint64_t seed = 0;
  double p_hat = 0.0;
  double p_se = 0.0;
  double i_hat = 0.0;
  double i_se = 0.0;
  double mean_pulls = 0.0;
  double t_delta_sq = 0.0;
  /// Empty for a healthy cell. Failed cells carry NaN estimates.
  std::string error;

  bool ok() const noexcept { return error.empty(); }
};

using SweepProgress = std::function<void(const SweepRow&, std::size_t done, std::size_t total)>;

/// One row per (n, delta, t) cell in that nesting order. Cells that fail are
/// emitted with NaN estimates and an error message; the sweep continues.
/// Metrics that were not requested are NaN.
std::vector<SweepRow> run_sweep(const SweepConfig& cfg, const SweepProgress& progress = {});

inline constexpr std::string_view kCsvHeader =
    "alg,model,n,delta,t,trials,seed,p_hat,p_se,i_hat,i_se,mean_pulls,t_delta_sq";

/// Header line plus one line per row; reals use 17 significant digits.
void write_csv(std::ostream& out, std::span<const SweepRow> rows);
/// Inverse of write_csv. Throws std::runtime_error on a malformed file.
std::vector<SweepRow> read_csv(std::istream& in);

/// Least-squares slope of ln(value) against ln(t) over points with
/// lo <= t <= hi and value > 0. Throws std::invalid_argument with fewer than
/// three such points.
double fit_loglog_slope(std::span<const std::pair<double, double>> points, double lo, double hi);

}  // namespace banditlab
