#include "banditlab/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "banditlab/info_metrics.hpp"

namespace banditlab {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void reject_unknown_keys(const json& obj, std::initializer_list<std::string_view> allowed, std::string_view where) {
  if (!obj.is_object()) throw std::invalid_argument(std::string(where) + " must be a JSON object");
  for (const auto& item : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
      throw std::invalid_argument("unknown key '" + item.key() + "' in " + std::string(where));
    }
  }
}

const json& required(const json& obj, const char* key, std::string_view where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw std::invalid_argument("missing key '" + std::string(key) + "' in " + std::string(where));
  return *it;
}

template <class T>
std::vector<T> scalar_or_list(const json& value) {
  if (value.is_array()) return value.get<std::vector<T>>();
  return {value.get<T>()};
}

AlgorithmConfig algorithm_from_json(const json& value) {
  AlgorithmConfig cfg;
  if (value.is_string()) {
    cfg.kind = parse_algorithm_kind(value.get<std::string>());
  } else {
    reject_unknown_keys(value, {"kind", "m", "inner", "derandomize"}, "algorithm");
    cfg.kind = parse_algorithm_kind(required(value, "kind", "algorithm").get<std::string>());
    cfg.derandomize = value.value("derandomize", false);
    if (value.contains("m") || value.contains("inner")) {
      BoostingParams boost;
      boost.repetitions = value.value("m", 1);
      boost.inner = parse_algorithm_kind(value.value("inner", std::string("sprt")));
      cfg.boosting = boost;
    }
  }
  if (cfg.kind == AlgorithmKind::boosting && !cfg.boosting) cfg.boosting = BoostingParams{};
  return cfg;
}

BudgetGrid budgets_from_json(const json& value) {
  BudgetGrid grid;
  if (value.is_array() || value.is_number()) {
    grid.explicit_values = scalar_or_list<std::int64_t>(value);
    return grid;
  }
  reject_unknown_keys(value, {"values", "log_spaced"}, "t");
  if (value.contains("values")) grid.explicit_values = scalar_or_list<std::int64_t>(value["values"]);
  if (value.contains("log_spaced")) {
    const json& segs = value["log_spaced"];
    for (const json& seg : segs.is_array() ? segs : json::array({segs})) {
      reject_unknown_keys(seg, {"lo", "hi", "points", "units"}, "t.log_spaced");
      LogSegment s;
      s.lo = required(seg, "lo", "t.log_spaced").get<double>();
      s.hi = required(seg, "hi", "t.log_spaced").get<double>();
      s.points = required(seg, "points", "t.log_spaced").get<int>();
      const std::string units = seg.value("units", std::string("t"));
      if (units == "t_delta_sq") s.regime_units = true;
      else if (units != "t") throw std::invalid_argument("t.log_spaced.units must be 't' or 't_delta_sq'");
      grid.segments.push_back(s);
    }
  }
  return grid;
}

TrialPolicy trials_from_json(const json& value) {
  TrialPolicy policy;
  if (value.is_number()) {
    policy.base = value.get<std::int64_t>();
    return policy;
  }
  reject_unknown_keys(value, {"base", "auto_scale", "cap", "first_linear", "quadratic", "second_linear"}, "trials");
  policy.base = required(value, "base", "trials").get<std::int64_t>();
  policy.auto_scale = value.value("auto_scale", false);
  policy.cap = value.value("cap", policy.cap);
  if (value.contains("first_linear")) policy.first_linear = value["first_linear"].get<std::int64_t>();
  if (value.contains("quadratic")) policy.quadratic = value["quadratic"].get<std::int64_t>();
  if (value.contains("second_linear")) policy.second_linear = value["second_linear"].get<std::int64_t>();
  return policy;
}

std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

std::vector<std::int64_t> resolve_budgets(const BudgetGrid& grid, double delta) {
  std::set<std::int64_t> values(grid.explicit_values.begin(), grid.explicit_values.end());
  for (const LogSegment& seg : grid.segments) {
    const double scale = seg.regime_units ? 1.0 / (delta * delta) : 1.0;
    const double lo = seg.lo * scale;
    const double hi = seg.hi * scale;
    if (seg.points == 1) {
      values.insert(std::llround(lo));
      continue;
    }
    for (int k = 0; k < seg.points; ++k) {
      const double frac = static_cast<double>(k) / static_cast<double>(seg.points - 1);
      values.insert(std::llround(std::exp(std::log(lo) + frac * (std::log(hi) - std::log(lo)))));
    }
  }
  return {values.begin(), values.end()};
}

Regime classify_regime(double t_delta_sq, int arms) {
  if (t_delta_sq <= 1.0) return Regime::first_linear;
  if (t_delta_sq <= std::log(static_cast<double>(arms))) return Regime::quadratic;
  return Regime::second_linear;
}

std::int64_t trials_for(const TrialPolicy& policy, std::int64_t budget, double delta, int arms) {
  const double m = static_cast<double>(budget) * delta * delta;
  const Regime regime = classify_regime(m, arms);
  const std::optional<std::int64_t>& fixed = regime == Regime::first_linear ? policy.first_linear
                                             : regime == Regime::quadratic  ? policy.quadratic
                                                                            : policy.second_linear;
  if (fixed) return *fixed;
  if (!policy.auto_scale) return policy.base;
  const double log_n = std::log(static_cast<double>(arms));
  const double growth = regime == Regime::first_linear ? m : regime == Regime::quadratic ? m * m : m * log_n;
  if (!(growth > 0.0)) return std::max(policy.base, policy.cap);
  const double scaled = std::ceil(static_cast<double>(policy.base) * log_n * log_n / growth);
  if (scaled >= static_cast<double>(policy.cap)) return std::max(policy.base, policy.cap);
  return std::max(policy.base, static_cast<std::int64_t>(scaled));
}

void SweepConfig::validate() const {
  AlgorithmConfig probe = algorithm;
  probe.budget = 0;
  probe.validate();
  if (arms.empty() || deltas.empty()) throw std::invalid_argument("n and delta lists must be nonempty");
  if (budgets.explicit_values.empty() && budgets.segments.empty()) throw std::invalid_argument("t grid is empty");
  for (int n : arms) {
    if (n < 2) throw std::invalid_argument("every n must be at least 2");
  }
  for (double d : deltas) {
    if (!(d > 0.0 && d <= 1.0)) throw std::invalid_argument("every delta must lie in (0, 1]");
  }
  for (std::int64_t t : budgets.explicit_values) {
    if (t < 0) throw std::invalid_argument("budgets must be nonnegative");
  }
  for (const LogSegment& s : budgets.segments) {
    if (!(s.lo > 0.0 && s.hi >= s.lo) || s.points < 1) throw std::invalid_argument("invalid log-spaced segment");
  }
  if (trials.base < 1 || trials.cap < 1) throw std::invalid_argument("trials must be at least 1");
  if (!success && !mutual_info) throw std::invalid_argument("at least one metric is required");
}

SweepConfig sweep_config_from_json(const json& doc) {
  reject_unknown_keys(doc, {"algorithm", "n", "delta", "t", "trials", "seed", "metrics", "output", "jobs"},
                      "sweep config");
  SweepConfig cfg;
  cfg.algorithm = algorithm_from_json(required(doc, "algorithm", "sweep config"));
  cfg.arms = scalar_or_list<int>(required(doc, "n", "sweep config"));
  cfg.deltas = scalar_or_list<double>(required(doc, "delta", "sweep config"));
  cfg.budgets = budgets_from_json(required(doc, "t", "sweep config"));
  cfg.trials = trials_from_json(required(doc, "trials", "sweep config"));
  cfg.seed = required(doc, "seed", "sweep config").get<std::uint64_t>();
  if (doc.contains("metrics")) {
    cfg.success = false;
    cfg.mutual_info = false;
    for (const auto& m : doc["metrics"]) {
      const auto name = m.get<std::string>();
      if (name == "success") cfg.success = true;
      else if (name == "mi") cfg.mutual_info = true;
      else throw std::invalid_argument("unknown metric '" + name + "' (expected success or mi)");
    }
  }
  cfg.output = doc.value("output", std::string());
  cfg.jobs = doc.value("jobs", 1);
  cfg.validate();
  return cfg;
}

json sweep_config_to_json(const SweepConfig& cfg) {
  json alg = {{"kind", cli_name(cfg.algorithm.kind)}, {"derandomize", cfg.algorithm.derandomize}};
  if (cfg.algorithm.boosting) {
    alg["m"] = cfg.algorithm.boosting->repetitions;
    alg["inner"] = cli_name(cfg.algorithm.boosting->inner);
  }
  json t = json::object();
  if (!cfg.budgets.explicit_values.empty()) t["values"] = cfg.budgets.explicit_values;
  if (!cfg.budgets.segments.empty()) {
    json segs = json::array();
    for (const LogSegment& s : cfg.budgets.segments) {
      segs.push_back({{"lo", s.lo}, {"hi", s.hi}, {"points", s.points}, {"units", s.regime_units ? "t_delta_sq" : "t"}});
    }
    t["log_spaced"] = segs;
  }
  json trials = {{"base", cfg.trials.base}, {"auto_scale", cfg.trials.auto_scale}, {"cap", cfg.trials.cap}};
  if (cfg.trials.first_linear) trials["first_linear"] = *cfg.trials.first_linear;
  if (cfg.trials.quadratic) trials["quadratic"] = *cfg.trials.quadratic;
  if (cfg.trials.second_linear) trials["second_linear"] = *cfg.trials.second_linear;
  json metrics = json::array();
  if (cfg.success) metrics.push_back("success");
  if (cfg.mutual_info) metrics.push_back("mi");
  json doc = {{"algorithm", alg}, {"n", cfg.arms},       {"delta", cfg.deltas},   {"t", t},
              {"trials", trials}, {"seed", cfg.seed},    {"metrics", metrics},   {"jobs", cfg.jobs}};
  if (!cfg.output.empty()) doc["output"] = cfg.output;
  return doc;
}

std::vector<SweepRow> run_sweep(const SweepConfig& cfg, const SweepProgress& progress) {
  cfg.validate();
  struct Cell {
    int n;
    double delta;
    std::int64_t t;
  };
  std::vector<Cell> cells;
  for (int n : cfg.arms) {
    for (double delta : cfg.deltas) {
      for (std::int64_t t : resolve_budgets(cfg.budgets, delta)) cells.push_back({n, delta, t});
    }
  }

  std::vector<SweepRow> rows;
  rows.reserve(cells.size());
  for (const Cell& cell : cells) {
    SweepRow row;
    row.alg = cli_name(cfg.algorithm.kind);
    row.model = model_name(cfg.algorithm.kind);
    row.n = cell.n;
    row.delta = cell.delta;
    row.t = cell.t;
    row.seed = cfg.seed;
    row.t_delta_sq = static_cast<double>(cell.t) * cell.delta * cell.delta;
    row.p_hat = row.p_se = row.i_hat = row.i_se = row.mean_pulls = kNaN;
    try {
      row.trials = trials_for(cfg.trials, cell.t, cell.delta, cell.n);
      EstimateRequest req;
      req.algorithm = cfg.algorithm;
      req.algorithm.budget = cell.t;
      req.arms = cell.n;
      req.delta = cell.delta;
      req.trials = row.trials;
      req.seed = cfg.seed;
      req.jobs = cfg.jobs;
      req.success = cfg.success;
      // Mutual information is reported as NaN where it is not defined.
      req.mutual_info = cfg.mutual_info && cell.delta < 1.0 && cfg.algorithm.kind != AlgorithmKind::two_phase;
      const CellEstimate est = estimate_cell(req);
      if (est.success) {
        row.p_hat = est.success->mean;
        row.p_se = est.success->std_error;
      }
      if (est.mutual_info) {
        row.i_hat = est.mutual_info->mean;
        row.i_se = est.mutual_info->std_error;
      }
      row.mean_pulls = est.pulls.mean;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    rows.push_back(row);
    if (progress) progress(rows.back(), rows.size(), cells.size());
  }
  return rows;
}

void write_csv(std::ostream& out, std::span<const SweepRow> rows) {
  out << kCsvHeader << '\n';
  for (const SweepRow& r : rows) {
    out << r.alg << ',' << r.model << ',' << r.n << ',' << format_real(r.delta) << ',' << r.t << ',' << r.trials
        << ',' << r.seed << ',' << format_real(r.p_hat) << ',' << format_real(r.p_se) << ','
        << format_real(r.i_hat) << ',' << format_real(r.i_se) << ',' << format_real(r.mean_pulls) << ','
        << format_real(r.t_delta_sq) << '\n';
  }
}

std::vector<SweepRow> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw std::runtime_error("CSV header does not match");
  std::vector<SweepRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) f.push_back(field);
    if (f.size() != 13) throw std::runtime_error("CSV line " + std::to_string(line_no) + ": expected 13 fields");
    try {
      SweepRow r;
      r.alg = f[0];
      r.model = f[1];
      r.n = std::stoi(f[2]);
      r.delta = std::stod(f[3]);
      r.t = std::stoll(f[4]);
      r.trials = std::stoll(f[5]);
      r.seed = std::stoull(f[6]);
      r.p_hat = std::stod(f[7]);
      r.p_se = std::stod(f[8]);
      r.i_hat = std::stod(f[9]);
      r.i_se = std::stod(f[10]);
      r.mean_pulls = std::stod(f[11]);
      r.t_delta_sq = std::stod(f[12]);
      rows.push_back(r);
    } catch (const std::logic_error&) {
      throw std::runtime_error("CSV line " + std::to_string(line_no) + ": malformed number");
    }
  }
  return rows;
}

double fit_loglog_slope(std::span<const std::pair<double, double>> points, double lo, double hi) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int count = 0;
  for (const auto& [t, v] : points) {
    if (t < lo || t > hi || !(v > 0.0) || !(t > 0.0)) continue;
    const double x = std::log(t);
    const double y = std::log(v);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++count;
  }
  if (count < 3) throw std::invalid_argument("slope fit needs at least three positive points in the window");
  const double n = count;
  const double denom = n * sxx - sx * sx;
  if (!(denom > 0.0)) throw std::invalid_argument("slope fit needs distinct t values");
  return (n * sxy - sx * sy) / denom;
}

}  // namespace banditlab
