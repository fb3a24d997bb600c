#include "surrocal/metrics.hpp"

#include "surrocal/csv.hpp"
#include "surrocal/error.hpp"
#include "surrocal/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace surrocal {

namespace {

constexpr double kSimplexTolerance = 1e-9;

void check_simplex(std::span<const double> p, const char* name) {
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw DataError(std::string(name) + " has a negative or non-finite probability");
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > kSimplexTolerance) {
    throw DataError(std::string(name) + " does not sum to 1 (sum = " + std::to_string(sum) + ")");
  }
}

void check_pair(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw DataError("probability vectors differ in length");
  if (p.empty()) throw DataError("probability vectors are empty");
  check_simplex(p, "p");
  check_simplex(q, "q");
}

int sign(double x) { return (x > 0.0) - (x < 0.0); }

void check_pairs(std::span<const EffectPair> pairs) {
  for (const auto& p : pairs) {
    if (!(p.human_se > 0.0) || !(p.llm_se > 0.0)) {
      throw DataError("effect pair '" + p.study_id + "' has a non-positive standard error");
    }
    if (!std::isfinite(p.human_effect) || !std::isfinite(p.llm_effect) ||
        !std::isfinite(p.human_se) || !std::isfinite(p.llm_se)) {
      throw DataError("effect pair '" + p.study_id + "' has non-finite values");
    }
  }
}

}  // namespace

AgreementRates agreement_rates(std::span<const EffectPair> pairs, double alpha) {
  if (pairs.empty()) throw AssumptionError("agreement_rates requires at least one effect pair");
  check_pairs(pairs);
  const double z = stats::two_sided_z(alpha);
  std::size_t same_direction = 0;
  std::size_t same_significance = 0;
  std::size_t human_null = 0;
  std::size_t false_significant = 0;
  for (const auto& p : pairs) {
    const bool sig_h = std::abs(p.human_effect) / p.human_se > z;
    const bool sig_l = std::abs(p.llm_effect) / p.llm_se > z;
    if (sign(p.human_effect) == sign(p.llm_effect)) ++same_direction;
    if (sig_h == sig_l) ++same_significance;
    if (!sig_h) {
      ++human_null;
      if (sig_l) ++false_significant;
    }
  }
  const double m = static_cast<double>(pairs.size());
  AgreementRates r;
  r.direction_agreement = static_cast<double>(same_direction) / m;
  r.significance_agreement = static_cast<double>(same_significance) / m;
  if (human_null > 0) {
    r.false_significance_rate =
        static_cast<double>(false_significant) / static_cast<double>(human_null);
  }
  return r;
}

double effect_correlation(std::span<const EffectPair> pairs) {
  if (pairs.size() < 3) throw AssumptionError("effect_correlation requires at least 3 pairs");
  check_pairs(pairs);
  Eigen::VectorXd h(static_cast<Eigen::Index>(pairs.size()));
  Eigen::VectorXd l(h.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    h[static_cast<Eigen::Index>(i)] = pairs[i].human_effect;
    l[static_cast<Eigen::Index>(i)] = pairs[i].llm_effect;
  }
  if (!(stats::variance(h) > 0.0) || !(stats::variance(l) > 0.0)) {
    throw AssumptionError("effect_correlation requires nonzero variance in both effect lists");
  }
  return std::clamp(stats::correlation(h, l), -1.0, 1.0);
}

double wasserstein1(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw DataError("wasserstein1 requires non-empty samples");
  std::vector<double> sa(a.begin(), a.end());
  std::vector<double> sb(b.begin(), b.end());
  for (double v : sa) {
    if (!std::isfinite(v)) throw DataError("wasserstein1 samples must be finite");
  }
  for (double v : sb) {
    if (!std::isfinite(v)) throw DataError("wasserstein1 samples must be finite");
  }
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  if (sa.size() == sb.size()) {
    std::vector<double> gaps(sa.size());
    for (std::size_t i = 0; i < sa.size(); ++i) gaps[i] = std::abs(sa[i] - sb[i]);
    return stats::pairwise_sum(gaps) / static_cast<double>(sa.size());
  }
  // Integrate |F_a - F_b| over the merged support.
  std::vector<double> all(sa);
  all.insert(all.end(), sb.begin(), sb.end());
  std::sort(all.begin(), all.end());
  const double na = static_cast<double>(sa.size());
  const double nb = static_cast<double>(sb.size());
  std::size_t ia = 0;
  std::size_t ib = 0;
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < all.size(); ++k) {
    const double t = all[k];
    while (ia < sa.size() && sa[ia] <= t) ++ia;
    while (ib < sb.size() && sb[ib] <= t) ++ib;
    const double width = all[k + 1] - t;
    if (width > 0.0) {
      total += std::abs(static_cast<double>(ia) / na - static_cast<double>(ib) / nb) * width;
    }
  }
  return total;
}

double kl_discrete(std::span<const double> p, std::span<const double> q) {
  check_pair(p, q);
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0) {
      throw DataError("KL divergence undefined: q has zero mass at index " + std::to_string(i) +
                      " where p is positive");
    }
    total += p[i] * std::log(p[i] / q[i]);
  }
  return std::max(total, 0.0);
}

double total_variation(std::span<const double> p, std::span<const double> q) {
  check_pair(p, q);
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) total += std::abs(p[i] - q[i]);
  return std::min(0.5 * total, 1.0);
}

std::string_view to_string(Loss loss) {
  return loss == Loss::log_loss ? "log_loss" : "squared_error";
}

Loss loss_from_string(std::string_view name) {
  if (name == "log_loss") return Loss::log_loss;
  if (name == "squared_error") return Loss::squared_error;
  throw ConfigError("unknown loss '" + std::string(name) + "'");
}

double scenario_loss(const ScenarioSample& s, Loss loss) {
  if (s.outcome_values.size() != s.probabilities.size() || s.outcome_values.empty()) {
    throw DataError("scenario '" + s.scenario_id + "' has a malformed predicted distribution");
  }
  check_simplex(s.probabilities, ("scenario '" + s.scenario_id + "' prediction").c_str());
  if (s.responses.empty()) {
    throw DataError("scenario '" + s.scenario_id + "' has no human responses");
  }
  std::vector<double> losses;
  losses.reserve(s.responses.size());
  if (loss == Loss::log_loss) {
    for (double y : s.responses) {
      double p = 0.0;
      for (std::size_t k = 0; k < s.outcome_values.size(); ++k) {
        if (s.outcome_values[k] == y) p += s.probabilities[k];
      }
      if (!(p > 0.0)) {
        throw AssumptionError("log loss positivity violated in scenario '" + s.scenario_id +
                              "': observed outcome " + csv::format_number(y) +
                              " has zero predicted probability");
      }
      losses.push_back(-std::log(p));
    }
  } else {
    double expected = 0.0;
    for (std::size_t k = 0; k < s.outcome_values.size(); ++k) {
      expected += s.outcome_values[k] * s.probabilities[k];
    }
    for (double y : s.responses) losses.push_back((y - expected) * (y - expected));
  }
  return stats::pairwise_sum(losses) / static_cast<double>(losses.size());
}

RiskEstimate estimate_risk(std::span<const ScenarioSample> scenarios, Loss loss, double alpha) {
  const double z = stats::two_sided_z(alpha);
  if (scenarios.size() < 2) throw AssumptionError("estimate_risk requires at least 2 scenarios");
  std::vector<double> per_scenario;
  per_scenario.reserve(scenarios.size());
  for (const auto& s : scenarios) per_scenario.push_back(scenario_loss(s, loss));
  const double m = static_cast<double>(scenarios.size());
  RiskEstimate r;
  r.risk = stats::pairwise_sum(per_scenario) / m;
  std::vector<double> sq(per_scenario.size());
  for (std::size_t i = 0; i < sq.size(); ++i) {
    sq[i] = (per_scenario[i] - r.risk) * (per_scenario[i] - r.risk);
  }
  r.std_error = std::sqrt(stats::pairwise_sum(sq) / (m - 1.0) / m);
  r.ci_low = r.risk - z * r.std_error;
  r.ci_high = r.risk + z * r.std_error;
  r.loss = loss;
  r.m_scenarios = static_cast<std::int64_t>(scenarios.size());
  return r;
}

std::vector<EffectPair> load_effect_pairs(const std::filesystem::path& path) {
  const auto table = csv::read(path);
  const std::string source = path.string();
  auto col = [&](const char* name) {
    const long c = table.column(name);
    if (c < 0) throw DataError(source + ": required column '" + name + "' is missing");
    return static_cast<std::size_t>(c);
  };
  const auto id = col("study_id");
  const auto he = col("human_effect");
  const auto hs = col("human_se");
  const auto le = col("llm_effect");
  const auto ls = col("llm_se");
  std::vector<EffectPair> pairs;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    const auto line = table.line_numbers[i];
    EffectPair p;
    p.study_id = row[id];
    p.human_effect = csv::parse_number(row[he], source, line, "human_effect");
    p.human_se = csv::parse_number(row[hs], source, line, "human_se");
    p.llm_effect = csv::parse_number(row[le], source, line, "llm_effect");
    p.llm_se = csv::parse_number(row[ls], source, line, "llm_se");
    pairs.push_back(std::move(p));
  }
  check_pairs(pairs);
  return pairs;
}

std::vector<ScenarioSample> load_scenarios(const std::filesystem::path& predictions,
                                           const std::filesystem::path& responses) {
  const auto pred = csv::read(predictions);
  const auto resp = csv::read(responses);
  auto col = [](const csv::Table& t, const std::string& source, const char* name) {
    const long c = t.column(name);
    if (c < 0) throw DataError(source + ": required column '" + name + "' is missing");
    return static_cast<std::size_t>(c);
  };
  const std::string psrc = predictions.string();
  const std::string rsrc = responses.string();
  const auto p_id = col(pred, psrc, "scenario_id");
  const auto p_out = col(pred, psrc, "outcome");
  const auto p_prob = col(pred, psrc, "probability");
  const auto r_id = col(resp, rsrc, "scenario_id");
  const auto r_out = col(resp, rsrc, "outcome");

  std::vector<ScenarioSample> scenarios;
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < pred.rows.size(); ++i) {
    const auto& row = pred.rows[i];
    const auto line = pred.line_numbers[i];
    auto [it, inserted] = index.emplace(row[p_id], scenarios.size());
    if (inserted) scenarios.push_back(ScenarioSample{row[p_id], {}, {}, {}});
    auto& s = scenarios[it->second];
    s.outcome_values.push_back(csv::parse_number(row[p_out], psrc, line, "outcome"));
    s.probabilities.push_back(csv::parse_number(row[p_prob], psrc, line, "probability"));
  }
  for (std::size_t i = 0; i < resp.rows.size(); ++i) {
    const auto& row = resp.rows[i];
    const auto it = index.find(row[r_id]);
    if (it == index.end()) {
      throw DataError(rsrc + ":" + std::to_string(resp.line_numbers[i]) + ": scenario '" +
                      row[r_id] + "' has no predicted distribution");
    }
    scenarios[it->second].responses.push_back(
        csv::parse_number(row[r_out], rsrc, resp.line_numbers[i], "outcome"));
  }
  return scenarios;
}

std::vector<double> load_values(const std::filesystem::path& path, const std::string& column) {
  const auto table = csv::read(path);
  long c = table.column(column);
  if (c < 0 && table.header.size() == 1) c = 0;
  if (c < 0) throw DataError(path.string() + ": required column '" + column + "' is missing");
  std::vector<double> values;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    values.push_back(csv::parse_number(table.rows[i][static_cast<std::size_t>(c)], path.string(),
                                       table.line_numbers[i], table.header[static_cast<std::size_t>(c)]));
  }
  return values;
}

}  // namespace surrocal
