#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace surrocal {

// One published effect and its surrogate replication.
struct EffectPair {
  double human_effect = 0.0;
  double human_se = 1.0;
  double llm_effect = 0.0;
  double llm_se = 1.0;
  std::string study_id;
};

struct AgreementRates {
  double direction_agreement = 0.0;
  double significance_agreement = 0.0;
  // Among human-nonsignificant pairs, the share the surrogate calls
  // significant; absent when there are no such pairs.
  std::optional<double> false_significance_rate;
};

AgreementRates agreement_rates(std::span<const EffectPair> pairs, double alpha = 0.05);

// Pearson correlation of human and surrogate effect sizes.
double effect_correlation(std::span<const EffectPair> pairs);

// Exact 1-D Wasserstein-1 distance between two empirical distributions.
double wasserstein1(std::span<const double> a, std::span<const double> b);

double kl_discrete(std::span<const double> p, std::span<const double> q);
double total_variation(std::span<const double> p, std::span<const double> q);

enum class Loss { log_loss, squared_error };

std::string_view to_string(Loss loss);
Loss loss_from_string(std::string_view name);

// Predicted distribution over discrete outcome values for one scenario, plus
// the human responses observed there.
struct ScenarioSample {
  std::string scenario_id;
  std::vector<double> outcome_values;
  std::vector<double> probabilities;
  std::vector<double> responses;
};

struct RiskEstimate {
  double risk = 0.0;
  double std_error = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  Loss loss = Loss::log_loss;
  std::int64_t m_scenarios = 0;
};

// Mean over responses of the loss in one scenario. Log loss is -ln p(y);
// squared error is (y - E_p[Y])^2.
double scenario_loss(const ScenarioSample& scenario, Loss loss);

// Scenarios are the i.i.d. units: per-scenario mean loss, then the mean and
// standard error across scenarios.
RiskEstimate estimate_risk(std::span<const ScenarioSample> scenarios, Loss loss,
                           double alpha = 0.05);

// study_id,human_effect,human_se,llm_effect,llm_se
std::vector<EffectPair> load_effect_pairs(const std::filesystem::path& path);

// Scenario file: scenario_id,outcome,probability (one row per outcome value).
// Response file: scenario_id,outcome (one row per human response).
std::vector<ScenarioSample> load_scenarios(const std::filesystem::path& predictions,
                                           const std::filesystem::path& responses);

// First numeric column named `column` (or the only column) of a CSV.
std::vector<double> load_values(const std::filesystem::path& path,
                                const std::string& column = "value");

}  // namespace surrocal
