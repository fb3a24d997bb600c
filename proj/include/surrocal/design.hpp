#pragma once

#include "surrocal/data.hpp"

#include <cstdint>

namespace surrocal {

// Planning inputs for a two-arm mixed human/surrogate study.
struct DesignInputs {
  double rho = 0.0;      // anticipated Corr(Y, yhat)
  double sigma_y = 1.0;  // outcome standard deviation
  double effect = 0.0;   // target difference in means
  double alpha = 0.05;
  double cost_human = 1.0;
  double cost_surrogate = 0.1;
  double budget = 100.0;
};

// Counts are totals across both arms; each arm receives half.
struct DesignPlan {
  std::int64_t n_human = 0;
  std::int64_t n_surrogate = 0;
  double achieved_power = 0.0;
  double ess = 0.0;
  double total_cost = 0.0;
};

// n / (1 - rho^2 N / (N + n)): the number of human-only observations whose
// mean is as precise as the tuned prediction-powered mean.
double effective_sample_size(double n, double big_n, double rho);

// Two-sided normal-approximation power of the difference in arm means when
// each arm's variance is sigma_y^2 / (ESS/2).
double power_two_arm(const DesignInputs& inputs, std::int64_t n_human, std::int64_t n_surrogate);

// Power-maximizing split of the budget. Ties go to the cheaper plan, then to
// fewer surrogate rows.
DesignPlan allocate_budget(const DesignInputs& inputs);

// Sample Corr(y, yhat) from a pilot shared dataset.
double pilot_rho(const SharedDataset& pilot);

void validate(const DesignInputs& inputs);

}  // namespace surrocal
