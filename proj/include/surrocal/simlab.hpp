#pragma once

#include "surrocal/data.hpp"
#include "surrocal/estimators.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace surrocal {

// ---------------------------------------------------------------------------
// Data-generating processes
// ---------------------------------------------------------------------------

enum class BiasShape { none, constant, linear, z_aligned };

std::string_view to_string(BiasShape shape);
BiasShape bias_shape_from_string(std::string_view name);

// Predictor error structure. `value` is the constant offset, the slope on x_1,
// or the z-aligned gap delta (E[err | z=1] - E[err | z=0]) depending on kind.
struct MeanBias {
  BiasShape kind = BiasShape::none;
  double value = 0.0;
};

// Y = mu + sigma_y * u with covariates x_1 ~ N(0,1), z ~ Bernoulli(1/2), and
//   yhat = bias(x_1, z) + y - (1 - rho)(y - mu) + s * w,
// where s^2 = (1 - rho^2) sigma_y^2 - Var(bias) keeps Corr(Y, yhat) = rho.
struct MeanDGPConfig {
  double mu = 0.0;
  double sigma_y = 1.0;
  double predictor_rho = 0.5;
  MeanBias bias;
  std::int64_t n = 500;
  std::int64_t big_n = 5000;
  std::uint64_t seed = 0;
};

// Y = beta0 + beta1 z + eta, z ~ Bernoulli(1/2), eta ~ N(0,1);
// yhat = Y + delta (z - 1/2) + 0.5 * N(0,1).
struct OlsBiasConfig {
  double delta = 0.4;
  double beta0 = 0.0;
  double beta1 = 1.0;
  std::int64_t n = 10000;
  std::int64_t big_n = 10000;
  std::uint64_t seed = 0;
};

// Binary outcome Y = 1{latent > 0}, latent ~ N(+/-arm_shift, 1) by arm.
// The predictor is right with probability `accuracy` in each arm. In arm z=1
// every error is a false positive; in arm z=0 errors split evenly between
// false positives and false negatives, so E[yhat - y] = (1 - accuracy)/2.
struct BinaryDGPConfig {
  double accuracy = 0.9;
  double arm_shift = 0.5;
  std::int64_t n = 200;
  std::int64_t big_n = 500;
  std::uint64_t seed = 0;
};

// Potential outcomes Y_i(z) = theta_i + z tau + eps_i(z). Twins:
//   additive:    Yhat_i(z) = Y_i(z) + eta_i + beta_z + xi_i(z)
//   interaction: Yhat_i(z) = Y_i(z) + eta_i * beta_z + xi_i(z)
// with eta_i ~ N(eta_mean, eta_sd). Arm assignment z_i ~ Bernoulli(1/2).
struct TwinDGPConfig {
  double tau = 0.5;
  double theta_sd = 1.0;
  double eps_sd = 1.0;
  double eta_mean = 0.0;
  double eta_sd = 0.5;
  double beta0 = 0.0;
  double beta1 = 0.0;
  double xi_sd = 0.5;
  bool interaction = false;
  std::int64_t n = 500;
  std::uint64_t seed = 0;
};

struct MeanSample {
  SharedDataset shared;
  SurrogateDataset surrogate;
  double truth = 0.0;  // E[Y]
};

struct OlsSample {
  SharedDataset shared;
  SurrogateDataset surrogate;
  double beta0 = 0.0;
  double beta1 = 0.0;
};

// Arm-assigned view of the human table: only Y_i(z_i) is visible.
struct ObservedOutcomes {
  Eigen::VectorXd z;
  Eigen::VectorXd y;
};

// Both potential outcomes per unit. Only simulation code may read y0/y1
// directly; estimators take `observed()`.
class HumanPotentialOutcomes {
 public:
  HumanPotentialOutcomes() = default;
  HumanPotentialOutcomes(Eigen::VectorXd y0, Eigen::VectorXd y1, Eigen::VectorXd z);

  const Eigen::VectorXd& y0() const { return y0_; }
  const Eigen::VectorXd& y1() const { return y1_; }
  const Eigen::VectorXd& assignment() const { return z_; }
  Eigen::Index size() const { return z_.size(); }

  ObservedOutcomes observed() const;

 private:
  Eigen::VectorXd y0_;
  Eigen::VectorXd y1_;
  Eigen::VectorXd z_;
};

// Twins can be queried under both arms for every unit.
struct TwinPredictions {
  Eigen::VectorXd yhat0;
  Eigen::VectorXd yhat1;
};

// Jointly labeled rows: assigned arm, observed human outcome, twin prediction
// for the same arm.
struct TwinJoint {
  Eigen::VectorXd z;
  Eigen::VectorXd y;
  Eigen::VectorXd yhat;
};

struct TwinSample {
  HumanPotentialOutcomes human;
  TwinPredictions twin;
  double tau = 0.0;

  TwinJoint joint() const;
};

MeanSample gen_mean_dgp(const MeanDGPConfig& config);
OlsSample gen_ols_bias_dgp(double delta, double beta0, double beta1, std::int64_t n,
                           std::int64_t big_n, std::uint64_t seed);
inline OlsSample gen_ols_bias_dgp(const OlsBiasConfig& c) {
  return gen_ols_bias_dgp(c.delta, c.beta0, c.beta1, c.n, c.big_n, c.seed);
}
MeanSample gen_binary_dgp(const BinaryDGPConfig& config);
TwinSample gen_twin_dgp(const TwinDGPConfig& config);

// Mean of within-unit twin differences Yhat(1) - Yhat(0).
EstimateReport twin_ate(const TwinPredictions& twin, double alpha = 0.05);

// Difference of arm-wise mean twin errors, an estimate of beta_1 - beta_0.
// An interval excluding zero flags a treatment-dependent twin bias.
EstimateReport tisa_gap(const TwinJoint& joint, double alpha = 0.05);

// ---------------------------------------------------------------------------
// Replication engine
// ---------------------------------------------------------------------------

using DgpConfig = std::variant<MeanDGPConfig, OlsBiasConfig, BinaryDGPConfig, TwinDGPConfig>;

enum class Target { mean, diff_in_means, ols_coefficient, twin_ate, tisa_gap };

std::string_view to_string(Target target);
Target target_from_string(std::string_view name);

struct EstimatorSpec {
  Target target = Target::mean;
  Method method = Method::ppi;
  MeanOptions options;
  int coefficient = 1;  // for ols_coefficient; 0 is the intercept
  double alpha = 0.05;
};

struct ReplicationSummary {
  std::string method;
  std::string target;
  std::int64_t replications = 0;
  double truth = 0.0;
  double mean_estimate = 0.0;
  double mean_bias = 0.0;
  double empirical_coverage = 0.0;
  double mean_ci_width = 0.0;
  double variance = 0.0;
  double mc_std_error = 0.0;
};

// Population value of the estimator's target under the DGP. Throws
// AssumptionError when the target does not apply to the DGP.
double true_value(const DgpConfig& dgp, const EstimatorSpec& spec);

// One report per replication, replication r drawn with
// replication_seed(master_seed, r). Identical for every worker count.
std::vector<EstimateReport> replicate(const DgpConfig& dgp, const EstimatorSpec& spec,
                                      std::int64_t replications, std::uint64_t master_seed,
                                      int workers = 1);

ReplicationSummary summarize(const std::vector<EstimateReport>& reports, double truth,
                             std::string method, std::string target);

ReplicationSummary run_replications(const DgpConfig& dgp, const EstimatorSpec& spec,
                                    std::int64_t replications, std::uint64_t master_seed,
                                    int workers = 1);

// Estimate from a single draw of the DGP with the given seed.
EstimateReport run_once(const DgpConfig& dgp, const EstimatorSpec& spec, std::uint64_t seed);

}  // namespace surrocal
