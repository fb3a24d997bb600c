#pragma once

#include "surrocal/data.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace surrocal {

enum class Method { human_only, naive_surrogate, ppi, dsl, plugin_debias, relationship };

std::string_view to_string(Method method);
// Throws ConfigError for an unknown name.
Method method_from_string(std::string_view name);

// Point estimate with a normal-approximation interval estimate +/- z * std_error.
struct EstimateReport {
  double estimate = 0.0;
  double std_error = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double alpha = 0.05;
  Method method = Method::human_only;
  std::optional<double> lambda_used;
  std::optional<double> ess;
  // Coefficient name for regression output; empty for scalar targets.
  std::string term;
  // Machine-readable warning codes, e.g. "degenerate_predictor".
  std::vector<std::string> warnings;
};

EstimateReport make_report(double estimate, double std_error, double alpha, Method method);

// Either a fixed lambda or "tune from the data".
class Lambda {
 public:
  static Lambda automatic() { return Lambda(); }
  static Lambda fixed(double value) { return Lambda(value); }

  bool is_auto() const { return !value_.has_value(); }
  double value() const { return *value_; }

 private:
  Lambda() = default;
  explicit Lambda(double v) : value_(v) {}
  std::optional<double> value_;
};

enum class BiasKind { constant, linear };

std::string_view to_string(BiasKind kind);
BiasKind bias_kind_from_string(std::string_view name);

// Conditional error model b(x) = E[yhat - y | x]. Constant models hold a
// single coefficient; linear models hold an intercept followed by one slope
// per covariate.
struct BiasModel {
  BiasKind kind = BiasKind::constant;
  Eigen::VectorXd coefficients;

  double predict_row(const Eigen::RowVectorXd& x) const;
  Eigen::VectorXd predict(const Eigen::MatrixXd& covariates) const;
};

// Fits b on every row of the shared data.
BiasModel fit_bias_model(const SharedDataset& shared, BiasKind kind);

struct CrossFitResult {
  BiasModel averaged;                    // coefficient average of the K fold models
  std::vector<BiasModel> fold_models;    // model k fit without fold k
  Eigen::VectorXd out_of_fold_residual;  // (yhat - y) - b_{-k(i)}(x_i)
};

CrossFitResult cross_fit_bias_model(const SharedDataset& shared, BiasKind kind, int k_folds,
                                    std::uint64_t seed);

// Least squares y = alpha + beta * yhat on the shared rows.
struct RelationshipModel {
  double alpha = 0.0;
  double beta = 0.0;
};

RelationshipModel fit_relationship(const SharedDataset& shared);

struct MomentDiagnostic {
  double cov_z_eps = 0.0;
  double std_error = 0.0;
  double z_stat = 0.0;
};

EstimateReport human_mean(const SharedDataset& shared, double alpha = 0.05);
EstimateReport naive_surrogate_mean(const SurrogateDataset& surrogate, double alpha = 0.05);

// N/(N+n) * Cov(y, yhat) / Var(yhat) over the shared rows. Throws
// DegeneratePredictorError when yhat is constant.
double tune_lambda_mean(const SharedDataset& shared, Eigen::Index surrogate_count);

EstimateReport ppi_mean(const SharedDataset& shared, const SurrogateDataset& surrogate,
                        Lambda lambda = Lambda::automatic(), double alpha = 0.05);

// Surrogate mean minus the (inverse-probability weighted, when pi is present)
// average prediction error on the shared rows.
EstimateReport dsl_mean(const SharedDataset& shared, const SurrogateDataset& surrogate,
                        double alpha = 0.05);

EstimateReport plugin_debias_mean(const SharedDataset& shared, const SurrogateDataset& surrogate,
                                  BiasKind bias_kind, int k_folds = 5, std::uint64_t seed = 0,
                                  double alpha = 0.05);

EstimateReport relationship_correct_mean(const SharedDataset& shared,
                                         const SurrogateDataset& surrogate, double alpha = 0.05);

// Regression of the outcome on [1, covariates]; one report per coefficient
// ("intercept" first, then covariate names). Standard errors are
// heteroskedasticity-robust.
std::vector<EstimateReport> human_ols(const SharedDataset& shared, double alpha = 0.05);
std::vector<EstimateReport> naive_surrogate_ols(const SurrogateDataset& surrogate,
                                                double alpha = 0.05);
std::vector<EstimateReport> ppi_ols(const SharedDataset& shared, const SurrogateDataset& surrogate,
                                    Lambda lambda = Lambda::automatic(), double alpha = 0.05);

// Knobs for the estimators that need more than data and alpha.
struct MeanOptions {
  Lambda lambda = Lambda::automatic();
  BiasKind bias_kind = BiasKind::constant;
  int k_folds = 5;
  std::uint64_t seed = 0;
};

EstimateReport estimate_mean(Method method, const SharedDataset& shared,
                             const SurrogateDataset& surrogate, const MeanOptions& options = {},
                             double alpha = 0.05);

// E[Y | z=1] - E[Y | z=0] with the chosen mean estimator applied per arm.
EstimateReport diff_in_means(const SharedDataset& shared, const SurrogateDataset& surrogate,
                             Method method, const MeanOptions& options = {}, double alpha = 0.05);

// Sample Cov(z, yhat - y) with an influence-function standard error.
MomentDiagnostic moment_diagnostic(const SharedDataset& shared);

}  // namespace surrocal
