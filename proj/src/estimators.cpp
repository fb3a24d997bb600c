#include "surrocal/estimators.hpp"

#include "surrocal/error.hpp"
#include "surrocal/stats.hpp"

#include <cmath>
#include <string>

namespace surrocal {

namespace {

constexpr const char* kDegeneratePredictor = "degenerate_predictor";

void require_rows(Eigen::Index count, Eigen::Index minimum, const char* what) {
  if (count < minimum) {
    throw AssumptionError(std::string(what) + " requires at least " + std::to_string(minimum) +
                          " rows, got " + std::to_string(count));
  }
}

double ess_from(double n, double se_human, double se) {
  if (se > 0.0) return n * (se_human / se) * (se_human / se);
  return n;
}

// Hajek-weighted mean and its linearized variance; weights are 1/pi.
struct WeightedMoments {
  double mean;
  double variance_of_mean;
};

WeightedMoments weighted_error_moments(const Eigen::VectorXd& errors, const Eigen::VectorXd& pi) {
  const auto n = errors.size();
  Eigen::VectorXd w = pi.cwiseInverse();
  if (!w.allFinite()) {
    throw AssumptionError("labeling probabilities produce non-finite inverse weights");
  }
  const double wsum = w.sum();
  const double m = w.dot(errors) / wsum;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = w[i] * (errors[i] - m);
    acc += d * d;
  }
  const double var = acc / (wsum * wsum) * static_cast<double>(n) / static_cast<double>(n - 1);
  return {m, var};
}

}  // namespace

std::string_view to_string(Method method) {
  switch (method) {
    case Method::human_only: return "human_only";
    case Method::naive_surrogate: return "naive_surrogate";
    case Method::ppi: return "ppi";
    case Method::dsl: return "dsl";
    case Method::plugin_debias: return "plugin_debias";
    case Method::relationship: return "relationship";
  }
  return "unknown";
}

Method method_from_string(std::string_view name) {
  for (Method m : {Method::human_only, Method::naive_surrogate, Method::ppi, Method::dsl,
                   Method::plugin_debias, Method::relationship}) {
    if (to_string(m) == name) return m;
  }
  throw ConfigError("unknown estimation method '" + std::string(name) + "'");
}

std::string_view to_string(BiasKind kind) {
  return kind == BiasKind::constant ? "constant" : "linear";
}

BiasKind bias_kind_from_string(std::string_view name) {
  if (name == "constant") return BiasKind::constant;
  if (name == "linear" || name == "linear_in_covariates") return BiasKind::linear;
  throw ConfigError("unknown bias model kind '" + std::string(name) + "'");
}

EstimateReport make_report(double estimate, double std_error, double alpha, Method method) {
  const double z = stats::two_sided_z(alpha);
  EstimateReport r;
  r.estimate = estimate;
  r.std_error = std_error;
  r.ci_low = estimate - z * std_error;
  r.ci_high = estimate + z * std_error;
  r.alpha = alpha;
  r.method = method;
  return r;
}

double BiasModel::predict_row(const Eigen::RowVectorXd& x) const {
  if (kind == BiasKind::constant) return coefficients[0];
  return coefficients[0] + x.dot(coefficients.tail(coefficients.size() - 1));
}

Eigen::VectorXd BiasModel::predict(const Eigen::MatrixXd& covariates) const {
  if (kind == BiasKind::constant) {
    return Eigen::VectorXd::Constant(covariates.rows(), coefficients[0]);
  }
  return (covariates * coefficients.tail(coefficients.size() - 1)).array() + coefficients[0];
}

BiasModel fit_bias_model(const SharedDataset& shared, BiasKind kind) {
  const Eigen::VectorXd errors = shared.yhat - shared.y;
  BiasModel model;
  model.kind = kind;
  if (kind == BiasKind::constant) {
    model.coefficients = Eigen::VectorXd::Constant(1, stats::mean(errors));
  } else {
    model.coefficients = stats::ols(stats::with_intercept(shared.covariates), errors).coefficients;
  }
  return model;
}

CrossFitResult cross_fit_bias_model(const SharedDataset& shared, BiasKind kind, int k_folds,
                                    std::uint64_t seed) {
  const auto folds = make_folds(shared.n(), k_folds, seed);
  if (kind == BiasKind::linear && shared.n() < 2 * static_cast<Eigen::Index>(k_folds)) {
    throw AssumptionError("linear bias model requires n >= 2K (n=" + std::to_string(shared.n()) +
                          ", K=" + std::to_string(k_folds) + ")");
  }
  CrossFitResult result;
  result.out_of_fold_residual.resize(shared.n());
  const Eigen::VectorXd errors = shared.yhat - shared.y;
  std::vector<double> coefficient_sum;
  for (int k = 0; k < k_folds; ++k) {
    const auto train = folds.complement(k);
    const auto held_out = folds.members(k);
    BiasModel model = fit_bias_model(shared.select(train), kind);
    for (const auto i : held_out) {
      result.out_of_fold_residual[i] = errors[i] - model.predict_row(shared.covariates.row(i));
    }
    result.fold_models.push_back(std::move(model));
  }
  const auto p = result.fold_models.front().coefficients.size();
  result.averaged.kind = kind;
  result.averaged.coefficients.resize(p);
  for (Eigen::Index c = 0; c < p; ++c) {
    std::vector<double> values;
    for (const auto& m : result.fold_models) values.push_back(m.coefficients[c]);
    result.averaged.coefficients[c] = stats::mean(values);
  }
  return result;
}

RelationshipModel fit_relationship(const SharedDataset& shared) {
  require_rows(shared.n(), 3, "relationship model");
  if (!(stats::variance(shared.yhat) > 0.0)) {
    throw DegeneratePredictorError("relationship model requires Var(yhat) > 0 on shared data");
  }
  Eigen::MatrixXd design(shared.n(), 2);
  design.col(0).setOnes();
  design.col(1) = shared.yhat;
  const auto fit = stats::ols(design, shared.y);
  return {fit.coefficients[0], fit.coefficients[1]};
}

EstimateReport human_mean(const SharedDataset& shared, double alpha) {
  stats::check_alpha(alpha);
  require_rows(shared.n(), 2, "human_mean");
  const double n = static_cast<double>(shared.n());
  auto report = make_report(stats::mean(shared.y), std::sqrt(stats::variance(shared.y) / n),
                            alpha, Method::human_only);
  report.ess = n;
  return report;
}

EstimateReport naive_surrogate_mean(const SurrogateDataset& surrogate, double alpha) {
  stats::check_alpha(alpha);
  require_rows(surrogate.n(), 2, "naive_surrogate_mean");
  const double big_n = static_cast<double>(surrogate.n());
  return make_report(stats::mean(surrogate.yhat),
                     std::sqrt(stats::variance(surrogate.yhat) / big_n), alpha,
                     Method::naive_surrogate);
}

double tune_lambda_mean(const SharedDataset& shared, Eigen::Index surrogate_count) {
  require_rows(shared.n(), 2, "lambda tuning");
  const double var_hat = stats::variance(shared.yhat);
  if (!(var_hat > 0.0)) {
    throw DegeneratePredictorError("Var(yhat) is zero on shared data; lambda is undefined");
  }
  const double n = static_cast<double>(shared.n());
  const double big_n = static_cast<double>(surrogate_count);
  return big_n / (big_n + n) * stats::covariance(shared.y, shared.yhat) / var_hat;
}

EstimateReport ppi_mean(const SharedDataset& shared, const SurrogateDataset& surrogate,
                        Lambda lambda, double alpha) {
  stats::check_alpha(alpha);
  require_rows(shared.n(), 2, "ppi_mean (shared)");
  require_rows(surrogate.n(), 2, "ppi_mean (surrogate)");
  std::vector<std::string> warnings;
  double lam = 0.0;
  if (lambda.is_auto()) {
    try {
      lam = tune_lambda_mean(shared, surrogate.n());
    } catch (const DegeneratePredictorError&) {
      lam = 0.0;
      warnings.emplace_back(kDegeneratePredictor);
    }
  } else {
    lam = lambda.value();
    if (!std::isfinite(lam)) throw ConfigError("lambda must be finite");
  }
  const double n = static_cast<double>(shared.n());
  const double big_n = static_cast<double>(surrogate.n());
  const double mean_y = stats::mean(shared.y);
  const double rectifier = stats::mean(shared.yhat) - stats::mean(surrogate.yhat);
  const double estimate = mean_y - lam * rectifier;
  const Eigen::VectorXd residual = shared.y - lam * shared.yhat;
  const double var = stats::variance(residual) / n + lam * lam * stats::variance(surrogate.yhat) / big_n;
  auto report = make_report(estimate, std::sqrt(var), alpha, Method::ppi);
  report.lambda_used = lam;
  report.ess = ess_from(n, std::sqrt(stats::variance(shared.y) / n), report.std_error);
  report.warnings = std::move(warnings);
  return report;
}

EstimateReport dsl_mean(const SharedDataset& shared, const SurrogateDataset& surrogate,
                        double alpha) {
  stats::check_alpha(alpha);
  require_rows(shared.n(), 2, "dsl_mean (shared)");
  require_rows(surrogate.n(), 2, "dsl_mean (surrogate)");
  const double n = static_cast<double>(shared.n());
  const double big_n = static_cast<double>(surrogate.n());
  const double surrogate_mean = stats::mean(surrogate.yhat);
  const double surrogate_var = stats::variance(surrogate.yhat) / big_n;
  double estimate = 0.0;
  double var = 0.0;
  if (shared.pi) {
    const auto w = weighted_error_moments(shared.yhat - shared.y, *shared.pi);
    estimate = surrogate_mean - w.mean;
    var = w.variance_of_mean + surrogate_var;
  } else {
    estimate = surrogate_mean - (stats::mean(shared.yhat) - stats::mean(shared.y));
    const Eigen::VectorXd errors = shared.yhat - shared.y;
    var = stats::variance(errors) / n + surrogate_var;
  }
  auto report = make_report(estimate, std::sqrt(var), alpha, Method::dsl);
  report.ess = ess_from(n, std::sqrt(stats::variance(shared.y) / n), report.std_error);
  return report;
}

EstimateReport plugin_debias_mean(const SharedDataset& shared, const SurrogateDataset& surrogate,
                                  BiasKind bias_kind, int k_folds, std::uint64_t seed,
                                  double alpha) {
  stats::check_alpha(alpha);
  require_rows(surrogate.n(), 2, "plugin_debias_mean (surrogate)");
  require_same_schema(shared, surrogate);
  const auto fit = cross_fit_bias_model(shared, bias_kind, k_folds, seed);
  const Eigen::VectorXd pseudo = surrogate.yhat - fit.averaged.predict(surrogate.covariates);
  const double n = static_cast<double>(shared.n());
  const double big_n = static_cast<double>(surrogate.n());
  const double var =
      stats::variance(pseudo) / big_n + stats::variance(fit.out_of_fold_residual) / n;
  auto report = make_report(stats::mean(pseudo), std::sqrt(var), alpha, Method::plugin_debias);
  report.ess = ess_from(n, std::sqrt(stats::variance(shared.y) / n), report.std_error);
  return report;
}

EstimateReport relationship_correct_mean(const SharedDataset& shared,
                                         const SurrogateDataset& surrogate, double alpha) {
  stats::check_alpha(alpha);
  require_rows(surrogate.n(), 2, "relationship_correct_mean (surrogate)");
  const auto model = fit_relationship(shared);
  const double n = static_cast<double>(shared.n());
  const double big_n = static_cast<double>(surrogate.n());
  const double surrogate_mean = stats::mean(surrogate.yhat);
  const double estimate = model.alpha + model.beta * surrogate_mean;

  // Classical OLS coefficient covariance sigma^2 (X'X)^{-1}.
  const Eigen::VectorXd resid =
      (shared.y.array() - model.alpha - model.beta * shared.yhat.array()).matrix();
  const double sigma2 = resid.squaredNorm() / (n - 2.0);
  Eigen::Matrix2d xtx;
  xtx << n, shared.yhat.sum(), shared.yhat.sum(), shared.yhat.squaredNorm();
  const Eigen::Matrix2d coef_cov = sigma2 * xtx.inverse();
  const Eigen::Vector2d g(1.0, surrogate_mean);
  const double var = g.dot(coef_cov * g) +
                     model.beta * model.beta * stats::variance(surrogate.yhat) / big_n;
  auto report = make_report(estimate, std::sqrt(std::max(var, 0.0)), alpha, Method::relationship);
  report.ess = ess_from(n, std::sqrt(stats::variance(shared.y) / n), report.std_error);
  return report;
}

EstimateReport estimate_mean(Method method, const SharedDataset& shared,
                             const SurrogateDataset& surrogate, const MeanOptions& options,
                             double alpha) {
  switch (method) {
    case Method::human_only: return human_mean(shared, alpha);
    case Method::naive_surrogate: return naive_surrogate_mean(surrogate, alpha);
    case Method::ppi: return ppi_mean(shared, surrogate, options.lambda, alpha);
    case Method::dsl: return dsl_mean(shared, surrogate, alpha);
    case Method::plugin_debias:
      return plugin_debias_mean(shared, surrogate, options.bias_kind, options.k_folds,
                                options.seed, alpha);
    case Method::relationship: return relationship_correct_mean(shared, surrogate, alpha);
  }
  throw ConfigError("unsupported method");
}

namespace {

// Within one arm z is constant; a bias model must not see it as a covariate.
template <typename Dataset>
Dataset without_z(Dataset data) {
  if (!data.z_column) return data;
  const Eigen::Index drop = *data.z_column;
  const Eigen::Index k = data.covariates.cols();
  Eigen::MatrixXd kept(data.covariates.rows(), k - 1);
  kept << data.covariates.leftCols(drop), data.covariates.rightCols(k - drop - 1);
  data.covariates = std::move(kept);
  data.covariate_names.erase(data.covariate_names.begin() + drop);
  data.z_column.reset();
  return data;
}

std::vector<Eigen::Index> rows_with_z(const Eigen::VectorXd& z, double arm) {
  std::vector<Eigen::Index> rows;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    if (z[i] == arm) rows.push_back(i);
  }
  return rows;
}

}  // namespace

EstimateReport diff_in_means(const SharedDataset& shared, const SurrogateDataset& surrogate,
                             Method method, const MeanOptions& options, double alpha) {
  stats::check_alpha(alpha);
  const Eigen::VectorXd z_shared = shared.z();
  const auto shared1 = rows_with_z(z_shared, 1.0);
  const auto shared0 = rows_with_z(z_shared, 0.0);
  if (shared1.size() < 2 || shared0.size() < 2) {
    throw AssumptionError("diff_in_means requires at least 2 shared rows per arm (z=1: " +
                          std::to_string(shared1.size()) + ", z=0: " +
                          std::to_string(shared0.size()) + ")");
  }
  const auto sh1 = without_z(shared.select(shared1));
  const auto sh0 = without_z(shared.select(shared0));
  SurrogateDataset su1;
  SurrogateDataset su0;
  if (method != Method::human_only) {
    if (surrogate.has_z() && shared.has_z()) require_same_schema(shared, surrogate);
    const Eigen::VectorXd z_surrogate = surrogate.z();
    const auto rows1 = rows_with_z(z_surrogate, 1.0);
    const auto rows0 = rows_with_z(z_surrogate, 0.0);
    if (rows1.size() < 2 || rows0.size() < 2) {
      throw AssumptionError("diff_in_means requires at least 2 surrogate rows per arm");
    }
    su1 = without_z(surrogate.select(rows1));
    su0 = without_z(surrogate.select(rows0));
  }
  auto arm = [&](const SharedDataset& sh, const SurrogateDataset& su) {
    return method == Method::human_only ? human_mean(sh, alpha)
                                        : estimate_mean(method, sh, su, options, alpha);
  };
  const auto r1 = arm(sh1, su1);
  const auto r0 = arm(sh0, su0);
  auto report = make_report(r1.estimate - r0.estimate,
                            std::sqrt(r1.std_error * r1.std_error + r0.std_error * r0.std_error),
                            alpha, method);
  if (method != Method::naive_surrogate) {
    const double n1 = static_cast<double>(sh1.n());
    const double n0 = static_cast<double>(sh0.n());
    const double se_human =
        std::sqrt(stats::variance(sh1.y) / n1 + stats::variance(sh0.y) / n0);
    report.ess = ess_from(n1 + n0, se_human, report.std_error);
  }
  for (const auto* r : {&r1, &r0}) {
    for (const auto& w : r->warnings) report.warnings.push_back(w);
  }
  return report;
}

MomentDiagnostic moment_diagnostic(const SharedDataset& shared) {
  const Eigen::VectorXd z = shared.z();
  require_rows(shared.n(), 3, "moment_diagnostic");
  if (!(stats::variance(z) > 0.0)) {
    throw AssumptionError("moment diagnostic requires Var(z) > 0");
  }
  const Eigen::VectorXd eps = shared.yhat - shared.y;
  const auto n = shared.n();
  const double cov = stats::covariance(z, eps);
  const double mz = stats::mean(z);
  const double me = stats::mean(eps);
  Eigen::VectorXd influence(n);
  for (Eigen::Index i = 0; i < n; ++i) influence[i] = (z[i] - mz) * (eps[i] - me);
  MomentDiagnostic d;
  d.cov_z_eps = cov;
  d.std_error = std::sqrt(stats::variance(influence) / static_cast<double>(n));
  if (d.std_error > 0.0) {
    d.z_stat = cov / d.std_error;
  } else {
    d.z_stat = cov == 0.0 ? 0.0 : std::copysign(INFINITY, cov);
  }
  return d;
}

}  // namespace surrocal
