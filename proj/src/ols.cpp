#include "surrocal/error.hpp"
#include "surrocal/estimators.hpp"
#include "surrocal/stats.hpp"

#include <cmath>

namespace surrocal {

namespace {

// Per-observation influence contributions (X'X/n)^{-1} x_i r_i, one row per
// observation, one column per coefficient.
Eigen::MatrixXd influence(const Eigen::MatrixXd& design, const stats::OlsFit& fit) {
  return (design * fit.gram_inverse).array().colwise() * fit.residuals.array();
}

std::vector<std::string> term_names(const std::vector<std::string>& covariate_names) {
  std::vector<std::string> names{"intercept"};
  names.insert(names.end(), covariate_names.begin(), covariate_names.end());
  return names;
}

void require_regression_rows(Eigen::Index n, Eigen::Index k, const char* what) {
  if (n <= k + 1) {
    throw AssumptionError(std::string(what) + " requires n > k + 1 (n=" + std::to_string(n) +
                          ", k=" + std::to_string(k) + ")");
  }
}

std::vector<EstimateReport> plain_ols(const Eigen::MatrixXd& covariates,
                                      const std::vector<std::string>& names,
                                      const Eigen::VectorXd& outcome, double alpha,
                                      Method method) {
  stats::check_alpha(alpha);
  require_regression_rows(covariates.rows(), covariates.cols(), "OLS");
  const Eigen::MatrixXd design = stats::with_intercept(covariates);
  const auto fit = stats::ols(design, outcome);
  const Eigen::MatrixXd psi = influence(design, fit);
  const double n = static_cast<double>(design.rows());
  const auto terms = term_names(names);
  std::vector<EstimateReport> out;
  for (Eigen::Index c = 0; c < design.cols(); ++c) {
    const Eigen::VectorXd a = psi.col(c);
    auto r = make_report(fit.coefficients[c], std::sqrt(stats::variance(a) / n), alpha, method);
    r.term = terms[static_cast<std::size_t>(c)];
    if (method == Method::human_only) r.ess = n;
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace

std::vector<EstimateReport> human_ols(const SharedDataset& shared, double alpha) {
  return plain_ols(shared.covariates, shared.covariate_names, shared.y, alpha, Method::human_only);
}

std::vector<EstimateReport> naive_surrogate_ols(const SurrogateDataset& surrogate, double alpha) {
  return plain_ols(surrogate.covariates, surrogate.covariate_names, surrogate.yhat, alpha,
                   Method::naive_surrogate);
}

std::vector<EstimateReport> ppi_ols(const SharedDataset& shared, const SurrogateDataset& surrogate,
                                    Lambda lambda, double alpha) {
  stats::check_alpha(alpha);
  require_same_schema(shared, surrogate);
  require_regression_rows(shared.n(), shared.k(), "ppi_ols (shared)");
  require_regression_rows(surrogate.n(), surrogate.k(), "ppi_ols (surrogate)");
  if (!lambda.is_auto() && !std::isfinite(lambda.value())) {
    throw ConfigError("lambda must be finite");
  }

  const Eigen::MatrixXd x_shared = stats::with_intercept(shared.covariates);
  const Eigen::MatrixXd x_surrogate = stats::with_intercept(surrogate.covariates);
  const auto fit_y = stats::ols(x_shared, shared.y);
  const auto fit_hat = stats::ols(x_shared, shared.yhat);
  const auto fit_surrogate = stats::ols(x_surrogate, surrogate.yhat);

  const Eigen::MatrixXd psi_y = influence(x_shared, fit_y);
  const Eigen::MatrixXd psi_hat = influence(x_shared, fit_hat);
  const Eigen::MatrixXd psi_surrogate = influence(x_surrogate, fit_surrogate);

  const double n = static_cast<double>(shared.n());
  const double big_n = static_cast<double>(surrogate.n());
  const auto terms = term_names(shared.covariate_names);
  std::vector<EstimateReport> out;
  for (Eigen::Index c = 0; c < x_shared.cols(); ++c) {
    const Eigen::VectorXd a = psi_y.col(c);
    const Eigen::VectorXd b = psi_hat.col(c);
    const Eigen::VectorXd phi = psi_surrogate.col(c);
    const double var_b = stats::variance(b) / n + stats::variance(phi) / big_n;
    std::vector<std::string> warnings;
    double lam = 0.0;
    if (lambda.is_auto()) {
      // Minimizer of Var(a - lam*b)/n + lam^2 Var(phi)/N.
      if (var_b > 0.0) {
        lam = stats::covariance(a, b) / n / var_b;
      } else {
        warnings.emplace_back("degenerate_predictor");
      }
    } else {
      lam = lambda.value();
    }
    const double estimate =
        fit_y.coefficients[c] - lam * (fit_hat.coefficients[c] - fit_surrogate.coefficients[c]);
    const Eigen::VectorXd combined = a - lam * b;
    const double var = stats::variance(combined) / n + lam * lam * stats::variance(phi) / big_n;
    auto r = make_report(estimate, std::sqrt(var), alpha, Method::ppi);
    r.term = terms[static_cast<std::size_t>(c)];
    r.lambda_used = lam;
    const double se_human = std::sqrt(stats::variance(a) / n);
    r.ess = r.std_error > 0.0 ? n * (se_human / r.std_error) * (se_human / r.std_error) : n;
    r.warnings = std::move(warnings);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace surrocal
