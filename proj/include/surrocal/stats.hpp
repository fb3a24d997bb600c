#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace surrocal::stats {

// Pairwise (cascade) summation. The result depends only on the order of the
// input, never on how the caller partitioned the work that produced it.
double pairwise_sum(std::span<const double> values);

// Shifted mean: x0 + sum(x - x0)/n, exact for constant input.
double mean(std::span<const double> values);
double mean(const Eigen::VectorXd& values);

// Sample variance / covariance with 1/(n-1) normalization.
double variance(std::span<const double> values);
double variance(const Eigen::VectorXd& values);
double covariance(const Eigen::VectorXd& a, const Eigen::VectorXd& b);
double correlation(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

double normal_cdf(double x);
double normal_quantile(double p);

// z_{1 - alpha/2}; throws ConfigError unless alpha is in (0, 1).
double two_sided_z(double alpha);

void check_alpha(double alpha);

struct OlsFit {
  Eigen::VectorXd coefficients;
  Eigen::VectorXd residuals;
  Eigen::MatrixXd gram_inverse;  // (X'X / n)^{-1}
};

// Least squares of y on design (intercept column supplied by the caller).
// Throws AssumptionError on rank deficiency or n <= p.
OlsFit ols(const Eigen::MatrixXd& design, const Eigen::VectorXd& y);

// Prepends a column of ones.
Eigen::MatrixXd with_intercept(const Eigen::MatrixXd& covariates);

inline std::span<const double> as_span(const Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

}  // namespace surrocal::stats
