#include "surrocal/stats.hpp"

#include "surrocal/error.hpp"

#include <boost/math/distributions/normal.hpp>

#include <cmath>
#include <string>

namespace surrocal::stats {

namespace {

constexpr std::size_t kPairwiseBlock = 8;

double pairwise_sum_impl(const double* data, std::size_t count) {
  if (count <= kPairwiseBlock) {
    double acc = 0.0;
    for (std::size_t i = 0; i < count; ++i) acc += data[i];
    return acc;
  }
  const std::size_t half = count / 2;
  return pairwise_sum_impl(data, half) + pairwise_sum_impl(data + half, count - half);
}

}  // namespace

double pairwise_sum(std::span<const double> values) {
  return pairwise_sum_impl(values.data(), values.size());
}

double mean(std::span<const double> values) {
  if (values.empty()) return std::nan("");
  const double shift = values.front();
  double acc = 0.0;
  for (double v : values) acc += v - shift;
  return shift + acc / static_cast<double>(values.size());
}

double mean(const Eigen::VectorXd& values) { return mean(as_span(values)); }

double variance(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 2) return std::nan("");
  const double m = mean(values);
  double acc = 0.0;
  for (double v : values) acc += (v - m) * (v - m);
  return acc / static_cast<double>(n - 1);
}

double variance(const Eigen::VectorXd& values) { return variance(as_span(values)); }

double covariance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const auto n = a.size();
  if (n != b.size() || n < 2) return std::nan("");
  const double ma = mean(a);
  const double mb = mean(b);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) acc += (a[i] - ma) * (b[i] - mb);
  return acc / static_cast<double>(n - 1);
}

double correlation(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return covariance(a, b) / std::sqrt(variance(a) * variance(b));
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw ConfigError("normal quantile requires p in (0,1), got " + std::to_string(p));
  }
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ConfigError("alpha must lie in (0,1), got " + std::to_string(alpha));
  }
}

double two_sided_z(double alpha) {
  check_alpha(alpha);
  return normal_quantile(1.0 - alpha / 2.0);
}

Eigen::MatrixXd with_intercept(const Eigen::MatrixXd& covariates) {
  Eigen::MatrixXd design(covariates.rows(), covariates.cols() + 1);
  design.col(0).setOnes();
  design.rightCols(covariates.cols()) = covariates;
  return design;
}

OlsFit ols(const Eigen::MatrixXd& design, const Eigen::VectorXd& y) {
  const auto n = design.rows();
  const auto p = design.cols();
  if (n <= p) {
    throw AssumptionError("OLS needs more rows than parameters (n=" + std::to_string(n) +
                          ", p=" + std::to_string(p) + ")");
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < p) {
    throw AssumptionError("design matrix is rank deficient (rank " + std::to_string(qr.rank()) +
                          " < " + std::to_string(p) + ")");
  }
  OlsFit fit;
  fit.coefficients = qr.solve(y);
  fit.residuals = y - design * fit.coefficients;
  const Eigen::MatrixXd gram = design.transpose() * design / static_cast<double>(n);
  fit.gram_inverse = gram.ldlt().solve(Eigen::MatrixXd::Identity(p, p));
  return fit;
}

}  // namespace surrocal::stats
