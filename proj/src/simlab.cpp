#include "surrocal/simlab.hpp"

#include "surrocal/error.hpp"
#include "surrocal/rng.hpp"
#include "surrocal/stats.hpp"

#include <cmath>
#include <string>

namespace surrocal {

namespace {

void require_count(std::int64_t count, std::int64_t minimum, const char* what) {
  if (count < minimum) {
    throw ConfigError(std::string(what) + " must be at least " + std::to_string(minimum) +
                      ", got " + std::to_string(count));
  }
}

void require_sd(double sd, const char* what) {
  if (!(sd >= 0.0) || !std::isfinite(sd)) {
    throw ConfigError(std::string(what) + " must be a finite nonnegative number");
  }
}

double bias_value(const MeanBias& bias, double x1, double z) {
  switch (bias.kind) {
    case BiasShape::none: return 0.0;
    case BiasShape::constant: return bias.value;
    case BiasShape::linear: return bias.value * x1;
    case BiasShape::z_aligned: return bias.value * (z - 0.5);
  }
  return 0.0;
}

double bias_variance(const MeanBias& bias) {
  switch (bias.kind) {
    case BiasShape::none:
    case BiasShape::constant: return 0.0;
    case BiasShape::linear: return bias.value * bias.value;
    case BiasShape::z_aligned: return bias.value * bias.value / 4.0;
  }
  return 0.0;
}

// Columns x_1, z; z is covariate 1.
struct MeanRows {
  Eigen::MatrixXd covariates;
  Eigen::VectorXd y;
  Eigen::VectorXd yhat;
};

MeanRows draw_mean_rows(const MeanDGPConfig& c, double noise_sd, std::int64_t count, Rng& rng) {
  MeanRows rows;
  rows.covariates.resize(count, 2);
  rows.y.resize(count);
  rows.yhat.resize(count);
  for (std::int64_t i = 0; i < count; ++i) {
    const double x1 = rng.normal();
    const double z = rng.bernoulli(0.5) ? 1.0 : 0.0;
    const double y = c.mu + c.sigma_y * rng.normal();
    const double w = rng.normal();
    rows.covariates(i, 0) = x1;
    rows.covariates(i, 1) = z;
    rows.y[i] = y;
    rows.yhat[i] = y - (1.0 - c.predictor_rho) * (y - c.mu) + noise_sd * w +
                   bias_value(c.bias, x1, z);
  }
  return rows;
}

}  // namespace

std::string_view to_string(BiasShape shape) {
  switch (shape) {
    case BiasShape::none: return "none";
    case BiasShape::constant: return "constant";
    case BiasShape::linear: return "linear";
    case BiasShape::z_aligned: return "z_aligned";
  }
  return "none";
}

BiasShape bias_shape_from_string(std::string_view name) {
  for (auto s : {BiasShape::none, BiasShape::constant, BiasShape::linear, BiasShape::z_aligned}) {
    if (to_string(s) == name) return s;
  }
  throw ConfigError("unknown bias shape '" + std::string(name) + "'");
}

MeanSample gen_mean_dgp(const MeanDGPConfig& c) {
  if (!(std::abs(c.predictor_rho) <= 1.0)) {
    throw ConfigError("predictor_rho must lie in [-1, 1]");
  }
  if (!(c.sigma_y > 0.0) || !std::isfinite(c.sigma_y) || !std::isfinite(c.mu) ||
      !std::isfinite(c.bias.value)) {
    throw ConfigError("mean DGP parameters must be finite with sigma_y > 0");
  }
  require_count(c.n, 1, "n");
  require_count(c.big_n, 1, "N");
  const double noise_var =
      (1.0 - c.predictor_rho * c.predictor_rho) * c.sigma_y * c.sigma_y - bias_variance(c.bias);
  if (noise_var < -1e-12) {
    throw ConfigError("bias variance exceeds the predictor's noise budget (1 - rho^2) sigma_y^2; "
                      "lower rho or the bias magnitude");
  }
  const double noise_sd = std::sqrt(std::max(noise_var, 0.0));

  Rng rng(c.seed);
  auto shared_rows = draw_mean_rows(c, noise_sd, c.n, rng);
  auto surrogate_rows = draw_mean_rows(c, noise_sd, c.big_n, rng);
  const std::vector<std::string> names{"x_1", "z"};
  MeanSample s;
  s.shared = make_shared(std::move(shared_rows.y), std::move(shared_rows.yhat),
                         std::move(shared_rows.covariates), names, 1);
  s.surrogate = make_surrogate(std::move(surrogate_rows.yhat), std::move(surrogate_rows.covariates),
                               names, 1);
  s.truth = c.mu;
  return s;
}

OlsSample gen_ols_bias_dgp(double delta, double beta0, double beta1, std::int64_t n,
                           std::int64_t big_n, std::uint64_t seed) {
  require_count(n, 4, "n");
  require_count(big_n, 4, "N");
  if (!std::isfinite(delta) || !std::isfinite(beta0) || !std::isfinite(beta1)) {
    throw ConfigError("OLS bias DGP parameters must be finite");
  }
  constexpr double kErrorNoiseSd = 0.5;
  Rng rng(seed);
  auto draw = [&](std::int64_t count, Eigen::MatrixXd& z, Eigen::VectorXd& y,
                  Eigen::VectorXd& yhat) {
    z.resize(count, 1);
    y.resize(count);
    yhat.resize(count);
    for (std::int64_t i = 0; i < count; ++i) {
      const double zi = rng.bernoulli(0.5) ? 1.0 : 0.0;
      const double yi = beta0 + beta1 * zi + rng.normal();
      z(i, 0) = zi;
      y[i] = yi;
      yhat[i] = yi + delta * (zi - 0.5) + kErrorNoiseSd * rng.normal();
    }
  };
  Eigen::MatrixXd z_shared, z_surrogate;
  Eigen::VectorXd y_shared, yhat_shared, y_surrogate, yhat_surrogate;
  draw(n, z_shared, y_shared, yhat_shared);
  draw(big_n, z_surrogate, y_surrogate, yhat_surrogate);
  OlsSample s;
  s.shared = make_shared(std::move(y_shared), std::move(yhat_shared), std::move(z_shared), {"z"}, 0);
  s.surrogate = make_surrogate(std::move(yhat_surrogate), std::move(z_surrogate), {"z"}, 0);
  s.beta0 = beta0;
  s.beta1 = beta1;
  return s;
}

MeanSample gen_binary_dgp(const BinaryDGPConfig& c) {
  require_count(c.n, 1, "n");
  require_count(c.big_n, 1, "N");
  if (!(c.accuracy > 0.0 && c.accuracy <= 1.0) || !std::isfinite(c.arm_shift)) {
    throw ConfigError("binary DGP requires accuracy in (0,1] and a finite arm shift");
  }
  const double err = 1.0 - c.accuracy;
  const double p1 = stats::normal_cdf(c.arm_shift);   // P(Y=1 | z=1)
  const double p0 = stats::normal_cdf(-c.arm_shift);  // P(Y=1 | z=0)
  const double flip_up_1 = err / (1.0 - p1);
  const double flip_down_0 = 0.5 * err / p0;
  const double flip_up_0 = 0.5 * err / (1.0 - p0);
  if (flip_up_1 > 1.0 || flip_down_0 > 1.0 || flip_up_0 > 1.0) {
    throw ConfigError("accuracy too low for the arm outcome rates; errors cannot be placed");
  }
  Rng rng(c.seed);
  auto draw = [&](std::int64_t count, Eigen::MatrixXd& z, Eigen::VectorXd& y,
                  Eigen::VectorXd& yhat) {
    z.resize(count, 1);
    y.resize(count);
    yhat.resize(count);
    for (std::int64_t i = 0; i < count; ++i) {
      const bool treated = rng.bernoulli(0.5);
      const double latent = (treated ? c.arm_shift : -c.arm_shift) + rng.normal();
      const double yi = latent > 0.0 ? 1.0 : 0.0;
      const double u = rng.uniform();
      double pred = yi;
      if (treated) {
        if (yi == 0.0 && u < flip_up_1) pred = 1.0;
      } else if (yi == 1.0) {
        if (u < flip_down_0) pred = 0.0;
      } else if (u < flip_up_0) {
        pred = 1.0;
      }
      z(i, 0) = treated ? 1.0 : 0.0;
      y[i] = yi;
      yhat[i] = pred;
    }
  };
  Eigen::MatrixXd z_shared, z_surrogate;
  Eigen::VectorXd y_shared, yhat_shared, y_surrogate, yhat_surrogate;
  draw(c.n, z_shared, y_shared, yhat_shared);
  draw(c.big_n, z_surrogate, y_surrogate, yhat_surrogate);
  MeanSample s;
  s.shared = make_shared(std::move(y_shared), std::move(yhat_shared), std::move(z_shared), {"z"}, 0);
  s.surrogate = make_surrogate(std::move(yhat_surrogate), std::move(z_surrogate), {"z"}, 0);
  s.truth = 0.5 * (p1 + p0);
  return s;
}

HumanPotentialOutcomes::HumanPotentialOutcomes(Eigen::VectorXd y0, Eigen::VectorXd y1,
                                               Eigen::VectorXd z)
    : y0_(std::move(y0)), y1_(std::move(y1)), z_(std::move(z)) {
  if (y0_.size() != z_.size() || y1_.size() != z_.size()) {
    throw DataError("potential outcome columns must have equal length");
  }
}

ObservedOutcomes HumanPotentialOutcomes::observed() const {
  ObservedOutcomes out{z_, Eigen::VectorXd(z_.size())};
  for (Eigen::Index i = 0; i < z_.size(); ++i) out.y[i] = z_[i] == 1.0 ? y1_[i] : y0_[i];
  return out;
}

TwinJoint TwinSample::joint() const {
  const auto obs = human.observed();
  TwinJoint j{obs.z, obs.y, Eigen::VectorXd(obs.z.size())};
  for (Eigen::Index i = 0; i < obs.z.size(); ++i) {
    j.yhat[i] = obs.z[i] == 1.0 ? twin.yhat1[i] : twin.yhat0[i];
  }
  return j;
}

TwinSample gen_twin_dgp(const TwinDGPConfig& c) {
  require_count(c.n, 1, "n");
  require_sd(c.theta_sd, "theta_sd");
  require_sd(c.eps_sd, "eps_sd");
  require_sd(c.eta_sd, "eta_sd");
  require_sd(c.xi_sd, "xi_sd");
  if (!std::isfinite(c.tau) || !std::isfinite(c.eta_mean) || !std::isfinite(c.beta0) ||
      !std::isfinite(c.beta1)) {
    throw ConfigError("twin DGP parameters must be finite");
  }
  Rng rng(c.seed);
  const auto n = c.n;
  Eigen::VectorXd y0(n), y1(n), z(n), yhat0(n), yhat1(n);
  for (std::int64_t i = 0; i < n; ++i) {
    const double theta = rng.normal(0.0, c.theta_sd);
    y0[i] = theta + rng.normal(0.0, c.eps_sd);
    y1[i] = theta + c.tau + rng.normal(0.0, c.eps_sd);
    const double eta = rng.normal(c.eta_mean, c.eta_sd);
    const double xi0 = rng.normal(0.0, c.xi_sd);
    const double xi1 = rng.normal(0.0, c.xi_sd);
    if (c.interaction) {
      yhat0[i] = y0[i] + eta * c.beta0 + xi0;
      yhat1[i] = y1[i] + eta * c.beta1 + xi1;
    } else {
      yhat0[i] = y0[i] + eta + c.beta0 + xi0;
      yhat1[i] = y1[i] + eta + c.beta1 + xi1;
    }
    z[i] = rng.bernoulli(0.5) ? 1.0 : 0.0;
  }
  TwinSample s;
  s.human = HumanPotentialOutcomes(std::move(y0), std::move(y1), std::move(z));
  s.twin = TwinPredictions{std::move(yhat0), std::move(yhat1)};
  s.tau = c.tau;
  return s;
}

EstimateReport twin_ate(const TwinPredictions& twin, double alpha) {
  if (twin.yhat0.size() == 0 || twin.yhat1.size() == 0) {
    throw AssumptionError("twin_ate requires twin outcomes for both arms");
  }
  if (twin.yhat0.size() != twin.yhat1.size()) {
    throw DataError("twin arm columns must have equal length");
  }
  if (twin.yhat0.size() < 2) throw AssumptionError("twin_ate requires at least 2 units");
  const Eigen::VectorXd diff = twin.yhat1 - twin.yhat0;
  const double n = static_cast<double>(diff.size());
  auto r = make_report(stats::mean(diff), std::sqrt(stats::variance(diff) / n), alpha,
                       Method::naive_surrogate);
  r.term = "twin_ate";
  return r;
}

EstimateReport tisa_gap(const TwinJoint& joint, double alpha) {
  const auto n = joint.z.size();
  if (joint.y.size() != n || joint.yhat.size() != n) {
    throw DataError("twin joint columns must have equal length");
  }
  std::vector<double> err1;
  std::vector<double> err0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double e = joint.yhat[i] - joint.y[i];
    if (joint.z[i] == 1.0) {
      err1.push_back(e);
    } else if (joint.z[i] == 0.0) {
      err0.push_back(e);
    } else {
      throw DataError("twin joint z must be 0/1");
    }
  }
  if (err1.size() < 2 || err0.size() < 2) {
    throw AssumptionError("tisa_gap requires at least 2 jointly labeled units in each arm");
  }
  const double var = stats::variance(err1) / static_cast<double>(err1.size()) +
                     stats::variance(err0) / static_cast<double>(err0.size());
  auto r = make_report(stats::mean(err1) - stats::mean(err0), std::sqrt(var), alpha, Method::dsl);
  r.term = "tisa_gap";
  return r;
}

}  // namespace surrocal
