#include <doctest.h>

#include "surrocal/error.hpp"
#include "surrocal/rng.hpp"
#include "surrocal/simlab.hpp"
#include "surrocal/stats.hpp"

#include <cmath>

using namespace surrocal;
using doctest::Approx;

TEST_CASE("gen_mean_dgp") {
  MeanDGPConfig c;
  c.mu = 3.0;
  c.n = 200;
  c.big_n = 300;
  c.seed = 4;
  SUBCASE("perfect predictor") {
    c.predictor_rho = 1.0;
    const auto s = gen_mean_dgp(c);
    CHECK(s.shared.yhat == s.shared.y);
    CHECK(s.truth == 3.0);
  }
  SUBCASE("deterministic") {
    const auto a = gen_mean_dgp(c);
    const auto b = gen_mean_dgp(c);
    CHECK(a.shared.y == b.shared.y);
    CHECK(a.surrogate.yhat == b.surrogate.yhat);
    c.seed = 5;
    CHECK(gen_mean_dgp(c).shared.y != a.shared.y);
  }
  SUBCASE("constant bias") {
    c.bias = {BiasShape::constant, 0.5};
    c.n = 100000;
    const auto s = gen_mean_dgp(c);
    const Eigen::VectorXd err = s.shared.yhat - s.shared.y;
    const double se = std::sqrt(stats::variance(err) / 1e5);
    CHECK(std::abs(stats::mean(err) - 0.5) < 3.0 * se);
  }
  SUBCASE("correlation converges to rho") {
    c.n = 100000;
    for (double rho : {0.3, 0.6, 0.9}) {
      c.predictor_rho = rho;
      for (auto bias : {MeanBias{}, MeanBias{BiasShape::linear, 0.3},
                        MeanBias{BiasShape::z_aligned, 0.4}}) {
        c.bias = bias;
        const auto s = gen_mean_dgp(c);
        CHECK(stats::correlation(s.shared.y, s.shared.yhat) == Approx(rho).epsilon(0.01 / rho));
      }
    }
  }
  SUBCASE("invalid rho") {
    c.predictor_rho = 1.2;
    CHECK_THROWS_AS(gen_mean_dgp(c), ConfigError);
  }
}

TEST_CASE("gen_ols_bias_dgp error structure") {
  const auto s = gen_ols_bias_dgp(0.4, 0.0, 1.0, 100000, 4, 8);
  const Eigen::VectorXd err = s.shared.yhat - s.shared.y;
  const Eigen::VectorXd z = s.shared.z();
  std::vector<double> e1, e0;
  for (Eigen::Index i = 0; i < err.size(); ++i) (z[i] == 1.0 ? e1 : e0).push_back(err[i]);
  auto within = [](const std::vector<double>& v, double target) {
    return std::abs(stats::mean(v) - target) < 3.0 * std::sqrt(stats::variance(v) / v.size());
  };
  CHECK(within({err.data(), err.data() + err.size()}, 0.0));
  CHECK(within(e1, 0.2));
  CHECK(within(e0, -0.2));
  CHECK_THROWS_AS(gen_ols_bias_dgp(0.4, 0.0, 1.0, 3, 10, 1), ConfigError);
}

TEST_CASE("gen_binary_dgp hits the configured accuracy") {
  BinaryDGPConfig c;
  c.n = 200000;
  c.big_n = 1;
  c.seed = 2;
  const auto s = gen_binary_dgp(c);
  const double acc = (s.shared.yhat.array() == s.shared.y.array()).cast<double>().mean();
  CHECK(acc == Approx(0.9).epsilon(0.005));
  const Eigen::VectorXd err = s.shared.yhat - s.shared.y;
  CHECK(stats::correlation(s.shared.z(), err) > 0.05);
}

TEST_CASE("gen_twin_dgp") {
  TwinDGPConfig c;
  c.n = 50;
  c.seed = 3;
  SUBCASE("noiseless identity") {
    c.theta_sd = c.eps_sd = c.eta_sd = c.xi_sd = 0.0;
    const auto s = gen_twin_dgp(c);
    CHECK(s.twin.yhat0 == s.human.y0());
    CHECK(s.twin.yhat1 == s.human.y1());
    CHECK(twin_ate(s.twin).estimate == Approx(c.tau).epsilon(1e-15));
  }
  SUBCASE("common arm bias cancels within unit") {
    c.beta0 = c.beta1 = 0.3;
    c.xi_sd = 0.0;
    c.eps_sd = 0.0;
    const auto s = gen_twin_dgp(c);
    const Eigen::VectorXd d = s.twin.yhat1 - s.twin.yhat0;
    CHECK((d.array() - c.tau).abs().maxCoeff() < 1e-12);
  }
  SUBCASE("masked view hides the unassigned arm") {
    const auto s = gen_twin_dgp(c);
    const auto obs = s.human.observed();
    for (Eigen::Index i = 0; i < obs.z.size(); ++i) {
      CHECK(obs.y[i] == (obs.z[i] == 1.0 ? s.human.y1()[i] : s.human.y0()[i]));
    }
    const auto joint = s.joint();
    CHECK(joint.y == obs.y);
  }
  SUBCASE("zero-noise tisa gap") {
    c.theta_sd = c.eps_sd = c.eta_sd = c.xi_sd = 0.0;
    c.beta1 = 0.2;
    c.beta0 = -0.1;
    CHECK(tisa_gap(gen_twin_dgp(c).joint()).estimate == Approx(0.3).epsilon(1e-12));
  }
  SUBCASE("additive offset biases the twin ATE") {
    c.beta1 = 0.3;
    c.n = 200000;
    const auto r = twin_ate(gen_twin_dgp(c).twin);
    CHECK(std::abs(r.estimate - (c.tau + 0.3)) < 3.0 * r.std_error);
  }
}

TEST_CASE("tisa_gap requires both arms") {
  TwinJoint j{Eigen::VectorXd::Ones(4), Eigen::VectorXd::Zero(4), Eigen::VectorXd::Zero(4)};
  CHECK_THROWS_AS(tisa_gap(j), AssumptionError);
  CHECK_THROWS_AS(twin_ate(TwinPredictions{}), AssumptionError);
}

TEST_CASE("twin replications") {
  TwinDGPConfig c;
  EstimatorSpec spec;
  spec.target = Target::tisa_gap;
  SUBCASE("treatment-invariant bias") {
    const auto s = run_replications(c, spec, 2000, 1);
    CHECK(s.empirical_coverage >= 0.93);
    CHECK(s.empirical_coverage <= 0.97);
  }
  SUBCASE("arm-specific bias") {
    c.beta1 = 0.2;
    c.beta0 = -0.1;
    const auto s = run_replications(c, spec, 2000, 2);
    CHECK(s.truth == Approx(0.3));
    CHECK(std::abs(s.mean_bias) < 3.0 * s.mc_std_error);
  }
  SUBCASE("interaction bias") {
    c.interaction = true;
    c.eta_mean = 0.2;
    c.beta1 = 0.5;
    spec.target = Target::twin_ate;
    const auto s = run_replications(c, spec, 2000, 3);
    CHECK(std::abs(s.mean_estimate - c.tau - 0.1) < 3.0 * s.mc_std_error);
  }
}

TEST_CASE("replication engine") {
  MeanDGPConfig c;
  c.n = 100;
  c.big_n = 400;
  EstimatorSpec spec;
  SUBCASE("single replication equals a single run") {
    const auto s = run_replications(c, spec, 1, 99);
    const auto r = run_once(c, spec, replication_seed(99, 0));
    CHECK(s.mean_estimate == r.estimate);
    CHECK(s.replications == 1);
    CHECK(s.mean_ci_width == r.ci_high - r.ci_low);
    CHECK(s.empirical_coverage == ((r.ci_low <= 0.0 && 0.0 <= r.ci_high) ? 1.0 : 0.0));
  }
  SUBCASE("worker count does not change results") {
    spec.method = Method::plugin_debias;
    spec.options.bias_kind = BiasKind::linear;
    const auto a = replicate(c, spec, 64, 7, 1);
    const auto b = replicate(c, spec, 64, 7, 5);
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].estimate == b[i].estimate);
      CHECK(a[i].std_error == b[i].std_error);
    }
    const auto sa = run_replications(c, spec, 64, 7, 1);
    const auto sb = run_replications(c, spec, 64, 7, 3);
    CHECK(sa.variance == sb.variance);
  }
  SUBCASE("structural mismatch") {
    spec.target = Target::twin_ate;
    CHECK_THROWS_AS(run_replications(c, spec, 5, 1), AssumptionError);
    spec.target = Target::ols_coefficient;
    spec.method = Method::dsl;
    CHECK_THROWS_AS(run_replications(c, spec, 5, 1), AssumptionError);
  }
  SUBCASE("zero replications") {
    CHECK_THROWS_AS(run_replications(c, spec, 0, 1), ConfigError);
  }
}

TEST_CASE("calibrated intervals cover on assumption-satisfying DGPs") {
  MeanDGPConfig c;
  c.mu = 1.0;
  c.predictor_rho = 0.6;
  c.bias = {BiasShape::constant, 0.4};
  EstimatorSpec spec;
  for (auto m : {Method::ppi, Method::dsl, Method::plugin_debias}) {
    spec.method = m;
    const auto s = run_replications(c, spec, 2000, 23, 4);
    CAPTURE(to_string(m));
    CHECK(s.empirical_coverage >= 0.93);
    CHECK(s.empirical_coverage <= 0.97);
  }
}

TEST_CASE("bias shrinks at the root-n rate") {
  EstimatorSpec spec;
  for (auto m : {Method::ppi, Method::dsl, Method::plugin_debias, Method::relationship}) {
    spec.method = m;
    MeanDGPConfig small;
    small.predictor_rho = 0.7;
    small.bias = {BiasShape::constant, 0.3};
    small.n = 100;
    small.big_n = 1000;
    MeanDGPConfig large = small;
    large.n *= 4;
    large.big_n *= 4;
    auto mean_abs_error = [&](const MeanDGPConfig& c) {
      const auto reports = replicate(c, spec, 2000, 31, 4);
      double total = 0.0;
      for (const auto& r : reports) total += std::abs(r.estimate - c.mu);
      return total / reports.size();
    };
    const double ratio = mean_abs_error(large) / mean_abs_error(small);
    CAPTURE(to_string(m));
    CHECK(ratio > 0.4);
    CHECK(ratio < 0.6);
  }
}

TEST_CASE("naive plug-in collapses on the binary DGP") {
  BinaryDGPConfig c;
  EstimatorSpec spec;
  spec.method = Method::naive_surrogate;
  CHECK(run_replications(c, spec, 500, 4).empirical_coverage < 0.6);
}

TEST_CASE("target names") {
  CHECK(target_from_string("diff") == Target::diff_in_means);
  CHECK(target_from_string("ols") == Target::ols_coefficient);
  CHECK(target_from_string("tisa_gap") == Target::tisa_gap);
  CHECK_THROWS_AS(target_from_string("median"), ConfigError);
  CHECK(bias_shape_from_string("z_aligned") == BiasShape::z_aligned);
}
