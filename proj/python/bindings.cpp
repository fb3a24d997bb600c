#include "surrocal/design.hpp"
#include "surrocal/error.hpp"
#include "surrocal/estimators.hpp"
#include "surrocal/io.hpp"
#include "surrocal/metrics.hpp"
#include "surrocal/simlab.hpp"

#if SURROCAL_HAVE_CLI
#include "cli.hpp"
#endif

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

namespace py = pybind11;
using namespace surrocal;

namespace {

Lambda to_lambda(const std::optional<double>& value) {
  return value ? Lambda::fixed(*value) : Lambda::automatic();
}

SharedDataset shared_from_arrays(Eigen::VectorXd y, Eigen::VectorXd yhat,
                                 std::optional<Eigen::VectorXd> z,
                                 std::optional<Eigen::VectorXd> pi) {
  Eigen::MatrixXd covariates;
  std::vector<std::string> names;
  std::optional<Eigen::Index> z_column;
  if (z) {
    covariates = *z;
    names = {"z"};
    z_column = 0;
  }
  return make_shared(std::move(y), std::move(yhat), std::move(covariates), std::move(names),
                     z_column, std::move(pi));
}

SurrogateDataset surrogate_from_arrays(Eigen::VectorXd yhat, std::optional<Eigen::VectorXd> z) {
  Eigen::MatrixXd covariates;
  std::vector<std::string> names;
  std::optional<Eigen::Index> z_column;
  if (z) {
    covariates = *z;
    names = {"z"};
    z_column = 0;
  }
  return make_surrogate(std::move(yhat), std::move(covariates), std::move(names), z_column);
}

ReplicationSummary simulate(const std::map<std::string, std::string>& settings,
                            const std::string& method, const std::string& target,
                            std::int64_t reps, std::uint64_t seed, int workers,
                            std::optional<double> lambda, double alpha) {
  const auto dgp = io::dgp_from_key_values(settings);
  EstimatorSpec spec;
  spec.target = target_from_string(target);
  spec.method = method_from_string(method);
  spec.options.lambda = to_lambda(lambda);
  spec.alpha = alpha;
  return run_replications(dgp, spec, reps, seed, workers);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Surrogate-assisted estimation, design and simulation";
  m.attr("__version__") = SURROCAL_VERSION;

  auto base = py::register_exception<Error>(m, "SurrocalError", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<DataError>(m, "DataError", base.ptr());
  auto assumption = py::register_exception<AssumptionError>(m, "AssumptionError", base.ptr());
  py::register_exception<DegeneratePredictorError>(m, "DegeneratePredictorError",
                                                   assumption.ptr());

  py::class_<EstimateReport>(m, "EstimateReport")
      .def_readonly("estimate", &EstimateReport::estimate)
      .def_readonly("std_error", &EstimateReport::std_error)
      .def_readonly("ci_low", &EstimateReport::ci_low)
      .def_readonly("ci_high", &EstimateReport::ci_high)
      .def_readonly("alpha", &EstimateReport::alpha)
      .def_property_readonly("method",
                             [](const EstimateReport& r) { return std::string(to_string(r.method)); })
      .def_readonly("lambda_used", &EstimateReport::lambda_used)
      .def_readonly("ess", &EstimateReport::ess)
      .def_readonly("term", &EstimateReport::term)
      .def_readonly("warnings", &EstimateReport::warnings)
      .def("to_json", [](const EstimateReport& r) { return io::to_json(r).dump(); })
      .def("__repr__", [](const EstimateReport& r) {
        std::ostringstream s;
        s << "EstimateReport(" << to_string(r.method) << ", estimate=" << r.estimate
          << ", std_error=" << r.std_error << ")";
        return s.str();
      });

  py::class_<SharedDataset>(m, "SharedDataset")
      .def_property_readonly("n", &SharedDataset::n)
      .def_readonly("covariate_names", &SharedDataset::covariate_names)
      .def_readonly("covariates", &SharedDataset::covariates)
      .def_readonly("y", &SharedDataset::y)
      .def_readonly("yhat", &SharedDataset::yhat)
      .def_readonly("pi", &SharedDataset::pi);
  py::class_<SurrogateDataset>(m, "SurrogateDataset")
      .def_property_readonly("n", &SurrogateDataset::n)
      .def_readonly("covariate_names", &SurrogateDataset::covariate_names)
      .def_readonly("covariates", &SurrogateDataset::covariates)
      .def_readonly("yhat", &SurrogateDataset::yhat);

  m.def("load_shared", [](const std::filesystem::path& p) { return load_shared(p); });
  m.def("load_surrogate", [](const std::filesystem::path& p) { return load_surrogate(p); });
  m.def("shared_from_arrays", &shared_from_arrays, py::arg("y"), py::arg("yhat"),
        py::arg("z") = py::none(), py::arg("pi") = py::none());
  m.def("surrogate_from_arrays", &surrogate_from_arrays, py::arg("yhat"),
        py::arg("z") = py::none());

  m.def("human_mean", &human_mean, py::arg("shared"), py::arg("alpha") = 0.05);
  m.def("naive_surrogate_mean", &naive_surrogate_mean, py::arg("surrogate"),
        py::arg("alpha") = 0.05);
  m.def("tune_lambda_mean", &tune_lambda_mean, py::arg("shared"), py::arg("surrogate_count"));
  m.def(
      "ppi_mean",
      [](const SharedDataset& s, const SurrogateDataset& u, std::optional<double> lambda,
         double alpha) { return ppi_mean(s, u, to_lambda(lambda), alpha); },
      py::arg("shared"), py::arg("surrogate"), py::arg("lambda_") = py::none(),
      py::arg("alpha") = 0.05);
  m.def("dsl_mean", &dsl_mean, py::arg("shared"), py::arg("surrogate"), py::arg("alpha") = 0.05);
  m.def(
      "plugin_debias_mean",
      [](const SharedDataset& s, const SurrogateDataset& u, const std::string& kind, int k,
         std::uint64_t seed, double alpha) {
        return plugin_debias_mean(s, u, bias_kind_from_string(kind), k, seed, alpha);
      },
      py::arg("shared"), py::arg("surrogate"), py::arg("bias_kind") = "constant",
      py::arg("k_folds") = 5, py::arg("seed") = 0, py::arg("alpha") = 0.05);
  m.def("relationship_correct_mean", &relationship_correct_mean, py::arg("shared"),
        py::arg("surrogate"), py::arg("alpha") = 0.05);
  m.def(
      "diff_in_means",
      [](const SharedDataset& s, const SurrogateDataset& u, const std::string& method,
         std::optional<double> lambda, double alpha) {
        MeanOptions options;
        options.lambda = to_lambda(lambda);
        return diff_in_means(s, u, method_from_string(method), options, alpha);
      },
      py::arg("shared"), py::arg("surrogate"), py::arg("method") = "ppi",
      py::arg("lambda_") = py::none(), py::arg("alpha") = 0.05);
  m.def("human_ols", &human_ols, py::arg("shared"), py::arg("alpha") = 0.05);
  m.def("naive_surrogate_ols", &naive_surrogate_ols, py::arg("surrogate"),
        py::arg("alpha") = 0.05);
  m.def(
      "ppi_ols",
      [](const SharedDataset& s, const SurrogateDataset& u, std::optional<double> lambda,
         double alpha) { return ppi_ols(s, u, to_lambda(lambda), alpha); },
      py::arg("shared"), py::arg("surrogate"), py::arg("lambda_") = py::none(),
      py::arg("alpha") = 0.05);

  py::class_<MomentDiagnostic>(m, "MomentDiagnostic")
      .def_readonly("cov_z_eps", &MomentDiagnostic::cov_z_eps)
      .def_readonly("std_error", &MomentDiagnostic::std_error)
      .def_readonly("z_stat", &MomentDiagnostic::z_stat);
  m.def("moment_diagnostic", &moment_diagnostic, py::arg("shared"));

  py::class_<DesignInputs>(m, "DesignInputs")
      .def(py::init<>())
      .def_readwrite("rho", &DesignInputs::rho)
      .def_readwrite("sigma_y", &DesignInputs::sigma_y)
      .def_readwrite("effect", &DesignInputs::effect)
      .def_readwrite("alpha", &DesignInputs::alpha)
      .def_readwrite("cost_human", &DesignInputs::cost_human)
      .def_readwrite("cost_surrogate", &DesignInputs::cost_surrogate)
      .def_readwrite("budget", &DesignInputs::budget);
  py::class_<DesignPlan>(m, "DesignPlan")
      .def_readonly("n_human", &DesignPlan::n_human)
      .def_readonly("n_surrogate", &DesignPlan::n_surrogate)
      .def_readonly("achieved_power", &DesignPlan::achieved_power)
      .def_readonly("ess", &DesignPlan::ess)
      .def_readonly("total_cost", &DesignPlan::total_cost);
  m.def("effective_sample_size", &effective_sample_size, py::arg("n"), py::arg("N"),
        py::arg("rho"));
  m.def("power_two_arm", &power_two_arm, py::arg("inputs"), py::arg("n_human"),
        py::arg("n_surrogate"));
  m.def("allocate_budget", &allocate_budget, py::arg("inputs"));
  m.def("pilot_rho", &pilot_rho, py::arg("pilot"));

  py::class_<ReplicationSummary>(m, "ReplicationSummary")
      .def_readonly("method", &ReplicationSummary::method)
      .def_readonly("target", &ReplicationSummary::target)
      .def_readonly("replications", &ReplicationSummary::replications)
      .def_readonly("truth", &ReplicationSummary::truth)
      .def_readonly("mean_estimate", &ReplicationSummary::mean_estimate)
      .def_readonly("mean_bias", &ReplicationSummary::mean_bias)
      .def_readonly("empirical_coverage", &ReplicationSummary::empirical_coverage)
      .def_readonly("mean_ci_width", &ReplicationSummary::mean_ci_width)
      .def_readonly("variance", &ReplicationSummary::variance)
      .def_readonly("mc_std_error", &ReplicationSummary::mc_std_error);
  m.def("simulate", &simulate, py::arg("settings"), py::arg("method") = "ppi",
        py::arg("target") = "mean", py::arg("reps") = 1000, py::arg("seed") = 0,
        py::arg("workers") = 1, py::arg("lambda_") = py::none(), py::arg("alpha") = 0.05,
        "Monte Carlo summary; settings use the config-file keys, e.g. {'dgp': 'mean'}.");

  m.def("wasserstein1", [](const std::vector<double>& a, const std::vector<double>& b) {
    return wasserstein1(a, b);
  });
  m.def("kl_discrete", [](const std::vector<double>& p, const std::vector<double>& q) {
    return kl_discrete(p, q);
  });
  m.def("total_variation", [](const std::vector<double>& p, const std::vector<double>& q) {
    return total_variation(p, q);
  });

  py::class_<EffectPair>(m, "EffectPair")
      .def(py::init([](double he, double hs, double le, double ls, std::string id) {
             return EffectPair{he, hs, le, ls, std::move(id)};
           }),
           py::arg("human_effect"), py::arg("human_se"), py::arg("llm_effect"),
           py::arg("llm_se"), py::arg("study_id") = "")
      .def_readonly("human_effect", &EffectPair::human_effect)
      .def_readonly("human_se", &EffectPair::human_se)
      .def_readonly("llm_effect", &EffectPair::llm_effect)
      .def_readonly("llm_se", &EffectPair::llm_se)
      .def_readonly("study_id", &EffectPair::study_id);
  py::class_<AgreementRates>(m, "AgreementRates")
      .def_readonly("direction_agreement", &AgreementRates::direction_agreement)
      .def_readonly("significance_agreement", &AgreementRates::significance_agreement)
      .def_readonly("false_significance_rate", &AgreementRates::false_significance_rate);
  m.def(
      "agreement_rates",
      [](const std::vector<EffectPair>& pairs, double alpha) {
        return agreement_rates(pairs, alpha);
      },
      py::arg("pairs"), py::arg("alpha") = 0.05);
  m.def("effect_correlation",
        [](const std::vector<EffectPair>& pairs) { return effect_correlation(pairs); });
  m.def("load_effect_pairs",
        [](const std::filesystem::path& p) { return load_effect_pairs(p); });

  py::class_<ScenarioSample>(m, "ScenarioSample")
      .def(py::init([](std::string id, std::vector<double> values, std::vector<double> probs,
                       std::vector<double> responses) {
             return ScenarioSample{std::move(id), std::move(values), std::move(probs),
                                   std::move(responses)};
           }),
           py::arg("scenario_id"), py::arg("outcome_values"), py::arg("probabilities"),
           py::arg("responses"));
  py::class_<RiskEstimate>(m, "RiskEstimate")
      .def_readonly("risk", &RiskEstimate::risk)
      .def_readonly("std_error", &RiskEstimate::std_error)
      .def_readonly("ci_low", &RiskEstimate::ci_low)
      .def_readonly("ci_high", &RiskEstimate::ci_high)
      .def_readonly("m_scenarios", &RiskEstimate::m_scenarios);
  m.def(
      "estimate_risk",
      [](const std::vector<ScenarioSample>& scenarios, const std::string& loss, double alpha) {
        return estimate_risk(scenarios, loss_from_string(loss), alpha);
      },
      py::arg("scenarios"), py::arg("loss") = "log_loss", py::arg("alpha") = 0.05);
  m.def("load_scenarios", [](const std::filesystem::path& p, const std::filesystem::path& r) {
    return load_scenarios(p, r);
  });

#if SURROCAL_HAVE_CLI
  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int status = cli::main_entry(args, out, err);
        return py::make_tuple(status, out.str(), err.str());
      },
      py::arg("args"), "Runs the command-line tool in-process; returns (status, stdout, stderr).");
#endif
}
