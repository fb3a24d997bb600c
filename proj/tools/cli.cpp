#include "cli.hpp"

#include "surrocal/csv.hpp"
#include "surrocal/error.hpp"
#include "surrocal/rng.hpp"
#include "surrocal/stats.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <sstream>

namespace surrocal::cli {

namespace {

std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open input file " + path);
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return io::fnv1a_hex(bytes);
}

void add_input(nlohmann::json& settings, const char* key, const std::string& path) {
  if (path.empty()) return;
  settings[key] = path;
  settings[std::string(key) + "_fnv1a"] = file_digest(path);
}

Lambda parse_lambda(const std::string& text) {
  if (text == "auto") return Lambda::automatic();
  return Lambda::fixed(io::parse_double(text, "lambda"));
}

std::uint64_t require_seed(const RunConfig& c, const char* why) {
  if (!c.seed) throw ConfigError(std::string("--seed is required for ") + why);
  return *c.seed;
}

io::KeyValues merged_dgp_settings(const RunConfig& c) {
  io::KeyValues kv;
  if (!c.config_path.empty()) kv = io::read_key_values(c.config_path);
  for (const auto& [key, value] : c.dgp_settings) kv[key] = value;
  return kv;
}

Target default_target(const DgpConfig& dgp) {
  if (std::holds_alternative<OlsBiasConfig>(dgp)) return Target::ols_coefficient;
  if (std::holds_alternative<TwinDGPConfig>(dgp)) return Target::twin_ate;
  return Target::mean;
}

nlohmann::json provenance(const RunConfig& c) {
  const auto settings = settings_of(c);
  nlohmann::json p;
  p["tool"] = "surrocal";
  p["version"] = SURROCAL_VERSION;
  p["command"] = std::string(to_string(c.command));
  p["seed"] = c.seed ? nlohmann::json(*c.seed) : nlohmann::json(nullptr);
  p["config_hash"] = io::fnv1a_hex(settings.dump());
  p["settings"] = settings;
  return p;
}

void write_csv_provenance(std::ostream& out, const nlohmann::json& p) {
  out << "# " << p["tool"].get<std::string>() << ' ' << p["version"].get<std::string>() << ' '
      << p["command"].get<std::string>() << '\n';
  out << "# seed: " << (p["seed"].is_null() ? std::string("none") : p["seed"].dump()) << '\n';
  out << "# config_hash: " << p["config_hash"].get<std::string>() << '\n';
  out << "# settings: " << p["settings"].dump() << '\n';
}

// Writes to the configured path or to `fallback`.
template <typename F>
void emit(const RunConfig& c, std::ostream& fallback, F&& body) {
  if (c.output_path.empty()) {
    body(fallback);
    return;
  }
  std::ofstream file(c.output_path, std::ios::binary);
  if (!file) throw ConfigError("cannot write output file " + c.output_path);
  body(file);
  if (!file) throw ConfigError("failed writing output file " + c.output_path);
}

void emit_json(const RunConfig& c, std::ostream& out, const char* key,
               const nlohmann::json& payload) {
  nlohmann::json doc;
  doc["provenance"] = provenance(c);
  doc[key] = payload;
  emit(c, out, [&](std::ostream& o) { o << doc.dump(2) << '\n'; });
}

template <typename F>
void emit_csv(const RunConfig& c, std::ostream& out, F&& rows) {
  const auto p = provenance(c);
  emit(c, out, [&](std::ostream& o) {
    write_csv_provenance(o, p);
    rows(o);
  });
}

void run_estimate(const RunConfig& c, std::ostream& out) {
  if (c.shared_path.empty()) throw ConfigError("estimate requires --shared");
  if (c.methods.size() != 1) throw ConfigError("estimate takes exactly one --method");
  const Method method = method_from_string(c.methods.front());
  const auto shared = load_shared(c.shared_path, c.schema);

  if (c.target == "moment") {
    const auto d = moment_diagnostic(shared);
    if (c.format == Format::json) {
      emit_json(c, out, "diagnostic", io::to_json(d));
    } else {
      emit_csv(c, out, [&](std::ostream& o) { io::write_flat_csv(o, io::to_json(d)); });
    }
    return;
  }

  SurrogateDataset surrogate;
  if (!c.surrogate_path.empty()) {
    surrogate = load_surrogate(c.surrogate_path, c.schema, shared);
  } else if (method != Method::human_only) {
    throw ConfigError("method '" + c.methods.front() + "' requires --surrogate");
  }

  MeanOptions options;
  options.lambda = parse_lambda(c.lambda);
  options.bias_kind = bias_kind_from_string(c.bias_kind);
  options.k_folds = c.k_folds;
  if (method == Method::plugin_debias) options.seed = require_seed(c, "plugin_debias folds");

  std::vector<EstimateReport> reports;
  if (c.target == "mean") {
    reports.push_back(estimate_mean(method, shared, surrogate, options, c.alpha));
  } else if (c.target == "diff") {
    reports.push_back(diff_in_means(shared, surrogate, method, options, c.alpha));
  } else if (c.target == "ols") {
    switch (method) {
      case Method::human_only: reports = human_ols(shared, c.alpha); break;
      case Method::naive_surrogate: reports = naive_surrogate_ols(surrogate, c.alpha); break;
      case Method::ppi: reports = ppi_ols(shared, surrogate, options.lambda, c.alpha); break;
      default:
        throw ConfigError("target 'ols' supports methods human_only, naive_surrogate and ppi");
    }
  } else {
    throw ConfigError("unknown target '" + c.target + "' (expected mean, diff, ols or moment)");
  }

  if (c.format == Format::csv) {
    emit_csv(c, out, [&](std::ostream& o) { io::write_reports_csv(o, reports); });
  } else if (c.target == "ols") {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& r : reports) list.push_back(io::to_json(r));
    emit_json(c, out, "reports", list);
  } else {
    emit_json(c, out, "report", io::to_json(reports.front()));
  }
}

DesignInputs resolved_design(const RunConfig& c) {
  DesignInputs in = c.design;
  if (!c.pilot_path.empty()) in.rho = pilot_rho(load_shared(c.pilot_path, c.schema));
  return in;
}

void print_design_table(std::ostream& log, const DesignInputs& in, const DesignPlan& plan) {
  auto row = [&](const char* label, const std::string& value) {
    log << "  " << label << std::string(18 - std::string(label).size(), ' ') << value << '\n';
  };
  auto num = [](double v) { return csv::format_number(v); };
  log << "mixed-subjects design\n";
  row("rho", num(in.rho));
  row("effect", num(in.effect));
  row("sigma_y", num(in.sigma_y));
  row("alpha", num(in.alpha));
  row("budget", num(in.budget));
  row("n_human", std::to_string(plan.n_human));
  row("n_surrogate", std::to_string(plan.n_surrogate));
  row("ess", num(plan.ess));
  row("achieved_power", num(plan.achieved_power));
  row("total_cost", num(plan.total_cost));
}

void run_design(const RunConfig& c, std::ostream& out, std::ostream& log) {
  const DesignInputs in = resolved_design(c);
  validate(in);
  DesignPlan plan;
  if (c.n_human || c.n_surrogate) {
    if (!c.n_human || !c.n_surrogate) {
      throw ConfigError("--n-human and --n-surrogate must be given together");
    }
    if (*c.n_human < 4 || *c.n_surrogate < 0) {
      throw ConfigError("fixed plans need n_human >= 4 (2 per arm) and n_surrogate >= 0");
    }
    plan.n_human = *c.n_human;
    plan.n_surrogate = *c.n_surrogate;
    plan.achieved_power = power_two_arm(in, plan.n_human, plan.n_surrogate);
    plan.ess = effective_sample_size(static_cast<double>(plan.n_human),
                                     static_cast<double>(plan.n_surrogate), in.rho);
    plan.total_cost = static_cast<double>(plan.n_human) * in.cost_human +
                      static_cast<double>(plan.n_surrogate) * in.cost_surrogate;
  } else {
    plan = allocate_budget(in);
  }
  print_design_table(log, in, plan);
  auto payload = io::to_json(plan);
  payload["rho"] = in.rho;
  if (c.format == Format::json) {
    emit_json(c, out, "plan", payload);
  } else {
    emit_csv(c, out, [&](std::ostream& o) { io::write_flat_csv(o, payload); });
  }
}

void emit_summaries(const RunConfig& c, std::ostream& out,
                    const std::vector<ReplicationSummary>& summaries) {
  if (c.format == Format::csv) {
    emit_csv(c, out, [&](std::ostream& o) { io::write_summaries_csv(o, summaries); });
    return;
  }
  nlohmann::json list = nlohmann::json::array();
  for (const auto& s : summaries) list.push_back(io::to_json(s));
  emit_json(c, out, "summaries", list);
}

EstimatorSpec base_spec(const RunConfig& c) {
  EstimatorSpec spec;
  spec.options.lambda = parse_lambda(c.lambda);
  spec.options.bias_kind = bias_kind_from_string(c.bias_kind);
  spec.options.k_folds = c.k_folds;
  spec.coefficient = c.coefficient;
  spec.alpha = c.alpha;
  return spec;
}

void run_simulate(const RunConfig& c, std::ostream& out) {
  const std::uint64_t seed = require_seed(c, "simulate");
  const DgpConfig dgp = io::dgp_from_key_values(merged_dgp_settings(c));
  EstimatorSpec spec = base_spec(c);
  spec.options.seed = seed;
  spec.target = c.target.empty() ? default_target(dgp) : target_from_string(c.target);
  std::vector<ReplicationSummary> summaries;
  for (const auto& name : c.methods) {
    spec.method = method_from_string(name);
    summaries.push_back(run_replications(dgp, spec, c.reps, seed, c.workers));
  }
  emit_summaries(c, out, summaries);
}

void export_twin_draw(const RunConfig& c, const TwinDGPConfig& config, std::uint64_t seed) {
  TwinDGPConfig one = config;
  one.seed = replication_seed(seed, 0);
  const auto sample = gen_twin_dgp(one);
  const auto observed = sample.human.observed();
  std::ofstream file(c.export_path, std::ios::binary);
  if (!file) throw ConfigError("cannot write export file " + c.export_path);
  write_csv_provenance(file, provenance(c));
  file << "id,z,y,yhat0,yhat1\n";
  for (Eigen::Index i = 0; i < observed.z.size(); ++i) {
    file << i << ',' << csv::format_number(observed.z[i]) << ','
         << csv::format_number(observed.y[i]) << ',' << csv::format_number(sample.twin.yhat0[i])
         << ',' << csv::format_number(sample.twin.yhat1[i]) << '\n';
  }
}

void run_twin(const RunConfig& c, std::ostream& out) {
  const std::uint64_t seed = require_seed(c, "twin");
  auto kv = merged_dgp_settings(c);
  if (const auto it = kv.find("dgp"); it != kv.end() && it->second != "twin") {
    throw ConfigError("twin command requires dgp = twin (got '" + it->second + "')");
  }
  kv["dgp"] = "twin";
  const DgpConfig dgp = io::dgp_from_key_values(kv);
  EstimatorSpec spec = base_spec(c);
  std::vector<ReplicationSummary> summaries;
  for (Target t : {Target::twin_ate, Target::tisa_gap}) {
    spec.target = t;
    summaries.push_back(run_replications(dgp, spec, c.reps, seed, c.workers));
  }
  if (!c.export_path.empty()) export_twin_draw(c, std::get<TwinDGPConfig>(dgp), seed);
  emit_summaries(c, out, summaries);
}

void run_metrics(const RunConfig& c, std::ostream& out) {
  const bool pairs = !c.pairs_path.empty();
  const bool samples = !c.sample_a_path.empty() || !c.sample_b_path.empty();
  const bool dists = !c.p_path.empty() || !c.q_path.empty();
  if (!pairs && !samples && !dists) {
    throw ConfigError("metrics needs --pairs, --sample-a/--sample-b or --p/--q");
  }
  if (samples && (c.sample_a_path.empty() || c.sample_b_path.empty())) {
    throw ConfigError("--sample-a and --sample-b must be given together");
  }
  if (dists && (c.p_path.empty() || c.q_path.empty())) {
    throw ConfigError("--p and --q must be given together");
  }
  nlohmann::json m;
  if (pairs) {
    const auto corpus = load_effect_pairs(c.pairs_path);
    const auto rates = agreement_rates(corpus, c.alpha);
    m["n_pairs"] = corpus.size();
    const auto rates_json = io::to_json(rates);
    for (const auto& [key, value] : rates_json.items()) m[key] = value;
    if (corpus.size() >= 3) {
      m["effect_correlation"] = effect_correlation(corpus);
    } else {
      m["effect_correlation"] = nullptr;
    }
  }
  if (samples) {
    m["wasserstein1"] =
        wasserstein1(load_values(c.sample_a_path, c.column), load_values(c.sample_b_path, c.column));
  }
  if (dists) {
    const auto p = load_values(c.p_path, c.column);
    const auto q = load_values(c.q_path, c.column);
    m["kl"] = kl_discrete(p, q);
    m["total_variation"] = total_variation(p, q);
  }
  if (c.format == Format::json) {
    emit_json(c, out, "metrics", m);
  } else {
    emit_csv(c, out, [&](std::ostream& o) { io::write_flat_csv(o, m); });
  }
}

void run_risk(const RunConfig& c, std::ostream& out) {
  if (c.predictions_path.empty() || c.responses_path.empty()) {
    throw ConfigError("risk requires --predictions and --responses");
  }
  const auto scenarios = load_scenarios(c.predictions_path, c.responses_path);
  const auto r = estimate_risk(scenarios, loss_from_string(c.loss), c.alpha);
  if (c.format == Format::json) {
    emit_json(c, out, "risk", io::to_json(r));
  } else {
    emit_csv(c, out, [&](std::ostream& o) { io::write_flat_csv(o, io::to_json(r)); });
  }
}

nlohmann::json estimator_settings(const RunConfig& c) {
  nlohmann::json s;
  s["methods"] = c.methods;
  s["lambda"] = c.lambda;
  s["bias_kind"] = c.bias_kind;
  s["k_folds"] = c.k_folds;
  return s;
}

}  // namespace

std::string_view to_string(Command command) {
  switch (command) {
    case Command::estimate: return "estimate";
    case Command::design: return "design";
    case Command::simulate: return "simulate";
    case Command::twin: return "twin";
    case Command::metrics: return "metrics";
    case Command::risk: return "risk";
  }
  return "estimate";
}

nlohmann::json settings_of(const RunConfig& c) {
  nlohmann::json s;
  s["command"] = std::string(to_string(c.command));
  s["alpha"] = c.alpha;
  s["format"] = c.format == Format::json ? "json" : "csv";
  switch (c.command) {
    case Command::estimate:
      s.update(estimator_settings(c));
      add_input(s, "shared", c.shared_path);
      add_input(s, "surrogate", c.surrogate_path);
      s["target"] = c.target;
      if (c.target == "ols") s.erase("k_folds");
      s["schema"] = {{"id", c.schema.id},       {"y", c.schema.y},   {"yhat", c.schema.yhat},
                     {"z", c.schema.z},         {"pi", c.schema.pi},
                     {"covariate_prefix", c.schema.covariate_prefix}};
      break;
    case Command::design:
      s["sigma_y"] = c.design.sigma_y;
      s["effect"] = c.design.effect;
      s["cost_human"] = c.design.cost_human;
      s["cost_surrogate"] = c.design.cost_surrogate;
      s["budget"] = c.design.budget;
      if (c.pilot_path.empty()) {
        s["rho"] = c.design.rho;
      } else {
        add_input(s, "pilot", c.pilot_path);
      }
      if (c.n_human) s["n_human"] = *c.n_human;
      if (c.n_surrogate) s["n_surrogate"] = *c.n_surrogate;
      break;
    case Command::simulate:
    case Command::twin: {
      nlohmann::json dgp = nlohmann::json::object();
      for (const auto& [key, value] : merged_dgp_settings(c)) dgp[key] = value;
      s["dgp"] = dgp;
      s["reps"] = c.reps;
      if (c.command == Command::simulate) {
        s.update(estimator_settings(c));
        s["target"] = c.target;
        s["coefficient"] = c.coefficient;
      } else if (!c.export_path.empty()) {
        s["export"] = c.export_path;
      }
      break;
    }
    case Command::metrics:
      add_input(s, "pairs", c.pairs_path);
      add_input(s, "sample_a", c.sample_a_path);
      add_input(s, "sample_b", c.sample_b_path);
      add_input(s, "p", c.p_path);
      add_input(s, "q", c.q_path);
      s["column"] = c.column;
      break;
    case Command::risk:
      add_input(s, "predictions", c.predictions_path);
      add_input(s, "responses", c.responses_path);
      s["loss"] = c.loss;
      break;
  }
  return s;
}

void execute(const RunConfig& c, std::ostream& out, std::ostream& log) {
  stats::check_alpha(c.alpha);
  if (c.reps < 1) throw ConfigError("--reps must be at least 1");
  if (c.workers < 1) throw ConfigError("--workers must be at least 1");
  switch (c.command) {
    case Command::estimate: run_estimate(c, out); break;
    case Command::design: run_design(c, out, log); break;
    case Command::simulate: run_simulate(c, out); break;
    case Command::twin: run_twin(c, out); break;
    case Command::metrics: run_metrics(c, out); break;
    case Command::risk: run_risk(c, out); break;
  }
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    execute(config, out, err);
    return kOk;
  } catch (const ConfigError& e) {
    err << "surrocal: configuration error: " << e.what() << '\n';
    return kConfigError;
  } catch (const DataError& e) {
    err << "surrocal: data error: " << e.what() << '\n';
    return kDataError;
  } catch (const AssumptionError& e) {
    err << "surrocal: estimator assumption violated: " << e.what() << '\n';
    return kAssumptionError;
  } catch (const std::exception& e) {
    err << "surrocal: internal error: " << e.what() << '\n';
    return kInternalError;
  }
}

namespace {

struct DgpFlag {
  const char* flag;
  const char* key;
  const char* help;
};

constexpr DgpFlag kDgpFlags[] = {
    {"--dgp", "dgp", "mean | ols_bias | binary | twin"},
    {"--mu", "mu", "mean DGP: E[Y]"},
    {"--sigma-y", "sigma_y", "mean DGP: sd of Y"},
    {"--rho", "rho", "mean DGP: Corr(Y, yhat)"},
    {"--bias", "bias", "mean DGP: none | constant | linear | z_aligned"},
    {"--bias-value", "bias_value", "mean DGP: bias magnitude"},
    {"--n", "n", "shared (or twin) sample size"},
    {"--N", "N", "surrogate sample size"},
    {"--delta", "delta", "ols_bias DGP: z-aligned error gap"},
    {"--beta0", "beta0", "intercept (ols_bias) or arm-0 twin bias"},
    {"--beta1", "beta1", "slope (ols_bias) or arm-1 twin bias"},
    {"--accuracy", "accuracy", "binary DGP: predictor accuracy"},
    {"--arm-shift", "arm_shift", "binary DGP: latent arm shift"},
    {"--tau", "tau", "twin DGP: treatment effect"},
    {"--theta-sd", "theta_sd", "twin DGP: sd of unit effects"},
    {"--eps-sd", "eps_sd", "twin DGP: sd of human noise"},
    {"--eta-mean", "eta_mean", "twin DGP: mean individual twin bias"},
    {"--eta-sd", "eta_sd", "twin DGP: sd of individual twin bias"},
    {"--xi-sd", "xi_sd", "twin DGP: sd of twin noise"},
    {"--interaction", "interaction", "twin DGP: multiplicative bias model (true|false)"},
};

void add_common(CLI::App* sub, RunConfig& c, std::string& format) {
  sub->add_option("--alpha", c.alpha, "significance level")->capture_default_str();
  sub->add_option("-o,--output", c.output_path, "output file (default stdout)");
  sub->add_option("--format", format, "json | csv")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
}

void add_schema(CLI::App* sub, RunConfig& c) {
  sub->add_option("--id-col", c.schema.id)->capture_default_str();
  sub->add_option("--y-col", c.schema.y)->capture_default_str();
  sub->add_option("--yhat-col", c.schema.yhat)->capture_default_str();
  sub->add_option("--z-col", c.schema.z)->capture_default_str();
  sub->add_option("--pi-col", c.schema.pi)->capture_default_str();
  sub->add_option("--covariate-prefix", c.schema.covariate_prefix)->capture_default_str();
}

void add_estimator(CLI::App* sub, RunConfig& c) {
  sub->add_option("--lambda", c.lambda, "auto or a number")->capture_default_str();
  sub->add_option("--bias-kind", c.bias_kind, "constant | linear")->capture_default_str();
  sub->add_option("--k-folds", c.k_folds, "cross-fitting folds")->capture_default_str();
}

}  // namespace

int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig c;
  std::string format = "json";
  std::string method = "ppi";
  std::string seed_text;
  std::map<std::string, std::string> dgp_values;

  CLI::App app{"Calibrated estimation with surrogate predictions", "surrocal"};
  app.set_version_flag("--version", std::string(SURROCAL_VERSION));
  app.require_subcommand(1);

  auto* estimate = app.add_subcommand("estimate", "estimate a mean, difference or regression");
  add_common(estimate, c, format);
  add_schema(estimate, c);
  add_estimator(estimate, c);
  estimate->add_option("--shared", c.shared_path, "jointly labeled CSV")->required();
  estimate->add_option("--surrogate", c.surrogate_path, "surrogate-only CSV");
  estimate->add_option("--method", method,
                       "human_only | naive_surrogate | ppi | dsl | plugin_debias | relationship")
      ->capture_default_str();
  estimate->add_option("--target", c.target, "mean | diff | ols | moment")->capture_default_str();
  estimate->add_option("--seed", seed_text, "fold seed (plugin_debias)");

  auto* design = app.add_subcommand("design", "power and budget allocation");
  add_common(design, c, format);
  auto* rho = design->add_option("--rho", c.design.rho, "anticipated Corr(Y, yhat)");
  auto* pilot = design->add_option("--pilot", c.pilot_path, "pilot shared CSV to estimate rho");
  rho->excludes(pilot);
  design->add_option("--sigma-y", c.design.sigma_y)->capture_default_str();
  design->add_option("--effect", c.design.effect, "target difference in means")->required();
  design->add_option("--cost-human", c.design.cost_human)->capture_default_str();
  design->add_option("--cost-surrogate", c.design.cost_surrogate)->capture_default_str();
  design->add_option("--budget", c.design.budget)->capture_default_str();
  design->add_option("--n-human", c.n_human, "evaluate a fixed plan instead of allocating");
  design->add_option("--n-surrogate", c.n_surrogate);

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo replications of an estimator");
  auto* twin = app.add_subcommand("twin", "twin-model ATE and treatment-invariance checks");
  for (auto* sub : {simulate, twin}) {
    add_common(sub, c, format);
    sub->add_option("--config", c.config_path, "key = value DGP file");
    sub->add_option("--reps", c.reps, "replications")->capture_default_str();
    sub->add_option("--seed", seed_text, "master seed")->required();
    sub->add_option("--workers", c.workers, "parallel workers")->capture_default_str();
    for (const auto& f : kDgpFlags) sub->add_option(f.flag, dgp_values[f.key], f.help);
  }
  add_estimator(simulate, c);
  simulate->add_option("--method", c.methods, "one or more methods")
      ->delimiter(',')
      ->capture_default_str();
  c.target.clear();
  simulate->add_option("--target", c.target, "mean | diff | ols | twin_ate | tisa_gap");
  simulate->add_option("--coefficient", c.coefficient, "OLS coefficient index")
      ->capture_default_str();
  twin->add_option("--export", c.export_path, "CSV of one draw (observed outcomes only)");

  auto* metrics = app.add_subcommand("metrics", "agreement and distributional distances");
  add_common(metrics, c, format);
  metrics->add_option("--pairs", c.pairs_path, "effect-pair CSV");
  metrics->add_option("--sample-a", c.sample_a_path, "first sample CSV");
  metrics->add_option("--sample-b", c.sample_b_path, "second sample CSV");
  metrics->add_option("--p", c.p_path, "first probability vector CSV");
  metrics->add_option("--q", c.q_path, "second probability vector CSV");
  metrics->add_option("--column", c.column, "value column in sample/probability files")
      ->capture_default_str();

  auto* risk = app.add_subcommand("risk", "scenario-population prediction risk");
  add_common(risk, c, format);
  risk->add_option("--predictions", c.predictions_path, "scenario_id,outcome,probability")
      ->required();
  risk->add_option("--responses", c.responses_path, "scenario_id,outcome")->required();
  risk->add_option("--loss", c.loss, "log_loss | squared_error")->capture_default_str();

  std::vector<std::string> argv_storage{"surrocal"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_storage) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  if (estimate->parsed()) {
    c.command = Command::estimate;
    c.methods = {method};
    if (c.target.empty()) c.target = "mean";
  } else if (design->parsed()) {
    c.command = Command::design;
    if (rho->count() == 0 && pilot->count() == 0) {
      err << "surrocal: configuration error: design requires --rho or --pilot\n";
      return kConfigError;
    }
  } else if (simulate->parsed() || twin->parsed()) {
    c.command = simulate->parsed() ? Command::simulate : Command::twin;
    auto* sub = simulate->parsed() ? simulate : twin;
    for (const auto& f : kDgpFlags) {
      if (sub->get_option(f.flag)->count() > 0) c.dgp_settings[f.key] = dgp_values[f.key];
    }
  } else if (metrics->parsed()) {
    c.command = Command::metrics;
  } else {
    c.command = Command::risk;
  }
  c.format = format == "csv" ? Format::csv : Format::json;
  if (!seed_text.empty()) {
    try {
      c.seed = io::parse_uint(seed_text, "seed");
    } catch (const ConfigError& e) {
      err << "surrocal: configuration error: " << e.what() << '\n';
      return kConfigError;
    }
  }
  return run(c, out, err);
}

}  // namespace surrocal::cli
