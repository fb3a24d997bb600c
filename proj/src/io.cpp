#include "surrocal/io.hpp"

#include "surrocal/csv.hpp"
#include "surrocal/error.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>

namespace surrocal::io {

namespace {

nlohmann::json optional_number(const std::optional<double>& v) {
  if (v && std::isfinite(*v)) return *v;
  return nullptr;
}

std::string cell(const nlohmann::json& v) {
  if (v.is_null()) return "";
  if (v.is_string()) return csv::escape(v.get<std::string>());
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
  if (v.is_number()) return csv::format_number(v.get<double>());
  return csv::escape(v.dump());
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

const std::string& get(const KeyValues& kv, const std::string& key, const std::string& fallback) {
  const auto it = kv.find(key);
  return it == kv.end() ? fallback : it->second;
}

}  // namespace

nlohmann::json to_json(const EstimateReport& r) {
  nlohmann::json j;
  j["estimate"] = r.estimate;
  j["std_error"] = r.std_error;
  j["ci_low"] = r.ci_low;
  j["ci_high"] = r.ci_high;
  j["alpha"] = r.alpha;
  j["method"] = std::string(to_string(r.method));
  j["lambda_used"] = optional_number(r.lambda_used);
  j["ess"] = optional_number(r.ess);
  if (!r.term.empty()) j["term"] = r.term;
  if (!r.warnings.empty()) j["warnings"] = r.warnings;
  return j;
}

EstimateReport report_from_json(const nlohmann::json& j) {
  EstimateReport r;
  r.estimate = j.at("estimate").get<double>();
  r.std_error = j.at("std_error").get<double>();
  r.ci_low = j.at("ci_low").get<double>();
  r.ci_high = j.at("ci_high").get<double>();
  r.alpha = j.at("alpha").get<double>();
  r.method = method_from_string(j.at("method").get<std::string>());
  if (!j.at("lambda_used").is_null()) r.lambda_used = j.at("lambda_used").get<double>();
  if (!j.at("ess").is_null()) r.ess = j.at("ess").get<double>();
  if (j.contains("term")) r.term = j.at("term").get<std::string>();
  if (j.contains("warnings")) r.warnings = j.at("warnings").get<std::vector<std::string>>();
  return r;
}

nlohmann::json to_json(const DesignPlan& p) {
  return {{"n_human", p.n_human},
          {"n_surrogate", p.n_surrogate},
          {"achieved_power", p.achieved_power},
          {"ess", p.ess},
          {"total_cost", p.total_cost}};
}

nlohmann::json to_json(const ReplicationSummary& s) {
  return {{"method", s.method},
          {"target", s.target},
          {"replications", s.replications},
          {"truth", s.truth},
          {"mean_estimate", s.mean_estimate},
          {"mean_bias", s.mean_bias},
          {"empirical_coverage", s.empirical_coverage},
          {"mean_ci_width", s.mean_ci_width},
          {"variance", s.variance},
          {"mc_std_error", s.mc_std_error}};
}

nlohmann::json to_json(const MomentDiagnostic& d) {
  nlohmann::json j;
  j["cov_z_eps"] = d.cov_z_eps;
  j["std_error"] = d.std_error;
  j["z_stat"] = optional_number(d.z_stat);
  return j;
}

nlohmann::json to_json(const AgreementRates& r) {
  nlohmann::json j;
  j["direction_agreement"] = r.direction_agreement;
  j["significance_agreement"] = r.significance_agreement;
  j["false_significance_rate"] = optional_number(r.false_significance_rate);
  return j;
}

nlohmann::json to_json(const RiskEstimate& r) {
  return {{"risk", r.risk},
          {"std_error", r.std_error},
          {"ci_low", r.ci_low},
          {"ci_high", r.ci_high},
          {"loss", std::string(to_string(r.loss))},
          {"m_scenarios", r.m_scenarios}};
}

void write_reports_csv(std::ostream& out, const std::vector<EstimateReport>& reports) {
  bool with_term = false;
  for (const auto& r : reports) with_term = with_term || !r.term.empty();
  if (with_term) out << "term,";
  out << "estimate,std_error,ci_low,ci_high,alpha,method,lambda_used,ess\n";
  for (const auto& r : reports) {
    const auto j = to_json(r);
    if (with_term) out << csv::escape(r.term) << ',';
    out << cell(j["estimate"]) << ',' << cell(j["std_error"]) << ',' << cell(j["ci_low"]) << ','
        << cell(j["ci_high"]) << ',' << cell(j["alpha"]) << ',' << cell(j["method"]) << ','
        << cell(j["lambda_used"]) << ',' << cell(j["ess"]) << '\n';
  }
}

void write_summaries_csv(std::ostream& out, const std::vector<ReplicationSummary>& summaries) {
  bool header = false;
  for (const auto& s : summaries) {
    const auto j = to_json(s);
    if (!header) {
      bool first = true;
      for (const char* key : {"method", "target", "replications", "truth", "mean_estimate",
                              "mean_bias", "empirical_coverage", "mean_ci_width", "variance",
                              "mc_std_error"}) {
        out << (first ? "" : ",") << key;
        first = false;
      }
      out << '\n';
      header = true;
    }
    bool first = true;
    for (const char* key : {"method", "target", "replications", "truth", "mean_estimate",
                            "mean_bias", "empirical_coverage", "mean_ci_width", "variance",
                            "mc_std_error"}) {
      out << (first ? "" : ",") << cell(j[key]);
      first = false;
    }
    out << '\n';
  }
}

void write_flat_csv(std::ostream& out, const nlohmann::json& object) {
  bool first = true;
  for (const auto& [key, value] : object.items()) {
    out << (first ? "" : ",") << csv::escape(key);
    first = false;
  }
  out << '\n';
  first = true;
  for (const auto& [key, value] : object.items()) {
    out << (first ? "" : ",") << cell(value);
    first = false;
  }
  out << '\n';
}

KeyValues parse_key_values(std::istream& in, const std::string& source) {
  KeyValues kv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(source + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(source + ":" + std::to_string(line_no) + ": empty key");
    if (!kv.emplace(key, value).second) {
      throw ConfigError(source + ":" + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
  }
  return kv;
}

KeyValues read_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration file " + path.string());
  return parse_key_values(in, path.string());
}

double parse_double(const std::string& text, const std::string& key) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (text.empty() || ec != std::errc() || ptr != last || !std::isfinite(v)) {
    throw ConfigError("setting '" + key + "' expects a finite number, got '" + text + "'");
  }
  return v;
}

std::int64_t parse_int(const std::string& text, const std::string& key) {
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError("setting '" + key + "' expects an integer, got '" + text + "'");
  }
  return v;
}

std::uint64_t parse_uint(const std::string& text, const std::string& key) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError("setting '" + key + "' expects an unsigned integer, got '" + text + "'");
  }
  return v;
}

bool parse_bool(const std::string& text, const std::string& key) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError("setting '" + key + "' expects true/false, got '" + text + "'");
}

DgpConfig dgp_from_key_values(const KeyValues& kv, const std::vector<std::string>& extra_allowed) {
  static const std::string kEmpty;
  const std::string dgp = get(kv, "dgp", kEmpty);
  std::set<std::string> allowed(extra_allowed.begin(), extra_allowed.end());
  allowed.insert("dgp");
  auto num = [&](const char* key, double fallback) {
    allowed.insert(key);
    const auto it = kv.find(key);
    return it == kv.end() ? fallback : parse_double(it->second, key);
  };
  auto count = [&](const char* key, std::int64_t fallback) {
    allowed.insert(key);
    const auto it = kv.find(key);
    return it == kv.end() ? fallback : parse_int(it->second, key);
  };
  DgpConfig out;
  if (dgp == "mean") {
    MeanDGPConfig c;
    c.mu = num("mu", c.mu);
    c.sigma_y = num("sigma_y", c.sigma_y);
    c.predictor_rho = num("rho", c.predictor_rho);
    allowed.insert("bias");
    c.bias.kind = bias_shape_from_string(get(kv, "bias", std::string("none")));
    c.bias.value = num("bias_value", 0.0);
    c.n = count("n", c.n);
    c.big_n = count("N", c.big_n);
    out = c;
  } else if (dgp == "ols_bias") {
    OlsBiasConfig c;
    c.delta = num("delta", c.delta);
    c.beta0 = num("beta0", c.beta0);
    c.beta1 = num("beta1", c.beta1);
    c.n = count("n", c.n);
    c.big_n = count("N", c.big_n);
    out = c;
  } else if (dgp == "binary") {
    BinaryDGPConfig c;
    c.accuracy = num("accuracy", c.accuracy);
    c.arm_shift = num("arm_shift", c.arm_shift);
    c.n = count("n", c.n);
    c.big_n = count("N", c.big_n);
    out = c;
  } else if (dgp == "twin") {
    TwinDGPConfig c;
    c.tau = num("tau", c.tau);
    c.theta_sd = num("theta_sd", c.theta_sd);
    c.eps_sd = num("eps_sd", c.eps_sd);
    c.eta_mean = num("eta_mean", c.eta_mean);
    c.eta_sd = num("eta_sd", c.eta_sd);
    c.beta0 = num("beta0", c.beta0);
    c.beta1 = num("beta1", c.beta1);
    c.xi_sd = num("xi_sd", c.xi_sd);
    allowed.insert("interaction");
    c.interaction = parse_bool(get(kv, "interaction", std::string("false")), "interaction");
    c.n = count("n", c.n);
    out = c;
  } else {
    throw ConfigError("setting 'dgp' must be one of mean, ols_bias, binary, twin (got '" + dgp +
                      "')");
  }
  for (const auto& [key, value] : kv) {
    if (!allowed.count(key)) {
      throw ConfigError("unknown setting '" + key + "' for dgp '" + dgp + "'");
    }
  }
  return out;
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace surrocal::io
