#pragma once

#include "surrocal/design.hpp"
#include "surrocal/estimators.hpp"
#include "surrocal/metrics.hpp"
#include "surrocal/simlab.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace surrocal::io {

using KeyValues = std::map<std::string, std::string>;

// Fixed keys: estimate, std_error, ci_low, ci_high, alpha, method,
// lambda_used, ess (null when absent). "term" and "warnings" are added only
// when non-empty.
nlohmann::json to_json(const EstimateReport& report);
nlohmann::json to_json(const DesignPlan& plan);
nlohmann::json to_json(const ReplicationSummary& summary);
nlohmann::json to_json(const MomentDiagnostic& diagnostic);
nlohmann::json to_json(const AgreementRates& rates);
nlohmann::json to_json(const RiskEstimate& risk);

EstimateReport report_from_json(const nlohmann::json& j);

// Header plus one row per report. A leading "term" column appears when any
// report carries a term.
void write_reports_csv(std::ostream& out, const std::vector<EstimateReport>& reports);
void write_summaries_csv(std::ostream& out, const std::vector<ReplicationSummary>& summaries);
// Two-row CSV of a flat JSON object (keys as header).
void write_flat_csv(std::ostream& out, const nlohmann::json& object);

// "key = value" lines; '#' starts a comment; blank lines ignored. Duplicate
// keys and lines without '=' are ConfigErrors.
KeyValues parse_key_values(std::istream& in, const std::string& source);
KeyValues read_key_values(const std::filesystem::path& path);

// Builds a DGP from settings. Recognized keys by dgp:
//   dgp = mean     : mu, sigma_y, rho, bias (none|constant|linear|z_aligned), bias_value, n, N
//   dgp = ols_bias : delta, beta0, beta1, n, N
//   dgp = binary   : accuracy, arm_shift, n, N
//   dgp = twin     : tau, theta_sd, eps_sd, eta_mean, eta_sd, beta0, beta1, xi_sd,
//                    interaction (true|false), n
// Keys outside this set (and outside `extra_allowed`) are rejected.
DgpConfig dgp_from_key_values(const KeyValues& settings,
                              const std::vector<std::string>& extra_allowed = {});

double parse_double(const std::string& text, const std::string& key);
std::int64_t parse_int(const std::string& text, const std::string& key);
std::uint64_t parse_uint(const std::string& text, const std::string& key);
bool parse_bool(const std::string& text, const std::string& key);

// FNV-1a 64-bit digest rendered as 16 hex digits.
std::string fnv1a_hex(const std::string& text);

}  // namespace surrocal::io
