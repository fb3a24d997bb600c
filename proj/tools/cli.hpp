#pragma once

#include "surrocal/data.hpp"
#include "surrocal/io.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace surrocal::cli {

enum class Command { estimate, design, simulate, twin, metrics, risk };
enum class Format { json, csv };

std::string_view to_string(Command command);

// Exit statuses.
inline constexpr int kOk = 0;
inline constexpr int kInternalError = 1;
inline constexpr int kConfigError = 2;
inline constexpr int kDataError = 3;
inline constexpr int kAssumptionError = 4;

// Everything a run depends on. `workers` only changes wall-clock time.
struct RunConfig {
  Command command = Command::estimate;

  // estimate
  std::string shared_path;
  std::string surrogate_path;
  Schema schema;
  std::string target = "mean";  // mean | diff | ols | moment
  std::vector<std::string> methods{"ppi"};
  std::string lambda = "auto";
  std::string bias_kind = "constant";
  int k_folds = 5;
  int coefficient = 1;

  // design
  DesignInputs design;
  std::string pilot_path;
  std::optional<std::int64_t> n_human;
  std::optional<std::int64_t> n_surrogate;

  // simulate / twin
  std::string config_path;
  io::KeyValues dgp_settings;  // command-line values, override the config file
  std::int64_t reps = 1000;
  int workers = 1;
  std::string export_path;

  // metrics
  std::string pairs_path;
  std::string sample_a_path;
  std::string sample_b_path;
  std::string p_path;
  std::string q_path;
  std::string column = "value";

  // risk
  std::string predictions_path;
  std::string responses_path;
  std::string loss = "log_loss";

  double alpha = 0.05;
  std::optional<std::uint64_t> seed;
  std::string output_path;
  Format format = Format::json;
};

// Throws ConfigError / DataError / AssumptionError; writes the artifact to
// config.output_path, or to `out` when no path is given. Human-readable
// side output (the design table) goes to `log`.
void execute(const RunConfig& config, std::ostream& out, std::ostream& log);

// execute() with errors mapped to exit statuses and reported on `err`.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

// Parses argv-style arguments (without the program name) and runs.
int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Canonical settings and their digest for the provenance header.
nlohmann::json settings_of(const RunConfig& config);

}  // namespace surrocal::cli
