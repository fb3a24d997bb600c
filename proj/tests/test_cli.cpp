#include <doctest.h>

#include "cli.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using surrocal::cli::main_entry;

namespace {

const std::string kData = SURROCAL_DATA_DIR;

struct Result {
  int status = 0;
  std::string out;
  std::string err;
};

Result call(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  Result r;
  r.status = main_entry(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "surrocal_cli_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("estimate ppi emits a report with provenance") {
  const auto r = call({"estimate", "--shared", kData + "/shared.csv", "--surrogate",
                       kData + "/surrogate.csv", "--method", "ppi"});
  REQUIRE(r.status == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["report"]["method"] == "ppi");
  CHECK(j["report"]["lambda_used"].is_number());
  CHECK(j["provenance"]["command"] == "estimate");
  CHECK(j["provenance"]["config_hash"].get<std::string>().size() == 16);
  CHECK(j["provenance"]["settings"].contains("shared_fnv1a"));
}

TEST_CASE("dsl equals ppi with lambda one") {
  const std::vector<std::string> base{"estimate", "--shared", kData + "/shared.csv",
                                      "--surrogate", kData + "/surrogate.csv"};
  auto dsl_args = base;
  dsl_args.insert(dsl_args.end(), {"--method", "dsl"});
  auto ppi_args = base;
  ppi_args.insert(ppi_args.end(), {"--method", "ppi", "--lambda", "1"});
  const auto dsl = call(dsl_args);
  const auto ppi = call(ppi_args);
  REQUIRE(dsl.status == 0);
  REQUIRE(ppi.status == 0);
  const auto a = nlohmann::json::parse(dsl.out)["report"];
  const auto b = nlohmann::json::parse(ppi.out)["report"];
  CHECK(a["estimate"].get<double>() == b["estimate"].get<double>());
  CHECK(a["std_error"].get<double>() == doctest::Approx(b["std_error"].get<double>()));
}

TEST_CASE("estimate targets") {
  const auto ols = call({"estimate", "--shared", kData + "/shared.csv", "--surrogate",
                         kData + "/surrogate.csv", "--method", "ppi", "--target", "ols"});
  REQUIRE(ols.status == 0);
  CHECK(nlohmann::json::parse(ols.out)["reports"].size() == 3);
  const auto moment = call({"estimate", "--shared", kData + "/shared.csv", "--target", "moment"});
  REQUIRE(moment.status == 0);
  CHECK(nlohmann::json::parse(moment.out)["diagnostic"].contains("cov_z_eps"));
  const auto human =
      call({"estimate", "--shared", kData + "/shared.csv", "--method", "human_only"});
  CHECK(human.status == 0);
}

TEST_CASE("simulate is reproducible across runs and worker counts") {
  const std::vector<std::string> base{"simulate", "--dgp", "mean", "--rho", "0.7",
                                      "--n", "100", "--N", "1000", "--reps", "200",
                                      "--method", "ppi,dsl", "--seed", "42"};
  auto one = base;
  one.insert(one.end(), {"--workers", "1"});
  auto four = base;
  four.insert(four.end(), {"--workers", "4"});
  const auto a = call(one);
  const auto b = call(one);
  const auto c = call(four);
  REQUIRE(a.status == 0);
  CHECK(a.out == b.out);
  CHECK(a.out == c.out);
  const auto j = nlohmann::json::parse(a.out);
  CHECK(j["summaries"].size() == 2);
  CHECK(j["provenance"]["seed"] == 42);
}

TEST_CASE("twin export holds observed outcomes only") {
  const auto path = scratch("twin.csv");
  const auto r = call({"twin", "--config", kData + "/twin.cfg", "--reps", "50", "--seed", "7",
                       "--export", path.string()});
  REQUIRE(r.status == 0);
  CHECK(nlohmann::json::parse(r.out)["summaries"].size() == 2);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  while (line.rfind("#", 0) == 0) std::getline(in, line);
  CHECK(line == "id,z,y,yhat0,yhat1");
}

TEST_CASE("design, metrics and risk") {
  const auto design = call({"design", "--rho", "0.6", "--effect", "0.2", "--budget", "500"});
  REQUIRE(design.status == 0);
  CHECK(nlohmann::json::parse(design.out)["plan"]["n_human"].get<int>() >= 4);
  const auto metrics = call({"metrics", "--pairs", kData + "/effect_pairs.csv", "--p",
                             kData + "/p.csv", "--q", kData + "/q.csv"});
  REQUIRE(metrics.status == 0);
  CHECK(nlohmann::json::parse(metrics.out)["metrics"]["n_pairs"] == 40);
  const auto risk = call({"risk", "--predictions", kData + "/scenario_predictions.csv",
                          "--responses", kData + "/scenario_responses.csv", "--format", "csv"});
  REQUIRE(risk.status == 0);
  CHECK(risk.out.rfind("# surrocal ", 0) == 0);
  CHECK(risk.out.find("# config_hash: ") != std::string::npos);
  CHECK(risk.out.find("# settings: ") != std::string::npos);
}

TEST_CASE("exit statuses") {
  CHECK(call({"estimate", "--bogus"}).status == 2);
  CHECK(call({"simulate", "--dgp", "mean"}).status == 2);
  CHECK(call({"simulate", "--dgp", "mean", "--seed", "abc"}).status == 2);
  CHECK(call({"estimate", "--shared", "/nonexistent.csv", "--method", "human_only"}).status == 3);

  const auto pred = scratch("one_pred.csv");
  const auto resp = scratch("one_resp.csv");
  std::ofstream(pred) << "scenario_id,outcome,probability\nonly,0,0.5\nonly,1,0.5\n";
  std::ofstream(resp) << "scenario_id,outcome\nonly,1\n";
  const auto r = call({"risk", "--predictions", pred.string(), "--responses", resp.string()});
  CHECK(r.status == 4);
  CHECK_FALSE(r.err.empty());
}

TEST_CASE("output file matches stdout") {
  const auto path = scratch("design.json");
  const std::vector<std::string> args{"design", "--rho", "0.5", "--effect", "0.3"};
  const auto direct = call(args);
  auto with_file = args;
  with_file.insert(with_file.end(), {"-o", path.string()});
  REQUIRE(call(with_file).status == 0);
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  CHECK(buf.str() == direct.out);
}
