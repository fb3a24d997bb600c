#include <doctest.h>

#include "surrocal/data.hpp"
#include "surrocal/error.hpp"
#include "surrocal/rng.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

using namespace surrocal;
namespace fs = std::filesystem;

namespace {

fs::path write_temp(const std::string& name, const std::string& text) {
  const auto dir = fs::temp_directory_path() / "surrocal_test_data";
  fs::create_directories(dir);
  const auto path = dir / name;
  std::ofstream(path) << text;
  return path;
}

template <typename F>
std::string error_of(F&& f) {
  try {
    f();
  } catch (const DataError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("load_shared parses a small file") {
  const auto path = write_temp("small.csv",
                               "id,x_1,z,y,yhat\n"
                               "10,0.5,1,1.25,1.5\n"
                               "11,-1,0,2,2.5\n"
                               "12,2e-3,1,-3,0\n");
  const auto d = load_shared(path);
  CHECK(d.n() == 3);
  CHECK(d.k() == 2);
  REQUIRE(d.has_z());
  CHECK(d.covariate_names == std::vector<std::string>{"x_1", "z"});
  CHECK(d.row_id == std::vector<std::int64_t>{10, 11, 12});
  CHECK(d.z()[0] == 1.0);
  CHECK(d.covariates(2, 0) == 0.002);
  CHECK(d.y[2] == -3.0);
  CHECK(d.yhat[1] == 2.5);
  CHECK_FALSE(d.pi.has_value());
}

TEST_CASE("load_shared rejects bad input") {
  SUBCASE("missing yhat column") {
    const auto path = write_temp("no_yhat.csv", "id,x_1,y\n1,0,1\n");
    const auto msg = error_of([&] { load_shared(path); });
    CHECK(msg.find("'yhat'") != std::string::npos);
  }
  SUBCASE("pi of zero") {
    const auto path = write_temp("pi0.csv", "y,yhat,pi\n1,1,0.5\n2,2,0\n");
    const auto msg = error_of([&] { load_shared(path); });
    CHECK(msg.find("pi in (0,1]") != std::string::npos);
  }
  SUBCASE("pi above one") {
    const auto path = write_temp("pi2.csv", "y,yhat,pi\n1,1,1.5\n");
    CHECK_THROWS_AS(load_shared(path), DataError);
  }
  SUBCASE("non-numeric cell names line and column") {
    const auto path = write_temp("text.csv", "y,yhat\n1,1\n2,abc\n");
    const auto msg = error_of([&] { load_shared(path); });
    CHECK(msg.find(":3") != std::string::npos);
    CHECK(msg.find("yhat") != std::string::npos);
  }
  SUBCASE("empty cell") {
    const auto path = write_temp("blank.csv", "y,yhat\n1,\n");
    CHECK_THROWS_AS(load_shared(path), DataError);
  }
  SUBCASE("ragged row") {
    const auto path = write_temp("ragged.csv", "y,yhat\n1,2,3\n");
    CHECK_THROWS_AS(load_shared(path), DataError);
  }
  SUBCASE("z outside {0,1}") {
    const auto path = write_temp("z2.csv", "z,y,yhat\n2,1,1\n0,1,1\n");
    CHECK_THROWS_AS(load_shared(path), DataError);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_shared("/nonexistent/shared.csv"), DataError);
  }
}

TEST_CASE("load_surrogate") {
  const auto shared = write_temp("pair_shared.csv", "id,x_1,z,y,yhat\n1,0,1,1,1\n2,1,0,2,2\n");
  SUBCASE("six rows") {
    const auto path = write_temp("sur6.csv",
                                 "id,x_1,z,yhat\n1,0,0,1\n2,0,1,2\n3,1,0,3\n"
                                 "4,1,1,4\n5,2,0,5\n6,2,1,6\n");
    const auto d = load_surrogate(path, Schema{}, load_shared(shared));
    CHECK(d.n() == 6);
    CHECK(d.yhat[5] == 6.0);
  }
  SUBCASE("schema mismatch lists the columns") {
    const auto path = write_temp("sur_bad.csv", "id,x_2,z,yhat\n1,0,0,1\n");
    const auto msg = error_of([&] { load_surrogate(path, Schema{}, load_shared(shared)); });
    CHECK(msg.find("x_1") != std::string::npos);
    CHECK(msg.find("x_2") != std::string::npos);
  }
  SUBCASE("empty data section") {
    const auto path = write_temp("sur_empty.csv", "id,x_1,z,yhat\n");
    const auto msg = error_of([&] { load_surrogate(path); });
    CHECK(msg.find("N >= 1 required") != std::string::npos);
  }
}

TEST_CASE("custom schema names") {
  const auto path = write_temp("custom.csv", "unit,cov_a,treat,human,model\n1,3,0,1,2\n2,4,1,5,6\n");
  Schema s;
  s.id = "unit";
  s.covariate_prefix = "cov_";
  s.z = "treat";
  s.y = "human";
  s.yhat = "model";
  const auto d = load_shared(path, s);
  CHECK(d.k() == 2);
  CHECK(d.has_z());
  CHECK(d.y[1] == 5.0);
}

TEST_CASE("write then load reproduces values bit-exactly") {
  Rng rng(99);
  const Eigen::Index n = 50;
  Eigen::MatrixXd x(n, 2);
  Eigen::VectorXd y(n), yhat(n), pi(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    x(i, 0) = rng.normal() * 1e-7;
    x(i, 1) = rng.bernoulli(0.5) ? 1.0 : 0.0;
    y[i] = rng.normal() * 1e9;
    yhat[i] = 1.0 / 3.0 + rng.normal();
    pi[i] = 0.05 + 0.95 * rng.uniform();
  }
  const auto d = make_shared(y, yhat, x, {"x_1", "z"}, 1, pi);
  const auto path = fs::temp_directory_path() / "surrocal_test_data" / "roundtrip.csv";
  write_shared(path, d);
  const auto back = load_shared(path);
  CHECK(back.covariates == d.covariates);
  CHECK(back.y == d.y);
  CHECK(back.yhat == d.yhat);
  REQUIRE(back.pi.has_value());
  CHECK(*back.pi == pi);
  CHECK(back.row_id == d.row_id);
  CHECK(back.z_column == d.z_column);

  const auto s = make_surrogate(yhat, x, {"x_1", "z"}, 1);
  std::stringstream buffer;
  write_surrogate(buffer, s);
  const auto spath = write_temp("roundtrip_sur.csv", buffer.str());
  CHECK(load_surrogate(spath).yhat == s.yhat);
}

TEST_CASE("make_folds") {
  SUBCASE("deterministic") {
    CHECK(make_folds(10, 5, 7).fold_index == make_folds(10, 5, 7).fold_index);
  }
  SUBCASE("balanced") {
    const auto f = make_folds(10, 5, 7);
    for (int k = 0; k < 5; ++k) CHECK(f.members(k).size() == 2);
    const auto g = make_folds(11, 3, 1);
    std::set<std::size_t> sizes;
    for (int k = 0; k < 3; ++k) sizes.insert(g.members(k).size());
    CHECK(*sizes.rbegin() - *sizes.begin() <= 1);
  }
  SUBCASE("complement partitions the rows") {
    const auto f = make_folds(23, 4, 3);
    for (int k = 0; k < 4; ++k) CHECK(f.members(k).size() + f.complement(k).size() == 23);
  }
  SUBCASE("seed changes assignment") {
    CHECK(make_folds(40, 5, 1).fold_index != make_folds(40, 5, 2).fold_index);
  }
  SUBCASE("invalid fold counts") {
    CHECK_THROWS_AS(make_folds(3, 5, 0), ConfigError);
    CHECK_THROWS_AS(make_folds(10, 1, 0), ConfigError);
  }
}

TEST_CASE("select keeps schema") {
  const auto d = make_shared(Eigen::Vector3d(1, 2, 3), Eigen::Vector3d(1, 2, 4),
                             Eigen::MatrixXd::Identity(3, 2), {"x_1", "z"}, 1);
  const auto s = d.select({2, 0});
  CHECK(s.n() == 2);
  CHECK(s.y[0] == 3.0);
  CHECK(s.covariate_names == d.covariate_names);
  CHECK(s.z_column == d.z_column);
}
