#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace surrocal {

// Column roles in an input CSV. Covariates are every column whose name starts
// with covariate_prefix, plus the z column when present, kept in file order.
// The id, z and pi columns are optional in the file; y and yhat are not.
struct Schema {
  std::string id = "id";
  std::string y = "y";
  std::string yhat = "yhat";
  std::string z = "z";
  std::string pi = "pi";
  std::string covariate_prefix = "x_";
};

// Jointly labeled rows: covariates, human outcome y, surrogate prediction yhat
// and, optionally, the known labeling probability pi.
struct SharedDataset {
  std::vector<std::int64_t> row_id;
  std::vector<std::string> covariate_names;
  Eigen::MatrixXd covariates;  // n x k
  std::optional<Eigen::Index> z_column;
  Eigen::VectorXd y;
  Eigen::VectorXd yhat;
  std::optional<Eigen::VectorXd> pi;

  Eigen::Index n() const { return y.size(); }
  Eigen::Index k() const { return covariates.cols(); }
  bool has_z() const { return z_column.has_value(); }
  // Treatment column; throws AssumptionError when no z column is designated.
  Eigen::VectorXd z() const;

  // Rows in the given order; keeps schema and z designation.
  SharedDataset select(const std::vector<Eigen::Index>& rows) const;
};

// Surrogate-only rows: covariates and prediction yhat.
struct SurrogateDataset {
  std::vector<std::int64_t> row_id;
  std::vector<std::string> covariate_names;
  Eigen::MatrixXd covariates;  // N x k
  std::optional<Eigen::Index> z_column;
  Eigen::VectorXd yhat;

  Eigen::Index n() const { return yhat.size(); }
  Eigen::Index k() const { return covariates.cols(); }
  bool has_z() const { return z_column.has_value(); }
  Eigen::VectorXd z() const;

  SurrogateDataset select(const std::vector<Eigen::Index>& rows) const;
};

// Throws DataError unless the dataset satisfies its invariants: equal column
// lengths, n >= 1, finite values, pi in (0,1], z in {0,1}.
void validate(const SharedDataset& data);
void validate(const SurrogateDataset& data);

// Throws DataError listing the columns that differ between the two schemas.
void require_same_schema(const SharedDataset& shared, const SurrogateDataset& surrogate);

// Builds a dataset with row ids 0..n-1 and validates it.
SharedDataset make_shared(Eigen::VectorXd y, Eigen::VectorXd yhat,
                          Eigen::MatrixXd covariates = {},
                          std::vector<std::string> covariate_names = {},
                          std::optional<Eigen::Index> z_column = std::nullopt,
                          std::optional<Eigen::VectorXd> pi = std::nullopt);
SurrogateDataset make_surrogate(Eigen::VectorXd yhat, Eigen::MatrixXd covariates = {},
                                std::vector<std::string> covariate_names = {},
                                std::optional<Eigen::Index> z_column = std::nullopt);

SharedDataset load_shared(const std::filesystem::path& path, const Schema& schema = {});
SurrogateDataset load_surrogate(const std::filesystem::path& path, const Schema& schema = {});
// Also checks the column schema against the paired shared dataset.
SurrogateDataset load_surrogate(const std::filesystem::path& path, const Schema& schema,
                                const SharedDataset& paired);

// Values are written in shortest round-trip form, so reloading is bit-exact.
void write_shared(std::ostream& out, const SharedDataset& data, const Schema& schema = {});
void write_surrogate(std::ostream& out, const SurrogateDataset& data, const Schema& schema = {});
void write_shared(const std::filesystem::path& path, const SharedDataset& data,
                  const Schema& schema = {});
void write_surrogate(const std::filesystem::path& path, const SurrogateDataset& data,
                     const Schema& schema = {});

struct FoldAssignment {
  std::vector<int> fold_index;
  int k = 0;
  std::uint64_t seed = 0;

  std::vector<Eigen::Index> members(int fold) const;
  std::vector<Eigen::Index> complement(int fold) const;
};

// Random balanced split: fold sizes differ by at most one. Pure function of
// (n, k, seed). Throws ConfigError unless 2 <= k <= n.
FoldAssignment make_folds(Eigen::Index n, int k, std::uint64_t seed);

}  // namespace surrocal
