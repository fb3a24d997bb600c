#include "surrocal/data.hpp"

#include "surrocal/csv.hpp"
#include "surrocal/error.hpp"
#include "surrocal/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <set>

namespace surrocal {

namespace {

template <typename Dataset>
void select_common(const Dataset& src, Dataset& dst, const std::vector<Eigen::Index>& rows) {
  const auto m = static_cast<Eigen::Index>(rows.size());
  dst.covariate_names = src.covariate_names;
  dst.z_column = src.z_column;
  dst.covariates.resize(m, src.covariates.cols());
  dst.row_id.resize(rows.size());
  for (Eigen::Index i = 0; i < m; ++i) {
    dst.covariates.row(i) = src.covariates.row(rows[i]);
    dst.row_id[i] = src.row_id[rows[i]];
  }
}

Eigen::VectorXd pick(const Eigen::VectorXd& v, const std::vector<Eigen::Index>& rows) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[rows[i]];
  return out;
}

bool all_finite(const Eigen::MatrixXd& m) { return m.allFinite(); }

template <typename Dataset>
void validate_common(const Dataset& data, Eigen::Index n, const char* label) {
  if (n < 1) throw DataError(std::string(label) + " >= 1 required");
  if (data.covariates.rows() != n) {
    throw DataError("covariate matrix has " + std::to_string(data.covariates.rows()) +
                    " rows, expected " + std::to_string(n));
  }
  if (static_cast<Eigen::Index>(data.covariate_names.size()) != data.covariates.cols()) {
    throw DataError("covariate name count does not match covariate columns");
  }
  if (static_cast<Eigen::Index>(data.row_id.size()) != n) {
    throw DataError("row id count does not match row count");
  }
  if (!all_finite(data.covariates)) throw DataError("covariates contain non-finite values");
  if (data.z_column) {
    if (*data.z_column < 0 || *data.z_column >= data.covariates.cols()) {
      throw DataError("z column index out of range");
    }
    const auto z = data.covariates.col(*data.z_column);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (z[i] != 0.0 && z[i] != 1.0) {
        throw DataError("z column '" + data.covariate_names[*data.z_column] +
                        "' must contain only 0/1 (row " + std::to_string(i + 1) + ")");
      }
    }
  }
}

struct ParsedColumns {
  std::vector<std::int64_t> row_id;
  std::vector<std::string> covariate_names;
  Eigen::MatrixXd covariates;
  std::optional<Eigen::Index> z_column;
  Eigen::VectorXd yhat;
  std::optional<Eigen::VectorXd> y;
  std::optional<Eigen::VectorXd> pi;
};

ParsedColumns parse_columns(const csv::Table& table, const std::string& source,
                            const Schema& schema, bool shared) {
  auto require = [&](const std::string& name) {
    const long idx = table.column(name);
    if (idx < 0) throw DataError(source + ": required column '" + name + "' is missing");
    return idx;
  };
  ParsedColumns out;
  const long yhat_col = require(schema.yhat);
  const long y_col = shared ? require(schema.y) : -1;
  const long id_col = schema.id.empty() ? -1 : table.column(schema.id);
  const long z_col = schema.z.empty() ? -1 : table.column(schema.z);
  const long pi_col = (shared && !schema.pi.empty()) ? table.column(schema.pi) : -1;

  std::vector<long> cov_cols;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    const auto& name = table.header[c];
    const bool is_cov = !schema.covariate_prefix.empty() &&
                        name.rfind(schema.covariate_prefix, 0) == 0;
    if (is_cov || static_cast<long>(c) == z_col) {
      if (static_cast<long>(c) == z_col) {
        out.z_column = static_cast<Eigen::Index>(cov_cols.size());
      }
      cov_cols.push_back(static_cast<long>(c));
      out.covariate_names.push_back(name);
    }
  }

  const auto n = static_cast<Eigen::Index>(table.rows.size());
  if (n < 1) throw DataError(source + ": " + (shared ? "n" : "N") + " >= 1 required");
  out.covariates.resize(n, static_cast<Eigen::Index>(cov_cols.size()));
  out.yhat.resize(n);
  if (shared) out.y = Eigen::VectorXd(n);
  if (pi_col >= 0) out.pi = Eigen::VectorXd(n);
  out.row_id.resize(static_cast<std::size_t>(n));

  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = table.rows[static_cast<std::size_t>(i)];
    const std::size_t line = table.line_numbers[static_cast<std::size_t>(i)];
    auto num = [&](long col) {
      return csv::parse_number(row[static_cast<std::size_t>(col)], source, line,
                               table.header[static_cast<std::size_t>(col)]);
    };
    out.yhat[i] = num(yhat_col);
    if (shared) (*out.y)[i] = num(y_col);
    if (pi_col >= 0) {
      const double p = num(pi_col);
      if (!(p > 0.0 && p <= 1.0)) {
        throw DataError(source + ":" + std::to_string(line) + ": column '" + schema.pi +
                        "' value " + row[static_cast<std::size_t>(pi_col)] +
                        " outside (0,1]; labeling probability must satisfy pi in (0,1]");
      }
      (*out.pi)[i] = p;
    }
    for (std::size_t c = 0; c < cov_cols.size(); ++c) {
      out.covariates(i, static_cast<Eigen::Index>(c)) = num(cov_cols[c]);
    }
    if (id_col >= 0) {
      const std::string& cell = row[static_cast<std::size_t>(id_col)];
      std::int64_t id = 0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), id);
      if (ec != std::errc() || ptr != cell.data() + cell.size()) {
        throw DataError(source + ":" + std::to_string(line) + ": column '" + schema.id +
                        "' is not an integer: '" + cell + "'");
      }
      out.row_id[static_cast<std::size_t>(i)] = id;
    } else {
      out.row_id[static_cast<std::size_t>(i)] = i;
    }
  }
  return out;
}

void write_header(std::ostream& out, const std::vector<std::string>& covariate_names,
                  const Schema& schema, bool shared, bool has_pi) {
  out << csv::escape(schema.id);
  for (const auto& name : covariate_names) out << ',' << csv::escape(name);
  if (shared) out << ',' << csv::escape(schema.y);
  out << ',' << csv::escape(schema.yhat);
  if (has_pi) out << ',' << csv::escape(schema.pi);
  out << '\n';
}

}  // namespace

Eigen::VectorXd SharedDataset::z() const {
  if (!z_column) throw AssumptionError("no treatment (z) column designated in shared data");
  return covariates.col(*z_column);
}

Eigen::VectorXd SurrogateDataset::z() const {
  if (!z_column) throw AssumptionError("no treatment (z) column designated in surrogate data");
  return covariates.col(*z_column);
}

SharedDataset SharedDataset::select(const std::vector<Eigen::Index>& rows) const {
  SharedDataset out;
  select_common(*this, out, rows);
  out.y = pick(y, rows);
  out.yhat = pick(yhat, rows);
  if (pi) out.pi = pick(*pi, rows);
  return out;
}

SurrogateDataset SurrogateDataset::select(const std::vector<Eigen::Index>& rows) const {
  SurrogateDataset out;
  select_common(*this, out, rows);
  out.yhat = pick(yhat, rows);
  return out;
}

void validate(const SharedDataset& data) {
  const auto n = data.y.size();
  validate_common(data, n, "n");
  if (data.yhat.size() != n) {
    throw DataError("length mismatch: y has " + std::to_string(n) + " rows, yhat has " +
                    std::to_string(data.yhat.size()));
  }
  if (!data.y.allFinite()) throw DataError("y contains non-finite values");
  if (!data.yhat.allFinite()) throw DataError("yhat contains non-finite values");
  if (data.pi) {
    if (data.pi->size() != n) throw DataError("length mismatch: pi has a different length");
    for (Eigen::Index i = 0; i < n; ++i) {
      const double p = (*data.pi)[i];
      if (!(p > 0.0 && p <= 1.0)) {
        throw DataError("row " + std::to_string(i + 1) +
                        ": labeling probability must satisfy pi in (0,1]");
      }
    }
  }
}

void validate(const SurrogateDataset& data) {
  validate_common(data, data.yhat.size(), "N");
  if (!data.yhat.allFinite()) throw DataError("yhat contains non-finite values");
}

void require_same_schema(const SharedDataset& shared, const SurrogateDataset& surrogate) {
  if (shared.covariate_names == surrogate.covariate_names &&
      shared.z_column == surrogate.z_column) {
    return;
  }
  const std::set<std::string> a(shared.covariate_names.begin(), shared.covariate_names.end());
  const std::set<std::string> b(surrogate.covariate_names.begin(),
                                surrogate.covariate_names.end());
  std::string only_shared;
  std::string only_surrogate;
  for (const auto& name : a) {
    if (!b.count(name)) only_shared += (only_shared.empty() ? "" : ", ") + name;
  }
  for (const auto& name : b) {
    if (!a.count(name)) only_surrogate += (only_surrogate.empty() ? "" : ", ") + name;
  }
  std::string msg = "covariate schema differs between shared and surrogate data";
  if (!only_shared.empty()) msg += "; only in shared: " + only_shared;
  if (!only_surrogate.empty()) msg += "; only in surrogate: " + only_surrogate;
  if (only_shared.empty() && only_surrogate.empty()) msg += "; column order or z role differs";
  throw DataError(msg);
}

SharedDataset make_shared(Eigen::VectorXd y, Eigen::VectorXd yhat, Eigen::MatrixXd covariates,
                          std::vector<std::string> covariate_names,
                          std::optional<Eigen::Index> z_column,
                          std::optional<Eigen::VectorXd> pi) {
  SharedDataset d;
  const auto n = y.size();
  if (covariates.size() == 0) covariates.resize(n, 0);
  if (covariate_names.empty()) {
    for (Eigen::Index c = 0; c < covariates.cols(); ++c) {
      covariate_names.push_back(z_column && *z_column == c ? "z" : "x_" + std::to_string(c + 1));
    }
  }
  d.y = std::move(y);
  d.yhat = std::move(yhat);
  d.covariates = std::move(covariates);
  d.covariate_names = std::move(covariate_names);
  d.z_column = z_column;
  d.pi = std::move(pi);
  d.row_id.resize(static_cast<std::size_t>(n));
  std::iota(d.row_id.begin(), d.row_id.end(), std::int64_t{0});
  validate(d);
  return d;
}

SurrogateDataset make_surrogate(Eigen::VectorXd yhat, Eigen::MatrixXd covariates,
                                std::vector<std::string> covariate_names,
                                std::optional<Eigen::Index> z_column) {
  SurrogateDataset d;
  const auto n = yhat.size();
  if (covariates.size() == 0) covariates.resize(n, 0);
  if (covariate_names.empty()) {
    for (Eigen::Index c = 0; c < covariates.cols(); ++c) {
      covariate_names.push_back(z_column && *z_column == c ? "z" : "x_" + std::to_string(c + 1));
    }
  }
  d.yhat = std::move(yhat);
  d.covariates = std::move(covariates);
  d.covariate_names = std::move(covariate_names);
  d.z_column = z_column;
  d.row_id.resize(static_cast<std::size_t>(n));
  std::iota(d.row_id.begin(), d.row_id.end(), std::int64_t{0});
  validate(d);
  return d;
}

SharedDataset load_shared(const std::filesystem::path& path, const Schema& schema) {
  const auto table = csv::read(path);
  auto cols = parse_columns(table, path.string(), schema, true);
  SharedDataset d;
  d.row_id = std::move(cols.row_id);
  d.covariate_names = std::move(cols.covariate_names);
  d.covariates = std::move(cols.covariates);
  d.z_column = cols.z_column;
  d.y = std::move(*cols.y);
  d.yhat = std::move(cols.yhat);
  d.pi = std::move(cols.pi);
  validate(d);
  return d;
}

SurrogateDataset load_surrogate(const std::filesystem::path& path, const Schema& schema) {
  const auto table = csv::read(path);
  auto cols = parse_columns(table, path.string(), schema, false);
  SurrogateDataset d;
  d.row_id = std::move(cols.row_id);
  d.covariate_names = std::move(cols.covariate_names);
  d.covariates = std::move(cols.covariates);
  d.z_column = cols.z_column;
  d.yhat = std::move(cols.yhat);
  validate(d);
  return d;
}

SurrogateDataset load_surrogate(const std::filesystem::path& path, const Schema& schema,
                                const SharedDataset& paired) {
  auto d = load_surrogate(path, schema);
  require_same_schema(paired, d);
  return d;
}

void write_shared(std::ostream& out, const SharedDataset& data, const Schema& schema) {
  write_header(out, data.covariate_names, schema, true, data.pi.has_value());
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    out << data.row_id[static_cast<std::size_t>(i)];
    for (Eigen::Index c = 0; c < data.k(); ++c) out << ',' << csv::format_number(data.covariates(i, c));
    out << ',' << csv::format_number(data.y[i]) << ',' << csv::format_number(data.yhat[i]);
    if (data.pi) out << ',' << csv::format_number((*data.pi)[i]);
    out << '\n';
  }
}

void write_surrogate(std::ostream& out, const SurrogateDataset& data, const Schema& schema) {
  write_header(out, data.covariate_names, schema, false, false);
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    out << data.row_id[static_cast<std::size_t>(i)];
    for (Eigen::Index c = 0; c < data.k(); ++c) out << ',' << csv::format_number(data.covariates(i, c));
    out << ',' << csv::format_number(data.yhat[i]) << '\n';
  }
}

void write_shared(const std::filesystem::path& path, const SharedDataset& data,
                  const Schema& schema) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  write_shared(out, data, schema);
}

void write_surrogate(const std::filesystem::path& path, const SurrogateDataset& data,
                     const Schema& schema) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  write_surrogate(out, data, schema);
}

std::vector<Eigen::Index> FoldAssignment::members(int fold) const {
  std::vector<Eigen::Index> out;
  for (std::size_t i = 0; i < fold_index.size(); ++i) {
    if (fold_index[i] == fold) out.push_back(static_cast<Eigen::Index>(i));
  }
  return out;
}

std::vector<Eigen::Index> FoldAssignment::complement(int fold) const {
  std::vector<Eigen::Index> out;
  for (std::size_t i = 0; i < fold_index.size(); ++i) {
    if (fold_index[i] != fold) out.push_back(static_cast<Eigen::Index>(i));
  }
  return out;
}

FoldAssignment make_folds(Eigen::Index n, int k, std::uint64_t seed) {
  if (k < 2) throw ConfigError("fold count must be at least 2, got " + std::to_string(k));
  if (k > n) {
    throw ConfigError("fold count " + std::to_string(k) + " exceeds row count " +
                      std::to_string(n));
  }
  std::vector<std::size_t> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t i = order.size() - 1; i > 0; --i) {
    std::swap(order[i], order[rng.below(i + 1)]);
  }
  FoldAssignment folds;
  folds.k = k;
  folds.seed = seed;
  folds.fold_index.resize(order.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    folds.fold_index[order[pos]] = static_cast<int>(pos % static_cast<std::size_t>(k));
  }
  return folds;
}

}  // namespace surrocal
