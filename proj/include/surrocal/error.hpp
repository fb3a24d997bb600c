#pragma once

#include <stdexcept>
#include <string>

namespace surrocal {

// Every failure raised by the library derives from Error. The three
// subclasses map onto the CLI exit codes 2, 3 and 4.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid parameter values (alpha, fold counts, correlations, budgets, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed or invalid input data (CSV structure, non-finite cells, pi range).
class DataError : public Error {
 public:
  using Error::Error;
};

// Data are well formed but an estimator's structural assumption fails
// (too few rows, zero variance, rank deficiency, empty treatment arm).
class AssumptionError : public Error {
 public:
  using Error::Error;
};

// The surrogate predictions carry no variance on the shared rows, so the
// regression of y on yhat is undefined.
class DegeneratePredictorError : public AssumptionError {
 public:
  using AssumptionError::AssumptionError;
};

}  // namespace surrocal
