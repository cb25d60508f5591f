#pragma once

#include <stdexcept>
#include <string>

namespace ppse {

// Base for every typed failure raised by the library. The scenario runner
// re-wraps these with stage attribution before they reach the CLI.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct DimensionMismatch : Error {
  using Error::Error;
};
struct NotNormalized : Error {
  using Error::Error;
};
struct NotUnitary : Error {
  using Error::Error;
};
struct NonFinite : Error {
  using Error::Error;
};
struct IncompleteSpectrum : Error {
  using Error::Error;
};
struct NonOrthonormal : Error {
  using Error::Error;
};
struct BadFactorIndex : Error {
  using Error::Error;
};

struct NonOrthonormalBasis : Error {
  using Error::Error;
};
struct IncompleteBasis : Error {
  using Error::Error;
};
struct BadDCoeffRow : Error {
  BadDCoeffRow(const std::string& msg, int block, int row)
      : Error(msg), block_index(block), row_index(row) {}
  int block_index;
  int row_index;
};
struct ModeMismatch : Error {
  using Error::Error;
};

struct ImpossibleSelection : Error {
  using Error::Error;
};
struct ImpossiblePostSelection : Error {
  using Error::Error;
};
struct EmptyEnsemble : Error {
  using Error::Error;
};
struct UnknownOutcomeTag : Error {
  using Error::Error;
};
struct MissingThetaForProcess : Error {
  using Error::Error;
};

struct UnknownBuiltin : Error {
  using Error::Error;
};

struct ParseError : Error {
  ParseError(const std::string& msg, int line_, int column_, std::string token_)
      : Error(msg), line(line_), column(column_), token(std::move(token_)) {}
  int line;
  int column;
  std::string token;
};

// A syntactically valid scenario that violates a semantic constraint
// (dimension mismatch, non-orthonormal basis, bad d row, ...).
struct SemanticError : Error {
  SemanticError(const std::string& msg, int line_, int column_)
      : Error(msg), line(line_), column(column_) {}
  int line;
  int column;
};

// Raised by the runner; wraps a typed error with the pipeline stage it hit.
struct StageError : Error {
  StageError(const std::string& stage_, const std::string& msg)
      : Error(stage_ + ": " + msg), stage(stage_) {}
  std::string stage;
};

}  // namespace ppse
