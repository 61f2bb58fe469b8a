#pragma once

#include <stdexcept>
#include <string>

namespace rnav {

// Every library failure derives from Error and carries a category that the
// C API maps onto its status codes.
enum class ErrorKind {
  kInvalidArgument,
  kDomain,        // chart/navigation domain, critical point, zero direction
  kParse,         // expression syntax
  kConfig,        // scenario validation
  kHypothesis,    // a theorem's hypothesis does not hold for the input
  kVerification,  // an internal identity check failed (bug signal)
  kNumerical,     // non-convergence
  kIo,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

struct InvalidArgument : Error {
  explicit InvalidArgument(const std::string& w) : Error(ErrorKind::kInvalidArgument, w) {}
};
struct DomainError : Error {
  explicit DomainError(const std::string& w) : Error(ErrorKind::kDomain, w) {}
};
struct ConfigError : Error {
  explicit ConfigError(const std::string& w) : Error(ErrorKind::kConfig, w) {}
};
struct HypothesisError : Error {
  explicit HypothesisError(const std::string& w) : Error(ErrorKind::kHypothesis, w) {}
};
struct VerificationError : Error {
  explicit VerificationError(const std::string& w) : Error(ErrorKind::kVerification, w) {}
};
struct NumericalError : Error {
  explicit NumericalError(const std::string& w) : Error(ErrorKind::kNumerical, w) {}
};
struct IoError : Error {
  explicit IoError(const std::string& w) : Error(ErrorKind::kIo, w) {}
};

// Syntax errors report a 1-based line/column.
class ParseError : public Error {
 public:
  ParseError(const std::string& msg, int line, int column)
      : Error(ErrorKind::kParse, msg + " at line " + std::to_string(line) + ", column " +
                                     std::to_string(column)),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace rnav
