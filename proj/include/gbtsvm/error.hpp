#ifndef GBTSVM_ERROR_HPP
#define GBTSVM_ERROR_HPP

#include <stdexcept>
#include <string>

namespace gbt {

enum class ErrorKind {
  parse,
  schema,
  io,
  invalid_argument,
  dimension_mismatch,
  degenerate,
  convergence,
  not_positive_definite,
  indefinite_diagonal,
  solver,
  unsupported,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::parse: return "parse";
    case ErrorKind::schema: return "schema";
    case ErrorKind::io: return "io";
    case ErrorKind::invalid_argument: return "invalid_argument";
    case ErrorKind::dimension_mismatch: return "dimension_mismatch";
    case ErrorKind::degenerate: return "degenerate";
    case ErrorKind::convergence: return "convergence";
    case ErrorKind::not_positive_definite: return "not_positive_definite";
    case ErrorKind::indefinite_diagonal: return "indefinite_diagonal";
    case ErrorKind::solver: return "solver";
    case ErrorKind::unsupported: return "unsupported";
  }
  return "unknown";
}

/// Base of every error thrown by the library. The kind decides the CLI exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Schema error for a label column with a single distinct value. The CLI
/// reports it as degenerate data.
class SingleClassError : public Error {
 public:
  explicit SingleClassError(const std::string& what) : Error(ErrorKind::schema, what) {}
};

/// Error that carries the best result computed before giving up.
template <typename Partial>
class PartialResultError : public Error {
 public:
  PartialResultError(ErrorKind kind, const std::string& what, Partial partial)
      : Error(kind, what), partial_(std::move(partial)) {}

  const Partial& partial() const noexcept { return partial_; }

 private:
  Partial partial_;
};

}  // namespace gbt

#endif  // GBTSVM_ERROR_HPP
