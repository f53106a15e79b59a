#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace georob {

// One point per row.
using Points = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using Labels = std::vector<int>;

enum class ErrorKind {
  InvalidArgument,
  DimensionMismatch,
  OffManifold,
  CapExceeded,
  Divergence,
  Format,
  Io,
  Unsupported,
};

// Every failure raised by the library. `kind` lets callers (the CLI in
// particular) map failures to exit codes without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class DivergenceError : public Error {
 public:
  DivergenceError(int epoch, const std::string& what)
      : Error(ErrorKind::Divergence, what), epoch_(epoch) {}
  int epoch() const noexcept { return epoch_; }

 private:
  int epoch_;
};

inline void require(bool ok, ErrorKind kind, const std::string& what) {
  if (!ok) throw Error(kind, what);
}

inline void require_arg(bool ok, const std::string& what) {
  require(ok, ErrorKind::InvalidArgument, what);
}

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid argument";
    case ErrorKind::DimensionMismatch: return "dimension mismatch";
    case ErrorKind::OffManifold: return "point off manifold";
    case ErrorKind::CapExceeded: return "size cap exceeded";
    case ErrorKind::Divergence: return "divergence";
    case ErrorKind::Format: return "format error";
    case ErrorKind::Io: return "i/o error";
    case ErrorKind::Unsupported: return "unsupported";
  }
  return "unknown";
}

}  // namespace georob
