#pragma once

#include <stdexcept>
#include <string>

namespace pdwg {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// The assembled saddle-point matrix could not be factored (zero pivot or
/// vanishing reciprocal condition estimate).
class SingularSystemError : public Error {
public:
  using Error::Error;
};

/// An iterative solve stopped before reaching its tolerance.
class NotConvergedError : public Error {
public:
  NotConvergedError(const std::string& what, int iterations, double residual)
      : Error(what), iterations_(iterations), residual_(residual) {}

  [[nodiscard]] int iterations() const noexcept { return iterations_; }
  [[nodiscard]] double residual() const noexcept { return residual_; }

private:
  int iterations_;
  double residual_;
};

#define PDWG_REQUIRE(cond, ExceptionType, msg) \
  do {                                         \
    if (!(cond)) throw ExceptionType(msg);     \
  } while (0)

}  // namespace pdwg
