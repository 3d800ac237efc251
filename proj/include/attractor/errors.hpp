#pragma once

#include <stdexcept>
#include <string>

namespace attractor {

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Raised when a trajectory's X-norm crosses the blow-up threshold.
struct BlowupError : Error {
  double time;
  double x_norm;
  BlowupError(double t, double norm)
      : Error("trajectory blow-up at t=" + std::to_string(t) +
              ", x_norm=" + std::to_string(norm)),
        time(t), x_norm(norm) {}
};

struct NewtonError : Error {
  double residual;
  int iterations;
  NewtonError(double res, int iters)
      : Error("Newton iteration failed to converge: residual=" +
              std::to_string(res) + " after " + std::to_string(iters) +
              " iterations"),
        residual(res), iterations(iters) {}
};

// Configuration problems carry the offending field path (e.g. "solver.dt").
struct ConfigError : Error {
  std::string field;
  ConfigError(const std::string& field_path, const std::string& msg)
      : Error("config field '" + field_path + "': " + msg), field(field_path) {}
};

struct NonFiniteError : Error {
  std::size_t index;
  double input;
  NonFiniteError(std::size_t i, double s)
      : Error("non-finite function value at grid index " + std::to_string(i) +
              " (input " + std::to_string(s) + ")"),
        index(i), input(s) {}
};

}  // namespace attractor
