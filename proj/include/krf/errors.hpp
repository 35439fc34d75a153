#pragma once

#include <stdexcept>
#include <string>

namespace krf {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Kähler positivity lost: a potential with u' <= 0 or u'' <= 0.
class DegenerateMetric : public Error {
 public:
  DegenerateMetric(std::size_t node, double rho, const std::string& detail)
      : Error("degenerate metric at node " + std::to_string(node) + " (rho=" + std::to_string(rho) +
              "): " + detail),
        node_(node) {}
  std::size_t node() const { return node_; }

 private:
  std::size_t node_;
};

/// Newton iteration failed to reach its tolerance.
class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, double residual)
      : Error(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

}  // namespace krf
