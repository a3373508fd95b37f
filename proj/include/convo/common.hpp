// Shared error types and small numeric helpers.
#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace convo {

using Vec = std::vector<double>;

/// Precondition or dimension-contract failure (maps to CLI usage/config exit code).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input outside the mathematical domain of an operation (e.g. lambda at the origin).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Query point below the support threshold tau = n psi(xi/n).
class OutsideSupportError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Iteration budget exhausted; carries the best estimate reached so far.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double best_estimate)
      : std::runtime_error(what), best_estimate_(best_estimate) {}
  double best_estimate() const { return best_estimate_; }

 private:
  double best_estimate_;
};

/// Bad run configuration (unknown perturbation name, unwritable output, ...).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm_sq(std::span<const double> a) { return dot(a, a); }

inline double norm(std::span<const double> a) { return std::sqrt(norm_sq(a)); }

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw ContractViolation(msg);
}

}  // namespace convo
