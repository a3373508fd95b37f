// Quadrature on unit spheres S^{m-1} plus adaptive 1D integration.
//
// Node layout conventions (relied on by the error estimators in density):
//   uniform_circle: node k is (cos, sin) of 2 pi k / N, k = 0..N-1.
//   product_rule:   node (i, j) at index i * n_azimuth + j; polar level i is
//                   a Gauss-Legendre node in cos(theta), azimuth j equispaced.
//   monte_carlo:    antithetic pairs, node 2k+1 = -node 2k; N must be even.
#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "convo/common.hpp"

namespace convo {

enum class RuleKind { point_pair, uniform_circle, product_rule, monte_carlo };

struct SphereRule {
  int ambient_dim = 0;
  RuleKind kind = RuleKind::uniform_circle;
  std::uint64_t seed = 0;        // monte_carlo only
  int n_polar = 0, n_azimuth = 0;  // product_rule only
  std::vector<double> nodes;     // count * ambient_dim, row-major
  std::vector<double> weights;

  std::size_t count() const { return weights.size(); }
  std::span<const double> node(std::size_t i) const {
    return {nodes.data() + i * ambient_dim, static_cast<std::size_t>(ambient_dim)};
  }
};

/// S^0 = {+1, -1} with unit weights (total mass 2 = 2 pi^{1/2} / Gamma(1/2)).
SphereRule point_pair_rule();

/// Periodic trapezoid rule on S^1: N equispaced angles, weights 2 pi / N.
SphereRule circle_rule(int n);

/// Gauss-Legendre x trapezoid product rule on S^2.
SphereRule sphere_product_rule(int n_polar, int n_azimuth);

/// Monte Carlo rule on S^{m-1}, m >= 3: normalized Gaussian nodes in
/// antithetic pairs from a counter-based generator; weights area / N.
SphereRule sphere_mc_rule(int m, std::size_t n, std::uint64_t seed);

/// Rule selection by ambient dimension: S^0 pair, S^1 trapezoid (512),
/// S^2 product (64 x 128), Monte Carlo (2e5) above.
SphereRule default_rule_for(int m, std::size_t mc_nodes = 200000, std::uint64_t seed = 0);

/// A coarser companion rule of the same kind, used for error estimation.
/// Monte Carlo rules estimate error statistically and return themselves.
SphereRule coarsen(const SphereRule& rule);

struct IntegralEstimate {
  double value = 0.0;
  double error_estimate = 0.0;
  std::size_t nodes_used = 0;
};

/// Adaptive Simpson quadrature to absolute tolerance tol.
/// Throws ConvergenceError (carrying the best estimate) past max depth.
IntegralEstimate adaptive_1d(const std::function<double(double)>& f, double a, double b,
                             double tol);

/// Integral over [a, inf) via the substitution x = a + (1-t)/t, t in (0, 1];
/// requires monotone tail decay of f.
IntegralEstimate semi_infinite_1d(const std::function<double(double)>& f, double a, double tol);

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w);

}  // namespace convo
