// The n-fold convolution density of projection measure: sphere-integral
// evaluation, the unperturbed closed form, boundary values, and the
// (d, n) = (1, 2) asymptotic comparator.
#pragma once

#include <span>
#include <string>

#include "convo/quadrature.hpp"
#include "convo/surfaces.hpp"

namespace convo {

enum class Regime { interior, boundary, outside_support };

std::string regime_name(Regime r);

struct DensityQuery {
  const SurfaceSpec* surface = nullptr;
  int n = 2;
  Vec xi;
  double tau = 0.0;
  const WeightSpec* weight = nullptr;  // optional
  const SphereRule* rule = nullptr;
  // Optional precomputed coarse rule for the deterministic error estimate;
  // saves rebuilding it on every call in evaluation-heavy loops.
  const SphereRule* error_rule = nullptr;
};

struct DensityResult {
  double value = 0.0;
  double error_estimate = 0.0;
  Regime regime = Regime::interior;
};

/// Scale-aware band around tau = n psi(xi/n) classified as boundary.
double boundary_eps(std::span<const double> xi, double tau);

Regime support_classify(const SurfaceSpec& surface, int n, std::span<const double> xi,
                        double tau);

/// Sphere-integral density; outside the support the value is 0, on the
/// boundary band the closed-form boundary value is used (+inf for the
/// divergent (1,2) configuration).
DensityResult nfold_density(const DensityQuery& q);

/// c_{d,n} (tau - |xi|^2/n)_+^{d(n-1)/2 - 1} with
/// c_{d,n} = pi^{d(n-1)/2} / (n^{d/2} Gamma(d(n-1)/2)).
double paraboloid_closed_form(int d, int n, std::span<const double> xi, double tau);

/// The constant c_{d,n} alone.
double paraboloid_constant(int d, int n);

struct BoundaryValue {
  enum class Kind { finite, asymptotic };
  Kind kind = Kind::finite;
  double value = 0.0;
};

/// Continuous extension of the density to tau = n psi(xi/n):
/// 2 pi / (sqrt(3) psi''(xi/3)) for (1,3); pi / sqrt(det H(psi)(xi/2)) for
/// (2,2); zero when d(n-1) > 2; "asymptotic" for the divergent (1,2) case.
/// A weight multiplies the finite values by w(xi/n)^n.
BoundaryValue boundary_value(const SurfaceSpec& surface, int n, std::span<const double> xi,
                             const WeightSpec* weight = nullptr);

/// Near-boundary comparator for (d, n) = (1, 2):
/// [psi''(xi/2) sqrt(tau - 2 psi(xi/2)) lambda(sqrt(tau - 2 psi(xi/2)))]^{-1}.
/// The ratio density / comparator tends to 1 as tau decreases to the boundary.
double asymptotic_d1n2(const SurfaceSpec& surface, std::span<const double> xi, double tau);

}  // namespace convo
