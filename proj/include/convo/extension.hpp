// The L^2 - L^6 extension machinery on perturbed parabolas (d = 1):
// the functional Q(f) = ||f nu * f nu * f nu||^2 / ||f||^6, concentrating
// extremizer families, the a_n selection rule, and the sharp-constant sweep
// toward pi / sqrt(3).
#pragma once

#include <functional>
#include <vector>

#include "convo/surfaces.hpp"

namespace convo {

struct ExtremizerSpec {
  enum class Case { i, ii };
  Case kind = Case::i;
  double center = 0.0;    // y_0 (case i) or a member y_n of the escaping sequence
  double exponent = 1.0;  // a > 0
  const SurfaceSpec* surface = nullptr;  // d = 1
};

/// f(y) = exp(-a (psi(y) - psi(c) - psi'(c)(y - c))); maximum 1 at y = c.
struct Extremizer {
  ExtremizerSpec spec;
  std::function<double(double)> f;
  double support_lo = 0.0;  // f >= mass_floor * f(c) inside [support_lo, support_hi]
  double support_hi = 0.0;
};

/// Validates the request (case (i) requires phi''(center) = 0 within 1e-8,
/// checked by finite differences) and computes the effective support at the
/// given relative floor.
Extremizer build_extremizer(const ExtremizerSpec& spec, double mass_floor = 1e-8);

struct QResult {
  double q_value = 0.0;   // numerator / norm2^6
  double norm6 = 0.0;     // ||f nu * f nu * f nu||^2  (the numerator)
  double norm6_err = 0.0;
  double norm2 = 0.0;     // ||f||_2
  double error_estimate = 0.0;  // first-order combined error on q_value
};

/// Quadrature layout for the Q numerator. The tau integral substitutes
/// tau = 3 psi(xi/3) + sigma^2; panels are composite Gauss-Legendre.
struct QGrids {
  double support_lo = 0.0, support_hi = 0.0;  // effective support of f
  int xi_panels = 24;
  int sigma_panels = 16;
  int gl_order = 6;
  int circle_nodes = 256;
  double integrand_floor = 1e-12;  // sigma-range doubling-probe cutoff
  double norm_tol_rel = 1e-12;
};

/// Grids derived from an extremizer's effective support.
QGrids auto_grids(const Extremizer& ext);

/// Q(f) for d = 1, n = 3. Requires ||f|| > 0.
QResult q_functional(const SurfaceSpec& surface, const std::function<double(double)>& f,
                     const QGrids& grids);

struct SelectedA {
  double a = 0.0;
  double concentration_ratio = 0.0;  // mass fraction outside |y - c| < 1/n
  double q_gap = 0.0;                // |Q(f_a) - boundary density at 3c|
  int doublings = 0;
};

/// Smallest a = 2^k satisfying both selection conditions at level 1/n:
/// concentration_ratio <= 1/n and q_gap <= 1/n. Case (i) degenerates to
/// a = n. Throws ConvergenceError with the achieved gaps past a_max.
SelectedA select_a_n(const SurfaceSpec& surface, double center, int n,
                     ExtremizerSpec::Case kind, double a_max = 1048576.0);

struct SweepRow {
  double a = 0.0;
  double center = 0.0;
  double q_value = 0.0;
  double q_err = 0.0;
  double gap = 0.0;   // pi/sqrt(3) - q_value
  bool warn = false;  // gap not decreasing beyond combined error
};

/// Q sweep over exponents (single center, case i) or centers (case ii,
/// exponent chosen per entry of a_list).
std::vector<SweepRow> sharp_constant_sweep(const SurfaceSpec& surface,
                                           ExtremizerSpec::Case kind,
                                           std::span<const double> centers,
                                           std::span<const double> a_list);

}  // namespace convo
