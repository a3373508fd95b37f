// Pointwise verification of the geometric comparison principle
//   nu^{*(n)}(xi, tau) <= nu_0^{*(n)}(xi, tau - n phi(xi/n))
// with strictness, over configurable grids.
#pragma once

#include <span>
#include <vector>

#include "convo/density.hpp"
#include "convo/surfaces.hpp"

namespace convo {

struct ComparisonRow {
  Vec xi;
  double tau = 0.0;
  double lhs = 0.0;      // perturbed density
  double lhs_err = 0.0;
  double rhs = 0.0;      // unperturbed closed form at the shifted tau
  double rhs_err = 0.0;
  double margin = 0.0;   // rhs - lhs
  bool strict = false;   // margin > combined error
};

struct ComparisonReport {
  std::vector<ComparisonRow> rows;
  double min_margin = 0.0;
  int violations = 0;  // rows with margin < -(lhs_err + rhs_err)
};

/// One grid point; requires tau > n psi(xi/n).
ComparisonRow compare_point(const SurfaceSpec& surface, int n, std::span<const double> xi,
                            double tau, const SphereRule& rule);

/// True iff every grid point inside the perturbed support is also inside the
/// unperturbed support (tau >= |xi|^2 / n).
bool support_inclusion_check(const SurfaceSpec& surface, int n,
                             std::span<const Vec> xi_points, std::span<const double> taus);

/// Full sweep over xi_points x offsets, tau = n psi(xi/n) + offset.
/// Rows are ordered by (xi index, offset index).
ComparisonReport comparison_sweep(const SurfaceSpec& surface, int n,
                                  std::span<const Vec> xi_points,
                                  std::span<const double> tau_offsets, const SphereRule& rule);

}  // namespace convo
