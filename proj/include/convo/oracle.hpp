// Independent brute-force evaluators used to validate the density and
// extension formulas. Deliberately self-contained: no code shared with the
// sphere-integral path (density / implicit_maps).
#pragma once

#include <cstdint>
#include <functional>
#include <span>

#include "convo/surfaces.hpp"

namespace convo {

enum class OracleMethod { thin_shell, root_sum, curve_trace };

struct OracleEstimate {
  double value = 0.0;
  double standard_error = 0.0;
  OracleMethod method = OracleMethod::thin_shell;
};

/// Monte Carlo volume of the shell {y : |g_n(1, y) - c| < epsilon} divided by
/// 2 epsilon, c = tau - n psi(xi/n). box_radius 0 requests automatic doubling
/// until the boundary minimum of g_n exceeds 1.1 c; an explicit radius that
/// fails that check throws ConfigError naming a sufficient radius.
OracleEstimate thin_shell_density(const SurfaceSpec& surface, int n, std::span<const double> xi,
                                  double tau, double epsilon, std::size_t samples,
                                  std::uint64_t seed, double box_radius = 0.0);

/// d = 1, n = 2 co-area evaluation: sum over the two roots y of
/// psi(y) + psi(xi - y) = tau of |psi'(y) - psi'(xi - y)|^{-1}.
OracleEstimate root_sum_density_1d(const SurfaceSpec& surface, double xi, double tau);

/// Tensor-product grid for extension_norm_roots. The outer (y1, y2, y3, z1)
/// integrals use composite Gauss-Legendre in y and Gauss-Chebyshev in z1
/// across the root-existence interval (absorbing the inverse-square-root
/// fold endpoints); halving panels and nodes gives the error estimate.
struct NormRootsGrid {
  double y_lo = -1.0, y_hi = 1.0;
  int panels = 12;
  int gl_order = 8;
  int cheb_nodes = 32;
  double fold_eps = 1e-8;  // |psi'(z2) - psi'(z3)| below this is dropped into the error
};

/// || f nu * f nu * f nu ||^2_{L^2(R^2)} for d = 1 by resolving both delta
/// constraints: quadrature over (y1, y2, y3, z1) and a root sum over z2.
OracleEstimate extension_norm_roots(const SurfaceSpec& surface,
                                    const std::function<double(double)>& f,
                                    const NormRootsGrid& grid);

}  // namespace convo
