// Implicit scalar equations on the profile functions: lambda, rho, alpha,
// the radial maps T and S between level ellipsoids, and their Jacobian
// determinants.
#pragma once

#include <span>
#include <utility>

#include "convo/common.hpp"
#include "convo/surfaces.hpp"

namespace convo {

struct LambdaSolution {
  double lambda;
  double residual;            // achieved |g_n(lambda, y) - target|
  int iterations;
  std::pair<double, double> bracket;
};

struct MapJacobian {
  double determinant;
  double lambda_or_rho;
  double numerator;    // h_n'(lambda) resp. g_n'(1)
  double denominator;  // g_n'(lambda) resp. h_n'(1)
};

enum class RootMethod { newton_safeguarded, bisection };

/// Solver tolerances: |g - target| <= tol_abs + tol_rel * |target|.
inline constexpr double kRootTolAbs = 1e-12;
inline constexpr double kRootTolRel = 1e-12;
inline constexpr int kRootMaxIter = 200;

/// Solves g_n(t, w) = target for the unique t > 0 (g_n is strictly
/// increasing on (0, inf) for w != 0). Shared by the lambda/rho/alpha ops.
LambdaSolution solve_profile_level(ProfileEvaluator& eval, std::span<const double> w,
                                   double target, RootMethod method = RootMethod::newton_safeguarded);

/// lambda with g_n(lambda, w) = |w|^2 (self-normalized level).
LambdaSolution solve_lambda_self(const SurfaceSpec& surface, int n, std::span<const double> xi,
                                 std::span<const double> w,
                                 RootMethod method = RootMethod::newton_safeguarded);

/// lambda in (0, 1] with g_n(lambda, y) = h_n(1, y) (unperturbed cross level).
LambdaSolution solve_lambda_cross(const SurfaceSpec& surface, int n, std::span<const double> xi,
                                  std::span<const double> y,
                                  RootMethod method = RootMethod::newton_safeguarded);

/// rho >= 1 with h_n(rho, y) = g_n(1, y); closed form (g_n(1)/h_n(1))^{1/2}.
LambdaSolution solve_rho_cross(const SurfaceSpec& surface, int n, std::span<const double> xi,
                               std::span<const double> y);

/// alpha(xi, tau, omega) > 0 with g_n(alpha, omega) = tau - n psi(xi/n).
/// Requires tau above the support threshold and |omega| = 1 within 1e-12.
double alpha(const SurfaceSpec& surface, int n, std::span<const double> xi, double tau,
             std::span<const double> omega);

/// T(y) = lambda(y) y and S(y) = rho(y) y.
Vec map_T(const SurfaceSpec& surface, int n, std::span<const double> xi,
          std::span<const double> y);
Vec map_S(const SurfaceSpec& surface, int n, std::span<const double> xi,
          std::span<const double> y);

/// det T'(y) = lambda^{d(n-1)-2} h_n'(lambda) / g_n'(lambda), in (0,1) for
/// strictly convex perturbations.
MapJacobian det_T_prime(const SurfaceSpec& surface, int n, std::span<const double> xi,
                        std::span<const double> y);

/// det S'(y) = rho^{d(n-1)-2} g_n'(1) / h_n'(1).
MapJacobian det_S_prime(const SurfaceSpec& surface, int n, std::span<const double> xi,
                        std::span<const double> y);

}  // namespace convo
