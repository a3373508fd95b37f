#include "convo/implicit_maps.hpp"

#include <algorithm>
#include <cmath>

namespace convo {

namespace {

void check_nonzero(std::span<const double> y, const char* who) {
  for (double v : y)
    if (v != 0.0) return;
  throw DomainError(std::string(who) + " undefined at the origin");
}

}  // namespace

LambdaSolution solve_profile_level(ProfileEvaluator& eval, std::span<const double> w,
                                   double target, RootMethod method) {
  if (!(target > 0.0))
    throw DomainError("profile level solve: target must be positive");
  const double tol = kRootTolAbs + kRootTolRel * target;

  // Bracket [lo, hi] with g(lo) <= target <= g(hi); g(0) = 0 and g is
  // increasing and unbounded on (0, inf), so doubling the upper end works.
  double lo = 0.0, g_lo = 0.0;
  double hi = 1.0;
  double g_hi = eval.g(hi, w);
  int doublings = 0;
  while (g_hi < target) {
    if (++doublings > kRootMaxIter)
      throw ConvergenceError("profile level solve: bracket expansion failed", hi);
    hi *= 2.0;
    g_hi = eval.g(hi, w);
  }

  // g(t) >= h(t) = form t^2, so sqrt(target / form) starts at or above the
  // root (exactly on it for the unperturbed profile).
  double x = std::sqrt(target / eval.h_quad_form(w));
  if (!(x > lo) || !(x < hi)) x = hi;

  double residual;
  int iterations = 0;
  ProfilePoint p{};
  for (;;) {
    p = eval.g_with_deriv(x, w);
    residual = std::abs(p.g - target);
    if (p.g < target) {
      lo = x;
      g_lo = p.g;
    } else {
      hi = x;
      g_hi = p.g;
    }
    if (residual <= tol) break;
    if (++iterations > kRootMaxIter)
      throw ConvergenceError("profile level solve: iteration budget exhausted", x);
    if (!(g_lo <= target && target <= g_hi))
      throw ConvergenceError("profile level solve: bracket inverted (non-monotone profile?)", x);
    double next = 0.5 * (lo + hi);
    if (method == RootMethod::newton_safeguarded && p.g_deriv > 0.0) {
      const double newton = x - (p.g - target) / p.g_deriv;
      if (newton > lo && newton < hi) next = newton;
    }
    x = next;
  }
  // One final Newton correction: for convex g it moves toward the root and
  // squares the residual, so the reported residual stays an upper bound.
  if (method == RootMethod::newton_safeguarded && p.g_deriv > 0.0) {
    const double polished = x - (p.g - target) / p.g_deriv;
    if (polished > 0.0) x = polished;
  }
  return LambdaSolution{x, residual, iterations, {lo, hi}};
}

LambdaSolution solve_lambda_self(const SurfaceSpec& surface, int n, std::span<const double> xi,
                                 std::span<const double> w, RootMethod method) {
  check_nonzero(w, "lambda");
  ProfileEvaluator eval(surface, n, xi);
  return solve_profile_level(eval, w, norm_sq(w), method);
}

LambdaSolution solve_lambda_cross(const SurfaceSpec& surface, int n, std::span<const double> xi,
                                  std::span<const double> y, RootMethod method) {
  check_nonzero(y, "lambda");
  ProfileEvaluator eval(surface, n, xi);
  return solve_profile_level(eval, y, eval.h(1.0, y), method);
}

LambdaSolution solve_rho_cross(const SurfaceSpec& surface, int n, std::span<const double> xi,
                               std::span<const double> y) {
  check_nonzero(y, "rho");
  ProfileEvaluator eval(surface, n, xi);
  const double h1 = eval.h(1.0, y);
  const double g1 = eval.g(1.0, y);
  const double rho = std::sqrt(g1 / h1);
  // h_n is homogeneous quadratic in t, so the closed form is exact.
  const double residual = std::abs(eval.h(rho, y) - g1);
  return LambdaSolution{rho, residual, 0, {rho, rho}};
}

double alpha(const SurfaceSpec& surface, int n, std::span<const double> xi, double tau,
             std::span<const double> omega) {
  require(std::abs(norm(omega) - 1.0) <= 1e-12, "alpha: omega must be a unit vector");
  ProfileEvaluator eval(surface, n, xi);
  const double c = tau - eval.base();
  if (!(c > 0.0)) throw OutsideSupportError("alpha: tau <= n psi(xi/n)");
  return solve_profile_level(eval, omega, c).lambda;
}

Vec map_T(const SurfaceSpec& surface, int n, std::span<const double> xi,
          std::span<const double> y) {
  const double lambda = solve_lambda_cross(surface, n, xi, y).lambda;
  Vec out(y.begin(), y.end());
  for (double& v : out) v *= lambda;
  return out;
}

Vec map_S(const SurfaceSpec& surface, int n, std::span<const double> xi,
          std::span<const double> y) {
  const double rho = solve_rho_cross(surface, n, xi, y).lambda;
  Vec out(y.begin(), y.end());
  for (double& v : out) v *= rho;
  return out;
}

MapJacobian det_T_prime(const SurfaceSpec& surface, int n, std::span<const double> xi,
                        std::span<const double> y) {
  check_nonzero(y, "det T'");
  ProfileEvaluator eval(surface, n, xi);
  const double lambda = solve_profile_level(eval, y, eval.h(1.0, y)).lambda;
  const ProfilePoint p = eval.g_with_deriv(lambda, y);
  const int m = eval.ambient_dim();
  const double det = std::pow(lambda, m - 2) * p.h_deriv / p.g_deriv;
  return MapJacobian{det, lambda, p.h_deriv, p.g_deriv};
}

MapJacobian det_S_prime(const SurfaceSpec& surface, int n, std::span<const double> xi,
                        std::span<const double> y) {
  check_nonzero(y, "det S'");
  ProfileEvaluator eval(surface, n, xi);
  const double rho = std::sqrt(eval.g(1.0, y) / eval.h(1.0, y));
  const ProfilePoint p = eval.g_with_deriv(1.0, y);
  const int m = eval.ambient_dim();
  const double det = std::pow(rho, m - 2) * p.g_deriv / p.h_deriv;
  return MapJacobian{det, rho, p.g_deriv, p.h_deriv};
}

}  // namespace convo
