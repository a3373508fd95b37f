// Hypersurfaces psi = |.|^2 + phi, the perturbation catalogue, the profile
// functions g_n / h_n and their t-derivatives, and weighted products.
#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "convo/common.hpp"

namespace convo {

/// A convex perturbation phi: R^d -> R with analytic gradient and optional
/// Hessian (row-major d*d). Strict convexity is declared, not proven.
struct PerturbationSpec {
  int dim = 1;
  std::string name;
  std::function<double(std::span<const double>)> value;
  std::function<void(std::span<const double>, std::span<double>)> gradient;
  std::function<void(std::span<const double>, std::span<double>)> hessian;  // may be empty
  bool strictly_convex = false;

  bool has_hessian() const { return static_cast<bool>(hessian); }
};

/// Built-in catalogue: "zero", "quartic", "soft-hyperbola", "exponential".
/// None of the built-ins takes parameters.
PerturbationSpec make_perturbation(const std::string& name, std::span<const double> params,
                                   int dim);

/// Probabilistic spot-checks of the PerturbationSpec contract (nonnegativity,
/// finite-difference gradient/Hessian agreement, midpoint convexity).
/// Returns human-readable descriptions of every violated check.
std::vector<std::string> check_perturbation(const PerturbationSpec& pert, std::uint64_t seed,
                                            int samples);

/// The surface Sigma_phi: graph of psi = |.|^2 + phi over R^d.
class SurfaceSpec {
 public:
  explicit SurfaceSpec(PerturbationSpec pert);
  static SurfaceSpec unperturbed(int dim);

  int dim() const { return pert_.dim; }
  const PerturbationSpec& perturbation() const { return pert_; }
  bool has_hessian() const { return pert_.has_hessian(); }
  bool strictly_convex_perturbation() const { return pert_.strictly_convex; }

  double phi(std::span<const double> y) const { return pert_.value(y); }
  double psi(std::span<const double> y) const;
  void grad_psi(std::span<const double> y, std::span<double> out) const;
  /// Analytic Hessian of psi (throws if the perturbation has none).
  void hess_psi(std::span<const double> y, std::span<double> out) const;
  /// Central finite differences of grad_psi with the given step.
  void hess_psi_fd(std::span<const double> y, double step, std::span<double> out) const;
  /// Analytic Hessian when available, else finite differences with the
  /// scale-aware default step 1e-5 (1 + |y|).
  void hess_psi_or_fd(std::span<const double> y, std::span<double> out) const;

 private:
  PerturbationSpec pert_;
};

/// Continuous weight w: R^d -> R for the weighted convolution measures.
struct WeightSpec {
  std::function<double(std::span<const double>)> value;
  std::optional<double> support_radius;
};

/// g_n, h_n and their t-derivatives at one (t, y).
struct ProfilePoint {
  double g;
  double g_deriv;
  double h;
  double h_deriv;
};

/// Evaluates the profile functions for fixed (surface, n, xi). Construction
/// precomputes xi/n and n psi(xi/n); evaluation methods reuse internal
/// scratch, so use one evaluator per thread.
class ProfileEvaluator {
 public:
  ProfileEvaluator(const SurfaceSpec& surface, int n, std::span<const double> xi);

  int dim() const { return d_; }
  int nfold() const { return n_; }
  int ambient_dim() const { return d_ * (n_ - 1); }
  /// n psi(xi/n), the support threshold in tau.
  double base() const { return base_; }
  std::span<const double> center() const { return center_; }
  const SurfaceSpec& surface() const { return *surface_; }

  double g(double t, std::span<const double> y);
  /// Value and t-derivative of g_n.
  ProfilePoint g_with_deriv(double t, std::span<const double> y);
  /// Quadratic form |sum y_j|^2 + sum |y_i|^2, so that h_n(t,y) = t^2 * form.
  double h_quad_form(std::span<const double> y) const;
  double h(double t, std::span<const double> y) const { return t * t * h_quad_form(y); }

 private:
  void check_y(std::span<const double> y) const;

  const SurfaceSpec* surface_;
  int n_;
  int d_;
  Vec center_;
  double base_;
  mutable Vec arg_, sum_, grad_plus_, grad_minus_;
};

/// One-shot profile evaluation; validates dimensions.
ProfilePoint profile(const SurfaceSpec& surface, int n, std::span<const double> xi, double t,
                     std::span<const double> y);

/// W(xi; y_1, ..., y_{n-1}) = w(xi/n + y_1 + ... + y_{n-1}) prod_i w(xi/n - y_i).
double weight_product(const WeightSpec& weight, int n, std::span<const double> xi,
                      std::span<const double> y);

}  // namespace convo
