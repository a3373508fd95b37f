#include "convo/density.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "convo/implicit_maps.hpp"
#include "convo/parallel.hpp"
#include "convo/special.hpp"

namespace convo {

namespace {

// Integrand worker holding per-thread scratch. The difference quotient
// (grad psi(p + a s) - grad psi(p - a w_i)) / a is evaluated as written for
// alpha >= alpha_min = 1e-6 (1 + |xi|); below that it switches to the Hessian
// quadratic form at p when available, else to the quotient at alpha_min.
class IntegrandWorker {
 public:
  IntegrandWorker(const SurfaceSpec& surface, int n, std::span<const double> xi,
                  const WeightSpec* weight)
      : eval_(surface, n, xi),
        weight_(weight),
        xi_(xi.begin(), xi.end()),
        alpha_min_(1e-6 * (1.0 + norm(xi))),
        m_(eval_.ambient_dim()),
        scaled_(m_),
        warg_(surface.dim()) {
    if (surface.has_hessian()) {
      hess_.resize(surface.dim() * surface.dim());
      surface.hess_psi(eval_.center(), hess_);
    }
  }

  double base() const { return eval_.base(); }

  double operator()(std::span<const double> omega, double c) {
    const double alpha = solve_profile_level(eval_, omega, c).lambda;
    double denom;
    if (alpha >= alpha_min_) {
      denom = eval_.g_with_deriv(alpha, omega).g_deriv / alpha;
    } else if (!hess_.empty()) {
      denom = hessian_form(omega);
    } else {
      denom = eval_.g_with_deriv(alpha_min_, omega).g_deriv / alpha_min_;
    }
    double value = std::pow(alpha, m_ - 2) / denom;
    if (weight_) value *= weight_factor(alpha, omega);
    return value;
  }

 private:
  // <s, H s> + sum_i <w_i, H w_i>, the alpha -> 0 limit of the quotient sum.
  double hessian_form(std::span<const double> omega) {
    const int d = eval_.dim();
    const int blocks = eval_.nfold() - 1;
    double form = 0.0;
    for (int k = 0; k < d; ++k) {
      double s = 0.0;
      for (int i = 0; i < blocks; ++i) s += omega[i * d + k];
      warg_[k] = s;
    }
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) form += warg_[a] * hess_[a * d + b] * warg_[b];
    for (int i = 0; i < blocks; ++i) {
      const double* wi = omega.data() + i * d;
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) form += wi[a] * hess_[a * d + b] * wi[b];
    }
    return form;
  }

  double weight_factor(double alpha, std::span<const double> omega) {
    for (int k = 0; k < m_; ++k) scaled_[k] = alpha * omega[k];
    return weight_product(*weight_, eval_.nfold(), xi_, scaled_);
  }

  ProfileEvaluator eval_;
  const WeightSpec* weight_;
  Vec xi_;
  double alpha_min_;
  int m_;
  Vec scaled_;
  Vec warg_;
  Vec hess_;
};

struct RuleIntegral {
  double value;
  double mc_standard_error;  // 0 for deterministic rules
};

RuleIntegral integrate_rule(const SurfaceSpec& surface, int n, std::span<const double> xi,
                            double c, const WeightSpec* weight, const SphereRule& rule) {
  const std::size_t count = rule.count();
  Vec contrib(count);
  parallel_chunks(count, 1024, [&](std::size_t, std::size_t begin, std::size_t end) {
    IntegrandWorker worker(surface, n, xi, weight);
    for (std::size_t i = begin; i < end; ++i)
      contrib[i] = rule.weights[i] * worker(rule.node(i), c);
  });
  RuleIntegral out{pairwise_sum(contrib), 0.0};
  if (rule.kind == RuleKind::monte_carlo) {
    // Pair-mean standard error: antithetic partners are correlated, so the
    // independent samples are the N/2 pair means (each already weighted by
    // area/N; a pair mean times N/2 is the usual weighted contribution).
    const std::size_t pairs = count / 2;
    const double mean = out.value / static_cast<double>(pairs);
    double ss = 0.0;
    for (std::size_t k = 0; k < pairs; ++k) {
      const double ck = contrib[2 * k] + contrib[2 * k + 1];
      ss += (ck - mean) * (ck - mean);
    }
    if (pairs > 1)
      out.mc_standard_error =
          std::sqrt(ss / (static_cast<double>(pairs) * static_cast<double>(pairs - 1))) *
          static_cast<double>(pairs);
  }
  return out;
}

}  // namespace

std::string regime_name(Regime r) {
  switch (r) {
    case Regime::interior: return "interior";
    case Regime::boundary: return "boundary";
    case Regime::outside_support: return "outside-support";
  }
  return "?";
}

double boundary_eps(std::span<const double> xi, double tau) {
  return 1e-10 * (1.0 + norm_sq(xi) + std::abs(tau));
}

Regime support_classify(const SurfaceSpec& surface, int n, std::span<const double> xi,
                        double tau) {
  ProfileEvaluator eval(surface, n, xi);
  const double gap = tau - eval.base();
  if (std::abs(gap) <= boundary_eps(xi, tau)) return Regime::boundary;
  return gap < 0.0 ? Regime::outside_support : Regime::interior;
}

DensityResult nfold_density(const DensityQuery& q) {
  require(q.surface != nullptr && q.rule != nullptr, "nfold_density: missing surface or rule");
  require(q.rule->ambient_dim == q.surface->dim() * (q.n - 1),
          "nfold_density: rule dimension must equal d(n-1)");
  const Regime regime = support_classify(*q.surface, q.n, q.xi, q.tau);
  if (regime == Regime::outside_support) return {0.0, 0.0, regime};
  if (regime == Regime::boundary) {
    const BoundaryValue bv = boundary_value(*q.surface, q.n, q.xi, q.weight);
    if (bv.kind == BoundaryValue::Kind::asymptotic)
      return {std::numeric_limits<double>::infinity(), 0.0, regime};
    return {bv.value, 0.0, regime};
  }
  ProfileEvaluator eval(*q.surface, q.n, q.xi);
  const double c = q.tau - eval.base();
  const RuleIntegral full = integrate_rule(*q.surface, q.n, q.xi, c, q.weight, *q.rule);
  double err;
  if (q.rule->kind == RuleKind::monte_carlo) {
    err = full.mc_standard_error;
  } else if (q.rule->kind == RuleKind::point_pair) {
    err = 1e-12 * std::abs(full.value);
  } else if (q.error_rule != nullptr) {
    err = std::abs(full.value -
                   integrate_rule(*q.surface, q.n, q.xi, c, q.weight, *q.error_rule).value);
  } else {
    const SphereRule coarse = coarsen(*q.rule);
    err = std::abs(full.value -
                   integrate_rule(*q.surface, q.n, q.xi, c, q.weight, coarse).value);
  }
  return {full.value, err, regime};
}

double paraboloid_constant(int d, int n) {
  require(d >= 1 && n >= 2, "paraboloid_constant: need d >= 1, n >= 2");
  const double half_m = 0.5 * d * (n - 1);
  return std::pow(std::numbers::pi, half_m) /
         (std::pow(static_cast<double>(n), 0.5 * d) * gamma_fn(half_m));
}

double paraboloid_closed_form(int d, int n, std::span<const double> xi, double tau) {
  require(static_cast<int>(xi.size()) == d, "paraboloid_closed_form: xi has wrong dimension");
  const double s = tau - norm_sq(xi) / n;
  if (s < 0.0) return 0.0;
  return paraboloid_constant(d, n) * std::pow(s, 0.5 * d * (n - 1) - 1.0);
}

BoundaryValue boundary_value(const SurfaceSpec& surface, int n, std::span<const double> xi,
                             const WeightSpec* weight) {
  const int d = surface.dim();
  require(static_cast<int>(xi.size()) == d, "boundary_value: xi has wrong dimension");
  if (d == 1 && n == 2) return {BoundaryValue::Kind::asymptotic, 0.0};
  double value = 0.0;
  Vec p(xi.begin(), xi.end());
  for (double& c : p) c /= n;
  if (d * (n - 1) == 2) {
    Vec hess(d * d);
    surface.hess_psi_or_fd(p, hess);
    if (d == 1) {
      if (!(hess[0] > 0.0)) throw DomainError("boundary_value: psi'' vanishes at xi/3");
      value = 2.0 * std::numbers::pi / (std::sqrt(3.0) * hess[0]);
    } else {
      const double det = hess[0] * hess[3] - hess[1] * hess[2];
      if (!(det > 0.0)) throw DomainError("boundary_value: det H(psi) vanishes at xi/2");
      value = std::numbers::pi / std::sqrt(det);
    }
  }
  if (weight && value != 0.0) value *= std::pow(weight->value(p), n);
  return {BoundaryValue::Kind::finite, value};
}

double asymptotic_d1n2(const SurfaceSpec& surface, std::span<const double> xi, double tau) {
  require(surface.dim() == 1, "asymptotic_d1n2: defined only for d = 1");
  ProfileEvaluator eval(surface, 2, xi);
  const double c = tau - eval.base();
  if (!(c > 0.0)) throw OutsideSupportError("asymptotic_d1n2: tau <= 2 psi(xi/2)");
  Vec hess(1);
  surface.hess_psi_or_fd(eval.center(), hess);
  const Vec w = {std::sqrt(c)};
  const double lambda = solve_lambda_self(surface, 2, xi, w).lambda;
  return 1.0 / (hess[0] * std::sqrt(c) * lambda);
}

}  // namespace convo
