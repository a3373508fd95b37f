#include "convo/surfaces.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "convo/rng.hpp"

namespace convo {

namespace {

void fill_zero(std::span<double> out) { std::fill(out.begin(), out.end(), 0.0); }

}  // namespace

PerturbationSpec make_perturbation(const std::string& name, std::span<const double> params,
                                   int dim) {
  require(dim >= 1, "perturbation: dim must be >= 1");
  if (!params.empty())
    throw ConfigError("perturbation '" + name + "' takes no parameters");
  PerturbationSpec p;
  p.dim = dim;
  p.name = name;
  if (name == "zero") {
    p.value = [](std::span<const double>) { return 0.0; };
    p.gradient = [](std::span<const double>, std::span<double> g) { fill_zero(g); };
    p.hessian = [](std::span<const double>, std::span<double> h) { fill_zero(h); };
    p.strictly_convex = false;
  } else if (name == "quartic") {
    // phi(y) = sum_k y_k^4
    p.value = [](std::span<const double> y) {
      double s = 0.0;
      for (double v : y) s += v * v * v * v;
      return s;
    };
    p.gradient = [](std::span<const double> y, std::span<double> g) {
      for (std::size_t k = 0; k < y.size(); ++k) g[k] = 4.0 * y[k] * y[k] * y[k];
    };
    p.hessian = [](std::span<const double> y, std::span<double> h) {
      fill_zero(h);
      const std::size_t d = y.size();
      for (std::size_t k = 0; k < d; ++k) h[k * d + k] = 12.0 * y[k] * y[k];
    };
    p.strictly_convex = true;
  } else if (name == "soft-hyperbola") {
    // phi(y) = sqrt(1 + |y|^2) - 1
    p.value = [](std::span<const double> y) { return std::sqrt(1.0 + norm_sq(y)) - 1.0; };
    p.gradient = [](std::span<const double> y, std::span<double> g) {
      const double r = std::sqrt(1.0 + norm_sq(y));
      for (std::size_t k = 0; k < y.size(); ++k) g[k] = y[k] / r;
    };
    p.hessian = [](std::span<const double> y, std::span<double> h) {
      const std::size_t d = y.size();
      const double q = 1.0 + norm_sq(y);
      const double r = std::sqrt(q);
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
          h[i * d + j] = ((i == j ? 1.0 : 0.0) - y[i] * y[j] / q) / r;
    };
    p.strictly_convex = true;
  } else if (name == "exponential") {
    // phi(y) = exp(y_1); strictly convex only in one dimension.
    p.value = [](std::span<const double> y) { return std::exp(y[0]); };
    p.gradient = [](std::span<const double> y, std::span<double> g) {
      fill_zero(g);
      g[0] = std::exp(y[0]);
    };
    p.hessian = [](std::span<const double> y, std::span<double> h) {
      fill_zero(h);
      h[0] = std::exp(y[0]);
    };
    p.strictly_convex = (dim == 1);
  } else {
    throw ConfigError("unknown perturbation '" + name + "'");
  }
  return p;
}

std::vector<std::string> check_perturbation(const PerturbationSpec& pert, std::uint64_t seed,
                                            int samples) {
  std::vector<std::string> issues;
  const int d = pert.dim;
  CounterRng rng(seed);
  Vec y(d), yb(d), mid(d), g(d), gp(d), gm(d), h(d * d), hfd(d * d);
  char buf[160];
  std::uint64_t ctr = 0;
  auto draw = [&](Vec& out) {
    for (int k = 0; k < d; ++k) out[k] = rng.uniform(ctr++, -2.0, 2.0);
  };
  for (int s = 0; s < samples; ++s) {
    draw(y);
    const double val = pert.value(y);
    if (!(val >= 0.0)) {
      std::snprintf(buf, sizeof buf, "value < 0 at sample %d (phi = %.3e)", s, val);
      issues.push_back(buf);
    }
    // gradient vs central differences of value
    pert.gradient(y, g);
    for (int k = 0; k < d; ++k) {
      const double step = 6e-6 * (1.0 + std::abs(y[k]));
      Vec yt = y;
      yt[k] = y[k] + step;
      const double fp = pert.value(yt);
      yt[k] = y[k] - step;
      const double fm = pert.value(yt);
      const double fd = (fp - fm) / (2.0 * step);
      if (std::abs(fd - g[k]) > 1e-6 * std::max(1.0, std::abs(g[k]))) {
        std::snprintf(buf, sizeof buf, "gradient[%d] mismatch at sample %d: fd=%.9e an=%.9e", k,
                      s, fd, g[k]);
        issues.push_back(buf);
      }
    }
    // Hessian vs central differences of gradient
    if (pert.has_hessian()) {
      pert.hessian(y, h);
      for (int k = 0; k < d; ++k) {
        const double step = 1e-5 * (1.0 + std::abs(y[k]));
        Vec yt = y;
        yt[k] = y[k] + step;
        pert.gradient(yt, gp);
        yt[k] = y[k] - step;
        pert.gradient(yt, gm);
        for (int i = 0; i < d; ++i) {
          const double fd = (gp[i] - gm[i]) / (2.0 * step);
          if (std::abs(fd - h[i * d + k]) > 1e-5 * std::max(1.0, std::abs(h[i * d + k]))) {
            std::snprintf(buf, sizeof buf, "hessian[%d,%d] mismatch at sample %d", i, k, s);
            issues.push_back(buf);
          }
        }
      }
    }
    // midpoint convexity
    draw(yb);
    for (int k = 0; k < d; ++k) mid[k] = 0.5 * (y[k] + yb[k]);
    const double lhs = pert.value(mid);
    const double rhs = 0.5 * (pert.value(y) + pert.value(yb));
    const double slack = 1e-12 * (1.0 + std::abs(rhs));
    if (lhs > rhs + slack) {
      std::snprintf(buf, sizeof buf, "midpoint convexity violated at sample %d", s);
      issues.push_back(buf);
    }
    bool distinct = false;
    for (int k = 0; k < d; ++k) distinct |= (y[k] != yb[k]);
    if (pert.strictly_convex && distinct && !(lhs < rhs - slack)) {
      std::snprintf(buf, sizeof buf, "strict midpoint convexity not strict at sample %d", s);
      issues.push_back(buf);
    }
  }
  return issues;
}

SurfaceSpec::SurfaceSpec(PerturbationSpec pert) : pert_(std::move(pert)) {
  require(pert_.dim >= 1, "SurfaceSpec: dim must be >= 1");
  require(static_cast<bool>(pert_.value) && static_cast<bool>(pert_.gradient),
          "SurfaceSpec: perturbation needs value and gradient callables");
}

SurfaceSpec SurfaceSpec::unperturbed(int dim) {
  return SurfaceSpec(make_perturbation("zero", {}, dim));
}

double SurfaceSpec::psi(std::span<const double> y) const { return norm_sq(y) + pert_.value(y); }

void SurfaceSpec::grad_psi(std::span<const double> y, std::span<double> out) const {
  pert_.gradient(y, out);
  for (std::size_t k = 0; k < y.size(); ++k) out[k] += 2.0 * y[k];
}

void SurfaceSpec::hess_psi(std::span<const double> y, std::span<double> out) const {
  if (!pert_.has_hessian())
    throw DomainError("hess_psi: perturbation '" + pert_.name + "' has no Hessian");
  pert_.hessian(y, out);
  const std::size_t d = y.size();
  for (std::size_t k = 0; k < d; ++k) out[k * d + k] += 2.0;
}

void SurfaceSpec::hess_psi_fd(std::span<const double> y, double step, std::span<double> out) const {
  const std::size_t d = y.size();
  Vec yt(y.begin(), y.end()), gp(d), gm(d);
  for (std::size_t k = 0; k < d; ++k) {
    yt[k] = y[k] + step;
    grad_psi(yt, gp);
    yt[k] = y[k] - step;
    grad_psi(yt, gm);
    yt[k] = y[k];
    for (std::size_t i = 0; i < d; ++i) out[i * d + k] = (gp[i] - gm[i]) / (2.0 * step);
  }
}

void SurfaceSpec::hess_psi_or_fd(std::span<const double> y, std::span<double> out) const {
  if (pert_.has_hessian()) {
    hess_psi(y, out);
  } else {
    hess_psi_fd(y, 1e-5 * (1.0 + norm(y)), out);
  }
}

ProfileEvaluator::ProfileEvaluator(const SurfaceSpec& surface, int n, std::span<const double> xi)
    : surface_(&surface), n_(n), d_(surface.dim()) {
  require(n_ >= 2, "profile: n must be >= 2");
  require(static_cast<int>(xi.size()) == d_, "profile: xi has wrong dimension");
  center_.assign(xi.begin(), xi.end());
  for (double& c : center_) c /= n_;
  base_ = n_ * surface.psi(center_);
  arg_.resize(d_);
  sum_.resize(d_);
  grad_plus_.resize(d_);
  grad_minus_.resize(d_);
}

void ProfileEvaluator::check_y(std::span<const double> y) const {
  require(static_cast<int>(y.size()) == ambient_dim(),
          "profile: y must have d(n-1) components");
}

double ProfileEvaluator::g(double t, std::span<const double> y) {
  check_y(y);
  std::fill(sum_.begin(), sum_.end(), 0.0);
  double acc = -base_;
  for (int i = 0; i < n_ - 1; ++i) {
    const double* yi = y.data() + i * d_;
    for (int k = 0; k < d_; ++k) {
      const double tyk = t * yi[k];
      arg_[k] = center_[k] - tyk;
      sum_[k] += tyk;
    }
    acc += surface_->psi(arg_);
  }
  for (int k = 0; k < d_; ++k) arg_[k] = center_[k] + sum_[k];
  acc += surface_->psi(arg_);
  return acc;
}

ProfilePoint ProfileEvaluator::g_with_deriv(double t, std::span<const double> y) {
  check_y(y);
  std::fill(sum_.begin(), sum_.end(), 0.0);
  for (int i = 0; i < n_ - 1; ++i) {
    const double* yi = y.data() + i * d_;
    for (int k = 0; k < d_; ++k) sum_[k] += yi[k];
  }
  for (int k = 0; k < d_; ++k) arg_[k] = center_[k] + t * sum_[k];
  double gval = surface_->psi(arg_) - base_;
  surface_->grad_psi(arg_, grad_plus_);
  double gder = 0.0;
  for (int i = 0; i < n_ - 1; ++i) {
    const double* yi = y.data() + i * d_;
    for (int k = 0; k < d_; ++k) arg_[k] = center_[k] - t * yi[k];
    gval += surface_->psi(arg_);
    surface_->grad_psi(arg_, grad_minus_);
    for (int k = 0; k < d_; ++k) gder += (grad_plus_[k] - grad_minus_[k]) * yi[k];
  }
  const double form = h_quad_form(y);
  return ProfilePoint{gval, gder, t * t * form, 2.0 * t * form};
}

double ProfileEvaluator::h_quad_form(std::span<const double> y) const {
  check_y(y);
  double form = 0.0;
  for (int k = 0; k < d_; ++k) {
    double s = 0.0;
    for (int i = 0; i < n_ - 1; ++i) s += y[i * d_ + k];
    form += s * s;
  }
  return form + norm_sq(y);
}

ProfilePoint profile(const SurfaceSpec& surface, int n, std::span<const double> xi, double t,
                     std::span<const double> y) {
  ProfileEvaluator eval(surface, n, xi);
  return eval.g_with_deriv(t, y);
}

double weight_product(const WeightSpec& weight, int n, std::span<const double> xi,
                      std::span<const double> y) {
  require(n >= 2, "weight_product: n must be >= 2");
  require(!xi.empty() && y.size() == xi.size() * static_cast<std::size_t>(n - 1),
          "weight_product: y must have d(n-1) components");
  const std::size_t d = xi.size();
  Vec arg(d);
  for (std::size_t k = 0; k < d; ++k) {
    double s = xi[k] / n;
    for (int i = 0; i < n - 1; ++i) s += y[i * d + k];
    arg[k] = s;
  }
  double w = weight.value(arg);
  for (int i = 0; i < n - 1; ++i) {
    for (std::size_t k = 0; k < d; ++k) arg[k] = xi[k] / n - y[i * d + k];
    w *= weight.value(arg);
  }
  return w;
}

}  // namespace convo
