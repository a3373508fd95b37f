#include "convo/extension.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "convo/density.hpp"
#include "convo/parallel.hpp"
#include "convo/quadrature.hpp"

namespace convo {

namespace {

double psi1(const SurfaceSpec& surface, double y) {
  const double v[1] = {y};
  return surface.psi({v, 1});
}

double dpsi1(const SurfaceSpec& surface, double y) {
  const double v[1] = {y};
  double g[1];
  surface.grad_psi({v, 1}, {g, 1});
  return g[0];
}

// 4th-order central stencil for phi''; exact for quartic polynomials.
double phi_second_fd(const SurfaceSpec& surface, double c) {
  const double h = 1e-3 * (1.0 + std::abs(c));
  auto phi = [&](double y) {
    const double v[1] = {y};
    return surface.phi({v, 1});
  };
  return (-phi(c + 2 * h) + 16 * phi(c + h) - 30 * phi(c) + 16 * phi(c - h) - phi(c - 2 * h)) /
         (12 * h * h);
}

constexpr double kSharpConstant = 1.8137993642342178;  // pi / sqrt(3)

}  // namespace

Extremizer build_extremizer(const ExtremizerSpec& spec, double mass_floor) {
  require(spec.surface != nullptr, "build_extremizer: missing surface");
  require(spec.surface->dim() == 1, "build_extremizer: defined only for d = 1");
  require(spec.exponent > 0.0, "build_extremizer: exponent must be positive");
  require(mass_floor > 0.0 && mass_floor < 1.0, "build_extremizer: bad mass floor");
  const SurfaceSpec& surface = *spec.surface;
  if (spec.kind == ExtremizerSpec::Case::i) {
    const double dd = phi_second_fd(surface, spec.center);
    require(std::abs(dd) <= 1e-8,
            "build_extremizer: case (i) needs phi''(center) = 0, got " + std::to_string(dd));
  }
  const double c = spec.center;
  const double a = spec.exponent;
  const double psi_c = psi1(surface, c);
  const double dpsi_c = dpsi1(surface, c);
  auto bregman = [&surface, c, psi_c, dpsi_c](double y) {
    return psi1(surface, y) - psi_c - dpsi_c * (y - c);
  };
  Extremizer ext;
  ext.spec = spec;
  ext.f = [bregman, a](double y) { return std::exp(-a * bregman(y)); };

  // Effective support: a * bregman(y) <= log(1 / mass_floor); bregman is
  // strictly increasing away from the center.
  const double level = std::log(1.0 / mass_floor) / a;
  for (int side : {-1, +1}) {
    double step = 1.0;
    int doublings = 0;
    while (bregman(c + side * step) < level) {
      if (++doublings > 200)
        throw ConvergenceError("build_extremizer: support expansion failed", step);
      step *= 2.0;
    }
    double lo = 0.0, hi = step;
    for (int it = 0; it < 100; ++it) {
      const double mid = 0.5 * (lo + hi);
      (bregman(c + side * mid) < level ? lo : hi) = mid;
    }
    (side < 0 ? ext.support_lo : ext.support_hi) = c + side * 0.5 * (lo + hi);
  }
  return ext;
}

QGrids auto_grids(const Extremizer& ext) {
  QGrids grids;
  grids.support_lo = ext.support_lo;
  grids.support_hi = ext.support_hi;
  return grids;
}

QResult q_functional(const SurfaceSpec& surface, const std::function<double(double)>& f,
                     const QGrids& grids) {
  require(surface.dim() == 1, "q_functional: defined only for d = 1");
  require(grids.support_hi > grids.support_lo, "q_functional: empty support interval");
  const double lo = grids.support_lo, hi = grids.support_hi;

  // ||f||_2^2 and the peak location for the sigma probe.
  double peak = 0.0, peak_y = lo;
  for (int i = 0; i <= 128; ++i) {
    const double y = lo + (hi - lo) * i / 128.0;
    const double v = f(y) * f(y);
    if (v > peak) {
      peak = v;
      peak_y = y;
    }
  }
  if (!(peak > 0.0)) throw DomainError("q_functional: requires ||f|| > 0");
  auto f_sq = [&f](double y) { return f(y) * f(y); };
  const IntegralEstimate n2 = adaptive_1d(f_sq, lo, hi,
                                          grids.norm_tol_rel * peak * (hi - lo));
  if (!(n2.value > 0.0)) throw DomainError("q_functional: requires ||f|| > 0");

  WeightSpec weight;
  weight.value = [&f](std::span<const double> y) { return f(y[0]); };

  const SphereRule rule = circle_rule(grids.circle_nodes);
  const SphereRule error_rule = coarsen(rule);
  auto weighted_density = [&](double xi, double tau) {
    DensityQuery q;
    q.surface = &surface;
    q.n = 3;
    q.xi = {xi};
    q.tau = tau;
    q.weight = &weight;
    q.rule = &rule;
    q.error_rule = &error_rule;
    return nfold_density(q);
  };

  // sigma range: double until the integrand drops below the floor of its
  // running maximum at the mass peak.
  const double xi_peak = 3.0 * peak_y;
  const double base_peak = 3.0 * psi1(surface, xi_peak / 3.0);
  double sigma_max = 0.0, run_max = 0.0;
  {
    double sigma = 0.03125;
    for (int k = 0;; ++k) {
      if (k > 60)
        throw ConvergenceError("q_functional: sigma-range probe failed to decay", sigma);
      const DensityResult d = weighted_density(xi_peak, base_peak + sigma * sigma);
      const double integrand = d.value * d.value * 2.0 * sigma;
      run_max = std::max(run_max, integrand);
      if (run_max > 0.0 && integrand < grids.integrand_floor * run_max) {
        sigma_max = sigma;
        break;
      }
      sigma *= 2.0;
    }
  }

  // Composite Gauss-Legendre numerator over (xi, sigma); the half-resolution
  // pass provides the quadrature error estimate.
  auto numerator = [&](int xi_panels, int sigma_panels, double* density_err_acc) {
    std::vector<double> xg, wg;
    gauss_legendre(grids.gl_order, xg, wg);
    std::vector<double> xi_nodes, xi_w, sg_nodes, sg_w;
    const double xi_lo = 3.0 * lo, xi_hi = 3.0 * hi;
    const double hx = (xi_hi - xi_lo) / xi_panels;
    for (int p = 0; p < xi_panels; ++p)
      for (int q = 0; q < grids.gl_order; ++q) {
        xi_nodes.push_back(xi_lo + hx * (p + 0.5 * (xg[q] + 1.0)));
        xi_w.push_back(0.5 * hx * wg[q]);
      }
    const double hs = sigma_max / sigma_panels;
    for (int p = 0; p < sigma_panels; ++p)
      for (int q = 0; q < grids.gl_order; ++q) {
        sg_nodes.push_back(hs * (p + 0.5 * (xg[q] + 1.0)));
        sg_w.push_back(0.5 * hs * wg[q]);
      }
    const std::size_t nx = xi_nodes.size(), ns = sg_nodes.size();
    std::vector<double> contrib(nx * ns, 0.0), err_contrib(nx * ns, 0.0);
    parallel_chunks(nx, 1, [&](std::size_t, std::size_t ib, std::size_t ie) {
      for (std::size_t i = ib; i < ie; ++i) {
        const double xi = xi_nodes[i];
        const double base = 3.0 * psi1(surface, xi / 3.0);
        for (std::size_t s = 0; s < ns; ++s) {
          const double sigma = sg_nodes[s];
          const DensityResult d = weighted_density(xi, base + sigma * sigma);
          const double w = xi_w[i] * sg_w[s] * 2.0 * sigma;
          contrib[i * ns + s] = w * d.value * d.value;
          err_contrib[i * ns + s] = std::abs(w) * 2.0 * d.value * d.error_estimate;
        }
      }
    });
    if (density_err_acc) *density_err_acc = pairwise_sum(err_contrib);
    return pairwise_sum(contrib);
  };

  double density_err = 0.0;
  const double num_fine = numerator(grids.xi_panels, grids.sigma_panels, &density_err);
  const double num_coarse =
      numerator(std::max(2, grids.xi_panels / 2), std::max(2, grids.sigma_panels / 2), nullptr);
  const double num_err = std::abs(num_fine - num_coarse) + density_err;

  const double den = n2.value;  // ||f||_2^2
  QResult out;
  out.norm6 = num_fine;
  out.norm6_err = num_err;
  out.norm2 = std::sqrt(den);
  out.q_value = num_fine / (den * den * den);
  out.error_estimate = num_err / (den * den * den) +
                       3.0 * num_fine * n2.error_estimate / (den * den * den * den);
  return out;
}

SelectedA select_a_n(const SurfaceSpec& surface, double center, int n,
                     ExtremizerSpec::Case kind, double a_max) {
  require(n >= 1, "select_a_n: n must be >= 1");
  const double bd = boundary_value(surface, 3, Vec{3.0 * center}).value;
  const double level = 1.0 / n;

  auto evaluate = [&](double a, SelectedA& out) {
    ExtremizerSpec spec{kind, center, a, &surface};
    const Extremizer ext = build_extremizer(spec);
    auto f_sq = [&ext](double y) { return ext.f(y) * ext.f(y); };
    const double tol = 1e-12 * (ext.support_hi - ext.support_lo);
    const double total = adaptive_1d(f_sq, ext.support_lo, ext.support_hi, tol).value;
    double outside = 0.0;
    if (ext.support_lo < center - level)
      outside += adaptive_1d(f_sq, ext.support_lo, center - level, tol).value;
    if (ext.support_hi > center + level)
      outside += adaptive_1d(f_sq, center + level, ext.support_hi, tol).value;
    out.a = a;
    out.concentration_ratio = outside / total;
    if (out.concentration_ratio > level) return false;  // skip the expensive Q check
    const QResult q = q_functional(surface, ext.f, auto_grids(ext));
    out.q_gap = std::abs(q.q_value - bd);
    return out.q_gap <= level;
  };

  SelectedA out;
  if (kind == ExtremizerSpec::Case::i) {
    evaluate(static_cast<double>(n), out);
    out.a = static_cast<double>(n);  // the case (i) family fixes a_n = n
    return out;
  }
  int doublings = 0;
  for (double a = 1.0; a <= a_max; a *= 2.0, ++doublings) {
    out.doublings = doublings;
    if (evaluate(a, out)) return out;
  }
  throw ConvergenceError("select_a_n: search exhausted at a_max; achieved concentration " +
                             std::to_string(out.concentration_ratio) + ", q gap " +
                             std::to_string(out.q_gap),
                         out.a);
}

std::vector<SweepRow> sharp_constant_sweep(const SurfaceSpec& surface,
                                           ExtremizerSpec::Case kind,
                                           std::span<const double> centers,
                                           std::span<const double> a_list) {
  require(!centers.empty() && !a_list.empty(), "sharp_constant_sweep: empty sweep");
  if (kind == ExtremizerSpec::Case::i)
    require(centers.size() == 1, "sharp_constant_sweep: case (i) sweeps one center");
  else
    require(centers.size() == a_list.size(),
            "sharp_constant_sweep: case (ii) needs one exponent per center");

  std::vector<SweepRow> rows;
  for (std::size_t k = 0; k < a_list.size(); ++k) {
    const double center = kind == ExtremizerSpec::Case::i ? centers[0] : centers[k];
    ExtremizerSpec spec{kind, center, a_list[k], &surface};
    const Extremizer ext = build_extremizer(spec);
    const QResult q = q_functional(surface, ext.f, auto_grids(ext));
    SweepRow row;
    row.a = a_list[k];
    row.center = center;
    row.q_value = q.q_value;
    row.q_err = q.error_estimate;
    row.gap = kSharpConstant - q.q_value;
    if (!rows.empty()) {
      const SweepRow& prev = rows.back();
      row.warn = row.gap > prev.gap + (row.q_err + prev.q_err);
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace convo
