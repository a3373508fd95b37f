#include "convo/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "convo/parallel.hpp"
#include "convo/quadrature.hpp"
#include "convo/rng.hpp"

namespace convo {

namespace {

constexpr std::size_t kBatch = 65536;

// Minimum of g_n(1, .) over structured + random samples of the box boundary.
double boundary_min(ProfileEvaluator& eval, double radius, std::uint64_t seed) {
  const int m = eval.ambient_dim();
  Vec y(m, 0.0);
  double best = std::numeric_limits<double>::infinity();
  // face centers
  for (int k = 0; k < m; ++k) {
    for (double s : {-radius, radius}) {
      std::fill(y.begin(), y.end(), 0.0);
      y[k] = s;
      best = std::min(best, eval.g(1.0, y));
    }
  }
  // corners (skip for very high m)
  if (m <= 12) {
    for (std::uint64_t mask = 0; mask < (1ULL << m); ++mask) {
      for (int k = 0; k < m; ++k) y[k] = (mask >> k) & 1 ? radius : -radius;
      best = std::min(best, eval.g(1.0, y));
    }
  }
  // random boundary points
  CounterRng rng(splitmix64_at(seed, 0xb0da));
  std::uint64_t ctr = 0;
  for (int s = 0; s < 256; ++s) {
    for (int k = 0; k < m; ++k) y[k] = rng.uniform(ctr++, -radius, radius);
    const int face = static_cast<int>(splitmix64_at(seed, 0xfaceULL + s) % (2 * m));
    y[face / 2] = (face & 1) ? radius : -radius;
    best = std::min(best, eval.g(1.0, y));
  }
  return best;
}

}  // namespace

OracleEstimate thin_shell_density(const SurfaceSpec& surface, int n, std::span<const double> xi,
                                  double tau, double epsilon, std::size_t samples,
                                  std::uint64_t seed, double box_radius) {
  require(epsilon > 0.0, "thin_shell_density: epsilon must be positive");
  require(samples > 0, "thin_shell_density: need at least one sample");
  ProfileEvaluator probe(surface, n, xi);
  const double c = tau - probe.base();
  if (!(c > 0.0)) throw OutsideSupportError("thin_shell_density: point not interior");
  const int m = probe.ambient_dim();

  double radius = box_radius;
  if (radius <= 0.0) {
    radius = 1.0;
    int doublings = 0;
    while (boundary_min(probe, radius, seed) <= 1.1 * c) {
      if (++doublings > 60)
        throw ConvergenceError("thin_shell_density: box expansion failed", radius);
      radius *= 2.0;
    }
  } else if (boundary_min(probe, radius, seed) <= 1.1 * c) {
    double needed = radius;
    while (boundary_min(probe, needed, seed) <= 1.1 * c) needed *= 2.0;
    throw ConfigError("thin_shell_density: shell escapes the sampling box; box radius of " +
                      std::to_string(needed) + " suffices");
  }

  const std::size_t batches = (samples + kBatch - 1) / kBatch;
  std::vector<double> hits(batches, 0.0);
  parallel_chunks(batches, 1, [&](std::size_t b, std::size_t, std::size_t) {
    ProfileEvaluator eval(surface, n, xi);
    CounterRng rng(seed + b);  // per-batch stream by counter increment
    Vec y(m);
    const std::size_t begin = b * kBatch;
    const std::size_t end = std::min(samples, begin + kBatch);
    std::uint64_t ctr = 0;
    std::size_t count = 0;
    for (std::size_t i = begin; i < end; ++i) {
      for (int k = 0; k < m; ++k) y[k] = rng.uniform(ctr++, -radius, radius);
      if (std::abs(eval.g(1.0, y) - c) < epsilon) ++count;
    }
    hits[b] = static_cast<double>(count);
  });
  const double total_hits = pairwise_sum(hits);
  const double volume = std::pow(2.0 * radius, m);
  const double p = total_hits / static_cast<double>(samples);
  OracleEstimate est;
  est.method = OracleMethod::thin_shell;
  est.value = volume * p / (2.0 * epsilon);
  est.standard_error =
      volume * std::sqrt(p * (1.0 - p) / static_cast<double>(samples)) / (2.0 * epsilon);
  return est;
}

namespace {

// Plain bisection for F(x) = target on [lo, hi] with F(lo) <= target <= F(hi)
// or the reverse; absolute tolerance on x.
double bisect(const std::function<double(double)>& F, double lo, double hi, double target,
              double xtol) {
  double flo = F(lo) - target;
  for (int it = 0; it < 200 && hi - lo > xtol; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = F(mid) - target;
    if ((flo <= 0.0) == (fm <= 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

OracleEstimate root_sum_density_1d(const SurfaceSpec& surface, double xi, double tau) {
  require(surface.dim() == 1, "root_sum_density_1d: defined only for d = 1");
  auto psi = [&](double y) {
    const double v[1] = {y};
    return surface.psi({v, 1});
  };
  auto dpsi = [&](double y) {
    const double v[1] = {y};
    double g[1];
    surface.grad_psi({v, 1}, {g, 1});
    return g[0];
  };
  const double ystar = xi / 2.0;
  auto F = [&](double y) { return psi(y) + psi(xi - y); };
  if (!(tau > F(ystar))) throw OutsideSupportError("root_sum_density_1d: point not interior");

  const double xtol = 1e-12;
  double roots[2];
  int found = 0;
  for (int side : {-1, +1}) {
    double step = 0.5 * (1.0 + std::abs(ystar));
    int doublings = 0;
    while (F(ystar + side * step) < tau) {
      if (++doublings > 200)
        throw ConvergenceError("root_sum_density_1d: bracket expansion failed", ystar);
      step *= 2.0;
    }
    const double a = side < 0 ? ystar - step : ystar;
    const double b = side < 0 ? ystar : ystar + step;
    roots[found++] = bisect(F, a, b, tau, xtol);
  }
  if (found != 2) throw ConvergenceError("root_sum_density_1d: expected two roots", 0.0);

  OracleEstimate est;
  est.method = OracleMethod::root_sum;
  double err = 0.0;
  for (double y : roots) {
    const double gap = std::abs(dpsi(y) - dpsi(xi - y));
    est.value += 1.0 / gap;
    // first-order sensitivity of the root position at bisection tolerance
    const double d2 = std::abs(dpsi(y + xtol) - dpsi(xi - y - xtol) - (dpsi(y) - dpsi(xi - y)));
    err += d2 / (gap * gap);
  }
  est.standard_error = err + 1e-14 * est.value;
  return est;
}

OracleEstimate extension_norm_roots(const SurfaceSpec& surface,
                                    const std::function<double(double)>& f,
                                    const NormRootsGrid& grid) {
  require(surface.dim() == 1, "extension_norm_roots: defined only for d = 1");
  require(grid.y_hi > grid.y_lo, "extension_norm_roots: empty grid interval");
  auto psi = [&](double y) {
    const double v[1] = {y};
    return surface.psi({v, 1});
  };
  auto dpsi = [&](double y) {
    const double v[1] = {y};
    double g[1];
    surface.grad_psi({v, 1}, {g, 1});
    return g[0];
  };

  auto run = [&](int panels, int cheb_nodes) -> std::pair<double, double> {
    // composite Gauss-Legendre nodes over [y_lo, y_hi]
    std::vector<double> xs, ws;
    {
      std::vector<double> xg, wg;
      gauss_legendre(grid.gl_order, xg, wg);
      const double h = (grid.y_hi - grid.y_lo) / panels;
      for (int p = 0; p < panels; ++p) {
        const double a = grid.y_lo + p * h;
        for (int q = 0; q < grid.gl_order; ++q) {
          xs.push_back(a + 0.5 * h * (xg[q] + 1.0));
          ws.push_back(0.5 * h * wg[q]);
        }
      }
    }
    const std::size_t nn = xs.size();
    std::vector<double> fx(nn);
    for (std::size_t i = 0; i < nn; ++i) fx[i] = f(xs[i]);

    std::vector<double> cos_u(cheb_nodes), cheb_w(cheb_nodes);
    for (int l = 0; l < cheb_nodes; ++l) {
      const double u = std::numbers::pi * (l + 0.5) / cheb_nodes;
      cos_u[l] = std::cos(u);
      cheb_w[l] = std::numbers::pi / cheb_nodes * std::sin(u);
    }

    const double xtol = 1e-12;
    std::vector<double> slot(nn, 0.0), fold_slot(nn, 0.0);
    parallel_chunks(nn, 1, [&](std::size_t, std::size_t ib, std::size_t ie) {
      for (std::size_t i = ib; i < ie; ++i) {
        double acc_i = 0.0, fold_i = 0.0;
        for (std::size_t j = i; j < nn; ++j) {
          for (std::size_t k = j; k < nn; ++k) {
            double mult = 6.0;
            if (i == j && j == k) mult = 1.0;
            else if (i == j || j == k) mult = 3.0;
            const double wout = mult * fx[i] * fx[j] * fx[k] * ws[i] * ws[j] * ws[k];
            if (wout == 0.0) continue;
            const double S = xs[i] + xs[j] + xs[k];
            const double P = psi(xs[i]) + psi(xs[j]) + psi(xs[k]);
            // z1 range where roots exist: M(z) = psi(z) + 2 psi((S-z)/2) <= P,
            // minimized at z = S/3.
            auto M = [&](double z) { return psi(z) + 2.0 * psi(0.5 * (S - z)); };
            const double zc = S / 3.0;
            if (!(P > M(zc))) continue;
            double zlo, zhi;
            {
              double step = 0.5 * (1.0 + std::abs(zc));
              while (M(zc - step) < P) step *= 2.0;
              zlo = bisect(M, zc - step, zc, P, xtol);
              step = 0.5 * (1.0 + std::abs(zc));
              while (M(zc + step) < P) step *= 2.0;
              zhi = bisect(M, zc, zc + step, P, xtol);
            }
            const double mid = 0.5 * (zlo + zhi), rad = 0.5 * (zhi - zlo);
            if (!(rad > 0.0)) continue;
            double acc_z = 0.0, fold_z = 0.0;
            for (int l = 0; l < cheb_nodes; ++l) {
              const double z1 = mid + rad * cos_u[l];
              const double wz = rad * cheb_w[l];
              const double K = S - z1;
              const double tr = P - psi(z1);
              const double zm = 0.5 * K;
              auto F = [&](double z) { return psi(z) + psi(K - z); };
              if (!(tr > F(zm))) continue;
              double rsum = 0.0;
              for (int side : {-1, +1}) {
                double step = 0.25 * (1.0 + std::abs(zm));
                while (F(zm + side * step) < tr) step *= 2.0;
                const double a = side < 0 ? zm - step : zm;
                const double b = side < 0 ? zm : zm + step;
                const double z2 = bisect(F, a, b, tr, xtol);
                const double z3 = K - z2;
                const double gap = std::abs(dpsi(z2) - dpsi(z3));
                const double term = f(z2) * f(z3);
                if (gap < grid.fold_eps) {
                  fold_z += wz * term / grid.fold_eps;  // bound, not value
                } else {
                  rsum += term / gap;
                }
              }
              acc_z += wz * f(z1) * rsum;
            }
            acc_i += wout * acc_z;
            fold_i += std::abs(wout) * fold_z;
          }
        }
        slot[i] = acc_i;
        fold_slot[i] = fold_i;
      }
    });
    return {pairwise_sum(slot), pairwise_sum(fold_slot)};
  };

  const auto [fine, fold_fine] = run(grid.panels, grid.cheb_nodes);
  const auto [coarse, fold_coarse] =
      run(std::max(2, grid.panels / 2), std::max(8, grid.cheb_nodes / 2));
  OracleEstimate est;
  est.method = OracleMethod::curve_trace;
  est.value = fine;
  est.standard_error = std::abs(fine - coarse) + fold_fine + 1e-14 * std::abs(fine);
  return est;
}

}  // namespace convo
