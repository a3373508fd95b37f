// Acceptance suite: one pass/fail line per criterion; nonzero exit if any
// criterion fails. Tolerances are fixed here, not configurable.
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "convo/comparison.hpp"
#include "convo/density.hpp"
#include "convo/extension.hpp"
#include "convo/implicit_maps.hpp"
#include "convo/oracle.hpp"
#include "convo/rng.hpp"

using namespace convo;

namespace {

constexpr double kPi = std::numbers::pi;
const double kPiSqrt3 = kPi / std::sqrt(3.0);

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c);
  return buf;
}

Vec random_xi(const CounterRng& rng, std::uint64_t& ctr, int d) {
  Vec xi(d);
  for (double& x : xi) x = rng.uniform(ctr++, -2.0, 2.0);
  return xi;
}

Vec random_y(const CounterRng& rng, std::uint64_t& ctr, int len) {
  for (;;) {
    Vec y(len);
    for (double& x : y) x = rng.uniform(ctr++, -2.0, 2.0);
    if (norm(y) > 0.05) return y;
  }
}

DensityResult density_at(const SurfaceSpec& surface, int n, const Vec& xi, double tau,
                         const SphereRule& rule) {
  DensityQuery q;
  q.surface = &surface;
  q.n = n;
  q.xi = xi;
  q.tau = tau;
  q.rule = &rule;
  return nfold_density(q);
}

// ---- criterion 1: closed-form constants -----------------------------------

bool criterion_closed_forms(std::string& detail) {
  CounterRng rng(101);
  std::uint64_t ctr = 0;
  double worst_rel = 0.0, worst_sigma = 0.0;
  bool ok = true;
  for (auto [d, n] : {std::pair{1, 2}, {1, 3}, {2, 2}}) {
    const SurfaceSpec surface = SurfaceSpec::unperturbed(d);
    const SphereRule rule = default_rule_for(d * (n - 1));
    for (int s = 0; s < 50; ++s) {
      const Vec xi = random_xi(rng, ctr, d);
      const double tau = norm_sq(xi) / n + std::pow(10.0, rng.uniform(ctr++, -2.0, 1.0));
      const double v = density_at(surface, n, xi, tau, rule).value;
      const double cf = paraboloid_closed_form(d, n, xi, tau);
      const double rel = std::abs(v - cf) / cf;
      worst_rel = std::max(worst_rel, rel);
      ok = ok && rel <= 1e-8;
    }
  }
  for (auto [d, n] : {std::pair{2, 3}, {3, 2}}) {
    const SurfaceSpec surface = SurfaceSpec::unperturbed(d);
    const SphereRule rule = sphere_mc_rule(d * (n - 1), 200000, 2024);
    for (int s = 0; s < 50; ++s) {
      const Vec xi = random_xi(rng, ctr, d);
      const double tau = norm_sq(xi) / n + std::pow(10.0, rng.uniform(ctr++, -2.0, 1.0));
      const DensityResult r = density_at(surface, n, xi, tau, rule);
      const double cf = paraboloid_closed_form(d, n, xi, tau);
      // 1e-13 cf covers roundoff when the spherical integrand is constant
      // and the Monte Carlo standard error collapses to machine noise.
      const double sigma = std::abs(r.value - cf) / (r.error_estimate + 1e-13 * cf);
      worst_sigma = std::max(worst_sigma, sigma);
      ok = ok && sigma <= 3.0;
    }
  }
  detail = fmt("deterministic worst rel %.2e (<= 1e-8), MC worst %.2f sigma (<= 3)", worst_rel,
               worst_sigma);
  return ok;
}

// ---- criterion 2: the constants pi/sqrt(3) and pi/2 ------------------------

bool criterion_constants(std::string& detail) {
  const SurfaceSpec s1 = SurfaceSpec::unperturbed(1);
  const SurfaceSpec s2 = SurfaceSpec::unperturbed(2);
  const double v13 = density_at(s1, 3, Vec{0.3}, 1.7, default_rule_for(2)).value;
  const double v22 = density_at(s2, 2, Vec{0.5, -1.0}, 2.3, default_rule_for(2)).value;
  const double r13 = std::abs(v13 - kPiSqrt3) / kPiSqrt3;
  const double r22 = std::abs(v22 - kPi / 2.0) / (kPi / 2.0);
  detail = fmt("(1,3) rel %.2e, (2,2) rel %.2e (<= 1e-8)", r13, r22);
  return r13 <= 1e-8 && r22 <= 1e-8;
}

// ---- criterion 3: comparison principle -------------------------------------

bool criterion_comparison(std::string& detail) {
  int violations = 0;
  double min_margin = 1e300;
  for (const char* name : {"quartic", "soft-hyperbola"}) {
    for (auto [d, n] : {std::pair{1, 2}, {1, 3}, {2, 2}}) {
      const SurfaceSpec surface(make_perturbation(name, {}, d));
      const SphereRule rule = default_rule_for(d * (n - 1));
      std::vector<Vec> grid;
      if (d == 1) {
        for (int i = 0; i < 9; ++i) grid.push_back({-2.0 + 0.5 * i});
      } else {
        for (int i = 0; i < 9; ++i)
          for (int j = 0; j < 9; ++j) grid.push_back({-2.0 + 0.5 * i, -2.0 + 0.5 * j});
      }
      const std::vector<double> offsets = {0.1, 1.0, 10.0};
      const ComparisonReport report = comparison_sweep(surface, n, grid, offsets, rule);
      violations += report.violations;
      min_margin = std::min(min_margin, report.min_margin);
    }
  }
  detail = fmt("violations %.0f (= 0), min margin %.3e (> 0)", double(violations), min_margin);
  return violations == 0 && min_margin > 0.0;
}

// ---- criterion 4: contraction ----------------------------------------------

bool criterion_contraction(std::string& detail) {
  CounterRng rng(104);
  std::uint64_t ctr = 0;
  double worst_recip = 0.0, min_det = 1.0, max_det = 0.0;
  bool ok = true;
  for (auto [d, n] : {std::pair{1, 2}, {1, 3}, {2, 2}}) {
    const SurfaceSpec surface(make_perturbation("quartic", {}, d));
    for (int s = 0; s < 1000; ++s) {
      const Vec xi = random_xi(rng, ctr, d);
      const Vec y = random_y(rng, ctr, d * (n - 1));
      const double det_t = det_T_prime(surface, n, xi, y).determinant;
      ok = ok && det_t > 0.0 && det_t < 1.0;
      min_det = std::min(min_det, det_t);
      max_det = std::max(max_det, det_t);
      const double det_s = det_S_prime(surface, n, xi, map_T(surface, n, xi, y)).determinant;
      worst_recip = std::max(worst_recip, std::abs(det_s * det_t - 1.0));
    }
  }
  ok = ok && worst_recip <= 1e-9;
  detail = fmt("det range [%.4f, %.4f] in (0,1), worst |det S' det T' - 1| %.2e (<= 1e-9)",
               min_det, max_det, worst_recip);
  return ok;
}

// ---- criterion 5: inverse maps ---------------------------------------------

bool criterion_inverse_maps(std::string& detail) {
  CounterRng rng(105);
  std::uint64_t ctr = 0;
  double worst_inv = 0.0, worst_ell = 0.0;
  for (auto [d, n] : {std::pair{1, 2}, {1, 3}, {2, 2}}) {
    const SurfaceSpec surface(make_perturbation("quartic", {}, d));
    for (int s = 0; s < 1000; ++s) {
      const Vec xi = random_xi(rng, ctr, d);
      const Vec y = random_y(rng, ctr, d * (n - 1));
      const Vec t = map_T(surface, n, xi, y);
      const Vec st = map_S(surface, n, xi, t);
      double diff = 0.0;
      for (std::size_t k = 0; k < y.size(); ++k) diff += (st[k] - y[k]) * (st[k] - y[k]);
      worst_inv = std::max(worst_inv, std::sqrt(diff) / (1.0 + norm(y)));
      ProfileEvaluator eval(surface, n, xi);
      const double h1 = eval.h(1.0, y);
      worst_ell = std::max(worst_ell, std::abs(eval.g(1.0, t) - h1) / (1.0 + h1));
    }
  }
  detail = fmt("worst |S(T(y))-y| %.2e, worst ellipsoid defect %.2e (<= 1e-9)", worst_inv,
               worst_ell);
  return worst_inv <= 1e-9 && worst_ell <= 1e-9;
}

// ---- criterion 6: boundary values ------------------------------------------

bool criterion_boundary(std::string& detail) {
  const SurfaceSpec q1(make_perturbation("quartic", {}, 1));
  const SurfaceSpec q2(make_perturbation("quartic", {}, 2));
  const double v13 =
      density_at(q1, 3, Vec{0.0}, 1e-8, default_rule_for(2)).value;  // base is 0 at xi=0
  const double d13 = std::abs(v13 - kPiSqrt3);

  ProfileEvaluator eval(q2, 2, Vec{0.0, 0.0});
  const double v22 = density_at(q2, 2, Vec{0.0, 0.0}, eval.base() + 1e-8,
                                default_rule_for(2)).value;
  const double d22 = std::abs(v22 - kPi / 2.0);

  const SphereRule rule14 = default_rule_for(3);
  bool decreasing = true;
  double prev = 1e300, first = 0.0, last = 0.0;
  for (int k = 2; k <= 6; ++k) {
    const double v = density_at(q1, 4, Vec{0.0}, std::pow(10.0, -k), rule14).value;
    if (k == 2) first = v;
    decreasing = decreasing && v < prev;
    prev = v;
    last = v;
  }
  const bool toward_zero = decreasing && last < 0.05 * first;
  detail = fmt("(1,3) gap %.2e, (2,2) gap %.2e (< 1e-3); (1,4) tail %.2e of first", d13, d22,
               last / first);
  return d13 < 1e-3 && d22 < 1e-3 && toward_zero;
}

// ---- criterion 7: (1,2) asymptotics ----------------------------------------

bool criterion_asymptotics(std::string& detail) {
  const SurfaceSpec quartic(make_perturbation("quartic", {}, 1));
  const SphereRule rule = point_pair_rule();
  double prev_dev = 1e300, final_dev = 0.0;
  bool shrinking = true;
  for (int k = 1; k <= 6; ++k) {
    const double tau = std::pow(10.0, -k);  // base is 0 at xi=0
    const double ratio = density_at(quartic, 2, Vec{0.0}, tau, rule).value /
                         asymptotic_d1n2(quartic, Vec{0.0}, tau);
    const double dev = std::abs(ratio - 1.0);
    shrinking = shrinking && dev < prev_dev + 1e-12;
    prev_dev = dev;
    final_dev = dev;
  }
  detail = fmt("final |ratio - 1| = %.2e (< 1e-2), deviations decreasing", final_dev);
  return shrinking && final_dev < 1e-2;
}

// ---- criterion 8: thin-shell oracle equivalence -----------------------------

bool criterion_oracle(std::string& detail) {
  CounterRng rng(109);
  std::uint64_t ctr = 0;
  double worst = 0.0;
  for (const char* name : {"quartic", "soft-hyperbola"}) {
    for (auto [d, n] : {std::pair{1, 2}, {1, 3}, {2, 2}}) {
      const SurfaceSpec surface(make_perturbation(name, {}, d));
      const SphereRule rule = default_rule_for(d * (n - 1));
      for (int s = 0; s < 20; ++s) {
        const Vec xi = random_xi(rng, ctr, d);
        ProfileEvaluator eval(surface, n, xi);
        const double tau = eval.base() + rng.uniform(ctr++, 0.1, 4.0);
        const DensityResult formula = density_at(surface, n, xi, tau, rule);
        const double eps = 1e-3 * (1.0 + tau - eval.base());
        const OracleEstimate shell =
            thin_shell_density(surface, n, xi, tau, eps, 1000000, 9000 + 7 * s);
        const double sigma = std::abs(shell.value - formula.value) /
                             (shell.standard_error + formula.error_estimate + 1e-300);
        worst = std::max(worst, sigma);
      }
    }
  }
  detail = fmt("worst deviation %.2f sigma (<= 3) over 120 points at 1e6 samples", worst);
  return worst <= 3.0;
}

// ---- criterion 9: sharp-constant sweep --------------------------------------

bool criterion_sharp_constant(std::string& detail) {
  const SurfaceSpec quartic(make_perturbation("quartic", {}, 1));
  const std::vector<double> centers = {0.0};
  const std::vector<double> a_list = {1, 2, 4, 8, 16, 32};
  const auto rows = sharp_constant_sweep(quartic, ExtremizerSpec::Case::i, centers, a_list);

  bool below = true, increasing = true, oracle_ok = true;
  double worst_sigma = 0.0;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    below = below && rows[k].gap > 0.0;
    if (k > 0) increasing = increasing && rows[k].q_value > rows[k - 1].q_value;
    const ExtremizerSpec spec{ExtremizerSpec::Case::i, 0.0, a_list[k], &quartic};
    const Extremizer ext = build_extremizer(spec);
    const QResult q = q_functional(quartic, ext.f, auto_grids(ext));
    NormRootsGrid grid;
    grid.y_lo = ext.support_lo;
    grid.y_hi = ext.support_hi;
    grid.panels = 10;
    grid.gl_order = 6;
    grid.cheb_nodes = 24;
    const OracleEstimate oracle = extension_norm_roots(quartic, ext.f, grid);
    const double sigma =
        std::abs(q.norm6 - oracle.value) / (q.norm6_err + oracle.standard_error + 1e-300);
    worst_sigma = std::max(worst_sigma, sigma);
    oracle_ok = oracle_ok && sigma <= 3.0;
  }
  const double gap1 = rows.front().gap, gap32 = rows.back().gap;
  const bool quarter = gap32 < gap1 / 4.0;
  const bool small = gap32 < 0.05;
  detail = fmt("gap(1)=%.6f gap(32)=%.6f; ", gap1, gap32) +
           fmt("oracle worst %.2f sigma; ", worst_sigma) +
           std::string(below ? "" : "[not below] ") +
           std::string(increasing ? "" : "[not increasing] ") +
           std::string(quarter ? "" : "[gap(32) >= gap(1)/4] ") +
           std::string(small ? "" : "[gap(32) >= 0.05] ") +
           std::string(oracle_ok ? "" : "[oracle disagrees]");
  return below && increasing && quarter && small && oracle_ok;
}

// ---- criterion 10: scaling invariance ---------------------------------------

bool criterion_scaling(std::string& detail) {
  const SurfaceSpec quartic(make_perturbation("quartic", {}, 1));
  const Extremizer ext = build_extremizer({ExtremizerSpec::Case::i, 0.0, 4.0, &quartic});
  QGrids grids = auto_grids(ext);
  grids.xi_panels = 16;
  grids.sigma_panels = 12;
  grids.circle_nodes = 128;
  const QResult base = q_functional(quartic, ext.f, grids);
  double worst = 0.0;
  for (double c : {0.1, 1.0, 10.0}) {
    auto scaled = [&, c](double y) { return c * ext.f(y); };
    const QResult q = q_functional(quartic, scaled, grids);
    worst = std::max(worst, std::abs(q.q_value - base.q_value) / base.q_value);
  }
  detail = fmt("worst relative drift %.2e (<= 1e-10)", worst);
  return worst <= 1e-10;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* title;
    std::function<bool(std::string&)> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "closed-form constants for the unperturbed density", criterion_closed_forms},
      {2, "pi/sqrt(3) and pi/2 recovered to 1e-8", criterion_constants},
      {3, "comparison principle: zero violations, strict margins", criterion_comparison},
      {4, "contraction: det T' in (0,1) with reciprocal identity", criterion_contraction},
      {5, "inverse maps and ellipsoid preservation", criterion_inverse_maps},
      {6, "boundary values and vanishing boundary", criterion_boundary},
      {7, "(1,2) asymptotic ratio tends to 1", criterion_asymptotics},
      {8, "thin-shell oracle equivalence at 1e6 samples", criterion_oracle},
      {9, "sharp-constant sweep toward pi/sqrt(3)", criterion_sharp_constant},
      {10, "scaling invariance of Q", criterion_scaling},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    std::string detail;
    bool ok = false;
    try {
      ok = c.run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    if (!ok) ++failures;
    std::printf("%s  criterion %2d: %s — %s\n", ok ? "PASS" : "FAIL", c.id, c.title,
                detail.c_str());
    std::fflush(stdout);
  }
  if (failures > 0) std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
