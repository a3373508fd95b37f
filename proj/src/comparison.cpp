#include "convo/comparison.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "convo/parallel.hpp"

namespace convo {

ComparisonRow compare_point(const SurfaceSpec& surface, int n, std::span<const double> xi,
                            double tau, const SphereRule& rule) {
  ProfileEvaluator eval(surface, n, xi);
  require(tau > eval.base(), "compare_point: tau must exceed n psi(xi/n)");
  DensityQuery q;
  q.surface = &surface;
  q.n = n;
  q.xi.assign(xi.begin(), xi.end());
  q.tau = tau;
  q.rule = &rule;
  const DensityResult lhs = nfold_density(q);

  Vec p(xi.begin(), xi.end());
  for (double& c : p) c /= n;
  const double shifted_tau = tau - n * surface.phi(p);
  const double rhs = paraboloid_closed_form(surface.dim(), n, xi, shifted_tau);

  ComparisonRow row;
  row.xi = q.xi;
  row.tau = tau;
  row.lhs = lhs.value;
  row.lhs_err = lhs.error_estimate;
  row.rhs = rhs;
  row.rhs_err = 1e-13 * std::abs(rhs);  // gamma/pow roundoff allowance
  row.margin = rhs - lhs.value;
  row.strict = row.margin > row.lhs_err + row.rhs_err;
  return row;
}

bool support_inclusion_check(const SurfaceSpec& surface, int n,
                             std::span<const Vec> xi_points, std::span<const double> taus) {
  for (const Vec& xi : xi_points) {
    ProfileEvaluator eval(surface, n, xi);
    const double quad_base = norm_sq(xi) / n;
    for (double tau : taus) {
      if (tau >= eval.base() && tau < quad_base) return false;
    }
  }
  return true;
}

ComparisonReport comparison_sweep(const SurfaceSpec& surface, int n,
                                  std::span<const Vec> xi_points,
                                  std::span<const double> tau_offsets, const SphereRule& rule) {
  for (double off : tau_offsets)
    require(off > 0.0, "comparison_sweep: offsets must be positive");
  ComparisonReport report;
  const std::size_t total = xi_points.size() * tau_offsets.size();
  report.rows.resize(total);
  parallel_chunks(total, 4, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t idx = begin; idx < end; ++idx) {
      const Vec& xi = xi_points[idx / tau_offsets.size()];
      const double offset = tau_offsets[idx % tau_offsets.size()];
      ProfileEvaluator eval(surface, n, xi);
      report.rows[idx] = compare_point(surface, n, xi, eval.base() + offset, rule);
    }
  });
  report.min_margin = total == 0 ? 0.0 : std::numeric_limits<double>::infinity();
  for (const ComparisonRow& row : report.rows) {
    report.min_margin = std::min(report.min_margin, row.margin);
    if (row.margin < -(row.lhs_err + row.rhs_err)) ++report.violations;
  }
  return report;
}

}  // namespace convo
