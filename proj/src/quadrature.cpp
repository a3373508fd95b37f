#include "convo/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "convo/rng.hpp"
#include "convo/special.hpp"

namespace convo {

SphereRule point_pair_rule() {
  SphereRule rule;
  rule.ambient_dim = 1;
  rule.kind = RuleKind::point_pair;
  rule.nodes = {1.0, -1.0};
  rule.weights = {1.0, 1.0};
  return rule;
}

SphereRule circle_rule(int n) {
  require(n >= 4, "circle_rule: need at least 4 nodes");
  SphereRule rule;
  rule.ambient_dim = 2;
  rule.kind = RuleKind::uniform_circle;
  rule.nodes.resize(2 * static_cast<std::size_t>(n));
  rule.weights.assign(n, 2.0 * std::numbers::pi / n);
  for (int k = 0; k < n; ++k) {
    const double theta = 2.0 * std::numbers::pi * k / n;
    rule.nodes[2 * k] = std::cos(theta);
    rule.nodes[2 * k + 1] = std::sin(theta);
  }
  return rule;
}

SphereRule sphere_product_rule(int n_polar, int n_azimuth) {
  require(n_polar >= 2 && n_azimuth >= 4, "sphere_product_rule: rule too small");
  SphereRule rule;
  rule.ambient_dim = 3;
  rule.kind = RuleKind::product_rule;
  rule.n_polar = n_polar;
  rule.n_azimuth = n_azimuth;
  std::vector<double> u, wu;
  gauss_legendre(n_polar, u, wu);
  const double waz = 2.0 * std::numbers::pi / n_azimuth;
  rule.nodes.resize(3 * static_cast<std::size_t>(n_polar) * n_azimuth);
  rule.weights.resize(static_cast<std::size_t>(n_polar) * n_azimuth);
  for (int i = 0; i < n_polar; ++i) {
    const double su = std::sqrt(std::max(0.0, 1.0 - u[i] * u[i]));
    for (int j = 0; j < n_azimuth; ++j) {
      const double phi = 2.0 * std::numbers::pi * j / n_azimuth;
      const std::size_t idx = static_cast<std::size_t>(i) * n_azimuth + j;
      rule.nodes[3 * idx] = su * std::cos(phi);
      rule.nodes[3 * idx + 1] = su * std::sin(phi);
      rule.nodes[3 * idx + 2] = u[i];
      rule.weights[idx] = wu[i] * waz;
    }
  }
  return rule;
}

SphereRule sphere_mc_rule(int m, std::size_t n, std::uint64_t seed) {
  require(m >= 3, "sphere_mc_rule: ambient dimension must be >= 3");
  require(n >= 2 && n % 2 == 0, "sphere_mc_rule: node count must be even (antithetic pairs)");
  SphereRule rule;
  rule.ambient_dim = m;
  rule.kind = RuleKind::monte_carlo;
  rule.seed = seed;
  rule.nodes.resize(n * static_cast<std::size_t>(m));
  rule.weights.assign(n, sphere_area(m) / static_cast<double>(n));
  CounterRng rng(seed);
  const std::size_t draws_per_node = (static_cast<std::size_t>(m) + 1) / 2;
  for (std::size_t i = 0; i < n; i += 2) {
    double* node = rule.nodes.data() + i * m;
    const std::size_t base = (i / 2) * draws_per_node;
    for (std::size_t j = 0; j < draws_per_node; ++j) {
      double z0, z1;
      rng.gaussian_pair(base + j, z0, z1);
      node[2 * j] = z0;
      if (2 * j + 1 < static_cast<std::size_t>(m)) node[2 * j + 1] = z1;
    }
    double r = norm({node, static_cast<std::size_t>(m)});
    if (r < 1e-300) {
      node[0] = 1.0;
      r = 1.0;
    }
    double* anti = node + m;
    for (int k = 0; k < m; ++k) {
      node[k] /= r;
      anti[k] = -node[k];
    }
  }
  return rule;
}

SphereRule default_rule_for(int m, std::size_t mc_nodes, std::uint64_t seed) {
  if (m == 1) return point_pair_rule();
  if (m == 2) return circle_rule(512);
  if (m == 3) return sphere_product_rule(64, 128);
  return sphere_mc_rule(m, mc_nodes, seed);
}

SphereRule coarsen(const SphereRule& rule) {
  switch (rule.kind) {
    case RuleKind::point_pair:
    case RuleKind::monte_carlo:
      return rule;
    case RuleKind::uniform_circle:
      return circle_rule(std::max<std::size_t>(4, rule.count() / 2));
    case RuleKind::product_rule:
      return sphere_product_rule(std::max(2, rule.n_polar / 2), std::max(4, rule.n_azimuth / 2));
  }
  throw ContractViolation("coarsen: unknown rule kind");
}

namespace {

struct AdaptiveState {
  const std::function<double(double)>* f;
  std::size_t evals = 0;
  bool depth_exhausted = false;
  double eval(double x) {
    ++evals;
    return (*f)(x);
  }
};

double adaptive_simpson(AdaptiveState& st, double a, double b, double fa, double fm, double fb,
                        double whole, double tol, int depth, double& err_acc) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = st.eval(lm), frm = st.eval(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (std::abs(delta) <= 15.0 * tol || b - a < 1e-15 * (1.0 + std::abs(a)) || depth <= 0) {
    if (depth <= 0) st.depth_exhausted = true;
    err_acc += std::abs(delta) / 15.0;
    return left + right + delta / 15.0;
  }
  return adaptive_simpson(st, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, err_acc) +
         adaptive_simpson(st, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, err_acc);
}

}  // namespace

IntegralEstimate adaptive_1d(const std::function<double(double)>& f, double a, double b,
                             double tol) {
  require(tol > 0.0, "adaptive_1d: tol must be positive");
  if (a == b) return {0.0, 0.0, 0};
  AdaptiveState st{&f};
  const double fa = st.eval(a), fb = st.eval(b), fm = st.eval(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  double err = 0.0;
  const double value = adaptive_simpson(st, a, b, fa, fm, fb, whole, tol, 45, err);
  if (st.depth_exhausted)
    throw ConvergenceError("adaptive_1d: max depth exceeded", value);
  return {value, err, st.evals};
}

IntegralEstimate semi_infinite_1d(const std::function<double(double)>& f, double a, double tol) {
  // x = a + (1 - t)/t maps t in (0, 1] onto [a, inf).
  auto mapped = [&](double t) {
    if (t <= 1e-13) return 0.0;
    const double x = a + (1.0 - t) / t;
    return f(x) / (t * t);
  };
  return adaptive_1d(mapped, 0.0, 1.0, tol);
}

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  require(n >= 1, "gauss_legendre: n must be >= 1");
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Newton from the Chebyshev estimate of the i-th root.
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
  }
}

}  // namespace convo
