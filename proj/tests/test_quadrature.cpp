#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "convo/parallel.hpp"
#include "convo/quadrature.hpp"
#include "convo/special.hpp"

using namespace convo;

namespace {

double integrate(const SphereRule& rule, const std::function<double(std::span<const double>)>& f) {
  std::vector<double> c(rule.count());
  for (std::size_t i = 0; i < rule.count(); ++i) c[i] = rule.weights[i] * f(rule.node(i));
  return pairwise_sum(c);
}

// Pair-mean standard error for Monte Carlo rules (node 2k+1 = -node 2k).
double mc_standard_error(const SphereRule& rule,
                         const std::function<double(std::span<const double>)>& f) {
  const std::size_t pairs = rule.count() / 2;
  std::vector<double> pm(pairs);
  for (std::size_t k = 0; k < pairs; ++k)
    pm[k] = rule.weights[2 * k] * f(rule.node(2 * k)) +
            rule.weights[2 * k + 1] * f(rule.node(2 * k + 1));
  const double mean = pairwise_sum(pm) / pairs;
  double ss = 0.0;
  for (double v : pm) ss += (v - mean) * (v - mean);
  return std::sqrt(ss * pairs / (pairs - 1.0));
}

constexpr double kPi = std::numbers::pi;

}  // namespace

TEST_CASE("gamma function reference values") {
  CHECK(gamma_fn(1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(gamma_fn(0.5) == doctest::Approx(std::sqrt(kPi)).epsilon(1e-14));
  CHECK(gamma_fn(1.5) == doctest::Approx(0.5 * std::sqrt(kPi)).epsilon(1e-14));
  CHECK(gamma_fn(2.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(gamma_fn(5.0) == doctest::Approx(24.0).epsilon(1e-14));
  for (double x : {0.5, 1.25, 3.75, 10.5, 27.0, 50.0})
    CHECK(gamma_fn(x) == doctest::Approx(std::tgamma(x)).epsilon(2e-14));
}

TEST_CASE("sphere areas") {
  CHECK(sphere_area(1) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(sphere_area(2) == doctest::Approx(2.0 * kPi).epsilon(1e-14));
  CHECK(sphere_area(3) == doctest::Approx(4.0 * kPi).epsilon(1e-14));
  CHECK(sphere_area(4) == doctest::Approx(2.0 * kPi * kPi).epsilon(1e-14));
}

TEST_CASE("circle rule") {
  const SphereRule rule = circle_rule(256);
  double wsum = 0.0;
  for (std::size_t i = 0; i < rule.count(); ++i) {
    wsum += rule.weights[i];
    CHECK(std::abs(norm(rule.node(i)) - 1.0) <= 1e-12);
  }
  CHECK(wsum == doctest::Approx(2.0 * kPi).epsilon(1e-12));

  CHECK(integrate(rule, [](std::span<const double>) { return 1.0; }) ==
        doctest::Approx(2.0 * kPi).epsilon(1e-14));
  CHECK(integrate(rule, [](std::span<const double> w) { return w[0] * w[0]; }) ==
        doctest::Approx(kPi).epsilon(1e-12));

  auto hard = [](std::span<const double> w) { return 1.0 / (2.0 + 2.0 * w[0] * w[1]); };
  const double v256 = integrate(rule, hard);
  CHECK(v256 == doctest::Approx(2.0 * kPi / std::sqrt(3.0)).epsilon(1e-10));
  const double v512 = integrate(circle_rule(512), hard);
  CHECK(std::abs(v512 - v256) < 1e-10);

  CHECK_THROWS_AS(circle_rule(3), ContractViolation);
}

TEST_CASE("point pair rule covers S^0") {
  const SphereRule rule = point_pair_rule();
  CHECK(rule.count() == 2);
  CHECK(rule.weights[0] + rule.weights[1] == doctest::Approx(sphere_area(1)).epsilon(1e-15));
  CHECK(rule.node(0)[0] == 1.0);
  CHECK(rule.node(1)[0] == -1.0);
}

TEST_CASE("product rule on S^2") {
  const SphereRule rule = sphere_product_rule(32, 64);
  double wsum = 0.0;
  for (std::size_t i = 0; i < rule.count(); ++i) {
    wsum += rule.weights[i];
    CHECK(std::abs(norm(rule.node(i)) - 1.0) <= 1e-12);
  }
  CHECK(wsum == doctest::Approx(4.0 * kPi).epsilon(1e-12));
  CHECK(integrate(rule, [](std::span<const double> w) { return w[0] * w[0]; }) ==
        doctest::Approx(4.0 * kPi / 3.0).epsilon(1e-12));
}

TEST_CASE("monte carlo rule") {
  const SphereRule rule = sphere_mc_rule(3, 100000, 42);
  SUBCASE("weights and antithetic structure") {
    const double w = sphere_area(3) / 100000.0;
    for (std::size_t i : {std::size_t{0}, std::size_t{777}, std::size_t{99999}})
      CHECK(rule.weights[i] == w);
    for (std::size_t k = 0; k < 50; ++k)
      for (int c = 0; c < 3; ++c) CHECK(rule.node(2 * k + 1)[c] == -rule.node(2 * k)[c]);
    for (std::size_t i = 0; i < 200; ++i)
      CHECK(std::abs(norm(rule.node(i)) - 1.0) <= 1e-12);
  }
  SUBCASE("same seed reproduces nodes bit for bit") {
    const SphereRule again = sphere_mc_rule(3, 100000, 42);
    CHECK(again.nodes == rule.nodes);
    const SphereRule other = sphere_mc_rule(3, 100000, 43);
    CHECK(other.nodes != rule.nodes);
  }
  SUBCASE("f = 1 integrates to the area exactly by construction") {
    CHECK(integrate(rule, [](std::span<const double>) { return 1.0; }) ==
          doctest::Approx(sphere_area(3)).epsilon(1e-12));
  }
  SUBCASE("omega_1^2 on S^2 within 3 standard errors of area/3") {
    auto f = [](std::span<const double> w) { return w[0] * w[0]; };
    const double est = integrate(rule, f);
    const double se = mc_standard_error(rule, f);
    CHECK(std::abs(est - 4.0 * kPi / 3.0) <= 3.0 * se);
  }
  SUBCASE("m=4 closed-form integrand is consistent with 2 c_{2,3}") {
    // (1/2) int (|w_1+w_2|^2 + |w_1|^2 + |w_2|^2)^{-2} dmu = c_{2,3} = pi^2/3
    const SphereRule r4 = sphere_mc_rule(4, 200000, 7);
    auto f = [](std::span<const double> w) {
      const double s0 = w[0] + w[2], s1 = w[1] + w[3];
      const double form = s0 * s0 + s1 * s1 + norm_sq(w);
      return 1.0 / (form * form);
    };
    const double est = integrate(r4, f);
    const double se = mc_standard_error(r4, f);
    CHECK(std::abs(est - 2.0 * kPi * kPi / 3.0) <= 3.0 * se);
  }
  SUBCASE("independent seeds agree within 4 combined standard errors") {
    auto f = [](std::span<const double> w) { return std::exp(w[2]); };
    const SphereRule a = sphere_mc_rule(3, 40000, 1);
    const SphereRule b = sphere_mc_rule(3, 40000, 2);
    const double ea = integrate(a, f), eb = integrate(b, f);
    CHECK(std::abs(ea - eb) <= 4.0 * (mc_standard_error(a, f) + mc_standard_error(b, f)));
  }
  SUBCASE("contract checks") {
    CHECK_THROWS_AS(sphere_mc_rule(2, 100, 0), ContractViolation);
    CHECK_THROWS_AS(sphere_mc_rule(3, 101, 0), ContractViolation);
  }
}

TEST_CASE("coarsen") {
  CHECK(coarsen(circle_rule(512)).count() == 256);
  const SphereRule p = coarsen(sphere_product_rule(64, 128));
  CHECK(p.n_polar == 32);
  CHECK(p.n_azimuth == 64);
  CHECK(coarsen(point_pair_rule()).count() == 2);
}

TEST_CASE("adaptive_1d") {
  SUBCASE("polynomial") {
    const IntegralEstimate est = adaptive_1d([](double x) { return x * x; }, 0.0, 1.0, 1e-13);
    CHECK(est.value == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(est.error_estimate >= 0.0);
    CHECK(est.nodes_used > 0);
  }
  SUBCASE("oscillatory") {
    const IntegralEstimate est = adaptive_1d([](double x) { return std::sin(x); }, 0.0, kPi, 1e-12);
    CHECK(est.value == doctest::Approx(2.0).epsilon(1e-11));
  }
  SUBCASE("extremizer-type weight matches a fine midpoint oracle") {
    auto f = [](double y) { return std::exp(-2.0 * (y * y + y * y * y * y)); };
    const IntegralEstimate est = adaptive_1d(f, -4.0, 4.0, 1e-12);
    double mid = 0.0;
    const int steps = 2000000;
    const double h = 8.0 / steps;
    for (int i = 0; i < steps; ++i) mid += f(-4.0 + (i + 0.5) * h) * h;
    CHECK(est.value == doctest::Approx(mid).epsilon(1e-8));
  }
  SUBCASE("max depth exceeded raises a convergence error with the best estimate") {
    auto jump = [](double x) { return x > 0.3731233 ? 1.0 : 0.0; };
    CHECK_THROWS_AS(adaptive_1d(jump, 0.0, 1.0, 1e-16), ConvergenceError);
    try {
      adaptive_1d(jump, 0.0, 1.0, 1e-16);
    } catch (const ConvergenceError& e) {
      CHECK(e.best_estimate() == doctest::Approx(1.0 - 0.3731233).epsilon(1e-4));
    }
  }
}

TEST_CASE("semi_infinite_1d") {
  CHECK(semi_infinite_1d([](double x) { return std::exp(-x); }, 0.0, 1e-12).value ==
        doctest::Approx(1.0).epsilon(1e-10));
  CHECK(semi_infinite_1d([](double x) { return std::exp(-x); }, 2.0, 1e-12).value ==
        doctest::Approx(std::exp(-2.0)).epsilon(1e-9));
  CHECK(semi_infinite_1d([](double x) { return x * std::exp(-x * x); }, 0.0, 1e-12).value ==
        doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("gauss_legendre") {
  std::vector<double> x, w;
  gauss_legendre(8, x, w);
  double wsum = 0.0, p6 = 0.0;
  for (int i = 0; i < 8; ++i) {
    wsum += w[i];
    p6 += w[i] * std::pow(x[i], 6);
  }
  CHECK(wsum == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(p6 == doctest::Approx(2.0 / 7.0).epsilon(1e-13));
}
