#include "convo/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "convo/comparison.hpp"
#include "convo/density.hpp"
#include "convo/extension.hpp"
#include "convo/oracle.hpp"
#include "convo/rng.hpp"

namespace convo {

using ordered_json = nlohmann::ordered_json;

std::string fmt_sci(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

std::vector<double> parse_csv_doubles(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("cannot parse number '" + item + "'");
    }
  }
  return out;
}

std::vector<double> parse_grid(const std::string& text) {
  double start = 0.0, stop = 0.0;
  long count = 0;
  if (std::sscanf(text.c_str(), "%lf:%lf:%ld", &start, &stop, &count) != 3 || count < 1)
    throw ConfigError("grid must be start:stop:count, got '" + text + "'");
  std::vector<double> out;
  out.reserve(count);
  if (count == 1) {
    out.push_back(start);
  } else {
    for (long i = 0; i < count; ++i)
      out.push_back(start + (stop - start) * static_cast<double>(i) / (count - 1));
  }
  return out;
}

namespace {

ordered_json config_to_json(const RunConfig& c) {
  ordered_json j;
  j["subcommand"] = c.subcommand;
  j["dim"] = c.dim;
  j["n"] = c.n;
  j["perturbation"] = {{"name", c.perturbation}, {"params", c.pert_params}};
  j["xi"] = c.xi;
  j["tau"] = c.tau;
  j["tau_grid"] = c.tau_grid;
  j["weight"] = c.weight;
  j["sphere_nodes"] = c.sphere_nodes;
  j["seed"] = c.seed;
  j["tol"] = c.tol;
  j["method"] = c.method;
  j["epsilon"] = c.epsilon;
  j["box_radius"] = c.box_radius;
  j["samples"] = c.samples;
  j["xi_grid"] = c.xi_grid;
  j["offsets"] = c.offsets;
  j["points"] = c.points;
  j["case"] = c.ext_case;
  j["centers"] = c.centers;
  j["a_list"] = c.a_list;
  j["auto_a"] = c.auto_a;
  j["out"] = c.out_path;
  j["format"] = c.format;
  j["dry_run"] = c.dry_run;
  return j;
}

void config_from_json(const nlohmann::json& j, RunConfig& c) {
  if (j.contains("subcommand")) c.subcommand = j["subcommand"];
  if (j.contains("dim")) c.dim = j["dim"];
  if (j.contains("n")) c.n = j["n"];
  if (j.contains("perturbation")) {
    const auto& p = j["perturbation"];
    if (p.is_string()) {
      c.perturbation = p;
    } else {
      if (p.contains("name")) c.perturbation = p["name"];
      if (p.contains("params")) c.pert_params = p["params"].get<std::vector<double>>();
    }
  }
  if (j.contains("xi")) c.xi = j["xi"].get<std::vector<double>>();
  if (j.contains("tau")) c.tau = j["tau"];
  if (j.contains("tau_grid")) c.tau_grid = j["tau_grid"];
  if (j.contains("weight")) c.weight = j["weight"];
  if (j.contains("sphere_nodes")) c.sphere_nodes = j["sphere_nodes"];
  if (j.contains("seed")) c.seed = j["seed"];
  if (j.contains("tol")) c.tol = j["tol"];
  if (j.contains("method")) c.method = j["method"];
  if (j.contains("epsilon")) c.epsilon = j["epsilon"];
  if (j.contains("box_radius")) c.box_radius = j["box_radius"];
  if (j.contains("samples")) c.samples = j["samples"];
  if (j.contains("xi_grid")) c.xi_grid = j["xi_grid"];
  if (j.contains("offsets")) c.offsets = j["offsets"].get<std::vector<double>>();
  if (j.contains("points")) c.points = j["points"];
  if (j.contains("case")) c.ext_case = j["case"];
  if (j.contains("centers")) c.centers = j["centers"].get<std::vector<double>>();
  if (j.contains("a_list")) c.a_list = j["a_list"].get<std::vector<double>>();
  if (j.contains("auto_a")) c.auto_a = j["auto_a"];
  if (j.contains("out")) c.out_path = j["out"];
  if (j.contains("format")) c.format = j["format"];
  if (j.contains("dry_run")) c.dry_run = j["dry_run"];
}

SurfaceSpec build_surface(const RunConfig& cfg) {
  return SurfaceSpec(make_perturbation(cfg.perturbation, cfg.pert_params, cfg.dim));
}

WeightSpec build_weight(const RunConfig& cfg) {
  WeightSpec w;
  if (cfg.weight == "gaussian") {
    w.value = [](std::span<const double> y) { return std::exp(-norm_sq(y)); };
  } else if (cfg.weight != "none" && !cfg.weight.empty()) {
    throw ConfigError("unknown weight '" + cfg.weight + "' (use none or gaussian)");
  }
  return w;
}

SphereRule build_rule(int m, int nodes, std::uint64_t seed) {
  if (nodes <= 0) return default_rule_for(m, 200000, seed);
  if (m == 1) return point_pair_rule();
  if (m == 2) return circle_rule(nodes);
  if (m == 3) {
    const int n_polar = std::max(2, static_cast<int>(std::lround(std::sqrt(nodes / 2.0))));
    return sphere_product_rule(n_polar, 2 * n_polar);
  }
  return sphere_mc_rule(m, static_cast<std::size_t>(nodes + nodes % 2), seed);
}

Vec resolved_xi(const RunConfig& cfg) {
  if (cfg.xi.empty()) return Vec(cfg.dim, 0.0);
  if (static_cast<int>(cfg.xi.size()) != cfg.dim)
    throw ConfigError("--xi needs exactly " + std::to_string(cfg.dim) + " components");
  return cfg.xi;
}

std::vector<Vec> cross_grid(int dim, const std::string& grid_text) {
  const std::vector<double> axis = parse_grid(grid_text);
  std::vector<Vec> points;
  std::size_t total = 1;
  for (int k = 0; k < dim; ++k) total *= axis.size();
  points.reserve(total);
  for (std::size_t idx = 0; idx < total; ++idx) {
    Vec p(dim);
    std::size_t rest = idx;
    for (int k = dim - 1; k >= 0; --k) {
      p[k] = axis[rest % axis.size()];
      rest /= axis.size();
    }
    points.push_back(std::move(p));
  }
  return points;
}

void csv_header(std::ostream& os, int dim, const std::vector<std::string>& rest) {
  for (int k = 0; k < dim; ++k) os << "xi_" << (k + 1) << ",";
  for (std::size_t i = 0; i < rest.size(); ++i) os << rest[i] << (i + 1 < rest.size() ? "," : "");
  os << "\n";
}

int cmd_density(const RunConfig& cfg, std::ostream& os) {
  const SurfaceSpec surface = build_surface(cfg);
  const WeightSpec weight = build_weight(cfg);
  const SphereRule rule = build_rule(cfg.dim * (cfg.n - 1), cfg.sphere_nodes, cfg.seed);
  DensityQuery q;
  q.surface = &surface;
  q.n = cfg.n;
  q.xi = resolved_xi(cfg);
  q.weight = weight.value ? &weight : nullptr;
  q.rule = &rule;
  if (!cfg.tau_grid.empty() || cfg.format == "csv") {
    const std::vector<double> taus =
        cfg.tau_grid.empty() ? std::vector<double>{cfg.tau} : parse_grid(cfg.tau_grid);
    csv_header(os, cfg.dim, {"tau", "value", "error_estimate", "regime"});
    for (double tau : taus) {
      q.tau = tau;
      const DensityResult r = nfold_density(q);
      for (double x : q.xi) os << fmt_sci(x) << ",";
      os << fmt_sci(tau) << "," << fmt_sci(r.value) << "," << fmt_sci(r.error_estimate) << ","
         << regime_name(r.regime) << "\n";
    }
  } else {
    q.tau = cfg.tau;
    const DensityResult r = nfold_density(q);
    ordered_json j;
    j["value"] = r.value;
    j["error_estimate"] = r.error_estimate;
    j["regime"] = regime_name(r.regime);
    os << j.dump(2) << "\n";
  }
  return 0;
}

int cmd_oracle(const RunConfig& cfg, std::ostream& os) {
  const SurfaceSpec surface = build_surface(cfg);
  const Vec xi = resolved_xi(cfg);
  ordered_json j;
  if (cfg.method == "root-sum") {
    if (cfg.dim != 1 || cfg.n != 2)
      throw ConfigError("--method root-sum requires --dim 1 --n 2");
    const OracleEstimate est = root_sum_density_1d(surface, xi[0], cfg.tau);
    j["value"] = est.value;
    j["standard_error"] = est.standard_error;
    j["method"] = "root-sum";
  } else if (cfg.method == "thin-shell") {
    const OracleEstimate est = thin_shell_density(surface, cfg.n, xi, cfg.tau, cfg.epsilon,
                                                  cfg.samples, cfg.seed, cfg.box_radius);
    const OracleEstimate half = thin_shell_density(surface, cfg.n, xi, cfg.tau, 0.5 * cfg.epsilon,
                                                   cfg.samples, cfg.seed + 1, cfg.box_radius);
    j["value"] = est.value;
    j["standard_error"] = est.standard_error;
    j["value_half_epsilon"] = half.value;
    j["standard_error_half_epsilon"] = half.standard_error;
    j["method"] = "thin-shell";
    j["epsilon"] = cfg.epsilon;
    j["samples"] = cfg.samples;
    j["seed"] = cfg.seed;
  } else {
    throw ConfigError("unknown oracle method '" + cfg.method + "'");
  }
  os << j.dump(2) << "\n";
  return 0;
}

int cmd_verify_comparison(const RunConfig& cfg, std::ostream& os, std::ostream& err) {
  const SurfaceSpec surface = build_surface(cfg);
  const SphereRule rule = build_rule(cfg.dim * (cfg.n - 1), cfg.sphere_nodes, cfg.seed);
  const std::vector<Vec> points = cross_grid(cfg.dim, cfg.xi_grid);
  for (double off : cfg.offsets)
    if (!(off > 0.0)) throw ConfigError("--offsets must be positive");
  const ComparisonReport report =
      comparison_sweep(surface, cfg.n, points, cfg.offsets, rule);
  csv_header(os, cfg.dim, {"tau", "lhs", "lhs_err", "rhs", "margin", "strict"});
  for (const ComparisonRow& row : report.rows) {
    for (double x : row.xi) os << fmt_sci(x) << ",";
    os << fmt_sci(row.tau) << "," << fmt_sci(row.lhs) << "," << fmt_sci(row.lhs_err) << ","
       << fmt_sci(row.rhs) << "," << fmt_sci(row.margin) << "," << (row.strict ? 1 : 0) << "\n";
  }
  err << "min_margin=" << fmt_sci(report.min_margin) << " violations=" << report.violations
      << "\n";
  return report.violations > 0 ? 1 : 0;
}

int cmd_verify_closed_form(const RunConfig& cfg, std::ostream& os, std::ostream& err) {
  const SurfaceSpec surface = SurfaceSpec::unperturbed(cfg.dim);
  const int m = cfg.dim * (cfg.n - 1);
  const SphereRule rule = build_rule(m, cfg.sphere_nodes, cfg.seed);
  CounterRng rng(cfg.seed);
  std::uint64_t ctr = 0;
  csv_header(os, cfg.dim,
             {"tau", "density", "error_estimate", "closed_form", "rel_err", "ok"});
  int failures = 0;
  DensityQuery q;
  q.surface = &surface;
  q.n = cfg.n;
  q.rule = &rule;
  for (int i = 0; i < cfg.points; ++i) {
    Vec xi(cfg.dim);
    for (double& x : xi) x = rng.uniform(ctr++, -2.0, 2.0);
    const double offset = std::pow(10.0, rng.uniform(ctr++, -2.0, 1.0));
    const double tau = norm_sq(xi) / cfg.n + offset;
    q.xi = xi;
    q.tau = tau;
    const DensityResult r = nfold_density(q);
    const double cf = paraboloid_closed_form(cfg.dim, cfg.n, xi, tau);
    const double rel = std::abs(r.value - cf) / cf;
    const bool ok = rule.kind == RuleKind::monte_carlo
                        ? std::abs(r.value - cf) <= 3.0 * (r.error_estimate + 1e-13 * cf)
                        : rel <= cfg.tol;
    failures += ok ? 0 : 1;
    for (double x : xi) os << fmt_sci(x) << ",";
    os << fmt_sci(tau) << "," << fmt_sci(r.value) << "," << fmt_sci(r.error_estimate) << ","
       << fmt_sci(cf) << "," << fmt_sci(rel) << "," << (ok ? 1 : 0) << "\n";
  }
  if (failures > 0) err << failures << " of " << cfg.points << " points failed\n";
  return failures > 0 ? 1 : 0;
}

int cmd_extension_sweep(const RunConfig& cfg, std::ostream& os, std::ostream& err) {
  if (cfg.dim != 1) throw ConfigError("extension-sweep requires --dim 1");
  const SurfaceSpec surface = build_surface(cfg);
  const ExtremizerSpec::Case kind =
      cfg.ext_case == "ii" ? ExtremizerSpec::Case::ii : ExtremizerSpec::Case::i;
  std::vector<double> a_list = cfg.a_list;
  std::vector<double> centers = cfg.centers;
  if (centers.empty()) {
    if (kind == ExtremizerSpec::Case::i) {
      centers = {0.0};
    } else {
      // default escaping sequences: y_k = 2^k (soft-hyperbola) or -2^k
      // (exponential), toward the flattening direction of phi''
      const std::size_t count = cfg.auto_a ? 3 : a_list.size();
      double sign;
      if (cfg.perturbation == "soft-hyperbola") sign = 1.0;
      else if (cfg.perturbation == "exponential") sign = -1.0;
      else throw ConfigError("--case ii needs --centers for perturbation '" +
                             cfg.perturbation + "'");
      for (std::size_t k = 1; k <= count; ++k)
        centers.push_back(sign * std::pow(2.0, static_cast<double>(k)));
    }
  }
  if (cfg.auto_a) {
    if (kind != ExtremizerSpec::Case::ii)
      throw ConfigError("--auto-a applies to --case ii only");
    a_list.clear();
    for (std::size_t k = 0; k < centers.size(); ++k)
      a_list.push_back(select_a_n(surface, centers[k], static_cast<int>(k) + 2, kind).a);
  }
  const std::vector<SweepRow> rows = sharp_constant_sweep(surface, kind, centers, a_list);
  os << "a,center,q_value,q_err,gap\n";
  int violations = 0;
  for (const SweepRow& row : rows) {
    os << fmt_sci(row.a) << "," << fmt_sci(row.center) << "," << fmt_sci(row.q_value) << ","
       << fmt_sci(row.q_err) << "," << fmt_sci(row.gap) << "\n";
    if (row.warn) err << "warning: gap not decreasing at a=" << row.a << "\n";
    if (!(row.gap > 0.0)) ++violations;
  }
  return violations > 0 ? 1 : 0;
}

int cmd_boundary(const RunConfig& cfg, std::ostream& os) {
  const SurfaceSpec surface = build_surface(cfg);
  const WeightSpec weight = build_weight(cfg);
  const BoundaryValue bv =
      boundary_value(surface, cfg.n, resolved_xi(cfg), weight.value ? &weight : nullptr);
  ordered_json j;
  if (bv.kind == BoundaryValue::Kind::asymptotic) {
    j["kind"] = "asymptotic";
    j["value"] = nullptr;
  } else {
    j["kind"] = "finite";
    j["value"] = bv.value;
  }
  os << j.dump(2) << "\n";
  return 0;
}

}  // namespace

RunConfig parse_cli(int argc, const char* const* argv, std::ostream& out, bool& help_requested) {
  RunConfig cfg;
  help_requested = false;

  // Config file first; explicit flags override its values.
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--config") {
      std::ifstream in(argv[i + 1]);
      if (!in) throw ConfigError(std::string("cannot open config file ") + argv[i + 1]);
      nlohmann::json j;
      try {
        in >> j;
      } catch (const std::exception& e) {
        throw ConfigError(std::string("bad config JSON: ") + e.what());
      }
      config_from_json(j, cfg);
    }
  }

  CLI::App app{"n-fold convolutions of projection measures on perturbed paraboloids"};
  app.require_subcommand(0, 1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON config file (flags override)");

  std::string xi_text, offsets_text, centers_text, a_list_text, params_text;

  auto add_common = [&](CLI::App* sub) {
    sub->option_defaults()->always_capture_default(true);
    sub->add_option("--config", config_path, "JSON config file (flags override)");
    sub->add_option("--dim", cfg.dim, "base dimension d");
    sub->add_option("--n", cfg.n, "convolution order n");
    sub->add_option("--perturbation", cfg.perturbation,
                    "zero | quartic | soft-hyperbola | exponential");
    sub->add_option("--pert-params", params_text, "comma-separated perturbation parameters");
    sub->add_option("--sphere-nodes", cfg.sphere_nodes, "sphere rule node count (0 = default)");
    sub->add_option("--seed", cfg.seed, "Monte Carlo seed");
    sub->add_option("--tol", cfg.tol, "verification tolerance");
    sub->add_option("--out", cfg.out_path, "output path ('-' = stdout)");
    sub->add_option("--format", cfg.format, "json | csv where applicable");
    sub->add_flag("--dry-run", cfg.dry_run, "print the resolved configuration and exit");
  };

  CLI::App* density = app.add_subcommand("density", "evaluate the n-fold density");
  add_common(density);
  density->add_option("--xi", xi_text, "comma-separated xi components");
  density->add_option("--tau", cfg.tau, "tau coordinate");
  density->add_option("--tau-grid", cfg.tau_grid, "tau sweep start:stop:count (CSV output)");
  density->add_option("--weight", cfg.weight, "none | gaussian");

  CLI::App* oracle = app.add_subcommand("oracle", "brute-force density estimate");
  add_common(oracle);
  oracle->add_option("--xi", xi_text, "comma-separated xi components");
  oracle->add_option("--tau", cfg.tau, "tau coordinate");
  oracle->add_option("--method", cfg.method, "thin-shell | root-sum");
  oracle->add_option("--epsilon", cfg.epsilon, "shell half-width");
  oracle->add_option("--box-radius", cfg.box_radius, "sampling box radius (0 = auto)");
  oracle->add_option("--samples", cfg.samples, "Monte Carlo samples");

  CLI::App* vc = app.add_subcommand("verify-comparison", "grid check of the comparison bound");
  add_common(vc);
  vc->add_option("--xi-grid", cfg.xi_grid, "per-coordinate grid start:stop:count");
  vc->add_option("--offsets", offsets_text, "comma-separated tau offsets above the boundary");

  CLI::App* vcf = app.add_subcommand("verify-closed-form",
                                     "compare the unperturbed density to its closed form");
  add_common(vcf);
  vcf->add_option("--points", cfg.points, "number of random interior points");

  CLI::App* ext = app.add_subcommand("extension-sweep", "sharp-constant sweep toward pi/sqrt(3)");
  add_common(ext);
  ext->add_option("--case", cfg.ext_case, "extremizer case: i | ii");
  ext->add_option("--centers", centers_text, "comma-separated concentration centers");
  ext->add_option("--a-list", a_list_text, "comma-separated exponents");
  ext->add_flag("--auto-a", cfg.auto_a, "pick exponents by the selection rule (case ii)");

  CLI::App* bd = app.add_subcommand("boundary", "boundary value of the density");
  add_common(bd);
  bd->add_option("--xi", xi_text, "comma-separated xi components");
  bd->add_option("--weight", cfg.weight, "none | gaussian");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    help_requested = true;
    return cfg;
  } catch (const CLI::ParseError& e) {
    throw ConfigError(e.what());
  }

  for (CLI::App* sub : {density, oracle, vc, vcf, ext, bd})
    if (sub->parsed()) cfg.subcommand = sub->get_name();
  if (cfg.subcommand.empty()) throw ConfigError("a subcommand is required (see --help)");

  if (!xi_text.empty()) cfg.xi = parse_csv_doubles(xi_text);
  if (!offsets_text.empty()) cfg.offsets = parse_csv_doubles(offsets_text);
  if (!centers_text.empty()) cfg.centers = parse_csv_doubles(centers_text);
  if (!a_list_text.empty()) cfg.a_list = parse_csv_doubles(a_list_text);
  if (!params_text.empty()) cfg.pert_params = parse_csv_doubles(params_text);
  return cfg;
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    if (cfg.dry_run) {
      out << config_to_json(cfg).dump(2) << "\n";
      return 0;
    }
    std::ofstream file;
    std::ostream* target = &out;
    if (cfg.out_path != "-" && !cfg.out_path.empty()) {
      file.open(cfg.out_path);
      if (!file) throw ConfigError("cannot open output path '" + cfg.out_path + "'");
      target = &file;
    }
    if (cfg.subcommand == "density") return cmd_density(cfg, *target);
    if (cfg.subcommand == "oracle") return cmd_oracle(cfg, *target);
    if (cfg.subcommand == "verify-comparison") return cmd_verify_comparison(cfg, *target, err);
    if (cfg.subcommand == "verify-closed-form") return cmd_verify_closed_form(cfg, *target, err);
    if (cfg.subcommand == "extension-sweep") return cmd_extension_sweep(cfg, *target, err);
    if (cfg.subcommand == "boundary") return cmd_boundary(cfg, *target);
    throw ConfigError("unknown subcommand '" + cfg.subcommand + "'");
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ContractViolation& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    err << "domain error: " << e.what() << "\n";
    return 2;
  } catch (const ConvergenceError& e) {
    err << "convergence error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace convo
