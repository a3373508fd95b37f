// Command-line front end: subcommand configs, JSON/CSV emission, and exit
// status semantics (0 ok, 1 verification failure, 2 usage/config error).
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace convo {

struct RunConfig {
  std::string subcommand;

  int dim = 1;
  int n = 3;
  std::string perturbation = "zero";
  std::vector<double> pert_params;

  std::vector<double> xi;  // defaults to the origin
  double tau = 1.0;
  std::string tau_grid;    // "start:stop:count" for tau sweeps (density)
  std::string weight = "none";

  int sphere_nodes = 0;    // 0 = dimension-dependent default
  std::uint64_t seed = 0;
  double tol = 1e-8;

  // oracle
  std::string method = "thin-shell";
  double epsilon = 1e-3;
  double box_radius = 0.0;
  std::uint64_t samples = 1000000;

  // verify-comparison / verify-closed-form
  std::string xi_grid = "-2:2:9";
  std::vector<double> offsets = {0.1, 1.0, 10.0};
  int points = 50;

  // extension-sweep
  std::string ext_case = "i";
  std::vector<double> centers;  // empty = per-case default (0 for case i,
                                // escaping powers of two for case ii)
  std::vector<double> a_list = {1, 2, 4, 8, 16, 32};
  bool auto_a = false;

  std::string out_path = "-";
  std::string format;      // "", "json" or "csv"
  bool dry_run = false;
};

/// Parses argv (including an optional --config JSON file whose values flags
/// override). Throws ConfigError on bad usage; `help_requested` is set when
/// the invocation only asked for help text (already written to out).
RunConfig parse_cli(int argc, const char* const* argv, std::ostream& out, bool& help_requested);

/// Executes a parsed config. Returns the process exit status.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// 17-significant-digit scientific notation used for all CSV numbers.
std::string fmt_sci(double v);

std::vector<double> parse_csv_doubles(const std::string& text);
std::vector<double> parse_grid(const std::string& text);  // "start:stop:count"

}  // namespace convo
