#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qgnls/config.hpp"
#include "qgnls/error.hpp"

namespace {

struct Flags {
  std::string config;
  std::string graph;
  std::optional<double> p;
  std::vector<double> lambdas;
  std::string lambda_range;
  std::optional<double> h_target;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string peaks;
  std::string sweep_mode;
  bool no_warm_start = false;
  bool parallel = false;
  std::string base;
  std::string center;
  std::optional<int> count;
  std::optional<double> kernel_tol;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "JSON experiment config");
  cmd->add_option("--graph", f.graph, "graph JSON file");
  cmd->add_option("--p", f.p, "nonlinearity exponent (> 1)");
  cmd->add_option("--lambda", f.lambdas, "lambda value(s), comma separated")->delimiter(',');
  cmd->add_option("--lambda-range", f.lambda_range, "min:max:count[:log|:lin]");
  cmd->add_option("--h-target", f.h_target, "mesh size, overrides min(h_max, c_mesh/sqrt(lambda))");
  cmd->add_option("--seed", f.seed, "random seed for restarts");
  cmd->add_option("--out", f.out, "output directory (default: out)");
  cmd->add_option("--peaks", f.peaks, "terminal vertices v1,v2,... for peaked solutions");
}

qgnls::ExperimentConfig build_config(const Flags& f, qgnls::RunMode mode) {
  qgnls::ExperimentConfig c = f.config.empty() ? qgnls::ExperimentConfig{} : qgnls::parse_config(f.config);
  c.mode = mode;
  if (!f.graph.empty()) c.graph = f.graph;
  if (f.p) c.p = *f.p;
  if (!f.lambdas.empty() && !f.lambda_range.empty())
    throw qgnls::Error(qgnls::ErrorCode::ConfigError, "--lambda and --lambda-range are exclusive");
  if (!f.lambdas.empty()) c.lambdas = f.lambdas;
  if (!f.lambda_range.empty()) c.lambdas = qgnls::expand_range(qgnls::parse_lambda_range(f.lambda_range));
  if (f.h_target) c.solver.h_target_override = *f.h_target;
  if (f.seed) c.solver.random_seed = *f.seed;
  if (!f.out.empty()) c.output = f.out;
  if (!f.peaks.empty()) c.peaks = qgnls::parse_peak_list(f.peaks);
  if (!f.sweep_mode.empty()) {
    if (f.sweep_mode == "least_action")
      c.sweep_kind = qgnls::SweepKind::LeastAction;
    else if (f.sweep_mode == "peaked")
      c.sweep_kind = qgnls::SweepKind::Peaked;
    else
      throw qgnls::Error(qgnls::ErrorCode::ConfigError, "--sweep-mode must be least_action or peaked");
  } else if (mode == qgnls::RunMode::Sweep && !f.peaks.empty()) {
    c.sweep_kind = qgnls::SweepKind::Peaked;
  }
  if (f.no_warm_start) c.sweep.warm_start = false;
  if (f.parallel) c.sweep.parallel = true;
  if (!f.base.empty()) c.spectrum.base = f.base;
  if (!f.center.empty()) {
    c.spectrum.center_vertex = f.center;
    c.spectrum.center_edge.reset();
  }
  if (f.count) c.spectrum.count = *f.count;
  if (f.kernel_tol) c.spectrum.kernel_tol = *f.kernel_tol;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Positive solutions of -u'' + lambda u = (u+)^p on metric graphs with Kirchhoff conditions"};
  app.set_version_flag("--version", QGNLS_VERSION);
  app.footer(
      "Solver defaults: newton_tol=1e-10 newton_max_iter=50 gradient_flow_step=0.5\n"
      "  gradient_flow_max_iter=5000 c_mesh=0.1 h_max=0.05 random_seed=0 max_restarts=5\n"
      "Spectrum defaults: base=bump h_target=0.025 kernel_tol=1e-3\n"
      "Precedence: flags > config file > defaults. Exit codes: 0 ok, 1 solver error, 2 config error.");
  app.require_subcommand(1);

  Flags f;
  struct Sub {
    const char* name;
    const char* help;
    qgnls::RunMode mode;
  };
  const Sub subs[] = {{"solve", "least-action solution for each lambda", qgnls::RunMode::Solve},
                      {"sweep", "warm-started continuation in lambda", qgnls::RunMode::Sweep},
                      {"peaked", "solution peaked at the given terminal vertices", qgnls::RunMode::Peaked},
                      {"spectrum", "low eigenvalues of the linearized operator", qgnls::RunMode::Spectrum},
                      {"profile-check", "peak location, profile error and decay of least-action solutions",
                       qgnls::RunMode::ProfileCheck}};
  std::vector<std::pair<CLI::App*, qgnls::RunMode>> commands;
  for (const auto& s : subs) {
    CLI::App* cmd = app.add_subcommand(s.name, s.help);
    add_common(cmd, f);
    if (s.mode == qgnls::RunMode::Sweep) {
      cmd->add_option("--sweep-mode", f.sweep_mode, "least_action or peaked");
      cmd->add_flag("--no-warm-start", f.no_warm_start, "solve every lambda from scratch");
      cmd->add_flag("--parallel", f.parallel, "solve lambda points concurrently (needs --no-warm-start)");
    }
    if (s.mode == qgnls::RunMode::Spectrum) {
      cmd->add_option("--base", f.base, "base state: bump, zero or solution");
      cmd->add_option("--center", f.center, "vertex at which the bump is centered");
      cmd->add_option("--count", f.count, "number of eigenpairs");
      cmd->add_option("--kernel-tol", f.kernel_tol, "kernel tolerance");
    }
    commands.emplace_back(cmd, s.mode);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  qgnls::RunMode mode = qgnls::RunMode::Solve;
  for (const auto& [cmd, m] : commands)
    if (cmd->parsed()) mode = m;

  qgnls::ExperimentConfig config;
  try {
    config = build_config(f, mode);
  } catch (const qgnls::Error& e) {
    std::cerr << e.what() << '\n';
    qgnls::write_error_json(f.out.empty() ? "out" : f.out, e, std::nullopt);
    return e.code() == qgnls::ErrorCode::ConfigError ? 2 : 1;
  }
  return qgnls::run(config, std::cout);
}
