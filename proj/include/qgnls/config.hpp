#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qgnls/error.hpp"
#include "qgnls/solvers.hpp"
#include "qgnls/sweep.hpp"

namespace qgnls {

enum class RunMode { Solve, Sweep, Peaked, Spectrum, ProfileCheck };

std::string to_string(RunMode m);
RunMode parse_run_mode(const std::string& s);  // ConfigError on unknown names

struct SpectrumSettings {
  std::string base = "bump";  // bump | zero | solution
  // Bump center: a vertex, or a point (edge, x). Defaults to the vertex of highest degree.
  std::optional<std::string> center_vertex;
  std::optional<std::string> center_edge;
  double center_x = 0.0;
  int count = 0;  // 0: degree of the center + 1 for vertex centers, 3 otherwise
  double kernel_tol = 1e-3;
  double h_target = 0.025;
  bool dump_vectors = false;
};

struct LambdaRange {
  double min = 0.0;
  double max = 0.0;
  int count = 0;
  bool log = true;
};

std::vector<double> expand_range(const LambdaRange& r);

struct ExperimentConfig {
  std::filesystem::path graph;
  double p = 3.0;
  std::vector<double> lambdas;
  std::optional<RunMode> mode;
  std::optional<PeakSpec> peaks;
  SolverConfig solver;
  SweepKind sweep_kind = SweepKind::LeastAction;
  SweepOptions sweep;
  SpectrumSettings spectrum;
  std::filesystem::path output = "out";
};

// Strict JSON parsing: unknown keys, wrong types and invalid values raise
// ConfigError naming the field and its line. Relative graph paths resolve
// against `base_dir`.
ExperimentConfig parse_config_text(const std::string& text, const std::string& origin,
                                   const std::filesystem::path& base_dir = {});
ExperimentConfig parse_config(const std::filesystem::path& file);

// Mode requirements, positive λ values, graph file presence.
void validate_config(const ExperimentConfig& config);

nlohmann::json to_json(const ExperimentConfig& config);

// Parses "v1,v2,..." into a PeakSpec with default cutoffs.
PeakSpec parse_peak_list(const std::string& list);
// "min:max:count[:log|:lin]".
LambdaRange parse_lambda_range(const std::string& text);

// Runs the experiment, writing reports into config.output. Returns the process
// exit status: 0 on success, 2 for configuration errors, 1 otherwise; failures
// also produce error.json.
int run(const ExperimentConfig& config, std::ostream& log);

// Writes {"error", "message", "lambda"} to dir/error.json, best effort.
void write_error_json(const std::filesystem::path& dir, const Error& err, std::optional<double> lambda);

}  // namespace qgnls
