#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "qgnls/analysis.hpp"
#include "qgnls/solvers.hpp"

namespace qgnls {

enum class SweepKind { LeastAction, Peaked };

struct SweepMode {
  SweepKind kind = SweepKind::LeastAction;
  PeakSpec peaks;  // used when kind == Peaked

  std::string label() const;
};

struct SweepOptions {
  bool warm_start = true;
  // Independent λ points on worker threads; only honored without warm starts.
  bool parallel = false;
  // Retry a failed warm start from the ansatz.
  bool ansatz_fallback = true;
};

struct SweepEntry {
  static constexpr double nan = std::numeric_limits<double>::quiet_NaN();

  double lambda = 0.0;
  std::string status = "ok";  // ok | <ErrorCode> | aborted
  std::string message;
  bool warm_started = false;
  bool fallback_used = false;
  std::optional<SolutionRecord> record;  // least-action mode
  std::optional<PeakedRecord> peaked;    // peaked mode

  double nehari_action = nan;
  double mass_sq = nan;
  std::string peak_vertex;
  double profile_error = nan;
  double c2_hat = nan;
  double correction_norm = nan;
  double residual_R = nan;
  double action_gap = nan;

  bool ok() const noexcept { return status == "ok"; }
  const SolutionRecord* solution() const noexcept;
};

struct SweepReport {
  double p = 3.0;
  SweepMode mode;
  SweepOptions options;
  double m_infinity = 0.0;
  std::vector<SweepEntry> entries;
  std::optional<LineFit> mass_fit;
  std::optional<LineFit> correction_fit;
  std::optional<LineFit> residual_fit;
};

enum class Observable { MassSq, CorrectionNorm, ResidualR };

Observable parse_observable(const std::string& name);
std::string to_string(Observable o);

// Least-squares slope of log(observable) against log λ over successful entries.
LineFit fit_scaling(const SweepReport& report, Observable observable);

// nehari_action − m_∞(p), with m_∞ recomputed from soliton_norms.
double action_gap(const SolutionRecord& record, double p);

SweepReport continuation_sweep(std::shared_ptr<const MetricGraph> graph, double p, const std::vector<double>& lambdas,
                               const SweepMode& mode, const SolverConfig& config, const SweepOptions& options = {});

// Fills the derived observables of an entry from its record.
void summarize_entry(SweepEntry& entry, double p);

}  // namespace qgnls
