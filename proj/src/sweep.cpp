#include "qgnls/sweep.hpp"

#include <cmath>
#include <future>

#include "qgnls/error.hpp"
#include "qgnls/profiles.hpp"

namespace qgnls {

namespace {

bool recoverable(ErrorCode c) {
  return c == ErrorCode::NoConvergence || c == ErrorCode::SingularHessian || c == ErrorCode::OnlyConstantBranchFound;
}

SweepEntry solve_point(const std::shared_ptr<const MetricGraph>& graph, double p, double lambda, const SweepMode& mode,
                       const SolverConfig& config, const DiscreteFunction* initial, bool fallback) {
  SweepEntry entry;
  entry.lambda = lambda;
  const ProblemParams params{lambda, p};
  auto attempt = [&](const DiscreteFunction* start) {
    if (mode.kind == SweepKind::LeastAction)
      entry.record = least_action_solve(graph, params, config, start);
    else
      entry.peaked = peaked_solve(graph, params, mode.peaks, config, start);
  };
  try {
    try {
      entry.warm_started = initial != nullptr;
      attempt(initial);
    } catch (const Error& ex) {
      if (initial == nullptr || !fallback || !recoverable(ex.code())) throw;
      entry.fallback_used = true;
      entry.warm_started = false;
      attempt(nullptr);
    }
    summarize_entry(entry, p);
  } catch (const Error& ex) {
    entry.status = std::string(to_string(ex.code()));
    entry.message = ex.what();
  }
  return entry;
}

std::optional<LineFit> try_fit(const SweepReport& r, Observable o) {
  try {
    return fit_scaling(r, o);
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace

std::string SweepMode::label() const {
  if (kind == SweepKind::LeastAction) return "least_action";
  return "peaked(" + std::to_string(peaks.peaks.size()) + ")";
}

const SolutionRecord* SweepEntry::solution() const noexcept {
  if (record) return &*record;
  if (peaked) return &peaked->solution;
  return nullptr;
}

Observable parse_observable(const std::string& name) {
  if (name == "mass_sq") return Observable::MassSq;
  if (name == "correction_norm") return Observable::CorrectionNorm;
  if (name == "residual_R") return Observable::ResidualR;
  throw Error(ErrorCode::InvalidArgument, "unknown observable '" + name + "'");
}

std::string to_string(Observable o) {
  switch (o) {
    case Observable::MassSq: return "mass_sq";
    case Observable::CorrectionNorm: return "correction_norm";
    case Observable::ResidualR: return "residual_R";
  }
  return "?";
}

LineFit fit_scaling(const SweepReport& report, Observable observable) {
  std::vector<double> x, y;
  for (const auto& e : report.entries) {
    if (!e.ok()) continue;
    double v = SweepEntry::nan;
    switch (observable) {
      case Observable::MassSq: v = e.mass_sq; break;
      case Observable::CorrectionNorm: v = e.correction_norm; break;
      case Observable::ResidualR: v = e.residual_R; break;
    }
    if (!std::isfinite(v)) continue;
    x.push_back(e.lambda);
    y.push_back(v);
  }
  if (x.size() < 3)
    throw Error(ErrorCode::InsufficientData, to_string(observable) + ": fewer than 3 sweep entries carry a value");
  return loglog_fit(x, y);
}

double action_gap(const SolutionRecord& record, double p) {
  return record.nehari_action - soliton_norms(p).m_infinity;
}

void summarize_entry(SweepEntry& entry, double p) {
  const SolutionRecord* rec = entry.solution();
  if (rec == nullptr) return;
  const MetricGraph& g = rec->mesh().graph();
  entry.nehari_action = rec->nehari_action;
  entry.mass_sq = rec->functionals.mass_sq;
  entry.action_gap = action_gap(*rec, p);
  if (entry.peaked) {
    entry.correction_norm = entry.peaked->correction_norm;
    entry.residual_R = entry.peaked->residual_R_norm;
  }

  std::optional<std::size_t> vertex;
  if (!rec->peaks.empty() && rec->peaks.front().is_vertex) vertex = rec->peaks.front().vertex;
  if (!vertex || g.degree(*vertex) != 1) return;
  entry.peak_vertex = g.vertex_id(*vertex);
  entry.profile_error = profile_error(rec->u, rec->params, *vertex);
  const std::size_t edge = g.incident(*vertex).front().edge;
  const double l = g.edge(edge).length;
  try {
    entry.c2_hat = decay_fit(rec->u, rec->params, edge, *vertex, 0.25 * l, 0.375 * l).c2;
  } catch (const Error&) {
    entry.c2_hat = SweepEntry::nan;
  }
}

SweepReport continuation_sweep(std::shared_ptr<const MetricGraph> graph, double p, const std::vector<double>& lambdas,
                               const SweepMode& mode, const SolverConfig& config, const SweepOptions& options) {
  require(lambdas.size() >= 3, "continuation_sweep: need at least 3 λ values");
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    require(std::isfinite(lambdas[i]) && lambdas[i] > 0.0, "continuation_sweep: λ values must be positive");
    require(i == 0 || lambdas[i] > lambdas[i - 1], "continuation_sweep: λ values must be strictly ascending");
  }
  SweepReport report;
  report.p = p;
  report.mode = mode;
  report.options = options;
  report.m_infinity = soliton_norms(p).m_infinity;

  if (options.parallel && !options.warm_start) {
    std::vector<std::future<SweepEntry>> jobs;
    for (double lambda : lambdas)
      jobs.push_back(std::async(std::launch::async, solve_point, graph, p, lambda, mode, config, nullptr, false));
    for (auto& j : jobs) report.entries.push_back(j.get());
  } else {
    std::optional<DiscreteFunction> previous;
    double previous_lambda = 0.0;
    bool aborted = false;
    for (double lambda : lambdas) {
      if (aborted) {
        SweepEntry skipped;
        skipped.lambda = lambda;
        skipped.status = "aborted";
        skipped.message = "branch aborted after a peak-set mismatch";
        report.entries.push_back(std::move(skipped));
        continue;
      }
      std::optional<DiscreteFunction> start;
      if (options.warm_start && previous) {
        const double scale = std::pow(lambda / previous_lambda, 1.0 / (p - 1.0));
        start = DiscreteFunction(previous->mesh_ptr(), scale * previous->values());
      }
      SweepEntry entry =
          solve_point(graph, p, lambda, mode, config, start ? &*start : nullptr, options.ansatz_fallback);
      if (entry.ok()) {
        previous = entry.solution()->u;
        previous_lambda = lambda;
      } else if (entry.status == to_string(ErrorCode::PeakSetMismatch)) {
        aborted = true;
      }
      report.entries.push_back(std::move(entry));
    }
  }
  report.mass_fit = try_fit(report, Observable::MassSq);
  if (mode.kind == SweepKind::Peaked) {
    report.correction_fit = try_fit(report, Observable::CorrectionNorm);
    report.residual_fit = try_fit(report, Observable::ResidualR);
  }
  return report;
}

}  // namespace qgnls
