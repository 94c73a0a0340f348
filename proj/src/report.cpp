#include "qgnls/report.hpp"

#include <cmath>
#include <fstream>

#include "qgnls/error.hpp"
#include "qgnls/numfmt.hpp"

namespace qgnls {

namespace {

using nlohmann::json;

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
  return out;
}

json optional_fit(const std::optional<LineFit>& fit) { return fit ? to_json(*fit) : json(nullptr); }

}  // namespace

json json_number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json to_json(const FunctionalReport& r) {
  return {{"action_I", json_number(r.action_I)},
          {"action_J", json_number(r.action_J)},
          {"mass_sq", json_number(r.mass_sq)},
          {"lambda_norm_sq", json_number(r.lambda_norm_sq)},
          {"nehari_defect", json_number(r.nehari_defect)}};
}

json to_json(const MetricGraph& g, const PeakInfo& pk) {
  return {{"edge", g.edge(pk.location.edge).id},
          {"x", pk.location.x},
          {"value", pk.value},
          {"is_vertex", pk.is_vertex},
          {"vertex", pk.vertex ? json(g.vertex_id(*pk.vertex)) : json(nullptr)}};
}

json to_json(const LineFit& fit) {
  return {{"slope", json_number(fit.slope)},
          {"intercept", json_number(fit.intercept)},
          {"r_squared", json_number(fit.r_squared)}};
}

json to_json(const SolutionRecord& rec) {
  const Mesh& m = rec.mesh();
  json peaks = json::array();
  for (const auto& pk : rec.peaks) peaks.push_back(to_json(m.graph(), pk));
  return {{"lambda", rec.params.lambda},
          {"p", rec.params.p},
          {"branch", rec.branch},
          {"mesh", {{"h_target", m.h_target()}, {"max_h", m.max_h()}, {"dofs", m.dof_count()}}},
          {"functionals", to_json(rec.functionals)},
          {"nehari_action", json_number(rec.nehari_action)},
          {"lambda_norm", json_number(rec.lambda_norm)},
          {"residual_norm", json_number(rec.residual_norm)},
          {"newton_iters", rec.newton_iters},
          {"attempts", rec.attempts},
          {"peaks", peaks}};
}

json to_json(const PeakedRecord& rec) {
  const MetricGraph& g = rec.solution.mesh().graph();
  json requested = json::array();
  for (const auto& pk : rec.peaks)
    requested.push_back({{"vertex", g.vertex_id(pk.vertex)}, {"edge", g.edge(pk.edge).id}, {"l_cut", pk.l_cut}});
  return {{"solution", to_json(rec.solution)},
          {"requested_peaks", requested},
          {"ansatz_lambda_norm", json_number(rec.ansatz_lambda_norm)},
          {"correction_norm", json_number(rec.correction_norm)},
          {"residual_R_norm", json_number(rec.residual_R_norm)},
          {"discrete_correction_norm", json_number(rec.discrete_correction_norm)},
          {"discrete_residual_R_norm", json_number(rec.discrete_residual_R_norm)},
          {"correction_iters", rec.correction_iters},
          {"correction_converged", rec.correction_converged}};
}

json to_json(const SweepEntry& e) {
  json rec = nullptr;
  if (e.record) rec = to_json(*e.record);
  if (e.peaked) rec = to_json(*e.peaked);
  return {{"lambda", e.lambda},
          {"status", e.status},
          {"message", e.message},
          {"warm_started", e.warm_started},
          {"fallback_used", e.fallback_used},
          {"nehari_action", json_number(e.nehari_action)},
          {"mass_sq", json_number(e.mass_sq)},
          {"peak_vertex", e.peak_vertex},
          {"profile_error", json_number(e.profile_error)},
          {"c2_hat", json_number(e.c2_hat)},
          {"correction_norm", json_number(e.correction_norm)},
          {"residual_R", json_number(e.residual_R)},
          {"action_gap", json_number(e.action_gap)},
          {"record", rec}};
}

json to_json(const SweepReport& r) {
  json entries = json::array();
  for (const auto& e : r.entries) entries.push_back(to_json(e));
  return {{"p", r.p},
          {"mode", r.mode.label()},
          {"warm_start", r.options.warm_start},
          {"m_infinity", r.m_infinity},
          {"entries", entries},
          {"fits",
           {{"mass_sq", optional_fit(r.mass_fit)},
            {"correction_norm", optional_fit(r.correction_fit)},
            {"residual_R", optional_fit(r.residual_fit)}}}};
}

json to_json(const EigenReport& r, double kernel_tol) {
  json ev = json::array(), res = json::array();
  for (double v : r.eigenvalues) ev.push_back(json_number(v));
  for (double v : r.residuals) res.push_back(json_number(v));
  return {{"eigenvalues", ev},
          {"residuals", res},
          {"kernel_tol", kernel_tol},
          {"kernel_count", kernel_count(r, kernel_tol)},
          {"shift", r.shift},
          {"block_size", r.block_size},
          {"iterations", r.iterations}};
}

const std::vector<std::string>& solution_record_fields() {
  static const std::vector<std::string> f = {"lambda",      "p",           "branch",        "mesh",
                                             "functionals", "nehari_action", "lambda_norm", "residual_norm",
                                             "newton_iters", "attempts",   "peaks"};
  return f;
}

const std::vector<std::string>& peaked_record_fields() {
  static const std::vector<std::string> f = {"solution",
                                             "requested_peaks",
                                             "ansatz_lambda_norm",
                                             "correction_norm",
                                             "residual_R_norm",
                                             "discrete_correction_norm",
                                             "discrete_residual_R_norm",
                                             "correction_iters",
                                             "correction_converged"};
  return f;
}

const std::vector<std::string>& sweep_entry_fields() {
  static const std::vector<std::string> f = {"lambda",        "status",  "message",         "warm_started",
                                             "fallback_used", "nehari_action", "mass_sq",   "peak_vertex",
                                             "profile_error", "c2_hat",  "correction_norm", "residual_R",
                                             "action_gap",    "record"};
  return f;
}

const std::vector<std::string>& sweep_report_fields() {
  static const std::vector<std::string> f = {"p", "mode", "warm_start", "m_infinity", "entries", "fits"};
  return f;
}

const std::vector<std::string>& eigen_report_fields() {
  static const std::vector<std::string> f = {"eigenvalues", "residuals",  "kernel_tol", "kernel_count",
                                             "shift",       "block_size", "iterations"};
  return f;
}

void write_sweep_csv(std::ostream& out, const SweepReport& report) {
  out << "lambda,J,mass_sq,peak_vertex,profile_error,c2_hat,correction_norm,residual_R,status\n";
  for (const auto& e : report.entries) {
    out << format_double(e.lambda) << ',' << format_double(e.nehari_action) << ',' << format_double(e.mass_sq) << ','
        << e.peak_vertex << ',' << format_double(e.profile_error) << ',' << format_double(e.c2_hat) << ','
        << format_double(e.correction_norm) << ',' << format_double(e.residual_R) << ',' << e.status << '\n';
  }
}

std::vector<std::filesystem::path> write_observable_tables(const std::filesystem::path& dir,
                                                           const SweepReport& report) {
  struct Column {
    const char* name;
    double SweepEntry::*field;
  };
  const Column columns[] = {{"J", &SweepEntry::nehari_action},         {"mass_sq", &SweepEntry::mass_sq},
                            {"profile_error", &SweepEntry::profile_error}, {"c2_hat", &SweepEntry::c2_hat},
                            {"correction_norm", &SweepEntry::correction_norm}, {"residual_R", &SweepEntry::residual_R},
                            {"action_gap", &SweepEntry::action_gap}};
  std::vector<std::filesystem::path> written;
  for (const auto& c : columns) {
    bool any = false;
    for (const auto& e : report.entries) any = any || (e.ok() && std::isfinite(e.*(c.field)));
    if (!any) continue;
    const auto path = dir / (std::string(c.name) + ".dat");
    auto out = open_out(path);
    out << "# lambda " << c.name << '\n';
    for (const auto& e : report.entries)
      if (e.ok() && std::isfinite(e.*(c.field))) out << format_double(e.lambda) << ' ' << format_double(e.*(c.field)) << '\n';
    written.push_back(path);
  }
  return written;
}

void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

void write_solution_csv(const std::filesystem::path& path, const DiscreteFunction& u) {
  auto out = open_out(path);
  write_csv(out, u);
}

std::string solution_file_name(double lambda) { return "solution_" + format_double(lambda) + ".csv"; }

}  // namespace qgnls
