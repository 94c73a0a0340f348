#include "qgnls/config.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "qgnls/error.hpp"
#include "qgnls/numfmt.hpp"
#include "qgnls/report.hpp"
#include "qgnls/spectral.hpp"

namespace qgnls {

namespace {

using nlohmann::json;

// Field-level diagnostics with the line of the key's first occurrence.
class Diagnostics {
 public:
  Diagnostics(const std::string& text, std::string origin) : text_(text), origin_(std::move(origin)) {}

  [[noreturn]] void fail(const std::string& field, const std::string& msg) const {
    std::string where = origin_;
    const std::string key = field.substr(field.find_last_of('.') + 1);
    const auto pos = text_.find("\"" + key.substr(0, key.find('[')) + "\"");
    if (pos != std::string::npos)
      where += ":" + std::to_string(1 + std::count(text_.begin(), text_.begin() + static_cast<long>(pos), '\n'));
    throw Error(ErrorCode::ConfigError, where + ": field '" + field + "': " + msg);
  }

  void only_keys(const json& obj, const std::string& field, std::initializer_list<const char*> allowed) const {
    if (!obj.is_object()) fail(field, "must be an object");
    for (const auto& [key, _] : obj.items()) {
      bool ok = false;
      for (const char* a : allowed) ok = ok || key == a;
      if (!ok) fail(field.empty() ? key : field + "." + key, "unknown key");
    }
  }

  double number(const json& v, const std::string& field) const {
    if (!v.is_number()) fail(field, "must be a number");
    return v.get<double>();
  }
  double positive(const json& v, const std::string& field) const {
    const double x = number(v, field);
    if (!(std::isfinite(x) && x > 0.0)) fail(field, "must be positive, got " + format_double(x));
    return x;
  }
  int integer(const json& v, const std::string& field, int min) const {
    if (!v.is_number_integer()) fail(field, "must be an integer");
    const auto x = v.get<long long>();
    if (x < min) fail(field, "must be >= " + std::to_string(min));
    return static_cast<int>(x);
  }
  bool boolean(const json& v, const std::string& field) const {
    if (!v.is_boolean()) fail(field, "must be true or false");
    return v.get<bool>();
  }
  std::string string(const json& v, const std::string& field) const {
    if (!v.is_string()) fail(field, "must be a string");
    return v.get<std::string>();
  }

 private:
  const std::string& text_;
  std::string origin_;
};

PeakSpec parse_peaks(const json& v, const Diagnostics& d) {
  if (!v.is_array()) d.fail("peaks", "must be an array");
  PeakSpec spec;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string field = "peaks[" + std::to_string(i) + "]";
    if (v[i].is_string()) {
      spec.peaks.push_back({v[i].get<std::string>(), std::nullopt});
      continue;
    }
    d.only_keys(v[i], field, {"vertex", "l_cut"});
    if (!v[i].contains("vertex")) d.fail(field, "missing 'vertex'");
    PeakRequest r{d.string(v[i]["vertex"], field + ".vertex"), std::nullopt};
    if (v[i].contains("l_cut")) r.l_cut = d.positive(v[i]["l_cut"], field + ".l_cut");
    spec.peaks.push_back(r);
  }
  if (spec.peaks.empty()) d.fail("peaks", "must not be empty");
  return spec;
}

void parse_solver(const json& s, const Diagnostics& d, SolverConfig& c) {
  d.only_keys(s, "solver",
              {"newton_tol", "newton_max_iter", "gradient_flow_step", "gradient_flow_max_iter", "c_mesh", "h_max",
               "random_seed", "max_restarts"});
  if (s.contains("newton_tol")) c.newton_tol = d.positive(s["newton_tol"], "solver.newton_tol");
  if (s.contains("newton_max_iter")) c.newton_max_iter = d.integer(s["newton_max_iter"], "solver.newton_max_iter", 1);
  if (s.contains("gradient_flow_step"))
    c.gradient_flow_step = d.positive(s["gradient_flow_step"], "solver.gradient_flow_step");
  if (s.contains("gradient_flow_max_iter"))
    c.gradient_flow_max_iter = d.integer(s["gradient_flow_max_iter"], "solver.gradient_flow_max_iter", 1);
  if (s.contains("c_mesh")) c.c_mesh = d.positive(s["c_mesh"], "solver.c_mesh");
  if (s.contains("h_max")) c.h_max = d.positive(s["h_max"], "solver.h_max");
  if (s.contains("random_seed")) {
    if (!s["random_seed"].is_number_unsigned()) d.fail("solver.random_seed", "must be a non-negative integer");
    c.random_seed = s["random_seed"].get<std::uint64_t>();
  }
  if (s.contains("max_restarts")) c.max_restarts = d.integer(s["max_restarts"], "solver.max_restarts", 0);
}

void parse_spectrum(const json& s, const Diagnostics& d, SpectrumSettings& c) {
  d.only_keys(s, "spectrum", {"base", "center", "count", "kernel_tol", "h_target", "dump_vectors"});
  if (s.contains("base")) {
    c.base = d.string(s["base"], "spectrum.base");
    if (c.base != "bump" && c.base != "zero" && c.base != "solution")
      d.fail("spectrum.base", "must be one of bump, zero, solution");
  }
  if (s.contains("center")) {
    const json& ctr = s["center"];
    d.only_keys(ctr, "spectrum.center", {"vertex", "edge", "x"});
    if (ctr.contains("vertex") == ctr.contains("edge")) d.fail("spectrum.center", "needs exactly one of vertex, edge");
    if (ctr.contains("vertex")) c.center_vertex = d.string(ctr["vertex"], "spectrum.center.vertex");
    if (ctr.contains("edge")) {
      c.center_edge = d.string(ctr["edge"], "spectrum.center.edge");
      if (!ctr.contains("x")) d.fail("spectrum.center", "edge centers need 'x'");
      c.center_x = d.number(ctr["x"], "spectrum.center.x");
    }
  }
  if (s.contains("count")) c.count = d.integer(s["count"], "spectrum.count", 1);
  if (s.contains("kernel_tol")) c.kernel_tol = d.positive(s["kernel_tol"], "spectrum.kernel_tol");
  if (s.contains("h_target")) c.h_target = d.positive(s["h_target"], "spectrum.h_target");
  if (s.contains("dump_vectors")) c.dump_vectors = d.boolean(s["dump_vectors"], "spectrum.dump_vectors");
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

struct RunState {
  const ExperimentConfig& config;
  std::ostream& log;
  std::shared_ptr<const MetricGraph> graph;
  std::optional<double> current_lambda;
  std::vector<std::string> outputs;

  void emit_json(const std::string& name, const json& j) {
    write_json_file(config.output / name, j);
    outputs.push_back(name);
  }
  void emit_solution(const DiscreteFunction& u, double lambda) {
    const std::string name = solution_file_name(lambda);
    write_solution_csv(config.output / name, u);
    outputs.push_back(name);
  }
};

void run_solve(RunState& st) {
  json records = json::array();
  for (double lambda : st.config.lambdas) {
    st.current_lambda = lambda;
    const SolutionRecord rec = least_action_solve(st.graph, {lambda, st.config.p}, st.config.solver);
    st.log << "lambda=" << format_double(lambda) << " J=" << format_double(rec.nehari_action)
           << " peaks=" << rec.peaks.size() << " newton_iters=" << rec.newton_iters << '\n';
    records.push_back(to_json(rec));
    st.emit_solution(rec.u, lambda);
  }
  st.current_lambda.reset();
  st.emit_json("records.json", records);
}

void run_peaked(RunState& st) {
  json records = json::array();
  for (double lambda : st.config.lambdas) {
    st.current_lambda = lambda;
    const PeakedRecord rec = peaked_solve(st.graph, {lambda, st.config.p}, *st.config.peaks, st.config.solver);
    st.log << "lambda=" << format_double(lambda) << " J=" << format_double(rec.solution.nehari_action)
           << " correction=" << format_double(rec.correction_norm) << " residual_R=" << format_double(rec.residual_R_norm)
           << '\n';
    records.push_back(to_json(rec));
    st.emit_solution(rec.solution.u, lambda);
  }
  st.current_lambda.reset();
  st.emit_json("records.json", records);
}

// Returns the error record of the first failed entry, null when all succeeded.
json run_sweep(RunState& st) {
  SweepMode mode{st.config.sweep_kind, st.config.peaks.value_or(PeakSpec{})};
  const SweepReport rep = continuation_sweep(st.graph, st.config.p, st.config.lambdas, mode, st.config.solver,
                                             st.config.sweep);
  json first_failure = nullptr;
  for (const auto& e : rep.entries) {
    st.log << "lambda=" << format_double(e.lambda) << " status=" << e.status << " J=" << format_double(e.nehari_action)
           << '\n';
    if (const SolutionRecord* s = e.solution()) st.emit_solution(s->u, e.lambda);
    if (!e.ok() && first_failure.is_null())
      first_failure = {{"error", e.status}, {"message", e.message}, {"lambda", e.lambda}};
  }
  {
    std::ofstream out(st.config.output / "sweep.csv", std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot write sweep.csv");
    write_sweep_csv(out, rep);
    st.outputs.push_back("sweep.csv");
  }
  for (const auto& path : write_observable_tables(st.config.output, rep)) st.outputs.push_back(path.filename().string());
  st.emit_json("records.json", to_json(rep));
  return first_failure;
}

void run_profile_check(RunState& st) {
  json entries = json::array();
  json records = json::array();
  const double m_inf = soliton_norms(st.config.p).m_infinity;
  double longest = 0.0;
  for (const auto& t : terminal_vertices(*st.graph)) longest = std::max(longest, st.graph->edge(t.edge).length);
  for (double lambda : st.config.lambdas) {
    st.current_lambda = lambda;
    SweepEntry e;
    e.lambda = lambda;
    e.record = least_action_solve(st.graph, {lambda, st.config.p}, st.config.solver);
    summarize_entry(e, st.config.p);
    const SolutionRecord& rec = *e.record;
    st.log << "lambda=" << format_double(lambda) << " peak=" << (e.peak_vertex.empty() ? "-" : e.peak_vertex)
           << " profile_error=" << format_double(e.profile_error) << " c2_hat=" << format_double(e.c2_hat) << '\n';
    json j = {{"lambda", lambda},
              {"peak_count", rec.peaks.size()},
              {"peak_vertex", e.peak_vertex},
              {"peak_value", rec.peaks.empty() ? json(nullptr) : json(rec.peaks.front().value)},
              {"peak_lower_bound", constant_solution_value(rec.params)},
              {"profile_error", json_number(e.profile_error)},
              {"c2_hat", json_number(e.c2_hat)},
              {"nehari_action", json_number(rec.nehari_action)},
              {"action_gap", json_number(e.action_gap)},
              {"m_infinity", m_inf}};
    if (!e.peak_vertex.empty()) {
      const std::size_t v = st.graph->vertex_index(e.peak_vertex);
      j["peak_edge_length"] = st.graph->edge(st.graph->incident(v).front().edge).length;
      j["longest_terminal_edge"] = longest;
    }
    entries.push_back(j);
    records.push_back(to_json(rec));
    st.emit_solution(rec.u, lambda);
  }
  st.current_lambda.reset();
  st.emit_json("profile_check.json", entries);
  st.emit_json("records.json", records);
}

void run_spectrum(RunState& st) {
  const SpectrumSettings& s = st.config.spectrum;
  const MetricGraph& g = *st.graph;
  const double lambda = st.config.lambdas.empty() ? 1.0 : st.config.lambdas.front();
  st.current_lambda = lambda;
  const ProblemParams params{lambda, st.config.p};

  std::optional<std::size_t> center_vertex;
  std::optional<EdgeCoordinate> center_point;
  if (s.center_edge) {
    const std::size_t e = g.edge_index(*s.center_edge);
    if (s.center_x < 0.0 || s.center_x > g.edge(e).length)
      throw Error(ErrorCode::ConfigError, "spectrum.center.x lies outside edge '" + *s.center_edge + "'");
    center_point = EdgeCoordinate{e, s.center_x};
  } else {
    if (s.center_vertex) {
      center_vertex = g.find_vertex(*s.center_vertex);
      if (!center_vertex) throw Error(ErrorCode::ConfigError, "spectrum.center.vertex '" + *s.center_vertex + "' not in graph");
    } else {
      std::size_t best = 0;
      for (std::size_t v = 1; v < g.vertex_count(); ++v)
        if (g.degree(v) > g.degree(best)) best = v;
      center_vertex = best;
    }
    const EdgeEnd end = g.incident(*center_vertex).front();
    center_point = EdgeCoordinate{end.edge, end.at_a ? 0.0 : g.edge(end.edge).length};
  }

  std::shared_ptr<const Mesh> mesh;
  Vector base;
  if (s.base == "solution") {
    SolutionRecord rec = least_action_solve(st.graph, params, st.config.solver);
    mesh = rec.u.mesh_ptr();
    base = rec.u.values();
  } else {
    mesh = build_mesh(st.graph, st.config.solver.h_target_override.value_or(s.h_target));
    base = s.base == "zero" ? Vector::Zero(static_cast<Eigen::Index>(mesh->dof_count()))
                            : soliton_bump(mesh, params, *center_point).values();
  }
  int count = s.count;
  if (count == 0) count = center_vertex ? static_cast<int>(g.degree(*center_vertex)) + 1 : 3;
  count = std::min<int>(count, static_cast<int>(mesh->dof_count()) - 1);

  EigenOptions opts;
  opts.seed = st.config.solver.random_seed;
  const EigenReport rep = smallest_eigenpairs(linearized_operator(mesh, params, base), count, opts);
  json j = to_json(rep, s.kernel_tol);
  j["lambda"] = lambda;
  j["p"] = st.config.p;
  j["base"] = s.base;
  j["h_target"] = mesh->h_target();
  j["dofs"] = mesh->dof_count();
  j["center"] = center_vertex ? json{{"vertex", g.vertex_id(*center_vertex)}}
                              : json{{"edge", g.edge(center_point->edge).id}, {"x", center_point->x}};
  json sums = nullptr, corr = nullptr;
  if (s.base != "zero") {
    if (center_vertex && g.degree(*center_vertex) >= 2) {
      sums = json::array();
      for (std::size_t i = 0; i < rep.eigenvalues.size(); ++i) {
        if (std::abs(rep.eigenvalues[i]) >= s.kernel_tol) continue;
        double sum = 0.0;
        for (double c : star_coefficients(*mesh, params, rep.eigenvectors[i], *center_vertex)) sum += c;
        sums.push_back(sum);
      }
    } else if (!center_vertex) {
      corr = json::array();
      for (std::size_t i = 0; i < rep.eigenvalues.size(); ++i)
        if (std::abs(rep.eigenvalues[i]) < s.kernel_tol)
          corr.push_back(derivative_correlation(*mesh, params, rep.eigenvectors[i], center_point->edge, center_point->x));
    }
  }
  j["kernel_coefficient_sums"] = sums;
  j["kernel_derivative_correlation"] = corr;
  st.log << "kernel_count(" << format_double(s.kernel_tol) << ")=" << kernel_count(rep, s.kernel_tol) << '\n';
  if (s.dump_vectors) {
    for (std::size_t i = 0; i < rep.eigenvectors.size(); ++i) {
      const std::string name = "eigvec_" + std::to_string(i) + ".csv";
      write_solution_csv(st.config.output / name, DiscreteFunction(mesh, rep.eigenvectors[i]));
      st.outputs.push_back(name);
    }
  }
  st.current_lambda.reset();
  st.emit_json("spectrum.json", j);
}

}  // namespace

std::string to_string(RunMode m) {
  switch (m) {
    case RunMode::Solve: return "solve";
    case RunMode::Sweep: return "sweep";
    case RunMode::Peaked: return "peaked";
    case RunMode::Spectrum: return "spectrum";
    case RunMode::ProfileCheck: return "profile-check";
  }
  return "?";
}

RunMode parse_run_mode(const std::string& s) {
  for (RunMode m : {RunMode::Solve, RunMode::Sweep, RunMode::Peaked, RunMode::Spectrum, RunMode::ProfileCheck})
    if (to_string(m) == s) return m;
  throw Error(ErrorCode::ConfigError, "unknown mode '" + s + "'");
}

std::vector<double> expand_range(const LambdaRange& r) {
  if (!(r.min > 0.0 && r.max >= r.min && std::isfinite(r.max)))
    throw Error(ErrorCode::ConfigError, "lambda_range needs 0 < min <= max");
  if (r.count < 1) throw Error(ErrorCode::ConfigError, "lambda_range.count must be >= 1");
  std::vector<double> out;
  if (r.count == 1) return {r.min};
  for (int i = 0; i < r.count; ++i) {
    const double t = static_cast<double>(i) / (r.count - 1);
    const double v = r.log ? r.min * std::pow(r.max / r.min, t) : r.min + t * (r.max - r.min);
    // 12 significant digits, so 50:400:4 gives 100 rather than 99.99999999999996.
    std::ostringstream os;
    os << std::setprecision(12) << v;
    out.push_back(std::stod(os.str()));
  }
  out.front() = r.min;
  out.back() = r.max;
  return out;
}

ExperimentConfig parse_config_text(const std::string& text, const std::string& origin,
                                   const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& ex) {
    const auto upto = std::min<std::size_t>(ex.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<long>(upto), '\n');
    throw Error(ErrorCode::ConfigError, origin + ":" + std::to_string(line) + ": malformed JSON");
  }
  const Diagnostics d(text, origin);
  d.only_keys(j, "", {"graph", "p", "lambda", "lambda_range", "mode", "peaks", "h_target", "solver", "sweep",
                      "spectrum", "output"});

  ExperimentConfig c;
  if (j.contains("graph")) {
    std::filesystem::path gp = d.string(j["graph"], "graph");
    c.graph = gp.is_relative() && !base_dir.empty() ? base_dir / gp : gp;
  }
  if (j.contains("p")) {
    c.p = d.number(j["p"], "p");
    if (!(c.p > 1.0 && std::isfinite(c.p))) d.fail("p", "must be > 1");
  }
  if (j.contains("lambda") && j.contains("lambda_range")) d.fail("lambda_range", "conflicts with 'lambda'");
  if (j.contains("lambda")) {
    const json& l = j["lambda"];
    if (l.is_number()) {
      c.lambdas = {d.positive(l, "lambda")};
    } else if (l.is_array()) {
      for (std::size_t i = 0; i < l.size(); ++i)
        c.lambdas.push_back(d.positive(l[i], "lambda[" + std::to_string(i) + "]"));
    } else {
      d.fail("lambda", "must be a number or an array of numbers");
    }
  }
  if (j.contains("lambda_range")) {
    const json& r = j["lambda_range"];
    d.only_keys(r, "lambda_range", {"min", "max", "count", "log"});
    for (const char* k : {"min", "max", "count"})
      if (!r.contains(k)) d.fail(std::string("lambda_range.") + k, "missing");
    LambdaRange lr;
    lr.min = d.positive(r["min"], "lambda_range.min");
    lr.max = d.positive(r["max"], "lambda_range.max");
    lr.count = d.integer(r["count"], "lambda_range.count", 1);
    if (r.contains("log")) lr.log = d.boolean(r["log"], "lambda_range.log");
    if (lr.max < lr.min) d.fail("lambda_range.max", "must be >= min");
    c.lambdas = expand_range(lr);
  }
  if (j.contains("mode")) {
    try {
      c.mode = parse_run_mode(d.string(j["mode"], "mode"));
    } catch (const Error&) {
      d.fail("mode", "must be one of solve, sweep, peaked, spectrum, profile-check");
    }
  }
  if (j.contains("peaks")) c.peaks = parse_peaks(j["peaks"], d);
  if (j.contains("h_target")) c.solver.h_target_override = d.positive(j["h_target"], "h_target");
  if (j.contains("solver")) parse_solver(j["solver"], d, c.solver);
  if (j.contains("sweep")) {
    const json& s = j["sweep"];
    d.only_keys(s, "sweep", {"mode", "warm_start", "parallel", "ansatz_fallback"});
    if (s.contains("mode")) {
      const std::string m = d.string(s["mode"], "sweep.mode");
      if (m == "least_action")
        c.sweep_kind = SweepKind::LeastAction;
      else if (m == "peaked")
        c.sweep_kind = SweepKind::Peaked;
      else
        d.fail("sweep.mode", "must be least_action or peaked");
    }
    if (s.contains("warm_start")) c.sweep.warm_start = d.boolean(s["warm_start"], "sweep.warm_start");
    if (s.contains("parallel")) c.sweep.parallel = d.boolean(s["parallel"], "sweep.parallel");
    if (s.contains("ansatz_fallback")) c.sweep.ansatz_fallback = d.boolean(s["ansatz_fallback"], "sweep.ansatz_fallback");
  }
  if (j.contains("spectrum")) parse_spectrum(j["spectrum"], d, c.spectrum);
  if (j.contains("output")) c.output = d.string(j["output"], "output");
  return c;
}

ExperimentConfig parse_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot open config file '" + file.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), file.string(), file.parent_path());
}

void validate_config(const ExperimentConfig& c) {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::ConfigError, msg); };
  if (!c.mode) fail("no mode given");
  if (c.graph.empty()) fail("no graph file given");
  if (!std::filesystem::is_regular_file(c.graph)) fail("graph file '" + c.graph.string() + "' does not exist");
  if (!(c.p > 1.0 && std::isfinite(c.p))) fail("p must be > 1");
  for (std::size_t i = 0; i < c.lambdas.size(); ++i)
    if (!(std::isfinite(c.lambdas[i]) && c.lambdas[i] > 0.0))
      fail("lambda[" + std::to_string(i) + "] = " + format_double(c.lambdas[i]) + " must be positive");
  if (*c.mode != RunMode::Spectrum && c.lambdas.empty()) fail("mode '" + to_string(*c.mode) + "' needs lambda values");
  if (*c.mode == RunMode::Peaked && !c.peaks) fail("mode 'peaked' needs a peak list");
  if (*c.mode == RunMode::Sweep) {
    if (c.lambdas.size() < 3) fail("mode 'sweep' needs at least 3 lambda values");
    for (std::size_t i = 1; i < c.lambdas.size(); ++i)
      if (!(c.lambdas[i] > c.lambdas[i - 1])) fail("sweep lambda values must be strictly ascending");
    if (c.sweep_kind == SweepKind::Peaked && !c.peaks) fail("peaked sweeps need a peak list");
  }
  try {
    c.solver.validate();
  } catch (const Error& ex) {
    fail(std::string("solver: ") + ex.what());
  }
}

json to_json(const ExperimentConfig& c) {
  json peaks = nullptr;
  if (c.peaks) {
    peaks = json::array();
    for (const auto& r : c.peaks->peaks)
      peaks.push_back({{"vertex", r.vertex}, {"l_cut", r.l_cut ? json(*r.l_cut) : json(nullptr)}});
  }
  const SolverConfig& s = c.solver;
  return {{"graph", c.graph.string()},
          {"p", c.p},
          {"lambda", c.lambdas},
          {"mode", c.mode ? json(to_string(*c.mode)) : json(nullptr)},
          {"peaks", peaks},
          {"h_target", s.h_target_override ? json(*s.h_target_override) : json(nullptr)},
          {"solver",
           {{"newton_tol", s.newton_tol},
            {"newton_max_iter", s.newton_max_iter},
            {"gradient_flow_step", s.gradient_flow_step},
            {"gradient_flow_max_iter", s.gradient_flow_max_iter},
            {"c_mesh", s.c_mesh},
            {"h_max", s.h_max},
            {"random_seed", s.random_seed},
            {"max_restarts", s.max_restarts}}},
          {"sweep",
           {{"mode", c.sweep_kind == SweepKind::LeastAction ? "least_action" : "peaked"},
            {"warm_start", c.sweep.warm_start},
            {"parallel", c.sweep.parallel},
            {"ansatz_fallback", c.sweep.ansatz_fallback}}},
          {"spectrum",
           {{"base", c.spectrum.base},
            {"center_vertex", c.spectrum.center_vertex ? json(*c.spectrum.center_vertex) : json(nullptr)},
            {"center_edge", c.spectrum.center_edge ? json(*c.spectrum.center_edge) : json(nullptr)},
            {"center_x", c.spectrum.center_x},
            {"count", c.spectrum.count},
            {"kernel_tol", c.spectrum.kernel_tol},
            {"h_target", c.spectrum.h_target},
            {"dump_vectors", c.spectrum.dump_vectors}}},
          {"output", c.output.string()}};
}

PeakSpec parse_peak_list(const std::string& list) {
  PeakSpec spec;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) throw Error(ErrorCode::ConfigError, "empty vertex id in peak list '" + list + "'");
    spec.peaks.push_back({item, std::nullopt});
  }
  if (spec.peaks.empty()) throw Error(ErrorCode::ConfigError, "empty peak list");
  return spec;
}

LambdaRange parse_lambda_range(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() < 3 || parts.size() > 4)
    throw Error(ErrorCode::ConfigError, "lambda range '" + text + "' must be min:max:count[:log|:lin]");
  LambdaRange r;
  try {
    std::size_t used = 0;
    r.min = std::stod(parts[0], &used);
    if (used != parts[0].size()) throw std::invalid_argument("min");
    r.max = std::stod(parts[1], &used);
    if (used != parts[1].size()) throw std::invalid_argument("max");
    r.count = std::stoi(parts[2], &used);
    if (used != parts[2].size()) throw std::invalid_argument("count");
  } catch (const std::exception&) {
    throw Error(ErrorCode::ConfigError, "lambda range '" + text + "' has a malformed number");
  }
  if (parts.size() == 4) {
    if (parts[3] == "log")
      r.log = true;
    else if (parts[3] == "lin")
      r.log = false;
    else
      throw Error(ErrorCode::ConfigError, "lambda range spacing must be 'log' or 'lin'");
  }
  expand_range(r);
  return r;
}

void write_error_json(const std::filesystem::path& dir, const Error& err, std::optional<double> lambda) {
  try {
    std::filesystem::create_directories(dir);
    write_json_file(dir / "error.json", {{"error", std::string(to_string(err.code()))},
                                         {"message", err.what()},
                                         {"lambda", lambda ? json(*lambda) : json(nullptr)}});
  } catch (...) {
  }
}

int run(const ExperimentConfig& config, std::ostream& log) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::string started = utc_timestamp();
  RunState st{config, log, nullptr, std::nullopt, {}};
  int status = 0;
  json error = nullptr;
  try {
    validate_config(config);
    std::error_code ec;
    std::filesystem::create_directories(config.output, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create output directory '" + config.output.string() + "'");
    st.graph = std::make_shared<const MetricGraph>(load_graph(config.graph));
    switch (*config.mode) {
      case RunMode::Solve: run_solve(st); break;
      case RunMode::Peaked: run_peaked(st); break;
      case RunMode::Sweep:
        error = run_sweep(st);
        if (!error.is_null()) {
          status = 1;
          write_json_file(config.output / "error.json", error);
        }
        break;
      case RunMode::Spectrum: run_spectrum(st); break;
      case RunMode::ProfileCheck: run_profile_check(st); break;
    }
  } catch (const Error& ex) {
    status = ex.code() == ErrorCode::ConfigError ? 2 : 1;
    log << ex.what() << '\n';
    write_error_json(config.output, ex, st.current_lambda);
    error = {{"error", std::string(to_string(ex.code()))}, {"message", ex.what()}};
  }
  if (std::filesystem::is_directory(config.output)) {
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    try {
      write_json_file(config.output / "manifest.json", {{"tool", "qgnls"},
                                                        {"version", QGNLS_VERSION},
                                                        {"started_at", started},
                                                        {"wall_time_s", wall},
                                                        {"seed", config.solver.random_seed},
                                                        {"config", to_json(config)},
                                                        {"outputs", st.outputs},
                                                        {"exit_status", status},
                                                        {"error", error}});
    } catch (const Error& ex) {
      log << ex.what() << '\n';
      if (status == 0) status = 1;
    }
  }
  return status;
}

}  // namespace qgnls
