// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "qgnls/config.hpp"
#include "qgnls/error.hpp"
#include "qgnls/profiles.hpp"
#include "qgnls/solvers.hpp"
#include "qgnls/spectral.hpp"
#include "qgnls/sweep.hpp"

using namespace qgnls;
namespace fs = std::filesystem;

namespace {

using GraphPtr = std::shared_ptr<const MetricGraph>;

GraphPtr make(const RawGraph& raw) { return std::make_shared<const MetricGraph>(validate_graph(raw)); }
GraphPtr interval(double l) { return make({{"A", "B"}, {{"e", "A", "B", l}}}); }
GraphPtr star(int n, double l) {
  RawGraph raw;
  raw.vertices.push_back("c");
  for (int i = 0; i < n; ++i) {
    raw.vertices.push_back("l" + std::to_string(i));
    raw.edges.push_back({"e" + std::to_string(i), "c", "l" + std::to_string(i), l});
  }
  return make(raw);
}

// Collects sub-check outcomes for one criterion.
class Checks {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok) {
      pass_ = false;
      failed_ += (failed_.empty() ? "" : "; ") + what;
    }
  }
  void note(const std::string& s) { notes_ += (notes_.empty() ? "" : " ") + s; }
  bool pass() const { return pass_; }
  const std::string& failed() const { return failed_; }
  const std::string& notes() const { return notes_; }

 private:
  bool pass_ = true;
  std::string failed_;
  std::string notes_;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

int failures = 0;

void criterion(int id, const std::string& title, double budget_s, const std::function<void(Checks&)>& body) {
  Checks c;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(c);
  } catch (const std::exception& ex) {
    c.expect(false, std::string("exception: ") + ex.what());
  }
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  c.expect(dt < budget_s, "runtime " + num(dt) + " s over budget " + num(budget_s) + " s");
  if (!c.pass()) ++failures;
  std::cout << (c.pass() ? "PASS" : "FAIL") << "  " << id << "  " << title << "  (" << num(dt) << " s)";
  if (!c.notes().empty()) std::cout << "  " << c.notes();
  if (!c.pass()) std::cout << "  failed: " << c.failed();
  std::cout << std::endl;
}

// Sixth-order central second difference.
double second_difference(double p, double x, double h) {
  auto u = [p](double t) { return soliton(p, t); };
  return (u(x - 3 * h) / 90 - 3 * u(x - 2 * h) / 20 + 1.5 * u(x - h) - 49.0 / 18 * u(x) + 1.5 * u(x + h) -
          3 * u(x + 2 * h) / 20 + u(x + 3 * h) / 90) /
         (h * h);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main() {
  const SolverConfig cfg;

  criterion(1, "soliton correctness", 1.0, [](Checks& c) {
    double worst = 0.0;
    for (double p : {2.0, 3.0, 4.0, 5.0})
      for (int i = 0; i <= 500; ++i) {
        const double x = 0.01 * i;
        const double u = soliton(p, x);
        worst = std::max(worst, std::abs(-second_difference(p, x, 0.01) + u - std::pow(u, p)));
      }
    c.note("max ODE residual " + num(worst));
    c.expect(worst <= 1e-8, "ODE residual " + num(worst) + " > 1e-8");
    const SolitonNorms n = soliton_norms(3.0);
    c.expect(std::abs(n.h1_sq_line - 16.0 / 3.0) < 1e-9, "|U|_H1^2 = " + num(n.h1_sq_line));
    c.expect(std::abs(n.l2_sq_half_line - 2.0) < 1e-9, "|U|_L2(R+)^2 = " + num(n.l2_sq_half_line));
    c.expect(std::abs(n.m_infinity - 2.0 / 3.0) < 1e-9, "m_inf = " + num(n.m_infinity));
  });

  criterion(2, "FEM order on a manufactured Neumann problem", 5.0, [](Checks& c) {
    const double pi = std::numbers::pi;
    auto g = interval(1.0);
    std::vector<double> err;
    for (double h : {0.1, 0.05, 0.025, 0.0125, 0.00625}) {
      auto m = build_mesh(g, h);
      const Vector b = load_vector(*m, [pi](std::size_t, double x) { return (1 + pi * pi) * std::cos(pi * x); });
      err.push_back(l2_error(linear_kirchhoff_solve_dual(m, 1.0, b), [pi](std::size_t, double x) { return std::cos(pi * x); }));
    }
    std::string orders;
    for (std::size_t i = 1; i < err.size(); ++i) {
      const double order = std::log2(err[i - 1] / err[i]);
      orders += num(order) + (i + 1 < err.size() ? "," : "");
      c.expect(std::abs(order - 2.0) <= 0.1, "order " + num(order));
    }
    c.note("orders " + orders);
  });

  criterion(3, "adjoint identity of i*", 5.0, [](Checks& c) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    double worst = 0.0;
    for (const auto& g : {interval(3.0), star(3, 2.0),
                          make({{"x", "y", "z", "t"},
                                {{"xy", "x", "y", 1}, {"yz", "y", "z", 1}, {"zx", "z", "x", 1}, {"tail", "x", "t", 2}}})}) {
      auto m = build_mesh(g, 0.02);
      const double lambda = 10.0;
      KirchhoffSolver ks(m, lambda);
      const auto n = static_cast<Eigen::Index>(m->dof_count());
      for (int k = 0; k < 20; ++k) {
        Vector f(n), v(n);
        for (auto& x : f) x = dist(rng);
        for (auto& x : v) x = dist(rng);
        const Vector u = ks.solve(DiscreteFunction(m, f)).values();
        const double lhs = u.dot(m->stiffness() * v) + lambda * u.dot(m->mass() * v);
        const double rhs = f.dot(m->mass() * v);
        worst = std::max(worst, std::abs(lhs - rhs) / std::abs(rhs));
      }
    }
    c.note("max relative defect " + num(worst));
    c.expect(worst <= 1e-10, "defect " + num(worst));
  });

  criterion(4, "least-action profile on an interval", 60.0, [&](Checks& c) {
    auto g = interval(4.0);
    double err[2] = {0, 0};
    double c2 = 0.0;
    int i = 0;
    for (double lambda : {100.0, 400.0}) {
      const SolutionRecord r = least_action_solve(g, {lambda, 3.0}, cfg);
      SweepEntry e;
      e.lambda = lambda;
      e.record = r;
      summarize_entry(e, 3.0);
      c.expect(r.peaks.size() == 1, "lambda " + num(lambda) + ": " + std::to_string(r.peaks.size()) + " peaks");
      if (!r.peaks.empty()) {
        c.expect(r.peaks[0].is_vertex && g->degree(*r.peaks[0].vertex) == 1,
                 "lambda " + num(lambda) + ": peak not at a terminal vertex");
        c.expect(r.peaks[0].value >= 0.99 * std::sqrt(lambda), "lambda " + num(lambda) + ": peak value too low");
      }
      err[i++] = e.profile_error;
      c2 = e.c2_hat;
    }
    c.note("profile_error(100)=" + std::to_string(err[0]) + " profile_error(400)=" + std::to_string(err[1]) +
           " diff=" + num(err[1] - err[0]) + " c2_hat(400)=" + num(c2));
    c.expect(err[1] < err[0], "profile_error(400) >= profile_error(100)");
    c.expect(err[1] < 0.05, "profile_error(400) >= 0.05");
    c.expect(c2 >= 0.8 && c2 <= 1.05, "c2_hat outside [0.8, 1.05]");
  });

  criterion(5, "action limit", 120.0, [&](Checks& c) {
    auto g = interval(4.0);
    const SweepReport r = continuation_sweep(g, 3.0, {50, 100, 200, 400}, {}, cfg);
    std::string gaps;
    double prev = INFINITY;
    for (const auto& e : r.entries) {
      c.expect(e.ok(), "lambda " + num(e.lambda) + ": " + e.status);
      gaps += num(e.lambda) + ":" + num(e.action_gap) + " ";
      if (!(e.action_gap < prev)) c.expect(false, "gap not decreasing at lambda " + num(e.lambda));
      prev = e.action_gap;
    }
    const double j400 = r.entries.back().nehari_action;
    c.note("gaps " + gaps + "J(400)=" + num(j400));
    c.expect(std::abs(j400 - 2.0 / 3.0) < 0.01, "|J(400) - 2/3| >= 0.01");
  });

  SweepReport peaked[2];
  criterion(6, "mass scaling of peaked solutions", 180.0, [&](Checks& c) {
    auto g = interval(4.0);
    const SweepMode mode{SweepKind::Peaked, {{{"A", std::nullopt}}}};
    const double target[2] = {0.5, 0.0};
    int i = 0;
    for (double p : {3.0, 5.0}) {
      peaked[i] = continuation_sweep(g, p, {50, 100, 200, 400, 800}, mode, cfg);
      for (const auto& e : peaked[i].entries) c.expect(e.ok(), "p " + num(p) + " lambda " + num(e.lambda) + ": " + e.status);
      const LineFit f = fit_scaling(peaked[i], Observable::MassSq);
      c.note("p=" + num(p) + " slope " + num(f.slope));
      c.expect(std::abs(f.slope - target[i]) <= 0.03, "p " + num(p) + " mass slope " + num(f.slope));
      ++i;
    }
    const double m400 = peaked[0].entries[3].mass_sq;
    c.note("mass(400)/(2 sqrt(400)) = " + num(m400 / 40.0));
    c.expect(std::abs(m400 / 40.0 - 1.0) <= 0.05, "mass at 400 off by more than 5%");
  });

  criterion(7, "correction and residual decay", 180.0, [&](Checks& c) {
    for (const auto& rep : peaked) {
      if (rep.entries.empty()) {
        c.expect(false, "no sweep data");
        continue;
      }
      for (Observable o : {Observable::CorrectionNorm, Observable::ResidualR}) {
        double prev = INFINITY;
        for (const auto& e : rep.entries) {
          const double v = (o == Observable::CorrectionNorm ? e.correction_norm : e.residual_R) * e.lambda;
          c.expect(std::isfinite(v) && v < prev,
                   "p " + num(rep.p) + " " + to_string(o) + "*lambda not decreasing at " + num(e.lambda));
          prev = v;
        }
        const LineFit f = fit_scaling(rep, o);
        c.note("p=" + num(rep.p) + " " + to_string(o) + " slope " + num(f.slope));
        c.expect(f.slope <= -1.0, "p " + num(rep.p) + " " + to_string(o) + " slope " + num(f.slope));
      }
    }
  });

  criterion(8, "three-peak solution on a star", 120.0, [&](Checks& c) {
    auto g = star(3, 2.0);
    const ProblemParams params{400.0, 3.0};
    const PeakedRecord three = peaked_solve(g, params, {{{"l0", {}}, {"l1", {}}, {"l2", {}}}}, cfg);
    const PeakedRecord one = peaked_solve(g, params, {{{"l0", {}}}}, cfg);
    std::set<std::string> found;
    for (const auto& pk : three.solution.peaks)
      if (pk.is_vertex) found.insert(g->vertex_id(*pk.vertex));
    c.expect(three.solution.peaks.size() == 3 && found == std::set<std::string>{"l0", "l1", "l2"}, "peak set");
    const double rel = three.correction_norm / three.ansatz_lambda_norm;
    const double m_inf = soliton_norms(3.0).m_infinity;
    c.note("correction/|W|=" + num(rel) + " J3=" + num(three.solution.nehari_action) +
           " J1=" + num(one.solution.nehari_action));
    c.expect(rel <= 1e-2, "relative correction " + num(rel));
    c.expect(three.solution.nehari_action > one.solution.nehari_action, "J3 <= J1");
    c.expect(std::abs(three.solution.nehari_action / (3 * m_inf) - 1.0) <= 0.1, "J3 not within 10% of 3 m_inf");
    c.expect(std::abs(one.solution.nehari_action / m_inf - 1.0) <= 0.1, "J1 not within 10% of m_inf");
  });

  criterion(9, "linearization kernels", 120.0, [](Checks& c) {
    const ProblemParams params{1.0, 3.0};
    const double h = SpectrumSettings{}.h_target;
    const double tol = 1e-3;
    for (int n : {3, 4, 5}) {
      auto g = star(n, 30.0);
      auto m = build_mesh(g, h);
      const auto op = linearized_operator(m, params, soliton_bump(m, params, {0, 0.0}).values());
      const EigenReport r = smallest_eigenpairs(op, n + 1);
      const int kc = kernel_count(r, tol);
      c.expect(kc == n - 1, "n=" + std::to_string(n) + " kernel " + std::to_string(kc));
      // First eigenvalue above the kernel cluster, skipping the negative ground state.
      double next = NAN;
      for (double mu : r.eigenvalues)
        if (mu >= tol) {
          next = mu;
          break;
        }
      c.expect(next >= 1e-2, "n=" + std::to_string(n) + " next eigenvalue " + num(next));
      double worst = 0.0;
      for (std::size_t i = 0; i < r.eigenvalues.size(); ++i) {
        if (std::abs(r.eigenvalues[i]) >= tol) continue;
        double s = 0.0;
        for (double ce : star_coefficients(*m, params, r.eigenvectors[i], g->vertex_index("c"))) s += ce;
        worst = std::max(worst, std::abs(s));
      }
      c.expect(worst <= 1e-2, "n=" + std::to_string(n) + " coefficient sum " + num(worst));
      c.note("n=" + std::to_string(n) + ":kernel=" + std::to_string(kc) + ",next=" + num(next));
    }
    {
      auto g = interval(30.0);
      auto m = build_mesh(g, h);
      const EigenReport r = smallest_eigenpairs(linearized_operator(m, params, soliton_bump(m, params, {0, 0.0}).values()), 3);
      const int kc = kernel_count(r, tol);
      c.expect(kc == 0, "half-line kernel " + std::to_string(kc));
      c.note("half-line:kernel=" + std::to_string(kc));
    }
    {
      auto g = interval(60.0);
      auto m = build_mesh(g, h);
      const EigenReport r =
          smallest_eigenpairs(linearized_operator(m, params, soliton_bump(m, params, {0, 30.0}).values()), 3);
      const int kc = kernel_count(r, tol);
      c.expect(kc == 1, "full-line kernel " + std::to_string(kc));
      double corr = 0.0;
      for (std::size_t i = 0; i < r.eigenvalues.size(); ++i)
        if (std::abs(r.eigenvalues[i]) < tol) corr = derivative_correlation(*m, params, r.eigenvectors[i], 0, 30.0);
      c.expect(corr > 0.99, "correlation with U' " + num(corr));
      c.note("full-line:kernel=" + std::to_string(kc) + ",corr=" + num(corr));
    }
  });

  criterion(10, "determinism of csv bodies", 60.0, [](Checks& c) {
    const fs::path root = fs::temp_directory_path() / "qgnls_acceptance_determinism";
    fs::remove_all(root);
    fs::create_directories(root);
    std::ofstream(root / "g.json") << R"({"vertices": ["x", "y", "z", "t"], "edges": [)"
                                      R"({"id": "xy", "from": "x", "to": "y", "length": 2},)"
                                      R"({"id": "yz", "from": "y", "to": "z", "length": 2},)"
                                      R"({"id": "zx", "from": "z", "to": "x", "length": 2},)"
                                      R"({"id": "tail", "from": "x", "to": "t", "length": 1}]})";
    const std::string configs[] = {
        R"({"graph": "g.json", "mode": "solve", "lambda": [100, 200], "solver": {"random_seed": 5}})",
        R"({"graph": "g.json", "mode": "sweep", "lambda": [50, 100, 200], "solver": {"random_seed": 5}})",
        R"({"graph": "g.json", "mode": "sweep", "lambda": [50, 100, 200], "peaks": ["t"], "sweep": {"mode": "peaked"}})"};
    int compared = 0;
    for (std::size_t k = 0; k < std::size(configs); ++k) {
      std::vector<fs::path> outs;
      for (int rep = 0; rep < 2; ++rep) {
        ExperimentConfig cfg = parse_config_text(configs[k], "config", root);
        cfg.output = root / ("run" + std::to_string(k) + "_" + std::to_string(rep));
        std::ostringstream log;
        c.expect(run(cfg, log) == 0, "config " + std::to_string(k) + " failed: " + log.str());
        outs.push_back(cfg.output);
      }
      for (const auto& entry : fs::directory_iterator(outs[0])) {
        if (entry.path().extension() != ".csv") continue;
        const fs::path other = outs[1] / entry.path().filename();
        c.expect(fs::exists(other) && slurp(entry.path()) == slurp(other),
                 entry.path().filename().string() + " differs between runs");
        ++compared;
      }
    }
    c.expect(compared > 0, "no csv files compared");
    c.note(std::to_string(compared) + " csv files identical");
  });

  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
