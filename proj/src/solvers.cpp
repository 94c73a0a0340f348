#include "qgnls/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include <Eigen/SparseLU>

#include "qgnls/error.hpp"
#include "qgnls/numfmt.hpp"

namespace qgnls {

namespace {

constexpr double kArmijo = 1e-4;

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::string join(const std::vector<std::string>& items) {
  std::string s = "{";
  for (std::size_t i = 0; i < items.size(); ++i) s += (i ? "," : "") + items[i];
  return s + "}";
}

std::string classify(const ActionFunctional& f, const Vector& u, double graph_length) {
  const ProblemParams& params = f.params();
  if (u.cwiseAbs().maxCoeff() <= 1e-8 * constant_solution_value(params)) return "trivial";
  const double c_action = constant_branch_action(params, graph_length);
  const double j = f.renormalization() * (0.5 - 1.0 / (params.p + 1.0)) * f.lambda_norm_sq(u);
  if (std::abs(j - c_action) <= 1e-6 * c_action) return "constant";
  return "newton";
}

SolutionRecord make_record(const ActionFunctional& f, const Vector& u, double residual, int iters) {
  SolutionRecord rec;
  rec.params = f.params();
  rec.u = DiscreteFunction(f.mesh_ptr(), u);
  rec.functionals = f.report(u);
  rec.lambda_norm = std::sqrt(rec.functionals.lambda_norm_sq);
  rec.residual_norm = residual;
  rec.newton_iters = iters;
  rec.branch = classify(f, u, total_length(f.mesh().graph()));
  if (rec.branch != "trivial") rec.nehari_action = f.nehari_action(u);
  rec.peaks = find_peaks(rec.u);
  return rec;
}

// Gradient-like descent on J_λ restricted to the Nehari manifold, preconditioned
// by i*_λ so the step is the λ-gradient u − i*_λ f(u).
Vector nehari_descent(const ActionFunctional& f, const KirchhoffSolver& ks, Vector u, const SolverConfig& config) {
  u = nehari_project(f, u);
  double j = f.renormalized_action(u);
  double tau = config.gradient_flow_step;
  for (int it = 0; it < config.gradient_flow_max_iter; ++it) {
    const Vector g = ks.solve_dual(f.gradient(u));
    Vector trial = u - tau * g;
    double jt = std::numeric_limits<double>::infinity();
    if (f.positive_power_integral(trial) > 0.0) {
      trial = nehari_project(f, trial);
      jt = f.renormalized_action(trial);
    }
    if (!(jt <= j)) {
      tau *= 0.5;
      if (tau < 1e-8) break;
      continue;
    }
    const double decrease = j - jt;
    const double j_old = j;
    u = std::move(trial);
    j = jt;
    if (decrease <= 1e-10 * std::abs(j_old)) break;
    tau = std::min(config.gradient_flow_step, 2.0 * tau);
  }
  return u;
}

struct CorrectionResult {
  Vector phi;
  int iterations = 0;
  bool converged = false;
};

// Newton on −φ″ + λφ − [f(W+φ) − f(W)] = g, with W and g evaluated exactly at
// the quadrature points. f(W+φ) − f(W) is formed as Wᵖ expm1(p log1p(φ/W)) so
// exponentially small φ survives next to W = O(λ^{1/(p−1)}).
CorrectionResult solve_correction(const ActionFunctional& f, const KirchhoffSolver& ks, const PeakedAnsatz& ansatz,
                                  const Vector& source, const SolverConfig& config) {
  const Mesh& m = f.mesh();
  const double p = f.params().p;
  const auto n = static_cast<Eigen::Index>(m.dof_count());

  // W at quadrature points, cell by cell.
  std::vector<std::array<double, 4>> w_q;
  m.for_each_cell([&](std::size_t e, std::size_t, std::size_t, std::size_t, double x0, double h) {
    std::array<double, 4> w{};
    for (std::size_t k = 0; k < 4; ++k) w[k] = ansatz.value(e, x0 + GaussRule::points[k] * h);
    w_q.push_back(w);
  });

  auto increment = [p](double w, double phi) {
    if (w > 0.0) {
      if (w + phi <= 0.0) return -std::pow(w, p);
      return std::pow(w, p) * std::expm1(p * std::log1p(phi / w));
    }
    return phi > 0.0 ? std::pow(phi, p) : 0.0;
  };

  CorrectionResult out;
  out.phi = Vector::Zero(n);
  const double b_norm = ks.dual_norm(source);
  if (b_norm == 0.0) {
    out.converged = true;
    return out;
  }
  const SparseOperator& a = f.linear_operator();
  for (int it = 0; it <= config.newton_max_iter; ++it) {
    Vector d = Vector::Zero(n);
    std::vector<Eigen::Triplet<double>> t;
    std::size_t cell = 0;
    m.for_each_cell([&](std::size_t, std::size_t, std::size_t d0, std::size_t d1, double, double h) {
      const auto i0 = static_cast<Eigen::Index>(d0), i1 = static_cast<Eigen::Index>(d1);
      const double p0 = out.phi[i0], p1 = out.phi[i1];
      double a00 = 0.0, a01 = 0.0, a11 = 0.0;
      for (std::size_t k = 0; k < 4; ++k) {
        const double s = GaussRule::points[k];
        const double w = w_q[cell][k];
        const double phi = p0 + s * (p1 - p0);
        const double wt = h * GaussRule::weights[k];
        const double inc = wt * increment(w, phi);
        d[i0] += inc * (1.0 - s);
        d[i1] += inc * s;
        const double total = w + phi;
        const double pot = total > 0.0 ? wt * p * std::pow(total, p - 1.0) : 0.0;
        a00 += pot * (1.0 - s) * (1.0 - s);
        a01 += pot * (1.0 - s) * s;
        a11 += pot * s * s;
      }
      t.emplace_back(static_cast<int>(i0), static_cast<int>(i0), a00);
      t.emplace_back(static_cast<int>(i1), static_cast<int>(i1), a11);
      t.emplace_back(static_cast<int>(i0), static_cast<int>(i1), a01);
      t.emplace_back(static_cast<int>(i1), static_cast<int>(i0), a01);
      ++cell;
    });
    const Vector residual = a * out.phi - d - source;
    if (ks.dual_norm(residual) <= 1e-12 * b_norm) {
      out.converged = true;
      out.iterations = it;
      return out;
    }
    if (it == config.newton_max_iter) break;
    SparseOperator pot(n, n);
    pot.setFromTriplets(t.begin(), t.end());
    SparseOperator jac = a - pot;
    jac.makeCompressed();
    Eigen::SparseLU<SparseOperator> lu;
    lu.compute(jac);
    if (lu.info() != Eigen::Success) break;
    out.phi -= lu.solve(residual);
    out.iterations = it + 1;
  }
  return out;
}

}  // namespace

void SolverConfig::validate() const {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  require(positive(newton_tol), "newton_tol must be positive");
  require(newton_max_iter >= 1, "newton_max_iter must be >= 1");
  require(positive(gradient_flow_step), "gradient_flow_step must be positive");
  require(gradient_flow_max_iter >= 1, "gradient_flow_max_iter must be >= 1");
  require(positive(c_mesh), "c_mesh must be positive");
  require(positive(h_max), "h_max must be positive");
  require(!h_target_override || positive(*h_target_override), "h_target must be positive");
  require(max_restarts >= 0, "max_restarts must be >= 0");
}

double SolverConfig::h_target(double lambda) const {
  if (h_target_override) return *h_target_override;
  return std::min(h_max, c_mesh / std::sqrt(lambda));
}

KirchhoffSolver::KirchhoffSolver(std::shared_ptr<const Mesh> mesh, double lambda)
    : mesh_(std::move(mesh)), lambda_(lambda), factor_(std::make_shared<Eigen::SimplicialLLT<SparseOperator>>()) {
  require(std::isfinite(lambda) && lambda > 0.0, "KirchhoffSolver: lambda must be positive");
  SparseOperator a = mesh_->stiffness() + lambda * mesh_->mass();
  factor_->compute(a);
  if (factor_->info() != Eigen::Success)
    throw Error(ErrorCode::SingularSystem, "K + λM is not positive definite");
}

Vector KirchhoffSolver::solve_dual(const Vector& b) const {
  Vector u = factor_->solve(b);
  if (factor_->info() != Eigen::Success) throw Error(ErrorCode::SingularSystem, "Kirchhoff solve failed");
  return u;
}

DiscreteFunction KirchhoffSolver::solve(const DiscreteFunction& f) const {
  return DiscreteFunction(f.mesh_ptr(), solve_dual(mesh_->mass() * f.values()));
}

double KirchhoffSolver::dual_norm(const Vector& g) const {
  return std::sqrt(std::max(0.0, lambda_norm_sq(*mesh_, solve_dual(g), lambda_)));
}

DiscreteFunction linear_kirchhoff_solve(std::shared_ptr<const Mesh> mesh, double lambda, const DiscreteFunction& f) {
  return KirchhoffSolver(std::move(mesh), lambda).solve(f);
}

DiscreteFunction linear_kirchhoff_solve_dual(std::shared_ptr<const Mesh> mesh, double lambda, const Vector& b) {
  KirchhoffSolver ks(mesh, lambda);
  return DiscreteFunction(std::move(mesh), ks.solve_dual(b));
}

Vector nehari_project(const ActionFunctional& f, const Vector& u) { return f.nehari_scale(u) * u; }

std::vector<std::string> peak_labels(const MetricGraph& g, const std::vector<PeakInfo>& peaks) {
  std::vector<std::string> out;
  for (const auto& pk : peaks) {
    if (pk.is_vertex)
      out.push_back(g.vertex_id(*pk.vertex));
    else
      out.push_back(g.edge(pk.location.edge).id + "@" + format_double(pk.location.x));
  }
  std::sort(out.begin(), out.end());
  return out;
}

SolutionRecord newton_solve(std::shared_ptr<const Mesh> mesh, const ProblemParams& params,
                            const DiscreteFunction& u0, const SolverConfig& config) {
  params.validate();
  config.validate();
  require(u0.mesh_ptr() == mesh, "newton_solve: initial guess lives on a different mesh");
  const ActionFunctional f(mesh, params);
  const KirchhoffSolver ks(mesh, params.lambda);

  Vector u = u0.values();
  Vector g = f.gradient(u);
  double r = ks.dual_norm(g);
  int it = 0;
  for (;; ++it) {
    if (!std::isfinite(r)) throw ConvergenceError(ErrorCode::NoConvergence, "non-finite residual", it, r);
    if (r <= config.newton_tol * (1.0 + std::sqrt(f.lambda_norm_sq(u)))) break;
    if (it == config.newton_max_iter) {
      throw ConvergenceError(ErrorCode::NoConvergence,
                             "Newton stopped after " + std::to_string(it) + " iterations, residual " + format_double(r),
                             it, r);
    }
    Eigen::SparseLU<SparseOperator> lu;
    lu.compute(f.hessian(u));
    if (lu.info() != Eigen::Success)
      throw ConvergenceError(ErrorCode::SingularHessian, "Hessian factorization failed", it, r);
    const Vector dir = lu.solve(-g);
    if (!dir.allFinite()) throw ConvergenceError(ErrorCode::SingularHessian, "Hessian solve produced non-finite values", it, r);

    const double merit = 0.5 * r * r;
    double alpha = 1.0;
    bool accepted = false;
    while (alpha >= 1e-10) {
      Vector trial = u + alpha * dir;
      Vector gt = f.gradient(trial);
      const double rt = ks.dual_norm(gt);
      if (std::isfinite(rt) && 0.5 * rt * rt <= (1.0 - 2.0 * kArmijo * alpha) * merit) {
        u = std::move(trial);
        g = std::move(gt);
        r = rt;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted)
      throw ConvergenceError(ErrorCode::NoConvergence, "line search failed at residual " + format_double(r), it + 1, r);
  }

  if (u.minCoeff() < -10.0 * config.newton_tol)
    throw ConvergenceError(ErrorCode::NoConvergence,
                           "converged state is not positive (min " + format_double(u.minCoeff()) + ")", it, r);
  return make_record(f, u, r, it);
}

SolutionRecord least_action_solve(std::shared_ptr<const MetricGraph> graph, const ProblemParams& params,
                                  const SolverConfig& config, const DiscreteFunction* initial) {
  params.validate();
  config.validate();
  auto mesh = build_mesh(graph, config.h_target(params.lambda));
  const ActionFunctional f(mesh, params);
  const KirchhoffSolver ks(mesh, params.lambda);
  std::mt19937_64 rng(config.random_seed);

  auto random_bump = [&]() {
    const std::size_t e = static_cast<std::size_t>(rng() % graph->edge_count());
    const double x = uniform01(rng) * graph->edge(e).length;
    return soliton_bump(mesh, params, {e, x});
  };
  auto first_guess = [&]() {
    if (initial != nullptr) return transfer(*initial, mesh);
    const auto terminals = terminal_vertices(*graph);
    if (terminals.empty()) return random_bump();
    const TerminalVertex* best = &terminals.front();
    for (const auto& t : terminals)
      if (graph->edge(t.edge).length > graph->edge(best->edge).length) best = &t;
    PeakSpec spec{{{graph->vertex_id(best->vertex), std::nullopt}}};
    return build_ansatz(mesh, spec, params);
  };

  bool saw_constant = false;
  std::string last_failure;
  for (int attempt = 0; attempt <= config.max_restarts; ++attempt) {
    const DiscreteFunction start = attempt == 0 ? first_guess() : random_bump();
    try {
      const Vector descended = nehari_descent(f, ks, start.values(), config);
      SolutionRecord rec = newton_solve(mesh, params, DiscreteFunction(mesh, descended), config);
      rec.attempts = attempt + 1;
      if (rec.branch == "constant") {
        saw_constant = true;
        continue;
      }
      if (rec.branch == "trivial") continue;
      rec.branch = "least_action";
      return rec;
    } catch (const Error& ex) {
      if (ex.code() != ErrorCode::NoConvergence && ex.code() != ErrorCode::SingularHessian &&
          ex.code() != ErrorCode::NoPositivePart)
        throw;
      last_failure = ex.what();
    }
  }
  if (saw_constant)
    throw Error(ErrorCode::OnlyConstantBranchFound,
                "only the constant solution was found after " + std::to_string(config.max_restarts) + " restarts");
  throw ConvergenceError(ErrorCode::NoConvergence, "least-action search failed: " + last_failure,
                         config.max_restarts + 1, std::numeric_limits<double>::quiet_NaN());
}

PeakedRecord peaked_solve(std::shared_ptr<const MetricGraph> graph, const ProblemParams& params,
                          const PeakSpec& peaks, const SolverConfig& config, const DiscreteFunction* initial) {
  params.validate();
  config.validate();
  auto mesh = build_mesh(graph, config.h_target(params.lambda));
  PeakedAnsatz ansatz(*graph, resolve_peaks(*graph, peaks), params);

  PeakedRecord out;
  out.peaks = ansatz.peaks();
  out.ansatz = interpolate(mesh, [&](std::size_t e, double x) { return ansatz.value(e, x); });
  const DiscreteFunction start = initial != nullptr ? transfer(*initial, mesh) : out.ansatz;
  out.solution = newton_solve(mesh, params, start, config);
  out.solution.branch = "peaked(" + std::to_string(out.peaks.size()) + ")";

  std::vector<std::string> requested;
  for (const auto& pk : out.peaks) requested.push_back(graph->vertex_id(pk.vertex));
  std::sort(requested.begin(), requested.end());
  const std::vector<std::string> found = peak_labels(*graph, out.solution.peaks);
  if (found != requested)
    throw Error(ErrorCode::PeakSetMismatch, "requested peaks " + join(requested) + ", found " + join(found));

  const ActionFunctional f(mesh, params);
  const KirchhoffSolver ks(mesh, params.lambda);
  const Vector& w = out.ansatz.values();
  out.ansatz_lambda_norm = std::sqrt(f.lambda_norm_sq(w));

  const Vector source = load_vector(*mesh, [&](std::size_t e, double x) { return ansatz.residual_source(e, x); });
  out.residual_R_norm = ks.dual_norm(source);
  const CorrectionResult corr = solve_correction(f, ks, ansatz, source, config);
  out.correction_converged = corr.converged;
  out.correction_iters = corr.iterations;
  if (corr.converged) out.correction_norm = std::sqrt(f.lambda_norm_sq(corr.phi));

  out.discrete_correction_norm = std::sqrt(f.lambda_norm_sq(out.solution.u.values() - w));
  out.discrete_residual_R_norm = std::sqrt(f.lambda_norm_sq(ks.solve_dual(f.nonlinear_load(w)) - w));
  return out;
}

}  // namespace qgnls
