#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/SparseCholesky>

#include "qgnls/analysis.hpp"
#include "qgnls/functionals.hpp"
#include "qgnls/profiles.hpp"

namespace qgnls {

struct SolverConfig {
  double newton_tol = 1e-10;  // on ‖i*_λ G(u)‖_λ / (1 + ‖u‖_λ)
  int newton_max_iter = 50;
  double gradient_flow_step = 0.5;
  int gradient_flow_max_iter = 5000;
  double c_mesh = 0.1;  // h_target = min(h_max, c_mesh/√λ)
  double h_max = 0.05;
  std::optional<double> h_target_override;
  std::uint64_t random_seed = 0;
  int max_restarts = 5;

  void validate() const;
  double h_target(double lambda) const;
};

struct SolutionRecord {
  ProblemParams params;
  DiscreteFunction u;
  FunctionalReport functionals;
  double lambda_norm = 0.0;
  double nehari_action = std::numeric_limits<double>::quiet_NaN();  // NaN for the trivial state
  double residual_norm = 0.0;
  std::vector<PeakInfo> peaks;
  int newton_iters = 0;
  int attempts = 1;
  std::string branch;  // trivial | constant | newton | least_action | peaked(k)

  const Mesh& mesh() const { return u.mesh(); }
};

struct PeakedRecord {
  SolutionRecord solution;
  DiscreteFunction ansatz;  // nodal W_λ
  std::vector<ResolvedPeak> peaks;
  double ansatz_lambda_norm = 0.0;
  // ‖φ‖_λ where φ solves −φ″ + λφ − [f(W+φ) − f(W)] = g with the analytic
  // residual source g of W_λ; no subtraction of nearly equal states involved.
  double correction_norm = std::numeric_limits<double>::quiet_NaN();
  // ‖i*_λ(f(W_λ)) − W_λ‖_λ, computed as ‖i*_λ g‖_λ.
  double residual_R_norm = std::numeric_limits<double>::quiet_NaN();
  // The same two quantities taken literally on the mesh: ‖u_h − I_hW‖_λ and
  // ‖i*_λ N(I_hW) − I_hW‖_λ. Both saturate at the O(h²) discretization floor.
  double discrete_correction_norm = std::numeric_limits<double>::quiet_NaN();
  double discrete_residual_R_norm = std::numeric_limits<double>::quiet_NaN();
  int correction_iters = 0;
  bool correction_converged = false;
};

// Discrete i*_λ: factorizes K + λM once (Cholesky).
class KirchhoffSolver {
 public:
  KirchhoffSolver(std::shared_ptr<const Mesh> mesh, double lambda);

  // (K + λM)u = b for a dual (load) vector b.
  Vector solve_dual(const Vector& b) const;
  // (K + λM)u = Mf.
  DiscreteFunction solve(const DiscreteFunction& f) const;
  // ‖i*_λ g‖_λ for a dual vector g.
  double dual_norm(const Vector& g) const;

  double lambda() const noexcept { return lambda_; }
  const Mesh& mesh() const noexcept { return *mesh_; }

 private:
  std::shared_ptr<const Mesh> mesh_;
  double lambda_;
  std::shared_ptr<Eigen::SimplicialLLT<SparseOperator>> factor_;
};

DiscreteFunction linear_kirchhoff_solve(std::shared_ptr<const Mesh> mesh, double lambda, const DiscreteFunction& f);
DiscreteFunction linear_kirchhoff_solve_dual(std::shared_ptr<const Mesh> mesh, double lambda, const Vector& b);

// Damped Newton on G(u) = 0 with Armijo backtracking on ½‖i*_λ G‖²_λ.
SolutionRecord newton_solve(std::shared_ptr<const Mesh> mesh, const ProblemParams& params,
                            const DiscreteFunction& u0, const SolverConfig& config);

// Nehari-projected gradient descent followed by a Newton polish. Starts from the
// ansatz at the longest terminal edge (or `initial` if given), restarting from
// seeded random bumps while the constant branch is found.
SolutionRecord least_action_solve(std::shared_ptr<const MetricGraph> graph, const ProblemParams& params,
                                  const SolverConfig& config, const DiscreteFunction* initial = nullptr);

// Newton from W_λ (or `initial`), then the correction and residual norms.
PeakedRecord peaked_solve(std::shared_ptr<const MetricGraph> graph, const ProblemParams& params,
                          const PeakSpec& peaks, const SolverConfig& config,
                          const DiscreteFunction* initial = nullptr);

// Nehari projection of u, t·u.
Vector nehari_project(const ActionFunctional& f, const Vector& u);

// Sorted vertex ids of vertex peaks; non-vertex peaks are reported as "edge@x".
std::vector<std::string> peak_labels(const MetricGraph& g, const std::vector<PeakInfo>& peaks);

}  // namespace qgnls
