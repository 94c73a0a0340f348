#pragma once

#include <memory>

#include "qgnls/mesh.hpp"

namespace qgnls {

struct ProblemParams {
  double lambda = 1.0;
  double p = 3.0;

  // Throws InvalidArgument unless λ > 0 and p > 1.
  void validate() const;
};

struct FunctionalReport {
  double action_I = 0.0;
  double action_J = 0.0;
  double mass_sq = 0.0;         // |u|²_{L²}
  double lambda_norm_sq = 0.0;  // ‖u‖²_λ
  double nehari_defect = 0.0;   // (‖u‖²_λ − |u⁺|^{p+1}_{p+1}) / ‖u‖²_λ
};

// Discrete action I⁺(u) = ½∫|u′|² + (λ/2)∫u² − 1/(p+1)∫(u⁺)^{p+1} and its
// derivatives. The nonlinear terms use 4-point Gauss on the interpolated u, so
// gradient() and hessian() are the exact derivatives of action().
class ActionFunctional {
 public:
  ActionFunctional(std::shared_ptr<const Mesh> mesh, ProblemParams params);

  const Mesh& mesh() const noexcept { return *mesh_; }
  const std::shared_ptr<const Mesh>& mesh_ptr() const noexcept { return mesh_; }
  const ProblemParams& params() const noexcept { return params_; }

  double action(const Vector& u) const;
  // J_λ = λ^{1/2 − (p+1)/(p−1)} I⁺.
  double renormalized_action(const Vector& u) const { return renormalization() * action(u); }
  double renormalization() const noexcept;

  // G(u) = (K + λM)u − N(u), N(u)_i = ∫(u⁺)^p φ_i.
  Vector gradient(const Vector& u) const;
  Vector nonlinear_load(const Vector& u) const;
  // H(u) = K + λM − P(u), P(u)_ij = ∫ p(u⁺)^{p−1} φ_iφ_j.
  SparseOperator hessian(const Vector& u) const;
  // K + λM.
  const SparseOperator& linear_operator() const noexcept { return linear_; }

  double lambda_norm_sq(const Vector& u) const { return qgnls::lambda_norm_sq(*mesh_, u, params_.lambda); }
  double positive_power_integral(const Vector& u) const;  // ∫(u⁺)^{p+1}
  double mass_sq(const Vector& u) const { return u.dot(mesh_->mass() * u); }
  // Relative Nehari defect (‖u‖²_λ − |u⁺|^{p+1}_{p+1}) / ‖u‖²_λ.
  double nehari_defect(const Vector& u) const;

  // t with ‖tu‖²_λ = |(tu)⁺|^{p+1}_{p+1}; NoPositivePart when u⁺ ≡ 0.
  double nehari_scale(const Vector& u) const;
  // λ^{1/2−(p+1)/(p−1)} (½ − 1/(p+1)) ‖u‖²_λ; NotOnNehari when the relative
  // defect exceeds 1e-8.
  double nehari_action(const Vector& u) const;

  FunctionalReport report(const Vector& u) const;

 private:
  std::shared_ptr<const Mesh> mesh_;
  ProblemParams params_;
  SparseOperator linear_;
};

// λ^{1/(p−1)}, the constant positive solution.
double constant_solution_value(const ProblemParams& params);
// J_λ on the constant solution: λ^{1/2}(½ − 1/(p+1))|𝒢|.
double constant_branch_action(const ProblemParams& params, double graph_length);

}  // namespace qgnls
