#include "qgnls/functionals.hpp"

#include <cmath>
#include <vector>

#include "qgnls/error.hpp"
#include "qgnls/numfmt.hpp"

namespace qgnls {

namespace {

inline double positive_pow(double s, double exponent) { return s > 0.0 ? std::pow(s, exponent) : 0.0; }

}  // namespace

void ProblemParams::validate() const {
  require(std::isfinite(lambda) && lambda > 0.0, "lambda must be positive, got " + format_double(lambda));
  require(std::isfinite(p) && p > 1.0, "p must be > 1, got " + format_double(p));
}

ActionFunctional::ActionFunctional(std::shared_ptr<const Mesh> mesh, ProblemParams params)
    : mesh_(std::move(mesh)), params_(params) {
  params_.validate();
  linear_ = mesh_->stiffness() + params_.lambda * mesh_->mass();
}

double ActionFunctional::renormalization() const noexcept {
  const double p = params_.p;
  return std::pow(params_.lambda, 0.5 - (p + 1.0) / (p - 1.0));
}

double ActionFunctional::positive_power_integral(const Vector& u) const {
  const double q = params_.p + 1.0;
  double sum = 0.0;
  mesh_->for_each_cell([&](std::size_t, std::size_t, std::size_t d0, std::size_t d1, double, double h) {
    const double u0 = u[static_cast<Eigen::Index>(d0)], u1 = u[static_cast<Eigen::Index>(d1)];
    if (u0 <= 0.0 && u1 <= 0.0) return;
    for (std::size_t k = 0; k < 4; ++k) {
      const double t = GaussRule::points[k];
      sum += h * GaussRule::weights[k] * positive_pow(u0 + t * (u1 - u0), q);
    }
  });
  return sum;
}

double ActionFunctional::action(const Vector& u) const {
  return 0.5 * lambda_norm_sq(u) - positive_power_integral(u) / (params_.p + 1.0);
}

Vector ActionFunctional::nonlinear_load(const Vector& u) const {
  Vector n = Vector::Zero(u.size());
  const double p = params_.p;
  mesh_->for_each_cell([&](std::size_t, std::size_t, std::size_t d0, std::size_t d1, double, double h) {
    const auto i0 = static_cast<Eigen::Index>(d0), i1 = static_cast<Eigen::Index>(d1);
    const double u0 = u[i0], u1 = u[i1];
    if (u0 <= 0.0 && u1 <= 0.0) return;
    for (std::size_t k = 0; k < 4; ++k) {
      const double t = GaussRule::points[k];
      const double w = h * GaussRule::weights[k] * positive_pow(u0 + t * (u1 - u0), p);
      n[i0] += w * (1.0 - t);
      n[i1] += w * t;
    }
  });
  return n;
}

Vector ActionFunctional::gradient(const Vector& u) const { return linear_ * u - nonlinear_load(u); }

SparseOperator ActionFunctional::hessian(const Vector& u) const {
  const double p = params_.p;
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(4 * mesh_->dof_count());
  mesh_->for_each_cell([&](std::size_t, std::size_t, std::size_t d0, std::size_t d1, double, double h) {
    const auto i0 = static_cast<int>(d0), i1 = static_cast<int>(d1);
    const double u0 = u[i0], u1 = u[i1];
    if (u0 <= 0.0 && u1 <= 0.0) return;
    double a00 = 0.0, a01 = 0.0, a11 = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
      const double s = GaussRule::points[k];
      const double w = h * GaussRule::weights[k] * p * positive_pow(u0 + s * (u1 - u0), p - 1.0);
      a00 += w * (1.0 - s) * (1.0 - s);
      a01 += w * (1.0 - s) * s;
      a11 += w * s * s;
    }
    t.emplace_back(i0, i0, a00);
    t.emplace_back(i1, i1, a11);
    t.emplace_back(i0, i1, a01);
    t.emplace_back(i1, i0, a01);
  });
  const auto n = static_cast<Eigen::Index>(mesh_->dof_count());
  SparseOperator potential(n, n);
  potential.setFromTriplets(t.begin(), t.end());
  SparseOperator h = linear_ - potential;
  h.makeCompressed();
  return h;
}

double ActionFunctional::nehari_defect(const Vector& u) const {
  const double norm_sq = lambda_norm_sq(u);
  if (norm_sq == 0.0) return 0.0;
  return (norm_sq - positive_power_integral(u)) / norm_sq;
}

double ActionFunctional::nehari_scale(const Vector& u) const {
  const double pos = positive_power_integral(u);
  if (!(pos > 0.0)) throw Error(ErrorCode::NoPositivePart, "u⁺ vanishes identically; no Nehari projection");
  return std::pow(lambda_norm_sq(u) / pos, 1.0 / (params_.p - 1.0));
}

double ActionFunctional::nehari_action(const Vector& u) const {
  const double defect = nehari_defect(u);
  if (!(std::abs(defect) <= 1e-8))
    throw Error(ErrorCode::NotOnNehari, "relative Nehari defect " + format_double(defect) + " exceeds 1e-8");
  const double p = params_.p;
  return renormalization() * (0.5 - 1.0 / (p + 1.0)) * lambda_norm_sq(u);
}

FunctionalReport ActionFunctional::report(const Vector& u) const {
  FunctionalReport r;
  r.lambda_norm_sq = lambda_norm_sq(u);
  const double pos = positive_power_integral(u);
  r.action_I = 0.5 * r.lambda_norm_sq - pos / (params_.p + 1.0);
  r.action_J = renormalization() * r.action_I;
  r.mass_sq = mass_sq(u);
  r.nehari_defect = r.lambda_norm_sq == 0.0 ? 0.0 : (r.lambda_norm_sq - pos) / r.lambda_norm_sq;
  return r;
}

double constant_solution_value(const ProblemParams& params) {
  return std::pow(params.lambda, 1.0 / (params.p - 1.0));
}

double constant_branch_action(const ProblemParams& params, double graph_length) {
  return std::sqrt(params.lambda) * (0.5 - 1.0 / (params.p + 1.0)) * graph_length;
}

}  // namespace qgnls
