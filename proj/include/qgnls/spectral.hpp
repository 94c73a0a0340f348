#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "qgnls/functionals.hpp"
#include "qgnls/mesh.hpp"

namespace qgnls {

// A = K + λM − P(u), B = M, for Av = μBv.
struct LinearizedOperator {
  std::shared_ptr<const Mesh> mesh;
  ProblemParams params;
  SparseOperator A;
  SparseOperator B;
  // λ − p·max(u⁺)^{p−1}: every eigenvalue is at least this (Gauss quadrature
  // never samples u above its nodal maximum).
  double lower_bound = 0.0;
};

LinearizedOperator linearized_operator(std::shared_ptr<const Mesh> mesh, const ProblemParams& params,
                                       const Vector& u);

struct EigenOptions {
  double shift = -1e-6;  // lowered further when the operator's lower bound requires it
  double residual_tol = 1e-8;  // ‖Av − μBv‖ ≤ tol·‖Bv‖
  int max_iter = 5000;
  std::uint64_t seed = 0;
};

struct EigenReport {
  std::vector<double> eigenvalues;  // ascending
  std::vector<Vector> eigenvectors;  // B-orthonormal
  std::vector<double> residuals;     // ‖Av − μBv‖ / ‖Bv‖
  double shift = 0.0;
  int block_size = 0;
  int iterations = 0;
};

// k algebraically smallest eigenpairs by shift-invert block subspace iteration
// with Rayleigh-Ritz; the shift sits below the spectrum so A − σB is SPD.
EigenReport smallest_eigenpairs(const LinearizedOperator& op, int k, const EigenOptions& options = {});

int kernel_count(const EigenReport& report, double tol);

// Coefficients c_e of the best fit ψ|_e ≈ c_e U_λ′(d) on every edge, d the
// distance from `center`; normalized to unit Euclidean length.
std::vector<double> star_coefficients(const Mesh& mesh, const ProblemParams& params, const Vector& psi,
                                      std::size_t center);

// |⟨ψ, U_λ′(x − x0)⟩_{L²}| / (|ψ|_{L²} |U_λ′|_{L²}) along one edge.
double derivative_correlation(const Mesh& mesh, const ProblemParams& params, const Vector& psi, std::size_t edge,
                              double x0);

}  // namespace qgnls
