#include "qgnls/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include "qgnls/error.hpp"
#include "qgnls/profiles.hpp"

namespace qgnls {

namespace {

using Dense = Eigen::MatrixXd;

// Y ← Y R⁻¹ with RᵀR = YᵀBY, twice. False if the block lost rank.
bool b_orthonormalize(Dense& y, const SparseOperator& b) {
  for (int pass = 0; pass < 2; ++pass) {
    const Dense g = y.transpose() * (b * y);
    Eigen::LLT<Dense> llt(0.5 * (g + g.transpose()));
    if (llt.info() != Eigen::Success) return false;
    y = llt.matrixU().solve<Eigen::OnTheRight>(y);
  }
  return y.allFinite();
}

// Modified Gram-Schmidt in the B inner product; dependent columns are replaced
// by fresh random vectors.
void b_gram_schmidt(Dense& y, const SparseOperator& b, std::mt19937_64& rng) {
  for (Eigen::Index j = 0; j < y.cols(); ++j) {
    for (int attempt = 0; attempt < 3; ++attempt) {
      const double before = std::sqrt(std::max(0.0, y.col(j).dot(b * y.col(j))));
      for (int pass = 0; pass < 2; ++pass)
        for (Eigen::Index i = 0; i < j; ++i) y.col(j) -= y.col(i).dot(b * y.col(j)) * y.col(i);
      const double nrm = std::sqrt(std::max(0.0, y.col(j).dot(b * y.col(j))));
      if (nrm > 1e-10 * before && nrm > 0.0) {
        y.col(j) /= nrm;
        break;
      }
      for (Eigen::Index r = 0; r < y.rows(); ++r) y(r, j) = static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5;
    }
  }
}

}  // namespace

LinearizedOperator linearized_operator(std::shared_ptr<const Mesh> mesh, const ProblemParams& params,
                                       const Vector& u) {
  params.validate();
  require(u.size() == static_cast<Eigen::Index>(mesh->dof_count()), "linearized_operator: state size mismatch");
  const ActionFunctional f(mesh, params);
  LinearizedOperator op;
  op.mesh = mesh;
  op.params = params;
  op.A = f.hessian(u);
  op.B = mesh->mass();
  const double peak = std::max(0.0, u.maxCoeff());
  op.lower_bound = params.lambda - params.p * std::pow(peak, params.p - 1.0);
  return op;
}

EigenReport smallest_eigenpairs(const LinearizedOperator& op, int k, const EigenOptions& options) {
  const auto n = op.A.rows();
  require(k >= 1 && k < n, "smallest_eigenpairs: need 1 <= k < dof count");
  const int m = static_cast<int>(std::min<Eigen::Index>(n, 2 * k + 40));

  EigenReport rep;
  rep.shift = std::min(options.shift, op.lower_bound - 1.0);
  rep.block_size = m;
  SparseOperator shifted = op.A - rep.shift * op.B;
  Eigen::SimplicialLLT<SparseOperator> llt(shifted);
  if (llt.info() != Eigen::Success)
    throw Error(ErrorCode::EigenNoConvergence, "shifted operator is not positive definite");

  std::mt19937_64 rng(options.seed);
  Dense x(n, m);
  for (Eigen::Index j = 0; j < m; ++j)
    for (Eigen::Index r = 0; r < n; ++r) x(r, j) = static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5;
  if (!b_orthonormalize(x, op.B)) b_gram_schmidt(x, op.B, rng);

  Eigen::VectorXd theta;
  std::vector<double> res(static_cast<std::size_t>(k));
  for (int it = 1; it <= options.max_iter; ++it) {
    Dense y = llt.solve(op.B * x);
    if (!b_orthonormalize(y, op.B)) b_gram_schmidt(y, op.B, rng);
    const Dense ay = op.A * y;
    Dense h = y.transpose() * ay;
    Eigen::SelfAdjointEigenSolver<Dense> es(0.5 * (h + h.transpose()));
    theta = es.eigenvalues();
    x = y * es.eigenvectors();
    const Dense ax = ay * es.eigenvectors();

    bool done = true;
    for (int i = 0; i < k; ++i) {
      const Vector bx = op.B * x.col(i);
      res[static_cast<std::size_t>(i)] = (ax.col(i) - theta[i] * bx).norm() / bx.norm();
      if (!(res[static_cast<std::size_t>(i)] <= options.residual_tol)) done = false;
    }
    rep.iterations = it;
    if (done) break;
    if (it == options.max_iter) {
      throw ConvergenceError(ErrorCode::EigenNoConvergence,
                             "subspace iteration did not reach the residual target for " + std::to_string(k) +
                                 " eigenpairs",
                             it, *std::max_element(res.begin(), res.end()));
    }
  }
  for (int i = 0; i < k; ++i) {
    rep.eigenvalues.push_back(theta[i]);
    rep.eigenvectors.push_back(x.col(i));
    rep.residuals.push_back(res[static_cast<std::size_t>(i)]);
  }
  return rep;
}

int kernel_count(const EigenReport& report, double tol) {
  require(tol > 0.0, "kernel_count: tol must be positive");
  return static_cast<int>(
      std::count_if(report.eigenvalues.begin(), report.eigenvalues.end(), [&](double mu) { return std::abs(mu) < tol; }));
}

std::vector<double> star_coefficients(const Mesh& mesh, const ProblemParams& params, const Vector& psi,
                                      std::size_t center) {
  const MetricGraph& g = mesh.graph();
  std::vector<double> num(g.edge_count(), 0.0), den(g.edge_count(), 0.0);
  mesh.for_each_cell([&](std::size_t e, std::size_t, std::size_t d0, std::size_t d1, double x0, double h) {
    const Edge& ed = g.edge(e);
    if (ed.a != center && ed.b != center) return;
    const double p0 = psi[static_cast<Eigen::Index>(d0)], p1 = psi[static_cast<Eigen::Index>(d1)];
    for (std::size_t q = 0; q < 4; ++q) {
      const double s = GaussRule::points[q];
      const double d = g.distance_from_end(e, center, x0 + s * h);
      const double up = rescaled_soliton_derivative(params.p, params.lambda, d);
      const double w = h * GaussRule::weights[q];
      num[e] += w * (p0 + s * (p1 - p0)) * up;
      den[e] += w * up * up;
    }
  });
  std::vector<double> c(g.edge_count(), 0.0);
  for (std::size_t e = 0; e < c.size(); ++e)
    if (den[e] > 0.0) c[e] = num[e] / den[e];
  const double nrm = std::sqrt(std::inner_product(c.begin(), c.end(), c.begin(), 0.0));
  if (nrm > 0.0)
    for (double& v : c) v /= nrm;
  return c;
}

double derivative_correlation(const Mesh& mesh, const ProblemParams& params, const Vector& psi, std::size_t edge,
                              double x0) {
  double dot = 0.0, pp = 0.0, uu = 0.0;
  mesh.for_each_cell([&](std::size_t e, std::size_t, std::size_t d0, std::size_t d1, double xa, double h) {
    const double p0 = psi[static_cast<Eigen::Index>(d0)], p1 = psi[static_cast<Eigen::Index>(d1)];
    for (std::size_t q = 0; q < 4; ++q) {
      const double s = GaussRule::points[q];
      const double w = h * GaussRule::weights[q];
      const double v = p0 + s * (p1 - p0);
      const double up = e == edge ? rescaled_soliton_derivative(params.p, params.lambda, xa + s * h - x0) : 0.0;
      dot += w * v * up;
      pp += w * v * v;
      uu += w * up * up;
    }
  });
  if (pp <= 0.0 || uu <= 0.0) return 0.0;
  return std::abs(dot) / std::sqrt(pp * uu);
}

}  // namespace qgnls
