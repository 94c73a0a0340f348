#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qgnls/functionals.hpp"
#include "qgnls/mesh.hpp"

namespace qgnls {

// Positive solution of −U″ + U = Uᵖ on ℝ centered at 0:
//   U(x) = ((p+1)/2)^{1/(p−1)} cosh((p−1)x/2)^{−2/(p−1)}.
double soliton(double p, double x);
double soliton_derivative(double p, double x);
double soliton_second_derivative(double p, double x);

struct SolitonNorms {
  double l2_sq_line = 0.0;       // ∫ℝ U²
  double grad_sq_line = 0.0;     // ∫ℝ U′²
  double h1_sq_line = 0.0;       // ‖U‖²_{H¹(ℝ)}
  double l2_sq_half_line = 0.0;  // ∫ℝ⁺ U²
  double m_infinity = 0.0;       // ½(½ − 1/(p+1))‖U‖²_{H¹(ℝ)}
  double cutoff_x = 0.0;         // truncation point of the quadrature
};

// Adaptive Gauss-Kronrod on [0, X]; X is chosen so the neglected tail is below 1e-14.
SolitonNorms soliton_norms(double p, double tail_scale = 1.0);

// λ^{1/(p−1)} U(√λ x).
double rescaled_soliton(double p, double lambda, double x);
double rescaled_soliton_derivative(double p, double lambda, double x);

// 1 on [0, l/2], ½(1 + cos(π(2x/l − 1))) on [l/2, l], 0 beyond l.
double cutoff(double x, double l_cut);
double cutoff_derivative(double x, double l_cut);
double cutoff_second_derivative(double x, double l_cut);

struct PeakRequest {
  std::string vertex;
  std::optional<double> l_cut;  // default: 0.9 · length of the terminal edge
};

struct PeakSpec {
  std::vector<PeakRequest> peaks;
};

struct ResolvedPeak {
  std::size_t vertex = 0;
  std::size_t edge = 0;
  double l_cut = 0.0;
};

// Checks degree-1 vertices, support lengths and one peak per edge.
std::vector<ResolvedPeak> resolve_peaks(const MetricGraph& g, const PeakSpec& spec);

// W_λ = Σ_i χ_i U_{λ,i} as a point function, plus the source of its residual
//   g = f(W) − (−W″ + λW) = (χᵖ − χ)U_λᵖ + χ″U_λ + 2χ′U_λ′
// on each support, with derivatives taken in the distance from the terminal vertex.
class PeakedAnsatz {
 public:
  PeakedAnsatz(const MetricGraph& g, std::vector<ResolvedPeak> peaks, ProblemParams params);

  double value(std::size_t edge, double x) const;
  double residual_source(std::size_t edge, double x) const;

  const std::vector<ResolvedPeak>& peaks() const noexcept { return peaks_; }
  const ProblemParams& params() const noexcept { return params_; }

 private:
  const ResolvedPeak* peak_on(std::size_t edge) const;
  double distance(const ResolvedPeak& pk, double x) const;

  const MetricGraph* graph_;
  std::vector<ResolvedPeak> peaks_;
  ProblemParams params_;
};

// Nodal interpolant of W_λ on the mesh.
DiscreteFunction build_ansatz(std::shared_ptr<const Mesh> mesh, const PeakSpec& peaks, const ProblemParams& params);

// λ^{1/(p−1)} U(√λ d(x)) with d the graph distance from a point; used for
// randomized starts and for linearization base states.
DiscreteFunction soliton_bump(std::shared_ptr<const Mesh> mesh, const ProblemParams& params,
                              const EdgeCoordinate& center);

}  // namespace qgnls
