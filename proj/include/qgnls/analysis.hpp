#pragma once

#include <optional>
#include <span>
#include <vector>

#include "qgnls/functionals.hpp"
#include "qgnls/mesh.hpp"

namespace qgnls {

struct PeakInfo {
  EdgeCoordinate location;
  double value = 0.0;
  bool is_vertex = false;
  std::optional<std::size_t> vertex;
};

// Strict nodal local maxima (vertex nodes compare against every incident
// neighbor), sorted by value descending. Maxima below 1e-8·max are dropped.
std::vector<PeakInfo> find_peaks(const DiscreteFunction& u);

// λ^{1/(1−p)} max_{x ∈ [0, l/2]} |u(x) − λ^{1/(p−1)} U(x√λ)| over mesh nodes of
// the terminal edge, x measured from the terminal vertex.
double profile_error(const DiscreteFunction& u, const ProblemParams& params, std::size_t terminal_vertex);

struct DecayFit {
  double c1 = 0.0;  // u ≈ c1 λ^{1/(p−1)} e^{−c2 √λ x}
  double c2 = 0.0;
  double x_lo = 0.0;
  double x_hi = 0.0;
  double r_squared = 0.0;
  std::size_t samples = 0;
};

// Least squares of log u against the distance x from `from_vertex` along `edge`,
// over mesh nodes with x in [x_lo, x_hi].
DecayFit decay_fit(const DiscreteFunction& u, const ProblemParams& params, std::size_t edge,
                   std::size_t from_vertex, double x_lo, double x_hi);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

LineFit least_squares_line(std::span<const double> x, std::span<const double> y);
// Slope of log y against log x; InsufficientData below 3 points.
LineFit loglog_fit(std::span<const double> x, std::span<const double> y);

}  // namespace qgnls
