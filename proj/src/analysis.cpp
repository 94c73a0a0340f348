#include "qgnls/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "qgnls/error.hpp"
#include "qgnls/numfmt.hpp"
#include "qgnls/profiles.hpp"

namespace qgnls {

std::vector<PeakInfo> find_peaks(const DiscreteFunction& u) {
  const Mesh& m = u.mesh();
  const std::size_t n = m.dof_count();
  std::vector<std::vector<std::size_t>> neighbors(n);
  m.for_each_cell([&](std::size_t, std::size_t, std::size_t d0, std::size_t d1, double, double) {
    if (d0 == d1) return;
    neighbors[d0].push_back(d1);
    neighbors[d1].push_back(d0);
  });

  double max_value = 0.0;
  for (std::size_t d = 0; d < n; ++d) max_value = std::max(max_value, u[d]);
  const double floor = 1e-8 * max_value;

  std::vector<PeakInfo> peaks;
  if (!(max_value > 0.0)) return peaks;
  for (std::size_t d = 0; d < n; ++d) {
    if (neighbors[d].empty() || !(u[d] > floor)) continue;
    const bool strict = std::all_of(neighbors[d].begin(), neighbors[d].end(),
                                    [&](std::size_t k) { return u[d] > u[k]; });
    if (!strict) continue;
    PeakInfo info;
    info.location = m.dof_location(d);
    info.value = u[d];
    info.is_vertex = m.is_vertex_dof(d);
    if (info.is_vertex) info.vertex = d;
    peaks.push_back(info);
  }
  std::stable_sort(peaks.begin(), peaks.end(), [](const PeakInfo& a, const PeakInfo& b) { return a.value > b.value; });
  return peaks;
}

double profile_error(const DiscreteFunction& u, const ProblemParams& params, std::size_t terminal_vertex) {
  params.validate();
  const Mesh& m = u.mesh();
  const MetricGraph& g = m.graph();
  if (terminal_vertex >= g.vertex_count() || g.degree(terminal_vertex) != 1)
    throw Error(ErrorCode::EdgeNotTerminal, "profile_error needs a degree-1 vertex");
  const std::size_t e = g.incident(terminal_vertex).front().edge;
  const double half = 0.5 * g.edge(e).length;
  double err = 0.0;
  for (std::size_t j = 0; j < m.edge(e).nodes; ++j) {
    const double s = g.distance_from_end(e, terminal_vertex, m.node_x(e, j));
    if (s > half * (1.0 + 1e-12)) continue;
    err = std::max(err, std::abs(u.node_value(e, j) - rescaled_soliton(params.p, params.lambda, s)));
  }
  return std::pow(params.lambda, 1.0 / (1.0 - params.p)) * err;
}

DecayFit decay_fit(const DiscreteFunction& u, const ProblemParams& params, std::size_t edge,
                   std::size_t from_vertex, double x_lo, double x_hi) {
  params.validate();
  const Mesh& m = u.mesh();
  const MetricGraph& g = m.graph();
  const double len = g.edge(edge).length;
  require(0.0 <= x_lo && x_lo < x_hi && x_hi <= len, "decay_fit: window must lie inside the edge");
  const EdgeMesh& em = m.edge(edge);
  require(x_hi - x_lo >= 5.0 * em.h * (1.0 - 1e-12), "decay_fit: window shorter than 5 mesh cells");

  std::vector<double> xs, logs;
  for (std::size_t j = 0; j < em.nodes; ++j) {
    const double s = g.distance_from_end(edge, from_vertex, m.node_x(edge, j));
    if (s < x_lo - 1e-12 * len || s > x_hi + 1e-12 * len) continue;
    const double v = u.node_value(edge, j);
    if (!(v > 0.0))
      throw Error(ErrorCode::NonPositiveSamples, "u = " + format_double(v) + " at x = " + format_double(s));
    xs.push_back(s);
    logs.push_back(std::log(v));
  }
  const LineFit line = least_squares_line(xs, logs);
  DecayFit fit;
  fit.c2 = -line.slope / std::sqrt(params.lambda);
  fit.c1 = std::exp(line.intercept) / std::pow(params.lambda, 1.0 / (params.p - 1.0));
  fit.x_lo = x_lo;
  fit.x_hi = x_hi;
  fit.r_squared = line.r_squared;
  fit.samples = xs.size();
  return fit;
}

LineFit least_squares_line(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size(), "least_squares_line: size mismatch");
  if (x.size() < 2) throw Error(ErrorCode::InsufficientData, "need at least 2 points for a line fit");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw Error(ErrorCode::InsufficientData, "abscissae are all equal");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    ss_res += r * r;
  }
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  return fit;
}

LineFit loglog_fit(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size(), "loglog_fit: size mismatch");
  if (x.size() < 3) throw Error(ErrorCode::InsufficientData, "need at least 3 points for a scaling fit");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0))
      throw Error(ErrorCode::InsufficientData, "log-log fit needs positive data");
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  return least_squares_line(lx, ly);
}

}  // namespace qgnls
