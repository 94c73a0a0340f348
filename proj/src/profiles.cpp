#include "qgnls/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "qgnls/error.hpp"
#include "qgnls/numfmt.hpp"

namespace qgnls {

namespace {

// log cosh(y) without overflow.
double log_cosh(double y) {
  const double a = std::abs(y);
  return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

}  // namespace

double soliton(double p, double x) {
  const double k = 1.0 / (p - 1.0);
  return std::exp(k * std::log(0.5 * (p + 1.0)) - 2.0 * k * log_cosh(0.5 * (p - 1.0) * x));
}

double soliton_derivative(double p, double x) { return -soliton(p, x) * std::tanh(0.5 * (p - 1.0) * x); }

double soliton_second_derivative(double p, double x) {
  const double u = soliton(p, x);
  return u - std::pow(u, p);
}

SolitonNorms soliton_norms(double p, double tail_scale) {
  require(p > 1.0, "soliton_norms: p must be > 1");
  using boost::math::quadrature::gauss_kronrod;
  // U(x) ≤ C₀e^{−x}, C₀ = ((p+1)/2)^{1/(p−1)} 2^{2/(p−1)}; U′² ≤ U², so ∫_X^∞ (U² + U′²) ≤ C₀² e^{−2X}.
  const double c0 = std::pow(0.5 * (p + 1.0), 1.0 / (p - 1.0)) * std::pow(2.0, 2.0 / (p - 1.0));
  const double x_max = tail_scale * std::max(1.0, 0.5 * std::log(c0 * c0 / 1e-14));

  auto integrate = [&](auto f) {
    // Split so the adaptive rule sees the peak region at a reasonable scale.
    double sum = 0.0;
    double a = 0.0;
    while (a < x_max) {
      const double b = std::min(x_max, a + 4.0);
      sum += gauss_kronrod<double, 31>::integrate(f, a, b, 15, 1e-15);
      a = b;
    }
    return sum;
  };

  SolitonNorms n;
  n.cutoff_x = x_max;
  n.l2_sq_half_line = integrate([p](double x) {
    const double u = soliton(p, x);
    return u * u;
  });
  const double grad_half = integrate([p](double x) {
    const double du = soliton_derivative(p, x);
    return du * du;
  });
  n.l2_sq_line = 2.0 * n.l2_sq_half_line;
  n.grad_sq_line = 2.0 * grad_half;
  n.h1_sq_line = n.l2_sq_line + n.grad_sq_line;
  n.m_infinity = 0.5 * (0.5 - 1.0 / (p + 1.0)) * n.h1_sq_line;
  return n;
}

double rescaled_soliton(double p, double lambda, double x) {
  return std::pow(lambda, 1.0 / (p - 1.0)) * soliton(p, std::sqrt(lambda) * x);
}

double rescaled_soliton_derivative(double p, double lambda, double x) {
  return std::pow(lambda, 1.0 / (p - 1.0)) * std::sqrt(lambda) * soliton_derivative(p, std::sqrt(lambda) * x);
}

double cutoff(double x, double l_cut) {
  if (x <= 0.5 * l_cut) return 1.0;
  if (x >= l_cut) return 0.0;
  return 0.5 * (1.0 + std::cos(std::numbers::pi * (2.0 * x / l_cut - 1.0)));
}

double cutoff_derivative(double x, double l_cut) {
  if (x <= 0.5 * l_cut || x >= l_cut) return 0.0;
  const double w = 2.0 * std::numbers::pi / l_cut;
  return -0.5 * w * std::sin(std::numbers::pi * (2.0 * x / l_cut - 1.0));
}

double cutoff_second_derivative(double x, double l_cut) {
  if (x <= 0.5 * l_cut || x >= l_cut) return 0.0;
  const double w = 2.0 * std::numbers::pi / l_cut;
  return -0.5 * w * w * std::cos(std::numbers::pi * (2.0 * x / l_cut - 1.0));
}

std::vector<ResolvedPeak> resolve_peaks(const MetricGraph& g, const PeakSpec& spec) {
  if (spec.peaks.empty()) throw Error(ErrorCode::InvalidPeakSpec, "no peaks requested");
  std::vector<ResolvedPeak> out;
  std::set<std::size_t> used_edges;
  for (const auto& req : spec.peaks) {
    auto v = g.find_vertex(req.vertex);
    if (!v) throw Error(ErrorCode::InvalidPeakSpec, "unknown peak vertex '" + req.vertex + "'");
    if (g.degree(*v) != 1)
      throw Error(ErrorCode::PeakOnNonTerminalVertex,
                  "vertex '" + req.vertex + "' has degree " + std::to_string(g.degree(*v)));
    const std::size_t e = g.incident(*v).front().edge;
    const double len = g.edge(e).length;
    const double l_cut = req.l_cut.value_or(0.9 * len);
    if (!(l_cut > 0.0)) throw Error(ErrorCode::InvalidPeakSpec, "cutoff length must be positive");
    if (!(l_cut < len))
      throw Error(ErrorCode::SupportTooLong, "cutoff length " + format_double(l_cut) + " on edge '" + g.edge(e).id +
                                                 "' is not below its length " + format_double(len));
    if (!used_edges.insert(e).second)
      throw Error(ErrorCode::InvalidPeakSpec, "two peaks requested on edge '" + g.edge(e).id + "'");
    out.push_back({*v, e, l_cut});
  }
  return out;
}

PeakedAnsatz::PeakedAnsatz(const MetricGraph& g, std::vector<ResolvedPeak> peaks, ProblemParams params)
    : graph_(&g), peaks_(std::move(peaks)), params_(params) {
  params_.validate();
}

const ResolvedPeak* PeakedAnsatz::peak_on(std::size_t edge) const {
  for (const auto& pk : peaks_)
    if (pk.edge == edge) return &pk;
  return nullptr;
}

double PeakedAnsatz::distance(const ResolvedPeak& pk, double x) const {
  return graph_->distance_from_end(pk.edge, pk.vertex, x);
}

double PeakedAnsatz::value(std::size_t edge, double x) const {
  const ResolvedPeak* pk = peak_on(edge);
  if (pk == nullptr) return 0.0;
  const double s = distance(*pk, x);
  const double chi = cutoff(s, pk->l_cut);
  if (chi == 0.0) return 0.0;
  return chi * rescaled_soliton(params_.p, params_.lambda, s);
}

double PeakedAnsatz::residual_source(std::size_t edge, double x) const {
  const ResolvedPeak* pk = peak_on(edge);
  if (pk == nullptr) return 0.0;
  const double s = distance(*pk, x);
  if (s <= 0.5 * pk->l_cut || s >= pk->l_cut) return 0.0;
  const double p = params_.p, lambda = params_.lambda;
  const double chi = cutoff(s, pk->l_cut);
  const double u = rescaled_soliton(p, lambda, s);
  const double du = rescaled_soliton_derivative(p, lambda, s);
  return (std::pow(chi, p) - chi) * std::pow(u, p) + cutoff_second_derivative(s, pk->l_cut) * u +
         2.0 * cutoff_derivative(s, pk->l_cut) * du;
}

DiscreteFunction build_ansatz(std::shared_ptr<const Mesh> mesh, const PeakSpec& peaks, const ProblemParams& params) {
  PeakedAnsatz ansatz(mesh->graph(), resolve_peaks(mesh->graph(), peaks), params);
  return interpolate(std::move(mesh), [&](std::size_t e, double x) { return ansatz.value(e, x); });
}

DiscreteFunction soliton_bump(std::shared_ptr<const Mesh> mesh, const ProblemParams& params,
                              const EdgeCoordinate& center) {
  params.validate();
  const std::vector<double> d = dof_distances(*mesh, center);
  DiscreteFunction u(mesh);
  for (std::size_t i = 0; i < d.size(); ++i)
    u.values()[static_cast<Eigen::Index>(i)] = rescaled_soliton(params.p, params.lambda, d[i]);
  return u;
}

}  // namespace qgnls
