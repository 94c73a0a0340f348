#pragma once

#include <cmath>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "qgnls/graph.hpp"
#include "qgnls/mesh.hpp"

namespace testing {

inline std::shared_ptr<const qgnls::MetricGraph> make_graph(const qgnls::RawGraph& raw) {
  return std::make_shared<const qgnls::MetricGraph>(qgnls::validate_graph(raw));
}

inline std::shared_ptr<const qgnls::MetricGraph> interval(double length) {
  return make_graph({{"A", "B"}, {{"e", "A", "B", length}}});
}

// Center "c", leaves l0..l{n-1}.
inline std::shared_ptr<const qgnls::MetricGraph> star(int n, double length) {
  qgnls::RawGraph raw;
  raw.vertices.push_back("c");
  for (int i = 0; i < n; ++i) {
    raw.vertices.push_back("l" + std::to_string(i));
    raw.edges.push_back({"e" + std::to_string(i), "c", "l" + std::to_string(i), length});
  }
  return make_graph(raw);
}

inline std::shared_ptr<const qgnls::MetricGraph> triangle(double side) {
  return make_graph({{"x", "y", "z"}, {{"xy", "x", "y", side}, {"yz", "y", "z", side}, {"zx", "z", "x", side}}});
}

inline std::shared_ptr<const qgnls::MetricGraph> triangle_with_tail() {
  return make_graph({{"x", "y", "z", "t"},
                     {{"xy", "x", "y", 1.0}, {"yz", "y", "z", 1.0}, {"zx", "z", "x", 1.0}, {"tail", "x", "t", 2.0}}});
}

inline qgnls::Vector random_vector(std::mt19937_64& rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  qgnls::Vector v(static_cast<Eigen::Index>(n));
  for (auto& x : v) x = dist(rng);
  return v;
}

// Composite Simpson rule with n (even) panels.
template <class F>
double simpson(F&& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

}  // namespace testing
