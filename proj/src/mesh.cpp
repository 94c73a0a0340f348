#include "qgnls/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "qgnls/error.hpp"
#include "qgnls/numfmt.hpp"

namespace qgnls {

namespace {

using Triplet = Eigen::Triplet<double>;

SparseOperator assemble(const Mesh& m, bool stiffness) {
  std::vector<Triplet> t;
  t.reserve(4 * m.dof_count() + 8);
  m.for_each_cell([&](std::size_t, std::size_t, std::size_t d0, std::size_t d1, double, double h) {
    const double diag = stiffness ? 1.0 / h : h / 3.0;
    const double off = stiffness ? -1.0 / h : h / 6.0;
    const auto i0 = static_cast<int>(d0);
    const auto i1 = static_cast<int>(d1);
    t.emplace_back(i0, i0, diag);
    t.emplace_back(i1, i1, diag);
    t.emplace_back(i0, i1, off);
    t.emplace_back(i1, i0, off);
  });
  const auto n = static_cast<Eigen::Index>(m.dof_count());
  SparseOperator op(n, n);
  op.setFromTriplets(t.begin(), t.end());
  op.makeCompressed();
  return op;
}

}  // namespace

Mesh::Mesh(std::shared_ptr<const MetricGraph> graph, double h_target)
    : graph_(std::move(graph)), h_target_(h_target) {
  require(graph_ != nullptr, "build_mesh: null graph");
  require(std::isfinite(h_target) && h_target > 0.0, "build_mesh: h_target must be positive");
  dof_count_ = graph_->vertex_count();
  edges_.reserve(graph_->edge_count());
  for (const auto& e : graph_->edges()) {
    const double cells = std::ceil(e.length / h_target);
    const auto nodes = std::max<std::size_t>(2, static_cast<std::size_t>(cells) + 1);
    if (nodes < 2) throw Error(ErrorCode::HTooLarge, "edge '" + e.id + "' would receive fewer than 2 nodes");
    EdgeMesh em;
    em.nodes = nodes;
    em.h = e.length / static_cast<double>(nodes - 1);
    em.interior_offset = dof_count_;
    dof_count_ += nodes - 2;
    edges_.push_back(em);
  }
  stiffness_ = assemble(*this, true);
  mass_ = assemble(*this, false);
}

double Mesh::max_h() const noexcept {
  double h = 0.0;
  for (const auto& em : edges_) h = std::max(h, em.h);
  return h;
}

EdgeCoordinate Mesh::dof_location(std::size_t d) const {
  if (is_vertex_dof(d)) {
    const EdgeEnd& end = graph_->incident(d).front();
    return {end.edge, end.at_a ? 0.0 : graph_->edge(end.edge).length};
  }
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const EdgeMesh& em = edges_[e];
    if (d >= em.interior_offset && d < em.interior_offset + em.nodes - 2)
      return {e, node_x(e, d - em.interior_offset + 1)};
  }
  throw Error(ErrorCode::OutOfRange, "dof " + std::to_string(d) + " out of range");
}

std::shared_ptr<const Mesh> build_mesh(std::shared_ptr<const MetricGraph> graph, double h_target) {
  return std::make_shared<const Mesh>(std::move(graph), h_target);
}

SparseOperator assemble_stiffness(const Mesh& m) { return assemble(m, true); }
SparseOperator assemble_mass(const Mesh& m) { return assemble(m, false); }

DiscreteFunction::DiscreteFunction(std::shared_ptr<const Mesh> mesh)
    : mesh_(std::move(mesh)), values_(Vector::Zero(static_cast<Eigen::Index>(mesh_->dof_count()))) {}

DiscreteFunction::DiscreteFunction(std::shared_ptr<const Mesh> mesh, Vector values)
    : mesh_(std::move(mesh)), values_(std::move(values)) {
  require(values_.size() == static_cast<Eigen::Index>(mesh_->dof_count()),
          "DiscreteFunction: value vector length does not match dof count");
}

double lambda_norm_sq(const Mesh& m, const Vector& u, double lambda) {
  return u.dot(m.stiffness() * u) + lambda * u.dot(m.mass() * u);
}

double lambda_norm(const DiscreteFunction& u, double lambda) {
  require(lambda > 0.0, "lambda_norm: lambda must be positive");
  return std::sqrt(lambda_norm_sq(u.mesh(), u.values(), lambda));
}

double lp_norm(const DiscreteFunction& u, double q) {
  require(q >= 1.0, "lp_norm: q must be >= 1");
  double sum = 0.0;
  u.mesh().for_each_cell([&](std::size_t, std::size_t, std::size_t d0, std::size_t d1, double, double h) {
    const double u0 = u[d0], u1 = u[d1];
    for (std::size_t k = 0; k < 4; ++k) {
      const double t = GaussRule::points[k];
      sum += h * GaussRule::weights[k] * std::pow(std::abs(u0 + t * (u1 - u0)), q);
    }
  });
  return std::pow(sum, 1.0 / q);
}

double evaluate(const DiscreteFunction& u, const EdgeCoordinate& at) {
  const Mesh& m = u.mesh();
  if (at.edge >= m.graph().edge_count())
    throw Error(ErrorCode::OutOfRange, "edge index " + std::to_string(at.edge) + " out of range");
  const double len = m.graph().edge(at.edge).length;
  const double slack = 1e-12 * len;
  if (!(at.x >= -slack && at.x <= len + slack))
    throw Error(ErrorCode::OutOfRange, "x = " + format_double(at.x) + " outside edge '" +
                                           m.graph().edge(at.edge).id + "' of length " + format_double(len));
  const EdgeMesh& em = m.edge(at.edge);
  const double s = std::clamp(at.x, 0.0, len) / em.h;
  auto j = static_cast<std::size_t>(std::floor(s));
  if (j >= em.nodes - 1) j = em.nodes - 2;
  const double t = std::clamp(s - static_cast<double>(j), 0.0, 1.0);
  const double u0 = u.node_value(at.edge, j);
  const double u1 = u.node_value(at.edge, j + 1);
  return u0 + t * (u1 - u0);
}

DiscreteFunction interpolate(std::shared_ptr<const Mesh> mesh, const GraphFunction& f) {
  DiscreteFunction u(mesh);
  const MetricGraph& g = mesh->graph();
  for (std::size_t v = 0; v < g.vertex_count(); ++v) {
    const EdgeEnd& end = g.incident(v).front();
    u.values()[static_cast<Eigen::Index>(v)] = f(end.edge, end.at_a ? 0.0 : g.edge(end.edge).length);
  }
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const EdgeMesh& em = mesh->edge(e);
    for (std::size_t j = 1; j + 1 < em.nodes; ++j)
      u.values()[static_cast<Eigen::Index>(mesh->dof(e, j))] = f(e, mesh->node_x(e, j));
  }
  return u;
}

DiscreteFunction transfer(const DiscreteFunction& u, std::shared_ptr<const Mesh> target) {
  require(&u.mesh().graph() == &target->graph() || u.mesh().graph() == target->graph(),
          "transfer: meshes live on different graphs");
  return interpolate(std::move(target), [&](std::size_t e, double x) { return evaluate(u, {e, x}); });
}

Vector load_vector(const Mesh& m, const GraphFunction& f) {
  Vector b = Vector::Zero(static_cast<Eigen::Index>(m.dof_count()));
  m.for_each_cell([&](std::size_t e, std::size_t, std::size_t d0, std::size_t d1, double x0, double h) {
    for (std::size_t k = 0; k < 4; ++k) {
      const double t = GaussRule::points[k];
      const double w = h * GaussRule::weights[k] * f(e, x0 + t * h);
      b[static_cast<Eigen::Index>(d0)] += w * (1.0 - t);
      b[static_cast<Eigen::Index>(d1)] += w * t;
    }
  });
  return b;
}

double l2_error(const DiscreteFunction& u, const GraphFunction& exact) {
  double sum = 0.0;
  u.mesh().for_each_cell([&](std::size_t e, std::size_t, std::size_t d0, std::size_t d1, double x0, double h) {
    const double u0 = u[d0], u1 = u[d1];
    for (std::size_t k = 0; k < 4; ++k) {
      const double t = GaussRule::points[k];
      const double diff = u0 + t * (u1 - u0) - exact(e, x0 + t * h);
      sum += h * GaussRule::weights[k] * diff * diff;
    }
  });
  return std::sqrt(sum);
}

std::vector<double> dof_distances(const Mesh& m, const EdgeCoordinate& source) {
  const MetricGraph& g = m.graph();
  const std::vector<double> vd = vertex_distances(g, source);
  std::vector<double> out(m.dof_count());
  for (std::size_t v = 0; v < g.vertex_count(); ++v) out[v] = vd[v];
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const Edge& ed = g.edge(e);
    const EdgeMesh& em = m.edge(e);
    for (std::size_t j = 1; j + 1 < em.nodes; ++j) {
      const double x = m.node_x(e, j);
      double d = std::min(vd[ed.a] + x, vd[ed.b] + ed.length - x);
      if (e == source.edge) d = std::min(d, std::abs(x - source.x));
      out[m.dof(e, j)] = d;
    }
  }
  return out;
}

void write_csv(std::ostream& out, const DiscreteFunction& u) {
  const Mesh& m = u.mesh();
  const MetricGraph& g = m.graph();
  out << "edge_id,x,value\n";
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    for (std::size_t j = 0; j < m.edge(e).nodes; ++j)
      out << g.edge(e).id << ',' << format_double(m.node_x(e, j)) << ',' << format_double(u.node_value(e, j))
          << '\n';
  }
  out << "\nvertex_id,value\n";
  for (std::size_t v = 0; v < g.vertex_count(); ++v) out << g.vertex_id(v) << ',' << format_double(u[v]) << '\n';
}

DiscreteFunction read_csv(std::istream& in, std::shared_ptr<const Mesh> mesh) {
  const Mesh& m = *mesh;
  const MetricGraph& g = m.graph();
  DiscreteFunction u(mesh);
  auto bad = [](const std::string& msg) { throw Error(ErrorCode::IoError, "solution csv: " + msg); };
  std::string line;
  if (!std::getline(in, line) || line != "edge_id,x,value") bad("missing 'edge_id,x,value' header");
  std::vector<std::size_t> next_node(g.edge_count(), 0);
  while (std::getline(in, line) && !line.empty()) {
    std::istringstream row(line);
    std::string id, xs, vs;
    if (!std::getline(row, id, ',') || !std::getline(row, xs, ',') || !std::getline(row, vs)) bad("malformed row");
    auto e = g.find_edge(id);
    if (!e) bad("unknown edge '" + id + "'");
    const std::size_t j = next_node[*e]++;
    if (j >= m.edge(*e).nodes) bad("too many nodes on edge '" + id + "'");
    u.values()[static_cast<Eigen::Index>(m.dof(*e, j))] = std::stod(vs);
  }
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    if (next_node[e] != m.edge(e).nodes) bad("edge '" + g.edge(e).id + "' node count does not match the mesh");
  }
  if (!std::getline(in, line) || line != "vertex_id,value") bad("missing 'vertex_id,value' header");
  while (std::getline(in, line) && !line.empty()) {
    auto comma = line.find(',');
    if (comma == std::string::npos) bad("malformed vertex row");
    auto v = g.find_vertex(line.substr(0, comma));
    if (!v) bad("unknown vertex '" + line.substr(0, comma) + "'");
    u.values()[static_cast<Eigen::Index>(*v)] = std::stod(line.substr(comma + 1));
  }
  return u;
}

}  // namespace qgnls
