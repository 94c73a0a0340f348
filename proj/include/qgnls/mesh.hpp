#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <memory>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "qgnls/graph.hpp"

namespace qgnls {

using Vector = Eigen::VectorXd;
// Symmetric sparse matrix in dof indexing.
using SparseOperator = Eigen::SparseMatrix<double>;

// Point function on the graph, f(edge, x) with x measured from endpoint a.
using GraphFunction = std::function<double(std::size_t edge, double x)>;

struct EdgeMesh {
  std::size_t nodes = 2;            // including both endpoints
  double h = 0.0;                   // uniform cell size
  std::size_t interior_offset = 0;  // dof of node 1
};

// 4-point Gauss-Legendre rule on the reference cell [0, 1].
struct GaussRule {
  static constexpr std::array<double, 4> points = {
      0.5 * (1.0 - 0.8611363115940526), 0.5 * (1.0 - 0.3399810435848563),
      0.5 * (1.0 + 0.3399810435848563), 0.5 * (1.0 + 0.8611363115940526)};
  static constexpr std::array<double, 4> weights = {
      0.5 * 0.3478548451374538, 0.5 * 0.6521451548625461,
      0.5 * 0.6521451548625461, 0.5 * 0.3478548451374538};
};

// Uniform P1 mesh on every edge. Vertices own dofs [0, |V|); interior nodes of
// edge e follow at interior_offset. Edge-end nodes map to their vertex dof, so
// functions are continuous on the graph by construction.
class Mesh {
 public:
  Mesh(std::shared_ptr<const MetricGraph> graph, double h_target);

  const MetricGraph& graph() const noexcept { return *graph_; }
  const std::shared_ptr<const MetricGraph>& graph_ptr() const noexcept { return graph_; }

  double h_target() const noexcept { return h_target_; }
  double max_h() const noexcept;
  std::size_t dof_count() const noexcept { return dof_count_; }
  const EdgeMesh& edge(std::size_t e) const { return edges_.at(e); }

  std::size_t dof(std::size_t e, std::size_t node) const {
    const EdgeMesh& em = edges_[e];
    if (node == 0) return graph_->edge(e).a;
    if (node + 1 == em.nodes) return graph_->edge(e).b;
    return em.interior_offset + node - 1;
  }
  double node_x(std::size_t e, std::size_t node) const {
    const EdgeMesh& em = edges_[e];
    return graph_->edge(e).length * static_cast<double>(node) / static_cast<double>(em.nodes - 1);
  }

  // Calls fn(edge, cell, dof0, dof1, x0, h) for every cell.
  template <class Fn>
  void for_each_cell(Fn&& fn) const {
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      const EdgeMesh& em = edges_[e];
      for (std::size_t j = 0; j + 1 < em.nodes; ++j) fn(e, j, dof(e, j), dof(e, j + 1), node_x(e, j), em.h);
    }
  }

  // Location of a dof: its vertex, or (edge, x) for interior nodes.
  EdgeCoordinate dof_location(std::size_t d) const;
  bool is_vertex_dof(std::size_t d) const noexcept { return d < graph_->vertex_count(); }

  // Stiffness K_ij = ∫φ_i'φ_j' and mass M_ij = ∫φ_iφ_j, assembled once.
  const SparseOperator& stiffness() const noexcept { return stiffness_; }
  const SparseOperator& mass() const noexcept { return mass_; }

 private:
  std::shared_ptr<const MetricGraph> graph_;
  double h_target_;
  std::vector<EdgeMesh> edges_;
  std::size_t dof_count_ = 0;
  SparseOperator stiffness_;
  SparseOperator mass_;
};

std::shared_ptr<const Mesh> build_mesh(std::shared_ptr<const MetricGraph> graph, double h_target);

SparseOperator assemble_stiffness(const Mesh& m);
SparseOperator assemble_mass(const Mesh& m);

// Nodal values on a mesh; continuity at vertices holds through the shared dofs.
class DiscreteFunction {
 public:
  DiscreteFunction() = default;
  explicit DiscreteFunction(std::shared_ptr<const Mesh> mesh);
  DiscreteFunction(std::shared_ptr<const Mesh> mesh, Vector values);

  const Mesh& mesh() const { return *mesh_; }
  const std::shared_ptr<const Mesh>& mesh_ptr() const noexcept { return mesh_; }
  const Vector& values() const noexcept { return values_; }
  Vector& values() noexcept { return values_; }
  double operator[](std::size_t d) const { return values_[static_cast<Eigen::Index>(d)]; }
  double node_value(std::size_t e, std::size_t node) const { return (*this)[mesh_->dof(e, node)]; }

 private:
  std::shared_ptr<const Mesh> mesh_;
  Vector values_;
};

// ‖u‖_λ² = uᵀKu + λ uᵀMu. Every λ-norm in the library goes through this function.
double lambda_norm_sq(const Mesh& m, const Vector& u, double lambda);
double lambda_norm(const DiscreteFunction& u, double lambda);
// (∫|u|^q)^{1/q} with 4-point Gauss per cell.
double lp_norm(const DiscreteFunction& u, double q);

// Piecewise-linear interpolation; OutOfRange for coordinates off the graph.
double evaluate(const DiscreteFunction& u, const EdgeCoordinate& at);

// Nodal interpolant. Vertex values are taken from the first incident edge end.
DiscreteFunction interpolate(std::shared_ptr<const Mesh> mesh, const GraphFunction& f);
// Re-interpolates u onto another mesh of the same graph.
DiscreteFunction transfer(const DiscreteFunction& u, std::shared_ptr<const Mesh> target);

// b_i = ∫ f φ_i by 4-point Gauss per cell.
Vector load_vector(const Mesh& m, const GraphFunction& f);
// L² distance between u and a point function, by 4-point Gauss per cell.
double l2_error(const DiscreteFunction& u, const GraphFunction& exact);

// Shortest-path distance on the graph from a point to every dof.
std::vector<double> dof_distances(const Mesh& m, const EdgeCoordinate& source);

// CSV body: "edge_id,x,value" rows for every node of every edge, a blank
// line, then "vertex_id,value" rows.
void write_csv(std::ostream& out, const DiscreteFunction& u);
DiscreteFunction read_csv(std::istream& in, std::shared_ptr<const Mesh> mesh);

}  // namespace qgnls
