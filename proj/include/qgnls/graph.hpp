#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace qgnls {

// Unvalidated graph description, as read from a graph file.
struct RawEdge {
  std::string id;
  std::string from;
  std::string to;
  double length = 0.0;
};

struct RawGraph {
  std::vector<std::string> vertices;
  std::vector<RawEdge> edges;
};

struct Edge {
  std::string id;
  std::size_t a = 0;  // lower vertex index
  std::size_t b = 0;
  double length = 0.0;

  bool operator==(const Edge&) const = default;
};

// One end of an edge sitting on a vertex. Self-loops contribute two ends.
struct EdgeEnd {
  std::size_t edge = 0;
  bool at_a = true;

  bool operator==(const EdgeEnd&) const = default;
};

// Point on the graph: edge index plus arc-length coordinate measured from endpoint a.
struct EdgeCoordinate {
  std::size_t edge = 0;
  double x = 0.0;
};

// Compact metric graph with Kirchhoff semantics at every vertex.
// Immutable once produced by validate_graph().
class MetricGraph {
 public:
  std::size_t vertex_count() const noexcept { return vertex_ids_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  const std::string& vertex_id(std::size_t v) const { return vertex_ids_.at(v); }
  std::span<const std::string> vertex_ids() const noexcept { return vertex_ids_; }
  const Edge& edge(std::size_t e) const { return edges_.at(e); }
  std::span<const Edge> edges() const noexcept { return edges_; }

  std::span<const EdgeEnd> incident(std::size_t v) const { return adjacency_.at(v); }
  std::size_t degree(std::size_t v) const { return adjacency_.at(v).size(); }

  std::optional<std::size_t> find_vertex(const std::string& id) const;
  std::optional<std::size_t> find_edge(const std::string& id) const;
  // Throws InvalidArgument for unknown ids.
  std::size_t vertex_index(const std::string& id) const;
  std::size_t edge_index(const std::string& id) const;

  // Distance along edge e from vertex v (which must be an endpoint of e) to
  // the point with edge coordinate x.
  double distance_from_end(std::size_t e, std::size_t v, double x) const;

  bool operator==(const MetricGraph&) const = default;

 private:
  friend MetricGraph validate_graph(const RawGraph& raw);

  std::vector<std::string> vertex_ids_;
  std::vector<Edge> edges_;
  std::vector<std::vector<EdgeEnd>> adjacency_;
};

// Checks ids, lengths and connectivity; canonicalizes edge orientation so that
// endpoint a has the lower vertex index.
MetricGraph validate_graph(const RawGraph& raw);

RawGraph to_raw(const MetricGraph& g);

// {"vertices": [...], "edges": [{"id","from","to","length"}, ...]}
RawGraph parse_graph_json(const nlohmann::json& j);
MetricGraph load_graph(const std::filesystem::path& path);
nlohmann::json graph_to_json(const MetricGraph& g);

struct TerminalVertex {
  std::size_t vertex = 0;
  std::size_t edge = 0;

  bool operator==(const TerminalVertex&) const = default;
};

// Degree-1 vertices paired with their unique incident edge, in vertex order.
std::vector<TerminalVertex> terminal_vertices(const MetricGraph& g);

double total_length(const MetricGraph& g);

// Shortest-path distances from a point of the graph to every vertex.
std::vector<double> vertex_distances(const MetricGraph& g, const EdgeCoordinate& source);

}  // namespace qgnls
