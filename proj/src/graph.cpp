#include "qgnls/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>
#include <unordered_map>
#include <unordered_set>

#include "qgnls/error.hpp"

namespace qgnls {

std::optional<std::size_t> MetricGraph::find_vertex(const std::string& id) const {
  auto it = std::find(vertex_ids_.begin(), vertex_ids_.end(), id);
  if (it == vertex_ids_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - vertex_ids_.begin());
}

std::optional<std::size_t> MetricGraph::find_edge(const std::string& id) const {
  auto it = std::find_if(edges_.begin(), edges_.end(), [&](const Edge& e) { return e.id == id; });
  if (it == edges_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - edges_.begin());
}

std::size_t MetricGraph::vertex_index(const std::string& id) const {
  auto v = find_vertex(id);
  if (!v) throw Error(ErrorCode::InvalidArgument, "unknown vertex '" + id + "'");
  return *v;
}

std::size_t MetricGraph::edge_index(const std::string& id) const {
  auto e = find_edge(id);
  if (!e) throw Error(ErrorCode::InvalidArgument, "unknown edge '" + id + "'");
  return *e;
}

double MetricGraph::distance_from_end(std::size_t e, std::size_t v, double x) const {
  const Edge& ed = edge(e);
  if (ed.a == v) return x;
  if (ed.b == v) return ed.length - x;
  throw Error(ErrorCode::InvalidArgument,
              "vertex '" + vertex_id(v) + "' is not an endpoint of edge '" + ed.id + "'");
}

MetricGraph validate_graph(const RawGraph& raw) {
  if (raw.vertices.empty()) throw Error(ErrorCode::EmptyGraph, "graph has no vertices");
  if (raw.edges.empty()) throw Error(ErrorCode::EmptyGraph, "graph has no edges");

  MetricGraph g;
  std::unordered_map<std::string, std::size_t> index;
  for (const auto& id : raw.vertices) {
    if (!index.emplace(id, g.vertex_ids_.size()).second)
      throw Error(ErrorCode::DuplicateId, "vertex id '" + id + "' appears twice");
    g.vertex_ids_.push_back(id);
  }

  std::unordered_set<std::string> edge_ids;
  for (const auto& re : raw.edges) {
    if (!edge_ids.insert(re.id).second)
      throw Error(ErrorCode::DuplicateId, "edge id '" + re.id + "' appears twice");
    if (!std::isfinite(re.length) || re.length <= 0.0)
      throw Error(ErrorCode::NonPositiveLength, "edge '" + re.id + "' has length " + std::to_string(re.length));
    auto ia = index.find(re.from);
    auto ib = index.find(re.to);
    if (ia == index.end())
      throw Error(ErrorCode::DanglingEndpoint, "edge '" + re.id + "' references unknown vertex '" + re.from + "'");
    if (ib == index.end())
      throw Error(ErrorCode::DanglingEndpoint, "edge '" + re.id + "' references unknown vertex '" + re.to + "'");
    Edge e;
    e.id = re.id;
    e.a = std::min(ia->second, ib->second);
    e.b = std::max(ia->second, ib->second);
    e.length = re.length;
    g.edges_.push_back(std::move(e));
  }

  g.adjacency_.assign(g.vertex_ids_.size(), {});
  for (std::size_t e = 0; e < g.edges_.size(); ++e) {
    g.adjacency_[g.edges_[e].a].push_back({e, true});
    g.adjacency_[g.edges_[e].b].push_back({e, false});
  }

  // Connectivity by union-find.
  std::vector<std::size_t> parent(g.vertex_ids_.size());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  std::function<std::size_t(std::size_t)> find = [&](std::size_t v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  for (const auto& e : g.edges_) parent[find(e.a)] = find(e.b);
  const std::size_t root = find(0);
  for (std::size_t v = 0; v < g.vertex_ids_.size(); ++v) {
    if (find(v) != root)
      throw Error(ErrorCode::Disconnected, "vertex '" + g.vertex_ids_[v] + "' is not connected to '" +
                                               g.vertex_ids_[0] + "'");
  }
  return g;
}

RawGraph to_raw(const MetricGraph& g) {
  RawGraph raw;
  raw.vertices.assign(g.vertex_ids().begin(), g.vertex_ids().end());
  for (const auto& e : g.edges()) raw.edges.push_back({e.id, g.vertex_id(e.a), g.vertex_id(e.b), e.length});
  return raw;
}

RawGraph parse_graph_json(const nlohmann::json& j) {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::ConfigError, "graph file: " + msg); };
  if (!j.is_object()) fail("top level must be an object");
  for (const auto& [key, _] : j.items()) {
    if (key != "vertices" && key != "edges") fail("unknown key '" + key + "'");
  }
  if (!j.contains("vertices") || !j["vertices"].is_array()) fail("'vertices' must be an array of strings");
  if (!j.contains("edges") || !j["edges"].is_array()) fail("'edges' must be an array");

  RawGraph raw;
  for (const auto& v : j["vertices"]) {
    if (!v.is_string()) fail("vertex ids must be strings");
    raw.vertices.push_back(v.get<std::string>());
  }
  std::size_t n = 0;
  for (const auto& e : j["edges"]) {
    const std::string where = "edges[" + std::to_string(n++) + "]";
    if (!e.is_object()) fail(where + " must be an object");
    for (const auto& [key, _] : e.items()) {
      if (key != "id" && key != "from" && key != "to" && key != "length")
        fail(where + ": unknown key '" + key + "'");
    }
    for (const char* key : {"id", "from", "to"}) {
      if (!e.contains(key) || !e[key].is_string()) fail(where + "." + key + " must be a string");
    }
    if (!e.contains("length") || !e["length"].is_number()) fail(where + ".length must be a number");
    raw.edges.push_back({e["id"].get<std::string>(), e["from"].get<std::string>(), e["to"].get<std::string>(),
                         e["length"].get<double>()});
  }
  return raw;
}

MetricGraph load_graph(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot open graph file '" + path.string() + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& ex) {
    throw Error(ErrorCode::ConfigError, "graph file '" + path.string() + "': " + ex.what());
  }
  return validate_graph(parse_graph_json(j));
}

nlohmann::json graph_to_json(const MetricGraph& g) {
  nlohmann::json j;
  j["vertices"] = nlohmann::json::array();
  for (const auto& v : g.vertex_ids()) j["vertices"].push_back(v);
  j["edges"] = nlohmann::json::array();
  for (const auto& e : g.edges())
    j["edges"].push_back({{"id", e.id}, {"from", g.vertex_id(e.a)}, {"to", g.vertex_id(e.b)}, {"length", e.length}});
  return j;
}

std::vector<TerminalVertex> terminal_vertices(const MetricGraph& g) {
  std::vector<TerminalVertex> out;
  for (std::size_t v = 0; v < g.vertex_count(); ++v) {
    if (g.degree(v) == 1) out.push_back({v, g.incident(v).front().edge});
  }
  return out;
}

double total_length(const MetricGraph& g) {
  double sum = 0.0;
  for (const auto& e : g.edges()) sum += e.length;
  return sum;
}

std::vector<double> vertex_distances(const MetricGraph& g, const EdgeCoordinate& source) {
  const Edge& se = g.edge(source.edge);
  std::vector<double> dist(g.vertex_count(), std::numeric_limits<double>::infinity());
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  auto relax = [&](std::size_t v, double d) {
    if (d < dist[v]) {
      dist[v] = d;
      queue.push({d, v});
    }
  };
  relax(se.a, source.x);
  relax(se.b, se.length - source.x);
  while (!queue.empty()) {
    auto [d, v] = queue.top();
    queue.pop();
    if (d > dist[v]) continue;
    for (const auto& end : g.incident(v)) {
      const Edge& e = g.edge(end.edge);
      relax(end.at_a ? e.b : e.a, d + e.length);
    }
  }
  return dist;
}

}  // namespace qgnls
