#include <doctest.h>

#include <json.hpp>

#include "helpers.hpp"
#include "qgnls/error.hpp"
#include "qgnls/graph.hpp"

using namespace qgnls;

namespace {

ErrorCode code_of(const RawGraph& raw) {
  try {
    validate_graph(raw);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("validation reports each structural defect") {
  CHECK(code_of({{}, {}}) == ErrorCode::EmptyGraph);
  CHECK(code_of({{"a", "a"}, {{"e", "a", "a", 1.0}}}) == ErrorCode::DuplicateId);
  CHECK(code_of({{"a", "b"}, {{"e", "a", "b", 1.0}, {"e", "b", "a", 2.0}}}) == ErrorCode::DuplicateId);
  CHECK(code_of({{"a", "b"}, {{"e", "a", "b", 0.0}}}) == ErrorCode::NonPositiveLength);
  CHECK(code_of({{"a", "b"}, {{"e", "a", "b", -1.0}}}) == ErrorCode::NonPositiveLength);
  CHECK(code_of({{"a", "b"}, {{"e", "a", "q", 1.0}}}) == ErrorCode::DanglingEndpoint);
  CHECK(code_of({{"a", "b", "c", "d"}, {{"e", "a", "b", 1.0}, {"f", "c", "d", 1.0}}}) == ErrorCode::Disconnected);
}

TEST_CASE("edges are oriented from the lower vertex index") {
  auto g = testing::make_graph({{"a", "b"}, {{"e", "b", "a", 2.0}}});
  CHECK(g->edge(0).a == 0);
  CHECK(g->edge(0).b == 1);
  CHECK(g->distance_from_end(0, 1, 0.5) == doctest::Approx(1.5));
}

TEST_CASE("single vertex with a loop is a valid graph") {
  auto g = testing::make_graph({{"o"}, {{"loop", "o", "o", 2.0}}});
  CHECK(g->degree(0) == 2);
  CHECK(terminal_vertices(*g).empty());
}

TEST_CASE("terminal vertices, degrees and total length") {
  auto s = testing::star(3, 2.0);
  CHECK(s->degree(s->vertex_index("c")) == 3);
  const auto t = terminal_vertices(*s);
  REQUIRE(t.size() == 3);
  for (const auto& tv : t) CHECK(s->degree(tv.vertex) == 1);
  CHECK(total_length(*s) == doctest::Approx(6.0));
  CHECK(terminal_vertices(*testing::triangle(1.0)).empty());
  CHECK(terminal_vertices(*testing::triangle_with_tail()).size() == 1);
}

TEST_CASE("graph distances follow shortest paths") {
  auto g = testing::triangle_with_tail();
  const auto d = vertex_distances(*g, {g->edge_index("tail"), 2.0});  // at t
  CHECK(d[g->vertex_index("t")] == doctest::Approx(0.0));
  CHECK(d[g->vertex_index("x")] == doctest::Approx(2.0));
  CHECK(d[g->vertex_index("y")] == doctest::Approx(3.0));
  CHECK(d[g->vertex_index("z")] == doctest::Approx(3.0));
}

TEST_CASE("json round trip and strict keys") {
  auto g = testing::star(3, 2.0);
  const auto j = graph_to_json(*g);
  CHECK(validate_graph(parse_graph_json(j)) == *g);

  nlohmann::json bad = j;
  bad["colour"] = "red";
  CHECK_THROWS_AS(parse_graph_json(bad), Error);
  bad = j;
  bad["edges"][0]["weight"] = 1;
  CHECK_THROWS_AS(parse_graph_json(bad), Error);
  CHECK_THROWS_AS(load_graph("/nonexistent/graph.json"), Error);
}
