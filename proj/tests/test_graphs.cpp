#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <stdexcept>

#include <cone_embed/errors.hpp>
#include <cone_embed/graph.hpp>

using namespace cone_embed;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "cone_embed_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p);
  out << content;
}

}  // namespace

TEST_CASE("barabasi-albert edge counts and labels") {
  const Graph g = gen_barabasi_albert(100, 2, 7);
  CHECK(g.num_nodes() == 100);
  CHECK(g.num_edges() == 2 * (100 - 2));
  CHECK(g.num_labels() == g.num_edges());
  // New node is the hypo on each of its edges.
  for (int e = 0; e < g.num_edges(); ++e) {
    const auto lab = *g.label(e);
    CHECK(lab.first > lab.second);
  }
  CHECK_THROWS_AS(gen_barabasi_albert(2, 2, 1), std::invalid_argument);
  CHECK_THROWS_AS(gen_barabasi_albert(10, 0, 1), std::invalid_argument);
}

TEST_CASE("barabasi-albert n=3 m=2 forced attachment") {
  const Graph g = gen_barabasi_albert(3, 2, 123);
  CHECK(g.num_edges() == 2);
  CHECK(g.has_edge(2, 0));
  CHECK(g.has_edge(2, 1));
}

TEST_CASE("barabasi-albert deterministic in the seed") {
  const Graph a = gen_barabasi_albert(100, 2, 42);
  const Graph b = gen_barabasi_albert(100, 2, 42);
  const Graph c = gen_barabasi_albert(100, 2, 43);
  CHECK(a.edges() == b.edges());
  bool same = a.edges() == c.edges();
  CHECK(!same);
}

TEST_CASE("complete k-ary tree counts") {
  const Graph t34 = gen_complete_kary_tree(3, 4);
  CHECK(t34.num_nodes() == 121);
  CHECK(t34.num_edges() == 120);
  const Graph t54 = gen_complete_kary_tree(5, 4);
  CHECK(t54.num_nodes() == 781);
  const Graph t21 = gen_complete_kary_tree(2, 1);
  CHECK(t21.num_nodes() == 3);
  CHECK(t21.num_edges() == 2);

  CHECK(t34.has_depths());
  CHECK(t34.node_depths()[0] == 0);
  CHECK(t34.node_depths()[120] == 4);
  // Every labeled edge points child -> parent, one depth apart.
  for (const auto& [hypo, hype] : t34.labeled_edges())
    CHECK(t34.node_depths()[hypo] == t34.node_depths()[hype] + 1);
}

TEST_CASE("concatenated k-ary tree counts and root degree") {
  const Graph c33 = gen_concatenated_kary_tree(3, 3);
  CHECK(c33.num_nodes() == 81);
  const Graph c53 = gen_concatenated_kary_tree(5, 3);
  CHECK(c53.num_nodes() == 313);
  CHECK(c33.degree(0) == 2);
  CHECK(c53.degree(0) == 2);
  CHECK(c33.num_edges() == c33.num_nodes() - 1);
  const auto roots = c33.root_mask();
  int root_count = 0;
  for (bool r : roots) root_count += r ? 1 : 0;
  CHECK(root_count == 1);
  CHECK(roots[0]);
}

TEST_CASE("edge list round trip") {
  const auto path = temp_file("roundtrip.tsv");
  write_file(path, "a\tb\nb\tc\n# comment\nc\td\n");
  const auto load = load_edge_list(path.string());
  CHECK(load.duplicate_count == 0);
  CHECK(load.graph.num_nodes() == 4);
  CHECK(load.graph.num_edges() == 3);
  CHECK(load.graph.name(0) == "a");
  CHECK(*load.graph.node_id("d") == 3);
  const auto lab = *load.graph.label(0);
  CHECK(load.graph.name(lab.first) == "a");
  CHECK(load.graph.name(lab.second) == "b");
}

TEST_CASE("edge list duplicate handling") {
  const auto path = temp_file("dup.tsv");
  write_file(path, "a\tb\nb\ta\n");
  const auto load = load_edge_list(path.string());
  CHECK(load.graph.num_edges() == 1);
  CHECK(load.duplicate_count == 1);
  const auto lab = *load.graph.label(0);
  CHECK(load.graph.name(lab.first) == "a");  // first label wins
  CHECK(load.graph.name(lab.second) == "b");
}

TEST_CASE("edge list edge cases") {
  const auto empty = temp_file("empty.tsv");
  write_file(empty, "");
  CHECK(load_edge_list(empty.string()).graph.num_nodes() == 0);

  const auto bad = temp_file("bad.tsv");
  write_file(bad, "a\tb\nmalformed line\n");
  CHECK_THROWS_WITH_AS(load_edge_list(bad.string()),
                       doctest::Contains(":2:"), DataError);

  const auto loop = temp_file("loop.tsv");
  write_file(loop, "a\ta\n");
  CHECK_THROWS_AS(load_edge_list(loop.string()), DataError);

  CHECK_THROWS_AS(load_edge_list("/nonexistent/file.tsv"), DataError);
}

TEST_CASE("save and reload keeps ids, names, depths") {
  const Graph g = gen_complete_kary_tree(3, 2);
  const auto path = temp_file("saved_tree.tsv");
  save_graph(g, path.string());
  const Graph back = load_graph(path.string());
  CHECK(back.num_nodes() == g.num_nodes());
  CHECK(back.num_edges() == g.num_edges());
  CHECK(back.node_depths() == g.node_depths());
  for (int e = 0; e < g.num_edges(); ++e) {
    CHECK(back.label(e)->first == g.label(e)->first);
    CHECK(back.label(e)->second == g.label(e)->second);
  }
}

TEST_CASE("graph construction validation") {
  GraphData d;
  d.num_nodes = 3;
  d.edges = {{0, 1}, {0, 1}};
  CHECK_THROWS_AS(Graph(std::move(d)), std::invalid_argument);
  GraphData loop;
  loop.num_nodes = 2;
  loop.edges = {{1, 1}};
  CHECK_THROWS_AS(Graph(std::move(loop)), std::invalid_argument);
  GraphData badlab;
  badlab.num_nodes = 3;
  badlab.edges = {{0, 1}};
  badlab.labels = {std::make_pair(0, 2)};
  CHECK_THROWS_AS(Graph(std::move(badlab)), std::invalid_argument);
}

TEST_CASE("link prediction split eligibility") {
  // Path a-b-c: every edge touches a leaf.
  GraphData d;
  d.num_nodes = 3;
  d.edges = {{0, 1}, {1, 2}};
  const Graph path(std::move(d));
  CHECK_THROWS_AS(split_link_prediction(path, 0.5, 1), DataError);

  // Depth-2 complete 3-ary tree: depth-1 nodes' children are leaves, so the
  // eligible set is empty.
  const Graph t32 = gen_complete_kary_tree(3, 2);
  CHECK_THROWS_AS(split_link_prediction(t32, 0.1, 1), DataError);

  CHECK_THROWS_AS(split_link_prediction(path, 0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(split_link_prediction(path, 1.0, 1), std::invalid_argument);
}

TEST_CASE("link prediction split invariants on BA graph") {
  const Graph g = gen_barabasi_albert(100, 2, 5);
  const SplitGraph split = split_link_prediction(g, 0.1, 17);
  const int expected = static_cast<int>(0.1 * g.num_edges());
  CHECK(split.test_edges.size() <= static_cast<std::size_t>(expected));
  CHECK(split.test_edges.size() >= static_cast<std::size_t>(expected) - 2);
  CHECK(split.train_edges.size() + split.test_edges.size() ==
        static_cast<std::size_t>(g.num_edges()));

  std::set<std::pair<int, int>> train, test;
  for (const Edge& e : split.train_edges)
    train.insert({std::min(e.u, e.v), std::max(e.u, e.v)});
  for (const Edge& e : split.test_edges)
    test.insert({std::min(e.u, e.v), std::max(e.u, e.v)});
  for (const auto& e : test) CHECK(!train.contains(e));

  // Every endpoint of a test edge keeps at least one train edge.
  std::vector<int> train_degree(g.num_nodes(), 0);
  for (const Edge& e : split.train_edges) {
    ++train_degree[e.u];
    ++train_degree[e.v];
  }
  for (const Edge& e : split.test_edges) {
    CHECK(train_degree[e.u] >= 1);
    CHECK(train_degree[e.v] >= 1);
  }

  // No test edge touches a root or a leaf of the original graph.
  const auto roots = g.root_mask();
  for (const Edge& e : split.test_edges) {
    CHECK(g.degree(e.u) >= 2);
    CHECK(g.degree(e.v) >= 2);
    CHECK(!roots[e.u]);
    CHECK(!roots[e.v]);
  }

  const SplitGraph again = split_link_prediction(g, 0.1, 17);
  CHECK(again.test_edges.size() == split.test_edges.size());
  CHECK(again.test_edges == split.test_edges);

  const Graph tg = train_graph(g, split);
  CHECK(tg.num_edges() == static_cast<int>(split.train_edges.size()));
  CHECK(tg.num_labels() == tg.num_edges());
}
