#pragma once

// Undirected graphs with optional gold direction labels (hypo -> hype),
// synthetic generators, edge-list I/O, and link-prediction splits.

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace cone_embed {

struct Edge {
  int u = 0;
  int v = 0;  // endpoints in stored (insertion) order
  friend bool operator==(const Edge&, const Edge&) = default;
};

struct GraphData {
  int num_nodes = 0;
  std::vector<Edge> edges;
  // Parallel to edges; a label orients its edge as (hypo, hype).
  std::vector<std::optional<std::pair<int, int>>> labels;
  std::vector<std::string> node_names;  // empty when unnamed
  std::vector<int> node_depths;         // empty when unknown (trees fill it)
};

class Graph {
 public:
  Graph() = default;
  // Validates: no self-loops, no duplicate edges, labels match their edge,
  // names/depths either empty or num_nodes long.
  explicit Graph(GraphData data);

  int num_nodes() const { return data_.num_nodes; }
  int num_edges() const { return static_cast<int>(data_.edges.size()); }
  const std::vector<Edge>& edges() const { return data_.edges; }
  const std::vector<int>& neighbors(int u) const { return adjacency_[u]; }
  int degree(int u) const { return static_cast<int>(adjacency_[u].size()); }
  bool has_edge(int u, int v) const;

  const std::optional<std::pair<int, int>>& label(int edge_index) const {
    return data_.labels[edge_index];
  }
  int num_labels() const { return num_labels_; }
  // (hypo, hype) pairs in edge order.
  std::vector<std::pair<int, int>> labeled_edges() const;

  bool has_names() const { return !data_.node_names.empty(); }
  bool has_depths() const { return !data_.node_depths.empty(); }
  const std::vector<std::string>& node_names() const { return data_.node_names; }
  const std::vector<int>& node_depths() const { return data_.node_depths; }
  const std::string& name(int u) const { return data_.node_names[u]; }
  std::optional<int> node_id(const std::string& name) const;

  // Roots: nodes that never appear as hypo in a label (only meaningful when
  // labels exist).
  std::vector<bool> root_mask() const;

 private:
  GraphData data_;
  std::vector<std::vector<int>> adjacency_;       // sorted
  std::unordered_map<std::uint64_t, int> index_;  // unordered key -> edge index
  std::unordered_map<std::string, int> name_to_id_;
  int num_labels_ = 0;
};

struct SplitGraph {
  int num_nodes = 0;
  std::vector<Edge> train_edges;
  std::vector<Edge> test_edges;
};

// Rebuilds a Graph over the train edges, keeping labels/names/depths.
Graph train_graph(const Graph& original, const SplitGraph& split);

// ---------------------------------------------------------------------------
// Generators.  All are deterministic in their seed and label every edge with
// the lower-hierarchy endpoint first.

// Barabasi-Albert preferential attachment: m seed nodes, node m connects to
// all of them, every later node attaches m edges drawn preferentially by
// degree without replacement.  New node is the hypo on each of its edges.
Graph gen_barabasi_albert(int n, int m, std::uint64_t seed);

// Complete k-ary tree of the given depth, breadth-first indexed with the
// root at 0; node count (k^(depth+1) - 1) / (k - 1).
Graph gen_complete_kary_tree(int k, int depth);

// Two complete k-ary trees of the given depth joined under a fresh root
// (degree exactly 2); node count 2 (k^(depth+1)-1)/(k-1) + 1.
Graph gen_concatenated_kary_tree(int k, int depth);

// ---------------------------------------------------------------------------
// Edge-list I/O.  Format: UTF-8 lines "hypo<TAB>hype"; '#' comment lines and
// blank lines are ignored; names are interned in order of first appearance.

struct EdgeListLoad {
  Graph graph;
  int duplicate_count = 0;  // duplicates are dropped (first label wins) with a warning
};

EdgeListLoad load_edge_list(const std::string& path);

// Writes the edge list (labeled edges as "hypo<TAB>hype") plus a JSON
// metadata sidecar at path + ".meta.json" holding node count, names, depths.
void save_graph(const Graph& g, const std::string& path);

// Loads via the sidecar when present so node ids match the saved graph;
// falls back to plain load_edge_list otherwise.
Graph load_graph(const std::string& path);

// ---------------------------------------------------------------------------
// Link-prediction split: candidate test edges have both endpoints of degree
// >= 2 and neither endpoint a root; sampled without replacement up to
// floor(test_fraction * |E|), never orphaning a node out of the train set.
SplitGraph split_link_prediction(const Graph& g, double test_fraction,
                                 std::uint64_t seed);

}  // namespace cone_embed
