#include <cone_embed/graph.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <random>
#include <stdexcept>

#include <cone_embed/errors.hpp>

#include <json.hpp>

namespace cone_embed {

namespace {

std::uint64_t edge_key(int u, int v) {
  const std::uint64_t a = static_cast<std::uint32_t>(std::min(u, v));
  const std::uint64_t b = static_cast<std::uint32_t>(std::max(u, v));
  return (a << 32) | b;
}

}  // namespace

Graph::Graph(GraphData data) : data_(std::move(data)) {
  const int n = data_.num_nodes;
  if (n < 0) throw std::invalid_argument("negative node count");
  if (!data_.node_names.empty() && static_cast<int>(data_.node_names.size()) != n)
    throw std::invalid_argument("node_names size does not match node count");
  if (!data_.node_depths.empty() && static_cast<int>(data_.node_depths.size()) != n)
    throw std::invalid_argument("node_depths size does not match node count");
  if (data_.labels.empty()) data_.labels.resize(data_.edges.size());
  if (data_.labels.size() != data_.edges.size())
    throw std::invalid_argument("labels size does not match edge count");

  adjacency_.assign(n, {});
  index_.reserve(data_.edges.size() * 2);
  for (int e = 0; e < static_cast<int>(data_.edges.size()); ++e) {
    const auto [u, v] = data_.edges[e];
    if (u < 0 || u >= n || v < 0 || v >= n)
      throw std::invalid_argument("edge endpoint out of range");
    if (u == v) throw std::invalid_argument("self-loop");
    if (!index_.emplace(edge_key(u, v), e).second)
      throw std::invalid_argument("duplicate edge");
    adjacency_[u].push_back(v);
    adjacency_[v].push_back(u);
    if (const auto& lab = data_.labels[e]) {
      const auto [hypo, hype] = *lab;
      if (!((hypo == u && hype == v) || (hypo == v && hype == u)))
        throw std::invalid_argument("label does not match its edge");
      ++num_labels_;
    }
  }
  for (auto& nbrs : adjacency_) std::sort(nbrs.begin(), nbrs.end());
  for (int i = 0; i < static_cast<int>(data_.node_names.size()); ++i)
    name_to_id_.emplace(data_.node_names[i], i);
}

bool Graph::has_edge(int u, int v) const {
  if (u == v) return false;
  return index_.contains(edge_key(u, v));
}

std::vector<std::pair<int, int>> Graph::labeled_edges() const {
  std::vector<std::pair<int, int>> out;
  out.reserve(num_labels_);
  for (const auto& lab : data_.labels)
    if (lab) out.push_back(*lab);
  return out;
}

std::optional<int> Graph::node_id(const std::string& name) const {
  auto it = name_to_id_.find(name);
  if (it == name_to_id_.end()) return std::nullopt;
  return it->second;
}

std::vector<bool> Graph::root_mask() const {
  std::vector<bool> is_root(num_nodes(), true);
  for (const auto& lab : data_.labels)
    if (lab) is_root[lab->first] = false;  // appearing as hypo means it has a parent
  return is_root;
}

Graph train_graph(const Graph& original, const SplitGraph& split) {
  GraphData data;
  data.num_nodes = original.num_nodes();
  data.node_names = original.node_names();
  data.node_depths = original.node_depths();
  data.edges = split.train_edges;
  data.labels.reserve(split.train_edges.size());
  std::unordered_map<std::uint64_t, int> orig_index;
  for (int e = 0; e < original.num_edges(); ++e)
    orig_index.emplace(edge_key(original.edges()[e].u, original.edges()[e].v), e);
  for (const Edge& e : split.train_edges) {
    auto it = orig_index.find(edge_key(e.u, e.v));
    data.labels.push_back(it == orig_index.end() ? std::nullopt
                                                 : original.label(it->second));
  }
  return Graph(std::move(data));
}

// ---------------------------------------------------------------------------

Graph gen_barabasi_albert(int n, int m, std::uint64_t seed) {
  if (m < 1) throw std::invalid_argument("attachment count m must be >= 1");
  if (n <= m) throw std::invalid_argument("node count must exceed attachment count");
  std::mt19937_64 rng(seed);
  GraphData data;
  data.num_nodes = n;
  // One entry per edge endpoint; sampling an index uniformly is sampling a
  // node proportionally to its degree.
  std::vector<int> endpoints;
  endpoints.reserve(static_cast<std::size_t>(2 * m) * (n - m));
  std::vector<int> targets;
  for (int node = m; node < n; ++node) {
    targets.clear();
    if (node == m) {
      for (int t = 0; t < m; ++t) targets.push_back(t);  // first node wires to all seeds
    } else {
      std::uniform_int_distribution<std::size_t> pick(0, endpoints.size() - 1);
      while (static_cast<int>(targets.size()) < m) {
        const int t = endpoints[pick(rng)];
        if (std::find(targets.begin(), targets.end(), t) == targets.end())
          targets.push_back(t);
      }
    }
    for (int t : targets) {
      data.edges.push_back({node, t});
      data.labels.emplace_back(std::make_pair(node, t));  // new node is the hypo
      endpoints.push_back(node);
      endpoints.push_back(t);
    }
  }
  return Graph(std::move(data));
}

Graph gen_complete_kary_tree(int k, int depth) {
  if (k < 2) throw std::invalid_argument("branching factor must be >= 2");
  if (depth < 1) throw std::invalid_argument("depth must be >= 1");
  GraphData data;
  std::int64_t total = 1, level = 1;
  for (int d = 0; d < depth; ++d) {
    level *= k;
    total += level;
  }
  data.num_nodes = static_cast<int>(total);
  data.node_depths.assign(data.num_nodes, 0);
  // Breadth-first indexing: children of node i are k*i+1 .. k*i+k.
  for (int child = 1; child < data.num_nodes; ++child) {
    const int parent = (child - 1) / k;
    data.edges.push_back({child, parent});
    data.labels.emplace_back(std::make_pair(child, parent));
    data.node_depths[child] = data.node_depths[parent] + 1;
  }
  return Graph(std::move(data));
}

Graph gen_concatenated_kary_tree(int k, int depth) {
  const Graph sub = gen_complete_kary_tree(k, depth);
  const int t = sub.num_nodes();
  GraphData data;
  data.num_nodes = 2 * t + 1;
  data.node_depths.assign(data.num_nodes, 0);
  // Node 0 is the new root; subtree copies occupy [1, t] and [t+1, 2t].
  for (int copy = 0; copy < 2; ++copy) {
    const int off = 1 + copy * t;
    data.edges.push_back({off, 0});
    data.labels.emplace_back(std::make_pair(off, 0));
    for (int e = 0; e < sub.num_edges(); ++e) {
      const auto [child, parent] = *sub.label(e);
      data.edges.push_back({child + off, parent + off});
      data.labels.emplace_back(std::make_pair(child + off, parent + off));
    }
    for (int i = 0; i < t; ++i) data.node_depths[i + off] = sub.node_depths()[i] + 1;
  }
  return Graph(std::move(data));
}

// ---------------------------------------------------------------------------

EdgeListLoad load_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open edge list: " + path);
  GraphData data;
  std::unordered_map<std::string, int> ids;
  std::unordered_map<std::uint64_t, bool> seen;
  int duplicates = 0;
  auto intern = [&](const std::string& name) {
    auto [it, fresh] = ids.emplace(name, static_cast<int>(ids.size()));
    if (fresh) data.node_names.push_back(name);
    return it->second;
  };
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 == line.size() ||
        line.find('\t', tab + 1) != std::string::npos) {
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": expected \"hypo<TAB>hype\"");
    }
    const std::string a = line.substr(0, tab);
    const std::string b = line.substr(tab + 1);
    if (a == b)
      throw DataError(path + ":" + std::to_string(line_no) + ": self-loop \"" + a + "\"");
    const int u = intern(a);
    const int v = intern(b);
    if (!seen.emplace(edge_key(u, v), true).second) {
      ++duplicates;
      std::cerr << "warning: " << path << ":" << line_no << ": duplicate edge " << a
                << " -- " << b << " dropped (first label wins)\n";
      continue;
    }
    data.edges.push_back({u, v});
    data.labels.emplace_back(std::make_pair(u, v));
  }
  data.num_nodes = static_cast<int>(ids.size());
  return {Graph(std::move(data)), duplicates};
}

void save_graph(const Graph& g, const std::string& path) {
  std::vector<std::string> names = g.node_names();
  if (names.empty()) {
    names.reserve(g.num_nodes());
    for (int i = 0; i < g.num_nodes(); ++i) names.push_back(std::to_string(i));
  }
  std::ofstream out(path);
  if (!out) throw DataError("cannot write edge list: " + path);
  for (int e = 0; e < g.num_edges(); ++e) {
    int a = g.edges()[e].u;
    int b = g.edges()[e].v;
    if (const auto& lab = g.label(e)) {
      a = lab->first;
      b = lab->second;
    }
    out << names[a] << '\t' << names[b] << '\n';
  }
  if (!out) throw DataError("failed writing edge list: " + path);

  nlohmann::json meta;
  meta["num_nodes"] = g.num_nodes();
  meta["node_names"] = names;
  if (g.has_depths()) meta["node_depths"] = g.node_depths();
  meta["labeled_edge_count"] = g.num_labels();
  std::ofstream mout(path + ".meta.json");
  if (!mout) throw DataError("cannot write metadata sidecar for: " + path);
  mout << meta.dump(2) << '\n';
}

Graph load_graph(const std::string& path) {
  std::ifstream meta_in(path + ".meta.json");
  if (!meta_in) return load_edge_list(path).graph;

  nlohmann::json meta;
  try {
    meta_in >> meta;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path + ".meta.json: " + e.what());
  }
  GraphData data;
  data.node_names = meta.at("node_names").get<std::vector<std::string>>();
  data.num_nodes = meta.at("num_nodes").get<int>();
  if (static_cast<int>(data.node_names.size()) != data.num_nodes)
    throw DataError(path + ".meta.json: node_names does not match num_nodes");
  if (meta.contains("node_depths"))
    data.node_depths = meta.at("node_depths").get<std::vector<int>>();

  std::unordered_map<std::string, int> ids;
  for (int i = 0; i < data.num_nodes; ++i) ids.emplace(data.node_names[i], i);

  const EdgeListLoad raw = load_edge_list(path);
  const Graph& rg = raw.graph;
  for (int e = 0; e < rg.num_edges(); ++e) {
    const auto lab = *rg.label(e);
    const auto hy = ids.find(rg.name(lab.first));
    const auto hp = ids.find(rg.name(lab.second));
    if (hy == ids.end() || hp == ids.end())
      throw DataError(path + ": node name missing from sidecar");
    data.edges.push_back({hy->second, hp->second});
    data.labels.emplace_back(std::make_pair(hy->second, hp->second));
  }
  return Graph(std::move(data));
}

// ---------------------------------------------------------------------------

SplitGraph split_link_prediction(const Graph& g, double test_fraction,
                                 std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw std::invalid_argument("test_fraction must be in (0, 1)");
  const std::vector<bool> is_root =
      g.num_labels() > 0 ? g.root_mask() : std::vector<bool>(g.num_nodes(), false);

  std::vector<int> candidates;
  for (int e = 0; e < g.num_edges(); ++e) {
    const auto [u, v] = g.edges()[e];
    if (g.degree(u) >= 2 && g.degree(v) >= 2 && !is_root[u] && !is_root[v])
      candidates.push_back(e);
  }
  if (candidates.empty())
    throw DataError("no edges eligible for a link-prediction split "
                    "(every edge touches a root or a leaf)");

  std::mt19937_64 rng(seed);
  std::shuffle(candidates.begin(), candidates.end(), rng);
  const int target = static_cast<int>(std::floor(test_fraction * g.num_edges()));

  std::vector<int> remaining_degree(g.num_nodes());
  for (int u = 0; u < g.num_nodes(); ++u) remaining_degree[u] = g.degree(u);
  std::vector<bool> removed(g.num_edges(), false);
  int taken = 0;
  for (int e : candidates) {
    if (taken >= target) break;
    const auto [u, v] = g.edges()[e];
    // Both endpoints must keep at least one train edge.
    if (remaining_degree[u] < 2 || remaining_degree[v] < 2) continue;
    removed[e] = true;
    --remaining_degree[u];
    --remaining_degree[v];
    ++taken;
  }

  SplitGraph split;
  split.num_nodes = g.num_nodes();
  for (int e = 0; e < g.num_edges(); ++e)
    (removed[e] ? split.test_edges : split.train_edges).push_back(g.edges()[e]);
  return split;
}

}  // namespace cone_embed
