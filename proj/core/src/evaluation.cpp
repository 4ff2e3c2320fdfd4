#include <cone_embed/evaluation.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

#include <cone_embed/errors.hpp>

namespace cone_embed {

HierarchyScorer::HierarchyScorer(const Embedding& emb, ScoreConfig cfg)
    : emb_(&emb), cfg_(cfg) {
  if (!(cfg_.alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  if (std::holds_alternative<EuclideanSpace>(emb.space)) {
    const int d = emb.dim();
    mean_.assign(d, 0.0);
    for (int i = 0; i < emb.num_nodes; ++i) {
      const auto p = emb.point(i);
      for (int k = 0; k < d; ++k) mean_[k] += p[k];
    }
    if (emb.num_nodes > 0)
      for (double& m : mean_) m /= emb.num_nodes;
  }
}

double HierarchyScorer::hierarchy_value(int u) const {
  const auto p = emb_->point(u);
  if (is_cone(emb_->space)) return emb_->height(u);
  if (std::holds_alternative<PoincareBall>(emb_->space)) {
    double s = 0.0;
    for (double v : p) s += v * v;
    return std::sqrt(s);
  }
  double s = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double d = p[k] - mean_[k];
    s += d * d;
  }
  return std::sqrt(s);
}

double HierarchyScorer::score(int u, int v) const {
  if (u == v) throw std::invalid_argument("hierarchy score needs two distinct nodes");
  double d;
  if (const auto* cone = std::get_if<MetricCone>(&emb_->space)) {
    d = base_distance(cone->base, emb_->base_point(u), emb_->base_point(v));
  } else {
    d = emb_->pair_distance(u, v);
  }
  // Positive when v sits higher in the hierarchy (smaller height / closer to
  // the origin) than u.
  return -cfg_.alpha * (hierarchy_value(v) - hierarchy_value(u)) * d;
}

double hierarchy_score(const Embedding& emb, int u, int v, ScoreConfig cfg) {
  return HierarchyScorer(emb, cfg).score(u, v);
}

double edge_direction_accuracy(const Embedding& emb, const Graph& g, ScoreConfig cfg) {
  if (g.num_labels() == 0)
    throw std::invalid_argument("graph has no direction labels");
  const HierarchyScorer scorer(emb, cfg);
  int correct = 0;
  for (const auto& [hypo, hype] : g.labeled_edges())
    if (scorer.score(hypo, hype) > 0.0) ++correct;
  return static_cast<double>(correct) / g.num_labels();
}

// ---------------------------------------------------------------------------

namespace {

struct RankAccumulator {
  double rank_sum = 0.0;
  std::int64_t rank_count = 0;
  double ap_sum = 0.0;
  int ap_count = 0;

  RankingMetrics finish() const {
    if (rank_count == 0) throw std::invalid_argument("no positive pairs to rank");
    return {rank_sum / static_cast<double>(rank_count),
            ap_sum / static_cast<double>(ap_count)};
  }
};

// Ranks `candidates` by distance from u (ties by index) and scores the
// positives: a positive's rank is 1 + the number of strictly-closer
// competitors (candidates that are not positives themselves).
void rank_node(const Embedding& emb, int u, const std::vector<int>& candidates,
               const std::unordered_set<int>& positives, RankAccumulator& acc) {
  std::vector<std::pair<double, int>> order;
  order.reserve(candidates.size());
  for (int c : candidates) order.emplace_back(emb.pair_distance(u, c), c);
  std::sort(order.begin(), order.end());

  int competitors_seen = 0;
  int hits = 0;
  double prec_sum = 0.0;
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    if (positives.contains(order[pos].second)) {
      acc.rank_sum += 1.0 + competitors_seen;
      ++acc.rank_count;
      ++hits;
      prec_sum += static_cast<double>(hits) / static_cast<double>(pos + 1);
    } else {
      ++competitors_seen;
    }
  }
  acc.ap_sum += prec_sum / static_cast<double>(positives.size());
  ++acc.ap_count;
}

}  // namespace

RankingMetrics reconstruction_metrics(const Embedding& emb, const Graph& g) {
  if (g.num_nodes() < 2) throw std::invalid_argument("graph needs at least 2 nodes");
  if (emb.num_nodes != g.num_nodes())
    throw DataError("embedding/graph node count mismatch");
  RankAccumulator acc;
  std::vector<int> candidates;
  for (int u = 0; u < g.num_nodes(); ++u) {
    const auto& nbrs = g.neighbors(u);
    if (nbrs.empty()) continue;
    candidates.clear();
    for (int c = 0; c < g.num_nodes(); ++c)
      if (c != u) candidates.push_back(c);
    rank_node(emb, u, candidates, {nbrs.begin(), nbrs.end()}, acc);
  }
  return acc.finish();
}

RankingMetrics link_prediction_metrics(const Embedding& emb, const SplitGraph& split) {
  if (split.test_edges.empty()) throw std::invalid_argument("empty test edge set");
  if (emb.num_nodes != split.num_nodes)
    throw DataError("embedding/split node count mismatch");
  const int n = split.num_nodes;
  std::vector<std::unordered_set<int>> train_adj(n), test_adj(n);
  for (const Edge& e : split.train_edges) {
    train_adj[e.u].insert(e.v);
    train_adj[e.v].insert(e.u);
  }
  for (const Edge& e : split.test_edges) {
    test_adj[e.u].insert(e.v);
    test_adj[e.v].insert(e.u);
  }
  RankAccumulator acc;
  std::vector<int> candidates;
  for (int u = 0; u < n; ++u) {
    if (test_adj[u].empty()) continue;
    candidates.clear();
    for (int c = 0; c < n; ++c)
      if (c != u && !train_adj[u].contains(c)) candidates.push_back(c);
    rank_node(emb, u, candidates, test_adj[u], acc);
  }
  return acc.finish();
}

// ---------------------------------------------------------------------------

namespace {

// Average ranks (1-based), ties share the mean of the positions they occupy.
std::vector<double> average_ranks(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

CorrelationResult rank_correlation(const PairScores& scores, const PairScores& gold) {
  std::vector<double> a, b;
  int ignored = 0;
  for (const auto& [key, value] : scores) {
    auto it = gold.find(key);
    if (it == gold.end()) {
      ++ignored;
      continue;
    }
    a.push_back(value);
    b.push_back(it->second);
  }
  for (const auto& [key, value] : gold)
    if (!scores.contains(key)) ++ignored;

  if (a.size() < 3)
    throw DataError("rank correlation needs at least 3 shared pairs, got " +
                    std::to_string(a.size()));

  const std::vector<double> ra = average_ranks(a);
  const std::vector<double> rb = average_ranks(b);
  const double n = static_cast<double>(ra.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    ma += ra[i];
    mb += rb[i];
  }
  ma /= n;
  mb /= n;
  double cov = 0.0, va = 0.0, vb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    const double da = ra[i] - ma;
    const double db = rb[i] - mb;
    cov += da * db;
    va += da * da;
    vb += db * db;
  }
  if (va == 0.0 || vb == 0.0)
    throw NumericalError("rank correlation undefined: constant ranking");
  CorrelationResult out;
  out.rho = cov / std::sqrt(va * vb);
  out.shared_pairs = static_cast<int>(ra.size());
  out.ignored_pairs = ignored;
  return out;
}

}  // namespace cone_embed
