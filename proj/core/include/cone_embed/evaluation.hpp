#pragma once

// Hierarchy scores, edge-direction accuracy, reconstruction / link-prediction
// ranking metrics, and Spearman rank correlation against gold scores.

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <cone_embed/embedding.hpp>
#include <cone_embed/graph.hpp>

namespace cone_embed {

struct ScoreConfig {
  double alpha = 10.0;
};

// score(u, v) = -alpha * (h(u) - h(v)) * d(u, v) where h is the hierarchy
// coordinate of the space (cone height; Poincare norm; Euclidean distance
// from the mean embedding) and d is the base-space distance for cones, the
// space distance otherwise.  Positive when v sits higher in the hierarchy.
class HierarchyScorer {
 public:
  explicit HierarchyScorer(const Embedding& emb, ScoreConfig cfg = {});

  double score(int u, int v) const;  // throws on u == v
  double hierarchy_value(int u) const;

 private:
  const Embedding* emb_;
  ScoreConfig cfg_;
  std::vector<double> mean_;  // Euclidean only
};

double hierarchy_score(const Embedding& emb, int u, int v, ScoreConfig cfg = {});

// Fraction of labeled edges with score(hypo, hype) strictly positive; ties
// count as wrong.  Throws when the graph has no direction labels.
double edge_direction_accuracy(const Embedding& emb, const Graph& g,
                               ScoreConfig cfg = {});

struct RankingMetrics {
  double mean_rank = 0.0;
  double map = 0.0;
};

// For every node: rank all other nodes by embedding distance (ties broken by
// node index).  A neighbor's rank counts only strictly-closer non-neighbors
// as competitors; MAP is the mean average precision of neighbor retrieval.
RankingMetrics reconstruction_metrics(const Embedding& emb, const Graph& g);

// Same ranking with test edges as positives; each node's train neighbors are
// excluded from its candidate pool.  Throws when the test set is empty.
RankingMetrics link_prediction_metrics(const Embedding& emb, const SplitGraph& split);

using PairScores = std::map<std::pair<std::string, std::string>, double>;

struct CorrelationResult {
  double rho = 0.0;
  int shared_pairs = 0;
  int ignored_pairs = 0;  // present in only one of the two maps
};

// Spearman rank correlation over the shared pairs (average ranks for ties);
// throws when fewer than 3 pairs are shared.
CorrelationResult rank_correlation(const PairScores& scores, const PairScores& gold);

struct EvalReport {
  std::optional<double> mean_rank;
  std::optional<double> map;
  std::optional<double> edge_direction_accuracy;
  std::optional<double> correlation;
  double wall_time_seconds = 0.0;
};

}  // namespace cone_embed
