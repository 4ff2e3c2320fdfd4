#pragma once

// Negative-sampling objective and the Riemannian SGD loop, including lift
// mode: base coordinates frozen, heights trained against a precomputed
// base-distance matrix.

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include <cone_embed/embedding.hpp>
#include <cone_embed/graph.hpp>

namespace cone_embed {

struct TrainConfig {
  double lr = 0.05;
  int epochs = 300;
  int neg_samples = 10;
  int burn_in_epochs = 10;
  double burn_in_lr_factor = 0.1;
  int batch_size = 32;
  std::uint64_t seed = 1;
  double beta = 1.0;           // cone generatrix
  double eps = kDefaultHeightEps;
  bool freeze_base = false;    // lift mode
  bool use_distance_cache = true;  // lift mode: off = recompute base distances
};

void validate(const TrainConfig& cfg);

// Per-edge log-softmax term of the objective (the maximized quantity):
// log( exp(-d(u,v)) / (exp(-d(u,v)) + sum_j exp(-d(u, neg_j))) ).
// Negatives must come from the non-neighbor pool of u (u itself allowed,
// duplicates allowed); throws on an empty negative list.
double nce_loss(const Embedding& emb, Edge edge, std::span<const int> negatives);

// Euclidean gradient of the minimized per-edge term (-nce_loss), accumulated
// into grad (num_nodes x dim, caller-zeroed).  Returns the loss term.
double nce_loss_grad(const Embedding& emb, Edge edge, std::span<const int> negatives,
                     std::span<double> grad);

class Trainer {
 public:
  // Fresh embedding in `space`, seeded from cfg.seed.
  Trainer(const Graph& g, const EmbeddingSpace& space, const TrainConfig& cfg);
  // Resume/custom start.
  Trainer(const Graph& g, Embedding initial, const TrainConfig& cfg);
  // Lift mode: builds the cone over the pretrained space, copies the base
  // coordinates verbatim, seeds heights, and (by default) caches all base
  // distances so epochs cost the same at any base dimension.
  static Trainer lift(const Graph& g, const Embedding& pretrained, TrainConfig cfg);

  // One parameter update from a batch of edges (negatives resampled inside);
  // returns the summed batch loss evaluated at the pre-update parameters.
  // Throws NumericalError on a non-finite gradient.
  double sgd_step(std::span<const Edge> batch, std::optional<double> lr = {});

  // Shuffles edges, applies batches, returns the mean per-edge loss.
  double run_epoch(double lr);

  // burn_in_epochs at lr * burn_in_lr_factor, then cfg.epochs at lr.
  Embedding run();

  const Embedding& embedding() const { return emb_; }
  const std::vector<double>& loss_history() const { return loss_history_; }
  const TrainConfig& config() const { return cfg_; }

  // Cache-aware pair distance (what the loss sees during training).
  double pair_distance(int i, int j) const;

  // Negatives drawn for each edge of the most recent sgd_step, in batch
  // order (inspection hook for the descent tests).
  const std::vector<std::vector<int>>& last_negatives() const {
    return last_negatives_;
  }

 private:
  void sample_negatives(int u, std::vector<int>& out);
  double edge_loss_grad(Edge edge, std::span<const int> negatives);
  void apply_update(double lr);

  const Graph& graph_;
  TrainConfig cfg_;
  Embedding emb_;
  std::optional<DistanceMatrix> base_cache_;
  std::mt19937_64 rng_;
  std::vector<double> grad_;     // num_nodes x dim accumulator
  std::vector<int> touched_;
  std::vector<char> is_touched_;
  std::vector<int> negatives_;
  std::vector<double> pair_dist_;   // forward distances, positive first
  std::vector<std::vector<int>> last_negatives_;
  std::vector<Edge> epoch_edges_;
  std::vector<double> loss_history_;
};

// Full training: init + burn-in + main epochs.
Embedding train(const Graph& g, const EmbeddingSpace& space, const TrainConfig& cfg);

// Lift mode (Algorithm-style fast path): returns a cone embedding whose base
// coordinates equal `pretrained` bit for bit.
Embedding lift_train(const Graph& g, const Embedding& pretrained, TrainConfig cfg);

}  // namespace cone_embed
