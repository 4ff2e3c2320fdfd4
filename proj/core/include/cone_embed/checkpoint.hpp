#pragma once

// Checkpoint JSON: space descriptor (with beta/eps for cones), per-node base
// coordinate arrays, heights, the training config, epoch count and loss
// history.  CSV import ("name,c1,...,cd") covers externally trained
// embeddings for lift mode.

#include <string>

#include <cone_embed/embedding.hpp>
#include <cone_embed/training.hpp>

namespace cone_embed {

struct Checkpoint {
  Embedding embedding;
  TrainConfig config;
  int epoch = 0;
  std::vector<double> loss_history;
  double train_wall_seconds = 0.0;
  double train_cpu_seconds = 0.0;
};

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

// One row per node: name, then the coordinates.  Import assumes a Euclidean
// space of the column count's dimension.
void save_embedding_csv(const Embedding& emb, const std::string& path);
Embedding load_embedding_csv(const std::string& path);

// Reorders embedding rows to match the graph's node order by name; throws
// DataError listing graph nodes missing from the embedding.
Embedding align_to_graph(const Embedding& emb, const Graph& g);

}  // namespace cone_embed
