#include <cone_embed/embedding.hpp>

#include <random>
#include <stdexcept>

#include <cone_embed/parallel.hpp>

namespace cone_embed {

Embedding init_embedding(const EmbeddingSpace& space, int num_nodes,
                         std::uint64_t seed) {
  validate(space);
  if (num_nodes < 0) throw std::invalid_argument("negative node count");
  Embedding emb;
  emb.space = space;
  emb.num_nodes = num_nodes;
  emb.coords.resize(static_cast<std::size_t>(num_nodes) * ambient_dim(space));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> small(-0.001, 0.001);
  std::uniform_real_distribution<double> mid_height(0.4, 0.6);
  const int bd = base_dim(space);
  const bool cone = is_cone(space);
  for (int i = 0; i < num_nodes; ++i) {
    auto row = emb.point(i);
    for (int k = 0; k < bd; ++k) row[k] = small(rng);
    if (cone) row[bd] = mid_height(rng);
  }
  return emb;
}

DistanceMatrix DistanceMatrix::from_embedding(const Embedding& emb) {
  const int n = emb.num_nodes;
  DistanceMatrix m(n);
  parallel_for(0, n, [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t i = lo; i < hi; ++i) {
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        m.d_[static_cast<std::size_t>(i) * n + j] =
            distance(emb.space, emb.point(static_cast<int>(i)), emb.point(j));
      }
    }
  });
  return m;
}

}  // namespace cone_embed
