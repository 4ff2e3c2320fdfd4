#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <cone_embed/geometry.hpp>

namespace cone_embed {

// Per-node coordinate vectors in one embedding space; cone rows carry the
// height as the trailing coordinate.
struct Embedding {
  EmbeddingSpace space;
  int num_nodes = 0;
  std::vector<double> coords;  // num_nodes x ambient_dim(space), row-major
  std::vector<std::string> node_names;  // empty when unnamed

  int dim() const { return ambient_dim(space); }

  std::span<double> point(int i) {
    return {coords.data() + static_cast<std::size_t>(i) * dim(),
            static_cast<std::size_t>(dim())};
  }
  std::span<const double> point(int i) const {
    return {coords.data() + static_cast<std::size_t>(i) * dim(),
            static_cast<std::size_t>(dim())};
  }
  std::span<const double> base_point(int i) const {
    return point(i).first(static_cast<std::size_t>(base_dim(space)));
  }
  double height(int i) const { return point(i)[static_cast<std::size_t>(dim()) - 1]; }

  double pair_distance(int i, int j) const {
    return distance(space, point(i), point(j));
  }
};

// Base/Poincare coords uniform in [-0.001, 0.001] per dimension; cone heights
// uniform in [0.4, 0.6].
Embedding init_embedding(const EmbeddingSpace& space, int num_nodes,
                         std::uint64_t seed);

// Symmetric nonnegative pairwise distances with zero diagonal.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  explicit DistanceMatrix(int n) : n_(n), d_(static_cast<std::size_t>(n) * n, 0.0) {}

  // Pairwise base-space distances of an embedding; rows filled in parallel.
  static DistanceMatrix from_embedding(const Embedding& emb);

  int size() const { return n_; }
  double operator()(int i, int j) const {
    return d_[static_cast<std::size_t>(i) * n_ + j];
  }
  void set(int i, int j, double v) {
    d_[static_cast<std::size_t>(i) * n_ + j] = v;
    d_[static_cast<std::size_t>(j) * n_ + i] = v;
  }

 private:
  int n_ = 0;
  std::vector<double> d_;
};

}  // namespace cone_embed
