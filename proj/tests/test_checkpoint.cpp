#include <doctest.h>

#include <filesystem>
#include <fstream>

#include <cone_embed/checkpoint.hpp>
#include <cone_embed/errors.hpp>

#include "test_util.hpp"

using namespace cone_embed;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "cone_embed_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

Embedding random_embedding(const EmbeddingSpace& space, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Embedding emb;
  emb.space = space;
  emb.num_nodes = n;
  for (int i = 0; i < n; ++i) {
    const auto p = test_util::random_point(rng, space);
    emb.coords.insert(emb.coords.end(), p.begin(), p.end());
    emb.node_names.push_back("node" + std::to_string(i));
  }
  return emb;
}

}  // namespace

TEST_CASE("checkpoint round trip is bit exact") {
  for (const EmbeddingSpace space :
       {EmbeddingSpace{EuclideanSpace{4}}, EmbeddingSpace{PoincareBall{3}},
        EmbeddingSpace{MetricCone{EuclideanSpace{5}, 0.75, 2e-3}},
        EmbeddingSpace{MetricCone{PoincareBall{2}, 1.5, 1e-3}}}) {
    Checkpoint ckpt;
    ckpt.embedding = random_embedding(space, 7, 99);
    ckpt.config.lr = 0.123;
    ckpt.config.seed = 42;
    ckpt.epoch = 17;
    ckpt.loss_history = {2.5, 1.25, 0.625};
    const auto path = temp_file(std::string("ckpt_") + space_kind(space) + ".json");
    save_checkpoint(ckpt, path.string());
    const Checkpoint back = load_checkpoint(path.string());
    CHECK(back.embedding.coords == ckpt.embedding.coords);
    CHECK(back.embedding.node_names == ckpt.embedding.node_names);
    CHECK(back.embedding.dim() == ckpt.embedding.dim());
    CHECK(space_kind(back.embedding.space) == space_kind(space));
    CHECK(back.config.lr == 0.123);
    CHECK(back.config.seed == 42);
    CHECK(back.epoch == 17);
    CHECK(back.loss_history == ckpt.loss_history);
    if (is_cone(space)) {
      const auto& a = std::get<MetricCone>(back.embedding.space);
      const auto& b = std::get<MetricCone>(space);
      CHECK(a.beta == b.beta);
      CHECK(a.eps == b.eps);
    }
  }
  CHECK_THROWS_AS(load_checkpoint("/nonexistent/ckpt.json"), DataError);
}

TEST_CASE("embedding csv round trip") {
  const Embedding emb = random_embedding(EuclideanSpace{6}, 9, 5);
  const auto path = temp_file("emb.csv");
  save_embedding_csv(emb, path.string());
  const Embedding back = load_embedding_csv(path.string());
  CHECK(back.num_nodes == 9);
  CHECK(back.dim() == 6);
  CHECK(back.node_names == emb.node_names);
  CHECK(back.coords == emb.coords);
}

TEST_CASE("csv loader rejects malformed rows") {
  const auto path = temp_file("bad_emb.csv");
  {
    std::ofstream out(path);
    out << "a,1.0,2.0\nb,3.0\n";
  }
  CHECK_THROWS_AS(load_embedding_csv(path.string()), DataError);
  const auto path2 = temp_file("bad_emb2.csv");
  {
    std::ofstream out(path2);
    out << "a,1.0,zzz\n";
  }
  CHECK_THROWS_AS(load_embedding_csv(path2.string()), DataError);
}

TEST_CASE("align_to_graph reorders by name and reports missing nodes") {
  GraphData d;
  d.num_nodes = 3;
  d.edges = {{0, 1}, {1, 2}};
  d.node_names = {"x", "y", "z"};
  const Graph g(std::move(d));

  Embedding emb;
  emb.space = EuclideanSpace{2};
  emb.num_nodes = 3;
  emb.node_names = {"z", "x", "y"};
  emb.coords = {1.0, 2.0, 3.0, 4.0, 5.0, 6.0};
  const Embedding aligned = align_to_graph(emb, g);
  CHECK(aligned.node_names == g.node_names());
  CHECK(aligned.point(0)[0] == 3.0);  // "x"
  CHECK(aligned.point(1)[0] == 5.0);  // "y"
  CHECK(aligned.point(2)[0] == 1.0);  // "z"

  emb.node_names = {"z", "x", "w"};
  CHECK_THROWS_WITH_AS(align_to_graph(emb, g), doctest::Contains("y"), DataError);
}
