#include <cone_embed/training.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <cone_embed/errors.hpp>

namespace cone_embed {

namespace {

// log(sum_i exp(-d_i)) and the softmax weights p_i = exp(-d_i)/Z.
double neg_softmax(const std::vector<double>& d, std::vector<double>& p) {
  double m = -d[0];
  for (double v : d) m = std::max(m, -v);
  double z = 0.0;
  p.resize(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    p[i] = std::exp(-d[i] - m);
    z += p[i];
  }
  for (double& v : p) v /= z;
  return m + std::log(z);
}

}  // namespace

void validate(const TrainConfig& cfg) {
  if (!(cfg.lr > 0.0)) throw std::invalid_argument("lr must be positive");
  if (cfg.epochs < 0) throw std::invalid_argument("epochs must be >= 0");
  if (cfg.neg_samples < 1) throw std::invalid_argument("neg_samples must be >= 1");
  if (cfg.burn_in_epochs < 0) throw std::invalid_argument("burn_in_epochs must be >= 0");
  if (!(cfg.burn_in_lr_factor > 0.0 && cfg.burn_in_lr_factor <= 1.0))
    throw std::invalid_argument("burn_in_lr_factor must be in (0, 1]");
  if (cfg.batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  if (!(cfg.beta > 0.0)) throw std::invalid_argument("beta must be positive");
  if (!(cfg.eps > 0.0 && cfg.eps < 0.5))
    throw std::invalid_argument("eps must be in (0, 1/2)");
}

double nce_loss(const Embedding& emb, Edge edge, std::span<const int> negatives) {
  if (negatives.empty()) throw std::invalid_argument("empty negative sample set");
  std::vector<double> d;
  d.reserve(negatives.size() + 1);
  d.push_back(emb.pair_distance(edge.u, edge.v));
  for (int w : negatives) d.push_back(emb.pair_distance(edge.u, w));
  std::vector<double> p;
  const double log_z = neg_softmax(d, p);
  return -d[0] - log_z;
}

double nce_loss_grad(const Embedding& emb, Edge edge, std::span<const int> negatives,
                     std::span<double> grad) {
  if (negatives.empty()) throw std::invalid_argument("empty negative sample set");
  const int dim = emb.dim();
  std::vector<double> d;
  d.reserve(negatives.size() + 1);
  d.push_back(emb.pair_distance(edge.u, edge.v));
  for (int w : negatives) d.push_back(emb.pair_distance(edge.u, w));
  std::vector<double> p;
  const double log_z = neg_softmax(d, p);

  auto row = [&](int node) {
    return grad.subspan(static_cast<std::size_t>(node) * dim,
                        static_cast<std::size_t>(dim));
  };
  // Minimized term l = d0 + log Z: dl/dd0 = 1 - p0, dl/ddj = -pj.
  distance_grad(emb.space, emb.point(edge.u), emb.point(edge.v), 1.0 - p[0],
                row(edge.u), row(edge.v));
  for (std::size_t j = 0; j < negatives.size(); ++j) {
    distance_grad(emb.space, emb.point(edge.u), emb.point(negatives[j]), -p[j + 1],
                  row(edge.u), row(negatives[j]));
  }
  return d[0] + log_z;
}

// ---------------------------------------------------------------------------

Trainer::Trainer(const Graph& g, const EmbeddingSpace& space, const TrainConfig& cfg)
    : Trainer(g, init_embedding(space, g.num_nodes(), cfg.seed), cfg) {}

Trainer::Trainer(const Graph& g, Embedding initial, const TrainConfig& cfg)
    : graph_(g), cfg_(cfg), emb_(std::move(initial)) {
  validate(cfg_);
  validate(emb_.space);
  if (emb_.num_nodes != g.num_nodes())
    throw DataError("embedding covers " + std::to_string(emb_.num_nodes) +
                    " nodes but the graph has " + std::to_string(g.num_nodes()));
  if (emb_.node_names.empty() && g.has_names()) emb_.node_names = g.node_names();
  if (cfg_.freeze_base && !is_cone(emb_.space))
    throw std::invalid_argument("freeze_base requires a cone embedding");
  rng_.seed(cfg_.seed ^ 0x9e3779b97f4a7c15ULL);
  grad_.assign(static_cast<std::size_t>(emb_.num_nodes) * emb_.dim(), 0.0);
  is_touched_.assign(emb_.num_nodes, 0);
}

Trainer Trainer::lift(const Graph& g, const Embedding& pretrained, TrainConfig cfg) {
  if (is_cone(pretrained.space))
    throw std::invalid_argument("lift expects a Euclidean or Poincare pretrained embedding");
  if (pretrained.num_nodes != g.num_nodes())
    throw DataError("pretrained embedding covers " +
                    std::to_string(pretrained.num_nodes) + " nodes but the graph has " +
                    std::to_string(g.num_nodes()));
  if (!pretrained.node_names.empty() && g.has_names() &&
      pretrained.node_names != g.node_names()) {
    std::ostringstream msg;
    msg << "pretrained node names do not match the graph; first mismatches:";
    int shown = 0;
    for (int i = 0; i < g.num_nodes() && shown < 5; ++i) {
      if (pretrained.node_names[i] != g.node_names()[i]) {
        msg << " [" << i << "] " << g.node_names()[i] << " vs "
            << pretrained.node_names[i];
        ++shown;
      }
    }
    throw DataError(msg.str());
  }

  MetricCone cone;
  cone.base = std::holds_alternative<EuclideanSpace>(pretrained.space)
                  ? BaseSpace{std::get<EuclideanSpace>(pretrained.space)}
                  : BaseSpace{std::get<PoincareBall>(pretrained.space)};
  cone.beta = cfg.beta;
  cone.eps = cfg.eps;
  cfg.freeze_base = true;

  const int n = pretrained.num_nodes;
  const int bd = base_dim(EmbeddingSpace{cone});
  Embedding emb;
  emb.space = cone;
  emb.num_nodes = n;
  emb.node_names = pretrained.node_names;
  emb.coords.resize(static_cast<std::size_t>(n) * (bd + 1));
  std::mt19937_64 height_rng(cfg.seed);
  std::uniform_real_distribution<double> mid(0.4, 0.6);
  for (int i = 0; i < n; ++i) {
    auto row = emb.point(i);
    const auto src = pretrained.point(i);
    std::copy(src.begin(), src.end(), row.begin());
    row[bd] = mid(height_rng);
  }

  Trainer t(g, std::move(emb), cfg);
  if (cfg.use_distance_cache)
    t.base_cache_ = DistanceMatrix::from_embedding(pretrained);
  return t;
}

double Trainer::pair_distance(int i, int j) const {
  if (const auto* cone = std::get_if<MetricCone>(&emb_.space)) {
    if (base_cache_ || cfg_.freeze_base) {
      const double bd = base_cache_
                            ? (*base_cache_)(i, j)
                            : base_distance(cone->base, emb_.base_point(i),
                                            emb_.base_point(j));
      return cone_distance(*cone, emb_.height(i), emb_.height(j), bd);
    }
  }
  return emb_.pair_distance(i, j);
}

void Trainer::sample_negatives(int u, std::vector<int>& out) {
  out.clear();
  const int n = graph_.num_nodes();
  std::uniform_int_distribution<int> pick(0, n - 1);
  for (int k = 0; k < cfg_.neg_samples; ++k) {
    int tries = 0;
    for (;;) {
      const int c = pick(rng_);
      if (!graph_.has_edge(u, c)) {  // N^c(u): non-neighbors, u itself included
        out.push_back(c);
        break;
      }
      if (++tries >= 64) {
        // Dense neighborhood: enumerate the pool once.
        const int pool = n - graph_.degree(u);
        std::uniform_int_distribution<int> pi(0, pool - 1);
        int want = pi(rng_);
        for (int x = 0; x < n; ++x) {
          if (!graph_.has_edge(u, x) && want-- == 0) {
            out.push_back(x);
            break;
          }
        }
        break;
      }
    }
  }
}

double Trainer::edge_loss_grad(Edge edge, std::span<const int> negatives) {
  const int dim = emb_.dim();
  const int hd = dim - 1;
  pair_dist_.clear();
  pair_dist_.push_back(pair_distance(edge.u, edge.v));
  for (int w : negatives) pair_dist_.push_back(pair_distance(edge.u, w));
  std::vector<double> p;
  const double log_z = neg_softmax(pair_dist_, p);

  auto touch = [&](int node) {
    if (!is_touched_[node]) {
      is_touched_[node] = 1;
      touched_.push_back(node);
    }
  };
  auto accum = [&](int a, int b, double w) {
    touch(a);
    touch(b);
    auto ga = std::span<double>(grad_).subspan(static_cast<std::size_t>(a) * dim,
                                               static_cast<std::size_t>(dim));
    auto gb = std::span<double>(grad_).subspan(static_cast<std::size_t>(b) * dim,
                                               static_cast<std::size_t>(dim));
    if (cfg_.freeze_base) {
      const auto& cone = std::get<MetricCone>(emb_.space);
      const double bd = base_cache_ ? (*base_cache_)(a, b)
                                    : base_distance(cone.base, emb_.base_point(a),
                                                    emb_.base_point(b));
      cone_distance_grad(cone, emb_.height(a), emb_.height(b), bd, w, ga[hd], gb[hd]);
    } else {
      distance_grad(emb_.space, emb_.point(a), emb_.point(b), w, ga, gb);
    }
  };

  accum(edge.u, edge.v, 1.0 - p[0]);
  for (std::size_t j = 0; j < negatives.size(); ++j)
    accum(edge.u, negatives[j], -p[j + 1]);
  return pair_dist_[0] + log_z;
}

void Trainer::apply_update(double lr) {
  const int dim = emb_.dim();
  const int hd = dim - 1;
  for (int node : touched_) {
    auto row = emb_.point(node);
    auto g = std::span<double>(grad_).subspan(static_cast<std::size_t>(node) * dim,
                                              static_cast<std::size_t>(dim));
    if (cfg_.freeze_base) {
      const auto& cone = std::get<MetricCone>(emb_.space);
      const double gh = g[hd] / (cone.beta * cone.beta);
      if (!std::isfinite(gh))
        throw NumericalError("non-finite gradient for node " + std::to_string(node));
      row[hd] = std::clamp(row[hd] - lr * gh, cone.eps, 1.0 - cone.eps);
    } else {
      riemannian_rescale(emb_.space, row, g);
      for (int k = 0; k < dim; ++k) {
        if (!std::isfinite(g[k]))
          throw NumericalError("non-finite gradient for node " + std::to_string(node) +
                               " coordinate " + std::to_string(k));
        row[k] -= lr * g[k];
      }
      project(emb_.space, row);
    }
    std::fill(g.begin(), g.end(), 0.0);
    is_touched_[node] = 0;
  }
  touched_.clear();
}

double Trainer::sgd_step(std::span<const Edge> batch, std::optional<double> lr) {
  last_negatives_.assign(batch.size(), {});
  double batch_loss = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    sample_negatives(batch[i].u, negatives_);
    last_negatives_[i] = negatives_;
    batch_loss += edge_loss_grad(batch[i], negatives_);
  }
  apply_update(lr.value_or(cfg_.lr));
  return batch_loss;
}

double Trainer::run_epoch(double lr) {
  epoch_edges_ = graph_.edges();
  std::shuffle(epoch_edges_.begin(), epoch_edges_.end(), rng_);
  double total = 0.0;
  const int e = static_cast<int>(epoch_edges_.size());
  for (int start = 0; start < e; start += cfg_.batch_size) {
    const int len = std::min(cfg_.batch_size, e - start);
    total += sgd_step({epoch_edges_.data() + start, static_cast<std::size_t>(len)}, lr);
  }
  return e > 0 ? total / e : 0.0;
}

Embedding Trainer::run() {
  for (int i = 0; i < cfg_.burn_in_epochs; ++i)
    loss_history_.push_back(run_epoch(cfg_.lr * cfg_.burn_in_lr_factor));
  for (int i = 0; i < cfg_.epochs; ++i)
    loss_history_.push_back(run_epoch(cfg_.lr));
  return emb_;
}

Embedding train(const Graph& g, const EmbeddingSpace& space, const TrainConfig& cfg) {
  if (g.num_nodes() == 0) throw std::invalid_argument("empty graph");
  Trainer t(g, space, cfg);
  return t.run();
}

Embedding lift_train(const Graph& g, const Embedding& pretrained, TrainConfig cfg) {
  if (g.num_nodes() == 0) throw std::invalid_argument("empty graph");
  Trainer t = Trainer::lift(g, pretrained, std::move(cfg));
  return t.run();
}

}  // namespace cone_embed
