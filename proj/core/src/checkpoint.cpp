#include <cone_embed/checkpoint.hpp>

#include <fstream>
#include <sstream>
#include <unordered_map>

#include <cone_embed/errors.hpp>

#include <json.hpp>

namespace cone_embed {

namespace {

using nlohmann::json;

json space_to_json(const EmbeddingSpace& space) {
  json j;
  j["kind"] = space_kind(space);
  if (const auto* e = std::get_if<EuclideanSpace>(&space)) {
    j["dim"] = e->dim;
  } else if (const auto* p = std::get_if<PoincareBall>(&space)) {
    j["dim"] = p->dim;
    j["boundary_eps"] = p->boundary_eps;
  } else {
    const auto& c = std::get<MetricCone>(space);
    j["beta"] = c.beta;
    j["eps"] = c.eps;
    json base;
    if (const auto* be = std::get_if<EuclideanSpace>(&c.base)) {
      base["kind"] = "euclidean";
      base["dim"] = be->dim;
    } else {
      const auto& bp = std::get<PoincareBall>(c.base);
      base["kind"] = "poincare";
      base["dim"] = bp.dim;
      base["boundary_eps"] = bp.boundary_eps;
    }
    j["base"] = base;
  }
  return j;
}

EmbeddingSpace space_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "euclidean") {
    return EuclideanSpace{j.at("dim").get<int>()};
  }
  if (kind == "poincare") {
    PoincareBall b;
    b.dim = j.at("dim").get<int>();
    b.boundary_eps = j.value("boundary_eps", kDefaultBoundaryEps);
    return b;
  }
  if (kind != "cone") throw DataError("unknown space kind: " + kind);
  MetricCone c;
  c.beta = j.at("beta").get<double>();
  c.eps = j.at("eps").get<double>();
  const json& base = j.at("base");
  const std::string bk = base.at("kind").get<std::string>();
  if (bk == "euclidean") {
    c.base = EuclideanSpace{base.at("dim").get<int>()};
  } else if (bk == "poincare") {
    PoincareBall b;
    b.dim = base.at("dim").get<int>();
    b.boundary_eps = base.value("boundary_eps", kDefaultBoundaryEps);
    c.base = b;
  } else {
    throw DataError("unknown cone base kind: " + bk);
  }
  return c;
}

json config_to_json(const TrainConfig& c) {
  return json{{"lr", c.lr},
              {"epochs", c.epochs},
              {"neg_samples", c.neg_samples},
              {"burn_in_epochs", c.burn_in_epochs},
              {"burn_in_lr_factor", c.burn_in_lr_factor},
              {"batch_size", c.batch_size},
              {"seed", c.seed},
              {"beta", c.beta},
              {"eps", c.eps},
              {"freeze_base", c.freeze_base},
              {"use_distance_cache", c.use_distance_cache}};
}

TrainConfig config_from_json(const json& j) {
  TrainConfig c;
  c.lr = j.value("lr", c.lr);
  c.epochs = j.value("epochs", c.epochs);
  c.neg_samples = j.value("neg_samples", c.neg_samples);
  c.burn_in_epochs = j.value("burn_in_epochs", c.burn_in_epochs);
  c.burn_in_lr_factor = j.value("burn_in_lr_factor", c.burn_in_lr_factor);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.seed = j.value("seed", c.seed);
  c.beta = j.value("beta", c.beta);
  c.eps = j.value("eps", c.eps);
  c.freeze_base = j.value("freeze_base", c.freeze_base);
  c.use_distance_cache = j.value("use_distance_cache", c.use_distance_cache);
  return c;
}

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  const Embedding& emb = ckpt.embedding;
  const int bd = base_dim(emb.space);
  json j;
  j["format"] = "cone-embed-checkpoint-v1";
  j["space"] = space_to_json(emb.space);
  j["num_nodes"] = emb.num_nodes;
  if (!emb.node_names.empty()) j["node_names"] = emb.node_names;
  json coords = json::array();
  json heights = json::array();
  for (int i = 0; i < emb.num_nodes; ++i) {
    const auto p = emb.point(i);
    json row = json::array();
    for (int k = 0; k < bd; ++k) row.push_back(p[k]);
    coords.push_back(std::move(row));
    if (is_cone(emb.space)) heights.push_back(p[bd]);
  }
  j["coords"] = std::move(coords);
  if (is_cone(emb.space)) j["heights"] = std::move(heights);
  j["config"] = config_to_json(ckpt.config);
  j["epoch"] = ckpt.epoch;
  j["loss_history"] = ckpt.loss_history;
  j["train_wall_seconds"] = ckpt.train_wall_seconds;
  j["train_cpu_seconds"] = ckpt.train_cpu_seconds;

  std::ofstream out(path);
  if (!out) throw DataError("cannot write checkpoint: " + path);
  out << j.dump(2) << '\n';
  if (!out) throw DataError("failed writing checkpoint: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open checkpoint: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw DataError(path + ": " + e.what());
  }
  try {
    Checkpoint ckpt;
    Embedding& emb = ckpt.embedding;
    emb.space = space_from_json(j.at("space"));
    emb.num_nodes = j.at("num_nodes").get<int>();
    if (j.contains("node_names"))
      emb.node_names = j.at("node_names").get<std::vector<std::string>>();
    const int bd = base_dim(emb.space);
    const int dim = ambient_dim(emb.space);
    const auto& coords = j.at("coords");
    if (static_cast<int>(coords.size()) != emb.num_nodes)
      throw DataError(path + ": coords rows do not match num_nodes");
    emb.coords.resize(static_cast<std::size_t>(emb.num_nodes) * dim);
    for (int i = 0; i < emb.num_nodes; ++i) {
      const auto& row = coords[i];
      if (static_cast<int>(row.size()) != bd)
        throw DataError(path + ": coordinate row has wrong dimension");
      auto p = emb.point(i);
      for (int k = 0; k < bd; ++k) p[k] = row[k].get<double>();
    }
    if (is_cone(emb.space)) {
      const auto& heights = j.at("heights");
      if (static_cast<int>(heights.size()) != emb.num_nodes)
        throw DataError(path + ": heights do not match num_nodes");
      for (int i = 0; i < emb.num_nodes; ++i)
        emb.point(i)[bd] = heights[i].get<double>();
    }
    if (j.contains("config")) ckpt.config = config_from_json(j.at("config"));
    ckpt.epoch = j.value("epoch", 0);
    if (j.contains("loss_history"))
      ckpt.loss_history = j.at("loss_history").get<std::vector<double>>();
    ckpt.train_wall_seconds = j.value("train_wall_seconds", 0.0);
    ckpt.train_cpu_seconds = j.value("train_cpu_seconds", 0.0);
    return ckpt;
  } catch (const json::exception& e) {
    throw DataError(path + ": " + e.what());
  }
}

void save_embedding_csv(const Embedding& emb, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write embedding CSV: " + path);
  out.precision(17);
  for (int i = 0; i < emb.num_nodes; ++i) {
    out << (emb.node_names.empty() ? std::to_string(i) : emb.node_names[i]);
    for (double v : emb.point(i)) out << ',' << v;
    out << '\n';
  }
  if (!out) throw DataError("failed writing embedding CSV: " + path);
}

Embedding load_embedding_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open embedding CSV: " + path);
  std::vector<std::string> names;
  std::vector<std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string field;
    if (!std::getline(ss, field, ','))
      throw DataError(path + ":" + std::to_string(line_no) + ": empty row");
    names.push_back(field);
    std::vector<double> row;
    while (std::getline(ss, field, ',')) {
      try {
        row.push_back(std::stod(field));
      } catch (const std::exception&) {
        throw DataError(path + ":" + std::to_string(line_no) +
                        ": bad coordinate \"" + field + "\"");
      }
    }
    if (row.empty())
      throw DataError(path + ":" + std::to_string(line_no) + ": no coordinates");
    if (!rows.empty() && row.size() != rows.front().size())
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": inconsistent coordinate count");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError(path + ": empty embedding CSV");
  Embedding emb;
  emb.space = EuclideanSpace{static_cast<int>(rows.front().size())};
  emb.num_nodes = static_cast<int>(rows.size());
  emb.node_names = std::move(names);
  emb.coords.reserve(rows.size() * rows.front().size());
  for (const auto& row : rows)
    emb.coords.insert(emb.coords.end(), row.begin(), row.end());
  return emb;
}

Embedding align_to_graph(const Embedding& emb, const Graph& g) {
  if (!g.has_names())
    throw DataError("graph has no node names to align the embedding against");
  std::unordered_map<std::string, int> pos;
  for (int i = 0; i < emb.num_nodes; ++i) pos.emplace(emb.node_names[i], i);
  std::vector<std::string> missing;
  std::vector<int> source(g.num_nodes(), -1);
  for (int i = 0; i < g.num_nodes(); ++i) {
    auto it = pos.find(g.name(i));
    if (it == pos.end())
      missing.push_back(g.name(i));
    else
      source[i] = it->second;
  }
  if (!missing.empty()) {
    std::string msg = "embedding is missing " + std::to_string(missing.size()) +
                      " graph node(s):";
    for (std::size_t i = 0; i < missing.size() && i < 10; ++i) msg += " " + missing[i];
    if (missing.size() > 10) msg += " ...";
    throw DataError(msg);
  }
  Embedding out;
  out.space = emb.space;
  out.num_nodes = g.num_nodes();
  out.node_names = g.node_names();
  const int dim = emb.dim();
  out.coords.resize(static_cast<std::size_t>(out.num_nodes) * dim);
  for (int i = 0; i < out.num_nodes; ++i) {
    const auto src = emb.point(source[i]);
    std::copy(src.begin(), src.end(), out.point(i).begin());
  }
  return out;
}

}  // namespace cone_embed
