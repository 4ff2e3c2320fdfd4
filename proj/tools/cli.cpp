#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

#include <cone_embed/checkpoint.hpp>
#include <cone_embed/errors.hpp>
#include <cone_embed/evaluation.hpp>
#include <cone_embed/graph.hpp>
#include <cone_embed/identifiability.hpp>
#include <cone_embed/parallel.hpp>
#include <cone_embed/training.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include "manifest.hpp"

namespace cone_embed::cli {

namespace {

using nlohmann::json;

struct Timer {
  std::chrono::steady_clock::time_point wall = std::chrono::steady_clock::now();
  std::clock_t cpu = std::clock();
  double wall_seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - wall).count();
  }
  double cpu_seconds() const {
    return static_cast<double>(std::clock() - cpu) / CLOCKS_PER_SEC;
  }
};

// "euclidean:D" | "poincare:D" | "cone:euclidean:D" | "cone:poincare:D";
// beta/eps for cones come from the training config.
EmbeddingSpace parse_space(const std::string& spec, const TrainConfig& cfg) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  auto dim_of = [&](const std::string& s) {
    try {
      const int d = std::stoi(s);
      if (d < 1) throw std::invalid_argument("");
      return d;
    } catch (const std::exception&) {
      throw CLI::ValidationError("--space", "bad dimension \"" + s + "\" in " + spec);
    }
  };
  if (parts.size() == 2 && parts[0] == "euclidean") return EuclideanSpace{dim_of(parts[1])};
  if (parts.size() == 2 && parts[0] == "poincare") return PoincareBall{dim_of(parts[1])};
  if (parts.size() == 3 && parts[0] == "cone") {
    MetricCone cone;
    cone.beta = cfg.beta;
    cone.eps = cfg.eps;
    if (parts[1] == "euclidean")
      cone.base = EuclideanSpace{dim_of(parts[2])};
    else if (parts[1] == "poincare")
      cone.base = PoincareBall{dim_of(parts[2])};
    else
      throw CLI::ValidationError("--space", "unknown cone base \"" + parts[1] + "\"");
    return cone;
  }
  throw CLI::ValidationError(
      "--space", spec + " (expected euclidean:D, poincare:D, or cone:<base>:D)");
}

std::vector<double> parse_grid(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw CLI::ValidationError("--beta-grid", "bad value \"" + item + "\"");
    }
  }
  if (out.empty()) throw CLI::ValidationError("--beta-grid", "empty grid");
  return out;
}

// JSON config file preloading TrainConfig and alpha; flags override.
struct CliDefaults {
  TrainConfig train;
  double alpha = 10.0;
};

CliDefaults load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw DataError(path + ": " + e.what());
  }
  CliDefaults d;
  d.train.lr = j.value("lr", d.train.lr);
  d.train.epochs = j.value("epochs", d.train.epochs);
  d.train.neg_samples = j.value("neg_samples", d.train.neg_samples);
  d.train.burn_in_epochs = j.value("burn_in_epochs", d.train.burn_in_epochs);
  d.train.burn_in_lr_factor = j.value("burn_in_lr_factor", d.train.burn_in_lr_factor);
  d.train.batch_size = j.value("batch_size", d.train.batch_size);
  d.train.seed = j.value("seed", d.train.seed);
  d.train.beta = j.value("beta", d.train.beta);
  d.train.eps = j.value("eps", d.train.eps);
  d.alpha = j.value("alpha", d.alpha);
  return d;
}

void write_loss_csv(const std::vector<double>& history, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write loss CSV: " + path);
  out.precision(17);
  out << "epoch,loss\n";
  for (std::size_t i = 0; i < history.size(); ++i) out << i << ',' << history[i] << '\n';
}

Embedding base_view(const Embedding& cone_emb) {
  const auto& cone = std::get<MetricCone>(cone_emb.space);
  Embedding base;
  base.space = std::holds_alternative<EuclideanSpace>(cone.base)
                   ? EmbeddingSpace{std::get<EuclideanSpace>(cone.base)}
                   : EmbeddingSpace{std::get<PoincareBall>(cone.base)};
  base.num_nodes = cone_emb.num_nodes;
  base.node_names = cone_emb.node_names;
  const int bd = base_dim(cone_emb.space);
  base.coords.resize(static_cast<std::size_t>(base.num_nodes) * bd);
  for (int i = 0; i < base.num_nodes; ++i) {
    const auto src = cone_emb.base_point(i);
    std::copy(src.begin(), src.end(), base.point(i).begin());
  }
  return base;
}

Embedding load_pretrained(const std::string& path, const Graph& g) {
  Embedding emb;
  if (path.size() > 5 && path.substr(path.size() - 5) == ".json") {
    emb = load_checkpoint(path).embedding;
    if (is_cone(emb.space))
      throw DataError("pretrained checkpoint is already a cone embedding: " + path);
  } else {
    emb = load_embedding_csv(path);
  }
  if (!emb.node_names.empty() && g.has_names()) return align_to_graph(emb, g);
  return emb;
}

// Direction accuracy restricted to a sampled subset of the labeled edges.
double subset_direction_accuracy(const Embedding& emb, const Graph& g,
                                 double fraction, std::uint64_t seed, double alpha) {
  auto labeled = g.labeled_edges();
  if (labeled.empty()) throw DataError("graph has no direction labels for validation");
  std::mt19937_64 rng(seed);
  std::shuffle(labeled.begin(), labeled.end(), rng);
  const std::size_t keep = std::max<std::size_t>(
      1, static_cast<std::size_t>(fraction * static_cast<double>(labeled.size())));
  labeled.resize(std::min(keep, labeled.size()));
  const HierarchyScorer scorer(emb, {alpha});
  int correct = 0;
  for (const auto& [hypo, hype] : labeled)
    if (scorer.score(hypo, hype) > 0.0) ++correct;
  return static_cast<double>(correct) / static_cast<double>(labeled.size());
}

std::vector<double> load_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open matrix CSV: " + path);
  std::vector<double> values;
  std::size_t cols = 0, rows = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string field;
    std::size_t c = 0;
    while (std::getline(ss, field, ',')) {
      try {
        values.push_back(std::stod(field));
      } catch (const std::exception&) {
        throw DataError(path + ": bad entry \"" + field + "\"");
      }
      ++c;
    }
    if (rows == 0) cols = c;
    if (c != cols) throw DataError(path + ": ragged rows");
    ++rows;
  }
  if (rows == 0 || rows != cols) throw DataError(path + ": expected a square matrix");
  return values;
}

std::vector<double> load_heights_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open heights CSV: " + path);
  std::vector<double> values;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find(',');
    const std::string field = comma == std::string::npos ? line : line.substr(comma + 1);
    try {
      values.push_back(std::stod(field));
    } catch (const std::exception&) {
      throw DataError(path + ": bad height \"" + field + "\"");
    }
  }
  if (values.empty()) throw DataError(path + ": no heights");
  return values;
}

void write_plot_csvs(const Embedding& emb, const Graph& g, double alpha,
                     const std::string& prefix, RunManifest& manifest) {
  const HierarchyScorer scorer(emb, {alpha});
  {
    const std::string path = prefix + ".height_degree.csv";
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    out.precision(17);
    out << "node,name,degree,hierarchy_value\n";
    for (int i = 0; i < g.num_nodes(); ++i)
      out << i << ',' << (g.has_names() ? g.name(i) : std::to_string(i)) << ','
          << g.degree(i) << ',' << scorer.hierarchy_value(i) << '\n';
    manifest.outputs.push_back(path);
  }
  if (g.has_depths()) {
    const std::string path = prefix + ".height_depth.csv";
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    out.precision(17);
    out << "node,name,depth,hierarchy_value\n";
    for (int i = 0; i < g.num_nodes(); ++i)
      out << i << ',' << (g.has_names() ? g.name(i) : std::to_string(i)) << ','
          << g.node_depths()[i] << ',' << scorer.hierarchy_value(i) << '\n';
    manifest.outputs.push_back(path);
  }
}

std::string json_or_null(const std::optional<double>& v) {
  return v ? json(*v).dump() : "null";
}

// ---------------------------------------------------------------------------
// Subcommand parameter blocks

struct GenParams {
  std::string kind;
  int n = 100, m = 2, k = 3, depth = 4;
  std::uint64_t seed = 1;
  std::string out;
};

struct TrainParams {
  std::string graph, space_spec = "euclidean:10", out;
  TrainConfig cfg;
  double holdout_fraction = 0.0;
  std::uint64_t holdout_seed = 1;
};

struct LiftParams {
  std::string graph, pretrained, out, beta_grid;
  TrainConfig cfg;
  double holdout_fraction = 0.0;
  std::uint64_t holdout_seed = 1;
  double val_fraction = 0.1;
  std::uint64_t val_seed = 1;
  double alpha = 10.0;
};

struct EvalParams {
  std::string checkpoint, graph, gold_scores, out, csv, plot_prefix;
  bool reconstruction = false;
  bool edge_direction = false;
  double link_pred_fraction = 0.0;
  std::uint64_t split_seed = 1;
  double alpha = 10.0;
};

struct IdentifyParams {
  std::string checkpoint, base_dist, cone_dist, heights, out;
  double beta = 0.0;  // 0 = take from checkpoint / required with matrices
  RecoveryOptions options;
};

// ---------------------------------------------------------------------------

void cmd_gen(const GenParams& p, RunManifest& manifest) {
  Graph g;
  if (p.kind == "ba") {
    g = gen_barabasi_albert(p.n, p.m, p.seed);
  } else if (p.kind == "kary") {
    g = gen_complete_kary_tree(p.k, p.depth);
  } else {
    g = gen_concatenated_kary_tree(p.k, p.depth);
  }
  save_graph(g, p.out);
  manifest.outputs.push_back(p.out);
  manifest.outputs.push_back(p.out + ".meta.json");
  std::cout << "wrote " << p.out << " (" << g.num_nodes() << " nodes, " << g.num_edges()
            << " edges)\n";
}

Checkpoint run_training(const Graph& g, const EmbeddingSpace& space,
                        const TrainConfig& cfg) {
  Timer timer;
  Trainer trainer(g, space, cfg);
  Checkpoint ckpt;
  ckpt.embedding = trainer.run();
  ckpt.config = cfg;
  ckpt.epoch = static_cast<int>(trainer.loss_history().size());
  ckpt.loss_history = trainer.loss_history();
  ckpt.train_wall_seconds = timer.wall_seconds();
  ckpt.train_cpu_seconds = timer.cpu_seconds();
  return ckpt;
}

void cmd_train(const TrainParams& p, RunManifest& manifest) {
  manifest.add_input(p.graph);
  Graph g = load_graph(p.graph);
  if (p.holdout_fraction > 0.0) {
    const SplitGraph split = split_link_prediction(g, p.holdout_fraction, p.holdout_seed);
    g = train_graph(g, split);
    std::cout << "holdout: training on " << split.train_edges.size() << " of "
              << split.train_edges.size() + split.test_edges.size() << " edges\n";
  }
  const EmbeddingSpace space = parse_space(p.space_spec, p.cfg);
  const Checkpoint ckpt = run_training(g, space, p.cfg);
  save_checkpoint(ckpt, p.out);
  write_loss_csv(ckpt.loss_history, p.out + ".loss.csv");
  manifest.outputs.push_back(p.out);
  manifest.outputs.push_back(p.out + ".loss.csv");
  std::cout << "trained " << space_kind(space) << " embedding, final loss "
            << (ckpt.loss_history.empty() ? 0.0 : ckpt.loss_history.back()) << ", wrote "
            << p.out << "\n";
}

void cmd_lift(const LiftParams& p, RunManifest& manifest) {
  manifest.add_input(p.graph);
  manifest.add_input(p.pretrained);
  Graph g = load_graph(p.graph);
  if (p.holdout_fraction > 0.0) {
    const SplitGraph split = split_link_prediction(g, p.holdout_fraction, p.holdout_seed);
    g = train_graph(g, split);
  }
  const Embedding pretrained = load_pretrained(p.pretrained, g);

  std::vector<double> grid;
  if (!p.beta_grid.empty())
    grid = parse_grid(p.beta_grid);
  else
    grid = {p.cfg.beta};

  struct Row {
    double beta;
    double accuracy;
    std::string path;
  };
  std::vector<Row> rows;
  for (const double beta : grid) {
    TrainConfig cfg = p.cfg;
    cfg.beta = beta;
    Timer timer;
    Trainer trainer = Trainer::lift(g, pretrained, cfg);
    Checkpoint ckpt;
    ckpt.embedding = trainer.run();
    ckpt.config = trainer.config();
    ckpt.epoch = static_cast<int>(trainer.loss_history().size());
    ckpt.loss_history = trainer.loss_history();
    ckpt.train_wall_seconds = timer.wall_seconds();
    ckpt.train_cpu_seconds = timer.cpu_seconds();

    std::string path = p.out;
    if (grid.size() > 1) {
      std::ostringstream tag;
      tag << "_beta" << beta;
      const auto dot = path.rfind(".json");
      path = dot == std::string::npos ? path + tag.str()
                                      : path.substr(0, dot) + tag.str() + ".json";
    }
    save_checkpoint(ckpt, path);
    write_loss_csv(ckpt.loss_history, path + ".loss.csv");
    manifest.outputs.push_back(path);
    manifest.outputs.push_back(path + ".loss.csv");

    double acc = std::numeric_limits<double>::quiet_NaN();
    if (g.num_labels() > 0)
      acc = subset_direction_accuracy(ckpt.embedding, g, p.val_fraction, p.val_seed,
                                      p.alpha);
    rows.push_back({beta, acc, path});
    std::cout << "beta " << beta << ": checkpoint " << path
              << ", validation edge-direction accuracy " << acc << "\n";
  }

  if (grid.size() > 1) {
    std::stable_sort(rows.begin(), rows.end(),
                     [](const Row& a, const Row& b) { return a.accuracy > b.accuracy; });
    const std::string summary = p.out + ".summary.csv";
    std::ofstream out(summary);
    if (!out) throw DataError("cannot write " + summary);
    out.precision(17);
    out << "beta,val_edge_direction_accuracy,checkpoint\n";
    for (const Row& r : rows)
      out << r.beta << ',' << r.accuracy << ',' << r.path << '\n';
    manifest.outputs.push_back(summary);
    std::cout << "best beta " << rows.front().beta << " (accuracy "
              << rows.front().accuracy << "), summary " << summary << "\n";
  }
}

void cmd_eval(const EvalParams& p, RunManifest& manifest) {
  manifest.add_input(p.checkpoint);
  manifest.add_input(p.graph);
  const Checkpoint ckpt = load_checkpoint(p.checkpoint);
  const Graph g = load_graph(p.graph);
  const Embedding& emb = ckpt.embedding;
  if (emb.num_nodes != g.num_nodes())
    throw DataError("checkpoint has " + std::to_string(emb.num_nodes) +
                    " nodes but the graph has " + std::to_string(g.num_nodes()));
  if (!emb.node_names.empty() && g.has_names() && emb.node_names != g.node_names())
    throw DataError("checkpoint and graph node names disagree");

  EvalReport report;
  Timer timer;
  std::optional<CorrelationResult> corr;

  if (p.reconstruction) {
    const RankingMetrics m = reconstruction_metrics(emb, g);
    report.mean_rank = m.mean_rank;
    report.map = m.map;
  }
  if (p.link_pred_fraction > 0.0) {
    const SplitGraph split = split_link_prediction(g, p.link_pred_fraction, p.split_seed);
    const RankingMetrics m = link_prediction_metrics(emb, split);
    report.mean_rank = m.mean_rank;
    report.map = m.map;
  }
  if (p.edge_direction)
    report.edge_direction_accuracy = edge_direction_accuracy(emb, g, {p.alpha});
  if (!p.gold_scores.empty()) {
    manifest.add_input(p.gold_scores);
    std::ifstream in(p.gold_scores);
    if (!in) throw DataError("cannot open gold scores: " + p.gold_scores);
    PairScores gold, ours;
    const HierarchyScorer scorer(emb, {p.alpha});
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty() || line[0] == '#') continue;
      std::stringstream ss(line);
      std::string w1, w2, value;
      if (!std::getline(ss, w1, ',') || !std::getline(ss, w2, ',') ||
          !std::getline(ss, value)) {
        throw DataError(p.gold_scores + ":" + std::to_string(line_no) +
                        ": expected \"word1, word2, score\"");
      }
      auto trim = [](std::string& s) {
        const auto b = s.find_first_not_of(" \t");
        const auto e = s.find_last_not_of(" \t\r");
        s = b == std::string::npos ? "" : s.substr(b, e - b + 1);
      };
      trim(w1);
      trim(w2);
      trim(value);
      double score;
      try {
        score = std::stod(value);
      } catch (const std::exception&) {
        throw DataError(p.gold_scores + ":" + std::to_string(line_no) +
                        ": bad score \"" + value + "\"");
      }
      gold[{w1, w2}] = score;
      const auto u = g.node_id(w1), v = g.node_id(w2);
      if (u && v && *u != *v) ours[{w1, w2}] = scorer.score(*u, *v);
    }
    corr = rank_correlation(ours, gold);
    report.correlation = corr->rho;
    std::cout << "correlation over " << corr->shared_pairs << " shared pairs ("
              << corr->ignored_pairs << " ignored)\n";
  }
  report.wall_time_seconds = timer.wall_seconds();

  json j;
  j["model"] = space_kind(emb.space);
  j["dim"] = base_dim(emb.space);
  if (report.mean_rank) j["mean_rank"] = *report.mean_rank;
  if (report.map) j["map"] = *report.map;
  if (report.edge_direction_accuracy)
    j["edge_direction_accuracy"] = *report.edge_direction_accuracy;
  if (report.correlation) j["correlation"] = *report.correlation;
  if (corr) {
    j["correlation_shared_pairs"] = corr->shared_pairs;
    j["correlation_ignored_pairs"] = corr->ignored_pairs;
  }
  j["wall_time_seconds"] = report.wall_time_seconds;
  j["train_cpu_seconds"] = ckpt.train_cpu_seconds;
  std::ofstream out(p.out);
  if (!out) throw DataError("cannot write report: " + p.out);
  out << j.dump(2) << '\n';
  manifest.outputs.push_back(p.out);

  if (!p.csv.empty()) {
    std::ofstream csv(p.csv);
    if (!csv) throw DataError("cannot write " + p.csv);
    csv.precision(17);
    csv << "model,dim,mr,map,edge_direction_accuracy,corr,comp_time_cpu_s,eval_wall_s\n";
    csv << space_kind(emb.space) << ',' << base_dim(emb.space) << ','
        << json_or_null(report.mean_rank) << ',' << json_or_null(report.map) << ','
        << json_or_null(report.edge_direction_accuracy) << ','
        << json_or_null(report.correlation) << ',' << ckpt.train_cpu_seconds << ','
        << report.wall_time_seconds << '\n';
    manifest.outputs.push_back(p.csv);
  }
  if (!p.plot_prefix.empty()) write_plot_csvs(emb, g, p.alpha, p.plot_prefix, manifest);
  std::cout << "wrote " << p.out << '\n';
}

void cmd_identify(const IdentifyParams& p, RunManifest& manifest) {
  HeightRecoveryProblem problem;
  if (!p.checkpoint.empty()) {
    manifest.add_input(p.checkpoint);
    const Checkpoint ckpt = load_checkpoint(p.checkpoint);
    if (!is_cone(ckpt.embedding.space))
      throw DataError("identify --checkpoint needs a cone checkpoint");
    const auto& cone = std::get<MetricCone>(ckpt.embedding.space);
    const double beta = p.beta > 0.0 ? p.beta : cone.beta;
    const Embedding base = base_view(ckpt.embedding);
    const DistanceMatrix dists = DistanceMatrix::from_embedding(base);
    const int n = base.num_nodes;
    std::vector<double> base_mat(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) base_mat[static_cast<std::size_t>(i) * n + j] = dists(i, j);
    std::vector<double> heights(n);
    for (int i = 0; i < n; ++i) heights[i] = ckpt.embedding.height(i);
    problem = HeightRecoveryProblem::from_heights(beta, std::move(base_mat), heights);
  } else {
    if (p.base_dist.empty())
      throw CLI::ValidationError("identify", "need --checkpoint or --base-dist");
    if (p.beta <= 0.0)
      throw CLI::ValidationError("identify", "--beta is required with distance matrices");
    manifest.add_input(p.base_dist);
    std::vector<double> base_mat = load_matrix_csv(p.base_dist);
    if (!p.cone_dist.empty()) {
      manifest.add_input(p.cone_dist);
      problem = HeightRecoveryProblem::from_matrices(p.beta, std::move(base_mat),
                                                     load_matrix_csv(p.cone_dist));
    } else if (!p.heights.empty()) {
      manifest.add_input(p.heights);
      problem = HeightRecoveryProblem::from_heights(p.beta, std::move(base_mat),
                                                    load_heights_csv(p.heights));
    } else {
      throw CLI::ValidationError("identify", "need --cone-dist or --heights");
    }
  }

  const Degeneracy degeneracy = check_degeneracy(problem);
  const SolutionSet set = recover_heights(problem, p.options);

  json j;
  j["n"] = problem.n;
  j["beta"] = problem.beta;
  j["degeneracy"] = to_string(degeneracy);
  j["solution_count"] = set.solutions.size();
  j["solutions"] = set.solutions;
  j["residuals"] = set.max_residuals;
  j["residual_tol"] = set.residual_tol;
  std::ofstream out(p.out);
  if (!out) throw DataError("cannot write report: " + p.out);
  out << j.dump(2) << '\n';
  manifest.outputs.push_back(p.out);
  std::cout << "degeneracy " << to_string(degeneracy) << ", " << set.solutions.size()
            << " height assignment(s) within tolerance; wrote " << p.out << '\n';
}

void add_train_flags(CLI::App* cmd, TrainConfig& cfg) {
  cmd->add_option("--lr", cfg.lr, "learning rate");
  cmd->add_option("--epochs", cfg.epochs, "main training epochs");
  cmd->add_option("--neg", cfg.neg_samples, "negative samples per edge");
  cmd->add_option("--burn-in", cfg.burn_in_epochs, "burn-in epochs");
  cmd->add_option("--burn-in-factor", cfg.burn_in_lr_factor, "burn-in lr factor");
  cmd->add_option("--batch", cfg.batch_size, "batch size");
  cmd->add_option("--seed", cfg.seed, "RNG seed");
  cmd->add_option("--beta", cfg.beta, "cone generatrix length");
  cmd->add_option("--eps", cfg.eps, "cone height clamp epsilon");
}

}  // namespace

int run_cli(std::vector<std::string> args, int depth) {
  // Manifest replay.
  if (!args.empty() && args[0] == "--manifest") {
    if (depth > 0) throw DataError("manifest replay cannot nest");
    if (args.size() != 2) {
      std::cerr << "usage: cone_embed --manifest <file>\n";
      return 1;
    }
    return run_cli(load_manifest_argv(args[1]), depth + 1);
  }

  // JSON config preload (flags override its values).
  CliDefaults defaults;
  for (std::size_t i = 0; i + 1 < args.size(); ++i) {
    if (args[i] == "--config") {
      defaults = load_config_file(args[i + 1]);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
                 args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
      break;
    }
  }

  CLI::App app{"Hierarchy-aware graph embedding in metric cones"};
  app.name("cone_embed");
  app.require_subcommand(1);

  GenParams gen;
  auto* gen_cmd = app.add_subcommand("gen", "generate a synthetic graph");
  gen_cmd->add_option("kind", gen.kind, "ba | kary | concat-kary")
      ->required()
      ->check(CLI::IsMember({"ba", "kary", "concat-kary"}));
  gen_cmd->add_option("--n", gen.n, "node count (ba)");
  gen_cmd->add_option("--m", gen.m, "attachment count (ba)");
  gen_cmd->add_option("--k", gen.k, "branching factor (trees)");
  gen_cmd->add_option("--depth", gen.depth, "tree depth");
  gen_cmd->add_option("--seed", gen.seed, "RNG seed (ba)");
  gen_cmd->add_option("--out", gen.out, "output edge list")->required();

  TrainParams train_p;
  train_p.cfg = defaults.train;
  auto* train_cmd = app.add_subcommand("train", "train an embedding");
  train_cmd->add_option("--graph", train_p.graph, "edge-list file")->required();
  train_cmd->add_option("--space", train_p.space_spec,
                        "euclidean:D | poincare:D | cone:euclidean:D | cone:poincare:D");
  train_cmd->add_option("--out", train_p.out, "checkpoint path")->required();
  train_cmd->add_option("--holdout-fraction", train_p.holdout_fraction,
                        "hold out a link-prediction test split before training");
  train_cmd->add_option("--holdout-seed", train_p.holdout_seed, "split seed");
  add_train_flags(train_cmd, train_p.cfg);

  LiftParams lift_p;
  lift_p.cfg = defaults.train;
  lift_p.alpha = defaults.alpha;
  auto* lift_cmd =
      app.add_subcommand("lift", "add trained heights to a pretrained embedding");
  lift_cmd->add_option("--graph", lift_p.graph, "edge-list file")->required();
  lift_cmd->add_option("--pretrained", lift_p.pretrained,
                       "checkpoint JSON or \"name,c1,...,cd\" CSV")
      ->required();
  lift_cmd->add_option("--out", lift_p.out, "checkpoint path")->required();
  lift_cmd->add_option("--beta-grid", lift_p.beta_grid,
                       "comma-separated betas; one checkpoint each plus a summary");
  lift_cmd->add_option("--holdout-fraction", lift_p.holdout_fraction,
                       "hold out a link-prediction test split before training");
  lift_cmd->add_option("--holdout-seed", lift_p.holdout_seed, "split seed");
  lift_cmd->add_option("--val-fraction", lift_p.val_fraction,
                       "labeled-edge fraction scored for beta selection");
  lift_cmd->add_option("--val-seed", lift_p.val_seed, "validation sample seed");
  lift_cmd->add_option("--alpha", lift_p.alpha, "hierarchy score alpha");
  add_train_flags(lift_cmd, lift_p.cfg);

  EvalParams eval_p;
  eval_p.alpha = defaults.alpha;
  auto* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint");
  eval_cmd->add_option("--checkpoint", eval_p.checkpoint, "checkpoint JSON")->required();
  eval_cmd->add_option("--graph", eval_p.graph, "edge-list file")->required();
  eval_cmd->add_flag("--reconstruction", eval_p.reconstruction,
                     "mean rank / MAP over all edges");
  eval_cmd->add_option("--link-pred", eval_p.link_pred_fraction,
                       "test fraction; scores the held-out split");
  eval_cmd->add_option("--split-seed", eval_p.split_seed, "split seed");
  eval_cmd->add_flag("--edge-direction", eval_p.edge_direction,
                     "labeled edge direction accuracy");
  eval_cmd->add_option("--gold-scores", eval_p.gold_scores,
                       "CSV \"word1, word2, score\" for rank correlation");
  eval_cmd->add_option("--alpha", eval_p.alpha, "hierarchy score alpha");
  eval_cmd->add_option("--out", eval_p.out, "report JSON path")->required();
  eval_cmd->add_option("--csv", eval_p.csv, "one-row metrics CSV");
  eval_cmd->add_option("--plot-csv", eval_p.plot_prefix,
                       "prefix for height-vs-degree / height-vs-depth CSVs");

  IdentifyParams id_p;
  auto* id_cmd =
      app.add_subcommand("identify", "recover heights from base + cone distances");
  id_cmd->add_option("--checkpoint", id_p.checkpoint, "cone checkpoint JSON");
  id_cmd->add_option("--base-dist", id_p.base_dist, "base distance matrix CSV");
  id_cmd->add_option("--cone-dist", id_p.cone_dist, "cone distance matrix CSV");
  id_cmd->add_option("--heights", id_p.heights, "heights CSV (constructs cone distances)");
  id_cmd->add_option("--beta", id_p.beta, "generatrix length");
  id_cmd->add_option("--grid", id_p.options.grid_resolution, "grid resolution per axis");
  id_cmd->add_option("--refine", id_p.options.refine_iters, "refinement iterations");
  id_cmd->add_option("--residual-tol", id_p.options.residual_tol,
                     "accepted max |residual|");
  id_cmd->add_option("--out", id_p.out, "report JSON path")->required();

  const std::vector<std::string> original = args;
  std::reverse(args.begin(), args.end());
  try {
    app.parse(std::move(args));
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  RunManifest manifest;
  manifest.argv = original;
  manifest.threads = worker_count();
  Timer timer;
  if (gen_cmd->parsed()) {
    manifest.command = "gen";
    manifest.seed = gen.seed;
    cmd_gen(gen, manifest);
  } else if (train_cmd->parsed()) {
    manifest.command = "train";
    manifest.seed = train_p.cfg.seed;
    cmd_train(train_p, manifest);
  } else if (lift_cmd->parsed()) {
    manifest.command = "lift";
    manifest.seed = lift_p.cfg.seed;
    cmd_lift(lift_p, manifest);
  } else if (eval_cmd->parsed()) {
    manifest.command = "eval";
    manifest.seed = eval_p.split_seed;
    cmd_eval(eval_p, manifest);
  } else if (id_cmd->parsed()) {
    manifest.command = "identify";
    cmd_identify(id_p, manifest);
  }
  manifest.wall_time_seconds = timer.wall_seconds();
  manifest.cpu_time_seconds = timer.cpu_seconds();

  const std::string primary =
      manifest.outputs.empty() ? std::string() : manifest.outputs.front();
  if (!primary.empty()) save_manifest(manifest, primary + ".manifest.json");
  return 0;
}

}  // namespace cone_embed::cli
