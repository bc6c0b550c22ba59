// Command-line front end: train / eval / pipeline batch runs with a
// reproducible manifest per run.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "graphgan/eval.hpp"
#include "graphgan/forest.hpp"
#include "graphgan/parallel.hpp"
#include "graphgan/text.hpp"
#include "graphgan/trainer.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace graphgan;

namespace {

struct RunOptions {
  std::string edges_path;
  std::string labels_path;
  std::string embeddings_path;
  std::string out_dir = "run";
  std::string task;  // pipeline: link | nodeclass | rec | dist-study
  std::string from_manifest;

  std::size_t dim = 20;
  std::size_t samples_s = 20;
  std::int64_t samples_t = -1;  // -1: per-root degree capped at 20
  double learning_rate = 0.001;
  std::size_t g_steps = 30;
  std::size_t d_steps = 30;
  std::size_t iterations = 20;
  std::size_t pretrain = 0;
  std::uint64_t seed = 0;
  std::size_t threads = default_threads();
  std::size_t tree_cache = 0;
  std::size_t checkpoint_every = 0;
  bool timings = false;

  double min_rating = 4.0;
  double holdout = 0.1;
  double train_fraction = 0.9;
  std::size_t pairs = 1000000;
  std::vector<std::size_t> k_list = {10, 20};
};

std::string iso_timestamp() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

TrainConfig to_train_config(const RunOptions& opt) {
  TrainConfig config;
  config.dim = opt.dim;
  config.samples_per_vertex = opt.samples_s;
  if (opt.samples_t >= 0) config.pairs_per_vertex = static_cast<std::size_t>(opt.samples_t);
  config.learning_rate = opt.learning_rate;
  config.g_steps = opt.g_steps;
  config.d_steps = opt.d_steps;
  config.max_iterations = opt.iterations;
  config.pretrain_epochs = opt.pretrain;
  config.seed = opt.seed;
  config.threads = opt.threads;
  config.tree_lru_capacity = opt.tree_cache;
  return config;
}

void write_metrics_csv(const std::vector<MetricsRecord>& metrics, const fs::path& path,
                       bool timings) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "iteration,value_estimate,d_loss,g_reward_mean,wall_time\n";
  for (const auto& m : metrics) {
    // wall_time is 0 unless --timings: data streams stay deterministic
    out << m.iteration << ',' << format_double(m.value_estimate) << ','
        << format_double(m.d_loss) << ',' << format_double(m.g_reward_mean) << ','
        << format_double(timings ? m.wall_time : 0.0) << '\n';
  }
}

json config_json(const RunOptions& opt) {
  return json{{"dim", opt.dim},
              {"samples_s", opt.samples_s},
              {"samples_t", opt.samples_t},
              {"lr", opt.learning_rate},
              {"g_steps", opt.g_steps},
              {"d_steps", opt.d_steps},
              {"iterations", opt.iterations},
              {"pretrain", opt.pretrain},
              {"seed", opt.seed},
              {"tree_cache", opt.tree_cache},
              {"min_rating", opt.min_rating},
              {"holdout", opt.holdout},
              {"train_fraction", opt.train_fraction},
              {"pairs", opt.pairs},
              {"k_list", opt.k_list}};
}

void apply_config_json(const json& j, RunOptions& opt) {
  opt.dim = j.at("dim");
  opt.samples_s = j.at("samples_s");
  opt.samples_t = j.at("samples_t");
  opt.learning_rate = j.at("lr");
  opt.g_steps = j.at("g_steps");
  opt.d_steps = j.at("d_steps");
  opt.iterations = j.at("iterations");
  opt.pretrain = j.at("pretrain");
  opt.seed = j.at("seed");
  opt.tree_cache = j.at("tree_cache");
  opt.min_rating = j.at("min_rating");
  opt.holdout = j.at("holdout");
  opt.train_fraction = j.at("train_fraction");
  opt.pairs = j.at("pairs");
  opt.k_list = j.at("k_list").get<std::vector<std::size_t>>();
}

void write_manifest(const RunOptions& opt, const std::string& command,
                    const json& artifacts, const std::string& started,
                    const fs::path& path) {
  json manifest{{"command", command},
                {"task", opt.task},
                {"config", config_json(opt)},
                {"inputs", {{"edges", opt.edges_path}, {"labels", opt.labels_path}}},
                {"artifacts", artifacts},
                {"timestamps", {{"started", started}, {"finished", iso_timestamp()}}}};
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << manifest.dump(2) << '\n';
}

void progress(const MetricsRecord& m) {
  std::cerr << "iter " << m.iteration << " value=" << m.value_estimate
            << " d_loss=" << m.d_loss << " g_reward=" << m.g_reward_mean << '\n';
}

struct TrainedRun {
  TrainResult result;
  json artifacts;
};

TrainedRun train_and_export(const Graph& graph, const TreeProvider& provider,
                            const RunOptions& opt) {
  TrainConfig config = to_train_config(opt);
  fs::create_directories(opt.out_dir);
  fs::path out_dir(opt.out_dir);
  IterationCallback callback = [&](const MetricsRecord& m, const EmbeddingTable& g,
                                   const EmbeddingTable& d) {
    progress(m);
    if (opt.checkpoint_every > 0 && (m.iteration + 1) % opt.checkpoint_every == 0) {
      export_embeddings_file(g, graph.labels(),
                             (out_dir / ("checkpoint_g_" + std::to_string(m.iteration) + ".txt")).string());
      export_embeddings_file(d, graph.labels(),
                             (out_dir / ("checkpoint_d_" + std::to_string(m.iteration) + ".txt")).string());
    }
  };
  TrainedRun run{train(graph, provider, config, callback), {}};
  fs::path g_path = out_dir / "embeddings_g.txt";
  fs::path d_path = out_dir / "embeddings_d.txt";
  fs::path metrics_path = out_dir / "metrics.csv";
  export_embeddings_file(run.result.theta_g, graph.labels(), g_path.string());
  export_embeddings_file(run.result.theta_d, graph.labels(), d_path.string());
  write_metrics_csv(run.result.metrics, metrics_path, opt.timings);
  run.artifacts = {{"embeddings_g", g_path.string()},
                   {"embeddings_d", d_path.string()},
                   {"metrics_csv", metrics_path.string()}};
  return run;
}

// Maps imported embeddings onto the graph's dense index order.
EmbeddingTable align_embeddings(const ImportedEmbeddings& imported, const Graph& graph) {
  if (imported.table.vertex_count() != graph.vertex_count())
    throw std::runtime_error("embeddings cover " + std::to_string(imported.table.vertex_count()) +
                             " vertices but graph has " + std::to_string(graph.vertex_count()));
  EmbeddingTable aligned(graph.vertex_count(), imported.table.dim());
  for (std::size_t i = 0; i < imported.labels.size(); ++i) {
    auto v = graph.index_of(imported.labels[i]);
    if (!v) throw std::runtime_error("embedding label '" + imported.labels[i] +
                                     "' not present in graph");
    auto src = imported.table.row(i);
    std::copy(src.begin(), src.end(), aligned.row(*v).begin());
  }
  return aligned;
}

void write_classification_csv(const ClassificationMetrics& m, const fs::path& path) {
  std::ofstream out(path);
  out << "accuracy,macro_f1\n"
      << format_double(m.accuracy) << ',' << format_double(m.macro_f1) << '\n';
}

void write_ranking_csv(const RankingResult& r, const fs::path& path) {
  std::ofstream out(path);
  out << "k,precision,recall\n";
  for (std::size_t i = 0; i < r.k_values.size(); ++i)
    out << r.k_values[i] << ',' << format_double(r.precision_at_k[i]) << ','
        << format_double(r.recall_at_k[i]) << '\n';
}

void write_distance_csv(const DistanceStudy& study, const fs::path& bucket_path,
                        const fs::path& fit_path) {
  std::ofstream out(bucket_path);
  out << "distance,pairs,edges,edge_probability,log_probability\n";
  for (const auto& b : study.buckets)
    out << b.distance << ',' << b.pairs << ',' << b.edges << ','
        << format_double(b.edge_probability) << ','
        << format_double(b.edges ? std::log(b.edge_probability) : 0.0) << '\n';
  std::ofstream fit_out(fit_path);
  fit_out << "slope,intercept,r_squared\n";
  if (study.log_probability_fit) {
    const auto& f = *study.log_probability_fit;
    fit_out << format_double(f.slope) << ',' << format_double(f.intercept) << ','
            << format_double(f.r_squared) << '\n';
  }
}

int run_train(RunOptions& opt) {
  std::string started = iso_timestamp();
  Graph graph = load_edge_list_file(opt.edges_path);
  BfsForest forest(graph, opt.tree_cache, opt.threads);
  TrainedRun run = train_and_export(graph, forest, opt);
  write_manifest(opt, "train", run.artifacts, started,
                 fs::path(opt.out_dir) / "manifest.json");
  std::cout << "trained " << graph.vertex_count() << " vertices, "
            << run.result.metrics.size() << " iterations\n";
  return 0;
}

int run_eval_link(RunOptions& opt) {
  Graph graph = load_edge_list_file(opt.edges_path);
  LinkSplit split = split_edges(graph, opt.holdout, opt.seed);
  auto embeddings = align_embeddings(import_embeddings_file(opt.embeddings_path), graph);
  ClassificationMetrics metrics = link_prediction_eval(embeddings, split, opt.seed);
  std::cout << "accuracy " << metrics.accuracy << "\nmacro_f1 " << metrics.macro_f1 << '\n';
  fs::create_directories(opt.out_dir);
  write_classification_csv(metrics, fs::path(opt.out_dir) / "link_metrics.csv");
  return 0;
}

int run_eval_nodeclass(RunOptions& opt) {
  Graph graph = load_edge_list_file(opt.edges_path);
  auto embeddings = align_embeddings(import_embeddings_file(opt.embeddings_path), graph);
  VertexLabels labels = load_labels_file(opt.labels_path, graph);
  ClassificationMetrics metrics =
      node_classification_eval(embeddings, labels, opt.train_fraction, opt.seed);
  std::cout << "accuracy " << metrics.accuracy << "\nmacro_f1 " << metrics.macro_f1 << '\n';
  fs::create_directories(opt.out_dir);
  write_classification_csv(metrics, fs::path(opt.out_dir) / "nodeclass_metrics.csv");
  return 0;
}

int run_eval_rec(RunOptions& opt) {
  LoadOptions load{opt.min_rating};
  BipartiteGraph bip = load_bipartite_edge_list_file(opt.edges_path, load);
  RecommendationSplit split = split_user_edges(bip.graph, bip.is_user, opt.holdout, opt.seed);
  auto embeddings = align_embeddings(import_embeddings_file(opt.embeddings_path), bip.graph);
  RankingResult result = recommendation_eval(embeddings, split.train_graph, bip.is_user,
                                             split.hidden, opt.k_list);
  for (std::size_t i = 0; i < result.k_values.size(); ++i)
    std::cout << "K=" << result.k_values[i] << " precision " << result.precision_at_k[i]
              << " recall " << result.recall_at_k[i] << '\n';
  fs::create_directories(opt.out_dir);
  write_ranking_csv(result, fs::path(opt.out_dir) / "rec_metrics.csv");
  return 0;
}

int run_eval_dist(RunOptions& opt) {
  Graph graph = load_edge_list_file(opt.edges_path);
  DistanceStudy study = distance_study(graph, opt.pairs, opt.seed, opt.threads);
  fs::create_directories(opt.out_dir);
  write_distance_csv(study, fs::path(opt.out_dir) / "distance_buckets.csv",
                     fs::path(opt.out_dir) / "distance_fit.csv");
  if (study.log_probability_fit)
    std::cout << "slope " << study.log_probability_fit->slope << "\nr_squared "
              << study.log_probability_fit->r_squared << '\n';
  else
    std::cout << "fit degenerate\n";
  return 0;
}

int run_pipeline(RunOptions& opt) {
  if (!opt.from_manifest.empty()) {
    std::ifstream in(opt.from_manifest);
    if (!in) throw std::runtime_error("cannot open manifest: " + opt.from_manifest);
    json manifest = json::parse(in);
    apply_config_json(manifest.at("config"), opt);
    opt.task = manifest.at("task");
    opt.edges_path = manifest.at("inputs").at("edges");
    opt.labels_path = manifest.at("inputs").at("labels");
  }
  std::string started = iso_timestamp();
  fs::create_directories(opt.out_dir);
  fs::path out_dir(opt.out_dir);
  json artifacts;

  if (opt.task == "link") {
    Graph graph = load_edge_list_file(opt.edges_path);
    LinkSplit split = split_edges(graph, opt.holdout, opt.seed);
    BfsForest forest(split.train_graph, opt.tree_cache, opt.threads);
    TrainedRun run = train_and_export(split.train_graph, forest, opt);
    artifacts = run.artifacts;
    ClassificationMetrics metrics =
        link_prediction_eval(run.result.theta_g, split, opt.seed);
    std::cout << "accuracy " << metrics.accuracy << "\nmacro_f1 " << metrics.macro_f1 << '\n';
    write_classification_csv(metrics, out_dir / "link_metrics.csv");
    artifacts["results_csv"] = (out_dir / "link_metrics.csv").string();
  } else if (opt.task == "nodeclass") {
    Graph graph = load_edge_list_file(opt.edges_path);
    VertexLabels labels = load_labels_file(opt.labels_path, graph);
    BfsForest forest(graph, opt.tree_cache, opt.threads);
    TrainedRun run = train_and_export(graph, forest, opt);
    artifacts = run.artifacts;
    ClassificationMetrics metrics =
        node_classification_eval(run.result.theta_g, labels, opt.train_fraction, opt.seed);
    std::cout << "accuracy " << metrics.accuracy << "\nmacro_f1 " << metrics.macro_f1 << '\n';
    write_classification_csv(metrics, out_dir / "nodeclass_metrics.csv");
    artifacts["results_csv"] = (out_dir / "nodeclass_metrics.csv").string();
  } else if (opt.task == "rec") {
    LoadOptions load{opt.min_rating};
    BipartiteGraph bip = load_bipartite_edge_list_file(opt.edges_path, load);
    RecommendationSplit split = split_user_edges(bip.graph, bip.is_user, opt.holdout, opt.seed);
    ShortcutForest forest(split.train_graph, bip.is_user, opt.threads);
    TrainedRun run = train_and_export(split.train_graph, forest, opt);
    artifacts = run.artifacts;
    RankingResult result = recommendation_eval(run.result.theta_g, split.train_graph,
                                               bip.is_user, split.hidden, opt.k_list);
    for (std::size_t i = 0; i < result.k_values.size(); ++i)
      std::cout << "K=" << result.k_values[i] << " precision " << result.precision_at_k[i]
                << " recall " << result.recall_at_k[i] << '\n';
    write_ranking_csv(result, out_dir / "rec_metrics.csv");
    artifacts["results_csv"] = (out_dir / "rec_metrics.csv").string();
  } else if (opt.task == "dist-study") {
    Graph graph = load_edge_list_file(opt.edges_path);
    DistanceStudy study = distance_study(graph, opt.pairs, opt.seed, opt.threads);
    write_distance_csv(study, out_dir / "distance_buckets.csv", out_dir / "distance_fit.csv");
    artifacts["results_csv"] = (out_dir / "distance_buckets.csv").string();
    if (study.log_probability_fit)
      std::cout << "slope " << study.log_probability_fit->slope << "\nr_squared "
                << study.log_probability_fit->r_squared << '\n';
    else
      std::cout << "fit degenerate\n";
  } else {
    throw std::runtime_error("unknown pipeline task: " + opt.task);
  }
  write_manifest(opt, "pipeline", artifacts, started, out_dir / "manifest.json");
  return 0;
}

void add_train_flags(CLI::App* cmd, RunOptions& opt) {
  cmd->fallthrough();
  cmd->add_option("--threads", opt.threads, "worker threads");
  cmd->add_option("--dim", opt.dim, "embedding dimension k");
  cmd->add_option("--samples-s", opt.samples_s, "generated samples per vertex per G-step");
  cmd->add_option("--samples-t", opt.samples_t,
                  "positive/negative pairs per vertex per D-step (-1: degree capped at 20)");
  cmd->add_option("--lr", opt.learning_rate, "learning rate");
  cmd->add_option("--g-steps", opt.g_steps, "G-step repetitions per iteration");
  cmd->add_option("--d-steps", opt.d_steps, "D-step repetitions per iteration");
  cmd->add_option("--iterations", opt.iterations, "iteration cap");
  cmd->add_option("--pretrain", opt.pretrain, "pre-training epochs");
  cmd->add_option("--tree-cache", opt.tree_cache,
                  "BFS-tree LRU cache size (0: prebuild all trees)");
  cmd->add_option("--checkpoint-every", opt.checkpoint_every,
                  "export embeddings every N iterations (0: off)");
  cmd->add_flag("--timings", opt.timings, "record wall times in metrics CSV");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GraphGAN: adversarial graph representation learning"};
  app.require_subcommand(1);
  RunOptions opt;
  // config keys live in a section named after the subcommand, e.g. [train]
  app.set_config("--config")->configurable(false);

  auto* train_cmd = app.add_subcommand("train", "train embeddings on an edge list");
  train_cmd->add_option("--edges", opt.edges_path, "edge list file")->required();
  train_cmd->add_option("--seed", opt.seed, "master seed");
  train_cmd->add_option("--out-dir", opt.out_dir, "output directory");
  add_train_flags(train_cmd, opt);

  auto* eval_cmd = app.add_subcommand("eval", "evaluate trained embeddings");
  eval_cmd->require_subcommand(1);
  eval_cmd->fallthrough();
  auto add_eval_common = [&](CLI::App* sub, bool needs_embeddings) {
    sub->fallthrough();
    sub->add_option("--threads", opt.threads, "worker threads");
    sub->add_option("--edges", opt.edges_path, "edge list file")->required();
    sub->add_option("--seed", opt.seed, "evaluation seed");
    sub->add_option("--out-dir", opt.out_dir, "output directory");
    if (needs_embeddings)
      sub->add_option("--embeddings", opt.embeddings_path, "embedding file")->required();
  };
  auto* link_cmd = eval_cmd->add_subcommand("link", "link prediction");
  add_eval_common(link_cmd, true);
  link_cmd->add_option("--holdout", opt.holdout, "hidden edge fraction");
  auto* nodeclass_cmd = eval_cmd->add_subcommand("nodeclass", "node classification");
  add_eval_common(nodeclass_cmd, true);
  nodeclass_cmd->add_option("--labels", opt.labels_path, "label file")->required();
  nodeclass_cmd->add_option("--train-fraction", opt.train_fraction, "train split fraction");
  auto* rec_cmd = eval_cmd->add_subcommand("rec", "recommendation");
  add_eval_common(rec_cmd, true);
  rec_cmd->add_option("--holdout", opt.holdout, "hidden edge fraction");
  rec_cmd->add_option("--min-rating", opt.min_rating, "rating threshold for edges");
  rec_cmd->add_option("--k-list", opt.k_list, "K values")->delimiter(',');
  auto* dist_cmd = eval_cmd->add_subcommand("dist-study", "distance vs edge probability");
  add_eval_common(dist_cmd, false);
  dist_cmd->add_option("--pairs", opt.pairs, "sampled vertex pairs");

  auto* pipeline_cmd = app.add_subcommand("pipeline", "split + train + eval in one run");
  pipeline_cmd->add_option("--task", opt.task, "link | nodeclass | rec | dist-study");
  pipeline_cmd->add_option("--edges", opt.edges_path, "edge list file");
  pipeline_cmd->add_option("--labels", opt.labels_path, "label file (nodeclass)");
  pipeline_cmd->add_option("--seed", opt.seed, "master seed");
  pipeline_cmd->add_option("--out-dir", opt.out_dir, "output directory");
  pipeline_cmd->add_option("--holdout", opt.holdout, "hidden edge fraction");
  pipeline_cmd->add_option("--train-fraction", opt.train_fraction, "nodeclass train fraction");
  pipeline_cmd->add_option("--min-rating", opt.min_rating, "rating threshold (rec)");
  pipeline_cmd->add_option("--k-list", opt.k_list, "K values (rec)")->delimiter(',');
  pipeline_cmd->add_option("--pairs", opt.pairs, "sampled pairs (dist-study)");
  pipeline_cmd->add_option("--from-manifest", opt.from_manifest,
                           "re-run the configuration recorded in a manifest");
  add_train_flags(pipeline_cmd, opt);

  CLI11_PARSE(app, argc, argv);
  try {
    if (train_cmd->parsed()) return run_train(opt);
    if (eval_cmd->parsed()) {
      if (link_cmd->parsed()) return run_eval_link(opt);
      if (nodeclass_cmd->parsed()) return run_eval_nodeclass(opt);
      if (rec_cmd->parsed()) return run_eval_rec(opt);
      if (dist_cmd->parsed()) return run_eval_dist(opt);
    }
    if (pipeline_cmd->parsed()) {
      if (opt.task.empty() && opt.from_manifest.empty())
        throw std::runtime_error("pipeline requires --task or --from-manifest");
      if (opt.from_manifest.empty() && opt.edges_path.empty())
        throw std::runtime_error("pipeline requires --edges");
      return run_pipeline(opt);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
