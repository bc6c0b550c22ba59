#include "graphgan/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "graphgan/parallel.hpp"
#include "graphgan/rng.hpp"

namespace graphgan {

namespace {

// stream tags for independent RNG substreams
constexpr std::uint64_t kStreamGenerate = 0x47;
constexpr std::uint64_t kStreamDiscriminate = 0x44;
constexpr std::uint64_t kStreamEstimate = 0x45;
constexpr std::uint64_t kStreamPretrain = 0x50;

double clamp_prob(double p) { return std::clamp(p, 1e-10, 1.0 - 1e-10); }

std::size_t pairs_for_root(const TrainConfig& config, const Graph& graph, VertexId root) {
  if (config.pairs_per_vertex) return *config.pairs_per_vertex;
  return std::min<std::size_t>(graph.degree(root), 20);
}

void pretrain_table(const Graph& graph, EmbeddingTable& table, std::size_t epochs,
                    double learning_rate, std::uint64_t seed, std::uint64_t table_tag) {
  const std::size_t n = graph.vertex_count();
  auto edges = graph.edges();
  for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
    auto rng = stream_rng(seed, {kStreamPretrain, table_tag, epoch});
    for (auto [u, v] : edges) {
      LabeledPair pos{u, v, true};
      discriminator_step({&pos, 1}, table, learning_rate);
      // one uniformly drawn non-edge as the 0-target
      for (int attempt = 0; attempt < 64; ++attempt) {
        VertexId a = static_cast<VertexId>(uniform_index(rng, n));
        VertexId b = static_cast<VertexId>(uniform_index(rng, n));
        if (a == b || graph.has_edge(a, b)) continue;
        LabeledPair neg{a, b, false};
        discriminator_step({&neg, 1}, table, learning_rate);
        break;
      }
    }
  }
}

struct IterationStats {
  double value_estimate = 0.0;
  double d_loss = 0.0;
  double g_reward_mean = 0.0;
};

// Fresh read-only sample pass used only for diagnostics.
IterationStats estimate_metrics(const Graph& graph, const TreeProvider& provider,
                                const TrainConfig& config, const EmbeddingTable& theta_g,
                                const EmbeddingTable& theta_d, std::size_t iteration) {
  const auto& roots = provider.roots();
  std::vector<IterationStats> per_root(roots.size());
  std::vector<std::size_t> counts(roots.size(), 0);
  std::vector<double> rewards(roots.size(), 0.0);
  std::vector<std::size_t> reward_counts(roots.size(), 0);
  parallel_for(roots.size(), config.threads, [&](std::size_t i) {
    VertexId root = roots[i];
    std::size_t t = pairs_for_root(config, graph, root);
    if (t == 0) return;
    auto rng = stream_rng(config.seed, {kStreamEstimate, iteration, root});
    auto tree = provider.tree(root);
    double pos_sum = 0.0, neg_sum = 0.0;
    for (VertexId v : sample_positives(graph, root, t, rng))
      pos_sum += std::log(clamp_prob(d_score(v, root, theta_d)));
    for (std::size_t j = 0; j < t; ++j) {
      SampleTrace trace = sample_online(*tree, theta_g, rng);
      neg_sum += std::log(clamp_prob(1.0 - d_score(trace.sampled, root, theta_d)));
    }
    per_root[i].value_estimate = pos_sum / static_cast<double>(t) +
                                 neg_sum / static_cast<double>(t);
    per_root[i].d_loss = -(pos_sum + neg_sum);
    counts[i] = 2 * t;
    rewards[i] = neg_sum;
    reward_counts[i] = t;
  });
  IterationStats stats;
  double loss_sum = 0.0, reward_sum = 0.0;
  std::size_t loss_count = 0, reward_count = 0;
  for (std::size_t i = 0; i < roots.size(); ++i) {
    stats.value_estimate += per_root[i].value_estimate;
    loss_sum += per_root[i].d_loss;
    loss_count += counts[i];
    reward_sum += rewards[i];
    reward_count += reward_counts[i];
  }
  stats.d_loss = loss_count ? loss_sum / static_cast<double>(loss_count) : 0.0;
  stats.g_reward_mean = reward_count ? reward_sum / static_cast<double>(reward_count) : 0.0;
  return stats;
}

}  // namespace

void TrainConfig::validate() const {
  if (dim == 0 || samples_per_vertex == 0)
    throw std::invalid_argument("train config: counts must be >= 1");
  // g_steps/d_steps may be 0 to freeze one player
  if (pairs_per_vertex && *pairs_per_vertex == 0)
    throw std::invalid_argument("train config: t must be >= 1 when set");
  if (max_iterations == 0)
    throw std::invalid_argument("train config: max_iterations must be >= 1");
  if (!(learning_rate > 0.0))
    throw std::invalid_argument("train config: learning rate must be positive");
}

std::vector<VertexId> sample_positives(const Graph& graph, VertexId v_c, std::size_t t,
                                       std::mt19937_64& rng) {
  const auto& nbrs = graph.neighbors(v_c);
  if (nbrs.empty()) return {};
  std::vector<VertexId> out(t);
  for (std::size_t i = 0; i < t; ++i) out[i] = nbrs[uniform_index(rng, nbrs.size())];
  return out;
}

TrainResult train(const Graph& graph, const TreeProvider& provider,
                  const TrainConfig& full_config, const IterationCallback& on_iteration) {
  TrainConfig config = full_config;
  config.validate();
  if (graph.vertex_count() == 0) throw std::invalid_argument("train: empty graph");
  const auto& roots = provider.roots();
  if (roots.empty()) throw std::invalid_argument("train: no trainable roots");

  TrainResult result;
  result.theta_g = EmbeddingTable::random_init(graph.vertex_count(), config.dim,
                                               config.seed ^ 0x67656eULL);
  result.theta_d = EmbeddingTable::random_init(graph.vertex_count(), config.dim,
                                               config.seed ^ 0x646973ULL);
  if (config.pretrain_epochs > 0) {
    pretrain_table(graph, result.theta_g, config.pretrain_epochs, config.learning_rate,
                   config.seed, 1);
    pretrain_table(graph, result.theta_d, config.pretrain_epochs, config.learning_rate,
                   config.seed, 2);
  }

  const std::size_t s = config.samples_per_vertex;
  std::size_t steady = 0;
  const auto start = std::chrono::steady_clock::now();

  for (std::size_t iter = 0; iter < config.max_iterations; ++iter) {
    try {
      for (std::size_t g = 0; g < config.g_steps; ++g) {
        // parallel read-only sampling against the current parameters
        std::vector<std::vector<SampleTrace>> sampled(roots.size());
        std::vector<std::shared_ptr<const BfsTree>> root_trees(roots.size());
        parallel_for(roots.size(), config.threads, [&](std::size_t i) {
          auto rng = stream_rng(config.seed, {kStreamGenerate, iter, g, roots[i]});
          root_trees[i] = provider.tree(roots[i]);
          sampled[i].reserve(s);
          for (std::size_t j = 0; j < s; ++j)
            sampled[i].push_back(sample_online(*root_trees[i], result.theta_g, rng));
        });
        std::vector<SampleTrace> traces;
        std::vector<std::shared_ptr<const BfsTree>> trees;
        traces.reserve(roots.size() * s);
        trees.reserve(roots.size() * s);
        for (std::size_t i = 0; i < roots.size(); ++i)
          for (auto& trace : sampled[i]) {
            traces.push_back(std::move(trace));
            trees.push_back(root_trees[i]);
          }
        generator_step(traces, trees, result.theta_g, result.theta_d,
                       config.learning_rate);
      }
      for (std::size_t d = 0; d < config.d_steps; ++d) {
        std::vector<std::vector<LabeledPair>> sampled(roots.size());
        parallel_for(roots.size(), config.threads, [&](std::size_t i) {
          VertexId root = roots[i];
          std::size_t t = pairs_for_root(config, graph, root);
          if (t == 0) return;
          auto rng = stream_rng(config.seed, {kStreamDiscriminate, iter, d, root});
          auto tree = provider.tree(root);
          sampled[i].reserve(2 * t);
          for (VertexId v : sample_positives(graph, root, t, rng))
            sampled[i].push_back({v, root, true});
          for (std::size_t j = 0; j < t; ++j) {
            SampleTrace trace = sample_online(*tree, result.theta_g, rng);
            sampled[i].push_back({trace.sampled, root, false});
          }
        });
        std::vector<LabeledPair> pairs;
        for (const auto& chunk : sampled)
          pairs.insert(pairs.end(), chunk.begin(), chunk.end());
        discriminator_step(pairs, result.theta_d, config.learning_rate);
      }
    } catch (const std::runtime_error& e) {
      throw std::runtime_error("iteration " + std::to_string(iter) + ": " + e.what());
    }

    IterationStats stats = estimate_metrics(graph, provider, config, result.theta_g,
                                            result.theta_d, iter);
    MetricsRecord record;
    record.iteration = iter;
    record.value_estimate = stats.value_estimate;
    record.d_loss = stats.d_loss;
    record.g_reward_mean = stats.g_reward_mean;
    record.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.metrics.push_back(record);
    if (on_iteration) on_iteration(record, result.theta_g, result.theta_d);

    if (result.metrics.size() >= 2) {
      double prev = result.metrics[result.metrics.size() - 2].value_estimate;
      double rel = std::abs(record.value_estimate - prev) / std::max(std::abs(prev), 1e-12);
      steady = rel < config.convergence_tol ? steady + 1 : 0;
      if (steady >= config.convergence_window) break;
    }
  }
  return result;
}

TrainResult train(const Graph& graph, const TrainConfig& config,
                  const IterationCallback& on_iteration) {
  config.validate();
  BfsForest forest(graph, config.tree_lru_capacity, config.threads);
  return train(graph, forest, config, on_iteration);
}

}  // namespace graphgan
