#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <vector>

#include "graphgan/discriminator.hpp"
#include "graphgan/embedding.hpp"
#include "graphgan/forest.hpp"
#include "graphgan/generator.hpp"

namespace graphgan {

struct TrainConfig {
  std::size_t dim = 20;                     // k
  std::size_t samples_per_vertex = 20;      // s, generated per root per G-step
  std::optional<std::size_t> pairs_per_vertex;  // t; default degree capped at 20
  double learning_rate = 0.001;
  std::size_t g_steps = 30;
  std::size_t d_steps = 30;
  std::size_t max_iterations = 20;
  std::size_t pretrain_epochs = 0;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  std::size_t tree_lru_capacity = 0;  // 0: prebuild the whole forest
  double convergence_tol = 1e-4;
  std::size_t convergence_window = 5;

  void validate() const;
};

struct MetricsRecord {
  std::size_t iteration;
  double value_estimate;  // Monte-Carlo estimate of the minimax value
  double d_loss;
  double g_reward_mean;
  double wall_time;
};

struct TrainResult {
  EmbeddingTable theta_g;
  EmbeddingTable theta_d;
  std::vector<MetricsRecord> metrics;
};

using IterationCallback =
    std::function<void(const MetricsRecord&, const EmbeddingTable& theta_g,
                       const EmbeddingTable& theta_d)>;

/// Alternating minimax training over the given tree provider's roots.
/// Fully reproducible from (graph, provider, config).
TrainResult train(const Graph& graph, const TreeProvider& provider,
                  const TrainConfig& config, const IterationCallback& on_iteration = {});

/// Convenience overload: builds a BfsForest over all non-isolated vertices.
TrainResult train(const Graph& graph, const TrainConfig& config,
                  const IterationCallback& on_iteration = {});

/// t uniform draws with replacement from N(v_c); empty for isolated v_c.
std::vector<VertexId> sample_positives(const Graph& graph, VertexId v_c, std::size_t t,
                                       std::mt19937_64& rng);

}  // namespace graphgan
