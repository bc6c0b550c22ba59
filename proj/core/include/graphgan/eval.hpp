#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "graphgan/embedding.hpp"
#include "graphgan/graph.hpp"

namespace graphgan {

using Edge = std::pair<VertexId, VertexId>;

struct LinkSplit {
  Graph train_graph;                 // same vertex ids as the original
  std::vector<Edge> test_positives;  // hidden edges
  std::vector<Edge> test_negatives;  // equal-count non-edges
};

/// Uniform random edge holdout; holdout count is round-half-up of
/// fraction * E. Negatives are rejection-sampled non-edges.
LinkSplit split_edges(const Graph& graph, double holdout_fraction, std::uint64_t seed);

struct LogisticModel {
  std::vector<double> weights;
  double bias = 0.0;

  double predict(std::span<const double> features) const;
};

/// Full-batch gradient descent on mean binary cross-entropy; zero-
/// initialized and deterministic given inputs.
LogisticModel train_logistic(const std::vector<std::vector<double>>& features,
                             const std::vector<int>& labels, std::size_t epochs,
                             double learning_rate);

struct ClassificationMetrics {
  double accuracy = 0.0;
  double macro_f1 = 0.0;
};

/// Hadamard edge features; the classifier is fit on train-graph edges vs
/// an equal number of sampled non-edges, then scored on the held-out
/// split at threshold 0.5.
ClassificationMetrics link_prediction_eval(const EmbeddingTable& embeddings,
                                           const LinkSplit& split, std::uint64_t seed);

struct VertexLabels {
  std::vector<std::vector<int>> classes_of;  // per vertex; empty = unlabeled
  std::vector<std::string> class_names;
};

/// Label file: `<vertex-label> <class-label> [<class-label> ...]` per line.
VertexLabels load_labels_file(const std::string& path, const Graph& graph);

/// One-vs-rest logistic classifiers on raw embeddings. A top-1 prediction
/// counts as correct when it belongs to the vertex's label set.
ClassificationMetrics node_classification_eval(const EmbeddingTable& embeddings,
                                               const VertexLabels& labels,
                                               double train_fraction, std::uint64_t seed);

struct RankingResult {
  std::vector<std::size_t> k_values;
  std::vector<double> precision_at_k;  // parallel to k_values
  std::vector<double> recall_at_k;
  std::size_t users_evaluated = 0;
};

/// Per-user split of movie edges: round-half-up 10% (or `fraction`)
/// hidden, keeping at least one training edge per user where possible.
struct RecommendationSplit {
  Graph train_graph;
  std::vector<Edge> hidden;  // (user, movie)
};
RecommendationSplit split_user_edges(const Graph& graph, const std::vector<char>& is_user,
                                     double fraction, std::uint64_t seed);

/// Ranks each user's unwatched movies by embedding inner product; ties
/// broken by ascending movie index.
RankingResult recommendation_eval(const EmbeddingTable& embeddings,
                                  const Graph& train_graph, const std::vector<char>& is_user,
                                  const std::vector<Edge>& hidden_edges,
                                  const std::vector<std::size_t>& k_list);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};
/// Least-squares line through (x, y); requires >= 2 distinct x values.
std::optional<LinearFit> least_squares_fit(std::span<const double> xs,
                                           std::span<const double> ys);

struct DistanceBucket {
  std::uint32_t distance;
  std::size_t pairs;      // sampled pairs with this (edge-removed) distance
  std::size_t edges;      // of which an edge existed
  double edge_probability;
};

struct DistanceStudy {
  std::vector<DistanceBucket> buckets;
  std::optional<LinearFit> log_probability_fit;  // absent when degenerate
};

/// Samples vertex pairs uniformly; for pairs joined by an edge the
/// distance is computed with that edge removed. Disconnected pairs are
/// dropped. The fit uses log edge-probability over buckets with >= 1 edge
/// and >= 100 sampled pairs.
DistanceStudy distance_study(const Graph& graph, std::size_t num_pairs,
                             std::uint64_t seed, std::size_t threads = 1);

}  // namespace graphgan
