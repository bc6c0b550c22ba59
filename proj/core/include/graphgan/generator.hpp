#pragma once

#include <memory>
#include <random>
#include <span>
#include <vector>

#include "graphgan/embedding.hpp"
#include "graphgan/graph.hpp"

namespace graphgan {

/// Softmax over the tree neighbors of `center`, i.e. the probability of
/// stepping to each neighbor during a walk on the BFS-tree.
struct RelevanceDistribution {
  VertexId center;
  std::vector<VertexId> support;  // parent first, then children ascending
  std::vector<double> probs;      // sums to 1
};

RelevanceDistribution relevance_distribution(const BfsTree& tree, VertexId v,
                                             const EmbeddingTable& theta_g);

/// Connectivity probability of `target` given the tree root: the product
/// of the relevance probabilities along the unique root-to-target path,
/// times the turn-around factor at the target.
double graph_softmax(const BfsTree& tree, VertexId target,
                     const EmbeddingTable& theta_g);

/// Vertices read by one graph_softmax evaluation (or one sampled walk
/// ending at `target`): the path plus each path vertex's tree neighbors.
std::vector<VertexId> touched_set(const BfsTree& tree, VertexId target);

struct SampleTrace {
  VertexId sampled;
  TreePath path;                  // root ... sampled
  std::vector<VertexId> touched;  // sorted, deduplicated
  VertexId root() const { return path.vertices.front(); }
};

/// Random walk from the root by relevance probabilities; the current
/// vertex is emitted the first time the walk steps back to its parent.
SampleTrace sample_online(const BfsTree& tree, const EmbeddingTable& theta_g,
                          std::mt19937_64& rng);

/// Gradient of log graph_softmax(target | root) with respect to the
/// embedding rows involved; all other rows are zero.
struct SparseGrad {
  std::vector<VertexId> rows;               // sorted
  std::vector<std::vector<double>> values;  // parallel to rows, each of size k

  std::vector<double>& row(VertexId v, std::size_t dim);
  const std::vector<double>* find(VertexId v) const;
};

SparseGrad log_graph_softmax_grad(const BfsTree& tree, VertexId target,
                                  const EmbeddingTable& theta_g);

/// Policy-gradient descent step over a batch of sampled traces. Each
/// trace's log-gradient is weighted by log(1 - D(sampled, root)); the
/// batch is accumulated and applied once.
void generator_step(std::span<const SampleTrace> traces,
                    const std::vector<std::shared_ptr<const BfsTree>>& trees,
                    EmbeddingTable& theta_g, const EmbeddingTable& theta_d,
                    double learning_rate);

}  // namespace graphgan
