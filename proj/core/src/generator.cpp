#include "graphgan/generator.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <unordered_map>

#include "graphgan/discriminator.hpp"
#include "graphgan/rng.hpp"

namespace graphgan {

namespace {

constexpr double kDClampHigh = 1.0 - 1e-10;

void check_in_tree(const BfsTree& tree, VertexId v, const char* what) {
  if (v >= tree.depth.size() || !tree.reachable(v))
    throw std::invalid_argument(std::string(what) + ": vertex not in root's component");
}

}  // namespace

RelevanceDistribution relevance_distribution(const BfsTree& tree, VertexId v,
                                             const EmbeddingTable& theta_g) {
  check_in_tree(tree, v, "relevance_distribution");
  RelevanceDistribution dist;
  dist.center = v;
  dist.support = tree.tree_neighbors(v);
  if (dist.support.empty())
    throw std::invalid_argument("relevance_distribution: vertex has no tree neighbors");
  dist.probs.resize(dist.support.size());
  double max_score = -HUGE_VAL;
  for (std::size_t i = 0; i < dist.support.size(); ++i) {
    dist.probs[i] = theta_g.dot(dist.support[i], v);
    max_score = std::max(max_score, dist.probs[i]);
  }
  double total = 0.0;
  for (double& p : dist.probs) {
    p = std::exp(p - max_score);  // max-subtraction keeps exp in range
    total += p;
  }
  for (double& p : dist.probs) p /= total;
  return dist;
}

double graph_softmax(const BfsTree& tree, VertexId target,
                     const EmbeddingTable& theta_g) {
  TreePath path = path_to(tree, target);  // validates target
  double prob = 1.0;
  for (std::size_t j = 1; j < path.vertices.size(); ++j) {
    auto dist = relevance_distribution(tree, path.vertices[j - 1], theta_g);
    auto it = std::find(dist.support.begin(), dist.support.end(), path.vertices[j]);
    prob *= dist.probs[static_cast<std::size_t>(it - dist.support.begin())];
  }
  // turn-around factor at the target
  auto dist = relevance_distribution(tree, target, theta_g);
  auto it = std::find(dist.support.begin(), dist.support.end(),
                      path.vertices[path.vertices.size() - 2]);
  prob *= dist.probs[static_cast<std::size_t>(it - dist.support.begin())];
  return prob;
}

std::vector<VertexId> touched_set(const BfsTree& tree, VertexId target) {
  TreePath path = path_to(tree, target);
  std::vector<VertexId> touched = path.vertices;
  for (VertexId v : path.vertices) {
    auto nbrs = tree.tree_neighbors(v);
    touched.insert(touched.end(), nbrs.begin(), nbrs.end());
  }
  std::sort(touched.begin(), touched.end());
  touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
  return touched;
}

SampleTrace sample_online(const BfsTree& tree, const EmbeddingTable& theta_g,
                          std::mt19937_64& rng) {
  if (tree.tree_neighbors(tree.root).empty())
    throw std::invalid_argument("sample_online: isolated root");
  const std::size_t step_cap = 4 * static_cast<std::size_t>(tree.height()) + 8;
  VertexId previous = tree.root;
  VertexId current = tree.root;
  for (std::size_t step = 0; step < step_cap; ++step) {
    auto dist = relevance_distribution(tree, current, theta_g);
    VertexId next = dist.support[pick_index(dist.probs, rng)];
    // first turn-around: the root is never its own tree neighbor, so this
    // cannot fire on the initial step
    if (next == previous && current != tree.root) {
      SampleTrace trace;
      trace.sampled = current;
      trace.path = path_to(tree, current);
      trace.touched = touched_set(tree, current);
      return trace;
    }
    previous = current;
    current = next;
  }
  throw std::runtime_error("sample_online: walk exceeded step cap (tree height " +
                           std::to_string(tree.height()) + ")");
}

std::vector<double>& SparseGrad::row(VertexId v, std::size_t dim) {
  auto it = std::lower_bound(rows.begin(), rows.end(), v);
  if (it != rows.end() && *it == v)
    return values[static_cast<std::size_t>(it - rows.begin())];
  std::size_t pos = static_cast<std::size_t>(it - rows.begin());
  rows.insert(it, v);
  values.insert(values.begin() + static_cast<std::ptrdiff_t>(pos),
                std::vector<double>(dim, 0.0));
  return values[pos];
}

const std::vector<double>* SparseGrad::find(VertexId v) const {
  auto it = std::lower_bound(rows.begin(), rows.end(), v);
  if (it == rows.end() || *it != v) return nullptr;
  return &values[static_cast<std::size_t>(it - rows.begin())];
}

namespace {

// Adds the gradient of weight * log p_c(selected | center) to grad.
void accumulate_log_factor_grad(const BfsTree& tree, VertexId center, VertexId selected,
                                const EmbeddingTable& theta_g, double weight,
                                SparseGrad& grad) {
  auto dist = relevance_distribution(tree, center, theta_g);
  const std::size_t k = theta_g.dim();
  auto center_row = theta_g.row(center);
  // inserting rows may reallocate grad.values, so the center row's
  // contribution is buffered and applied after the loop
  std::vector<double> center_acc(k, 0.0);
  for (std::size_t i = 0; i < dist.support.size(); ++i) {
    VertexId vi = dist.support[i];
    double coeff = (vi == selected ? 1.0 : 0.0) - dist.probs[i];
    auto vi_row = theta_g.row(vi);
    auto& vi_grad = grad.row(vi, k);
    for (std::size_t d = 0; d < k; ++d) {
      vi_grad[d] += weight * coeff * center_row[d];
      center_acc[d] += weight * coeff * vi_row[d];
    }
  }
  auto& center_grad = grad.row(center, k);
  for (std::size_t d = 0; d < k; ++d) center_grad[d] += center_acc[d];
}

}  // namespace

SparseGrad log_graph_softmax_grad(const BfsTree& tree, VertexId target,
                                  const EmbeddingTable& theta_g) {
  TreePath path = path_to(tree, target);
  SparseGrad grad;
  for (std::size_t j = 1; j < path.vertices.size(); ++j)
    accumulate_log_factor_grad(tree, path.vertices[j - 1], path.vertices[j], theta_g,
                               1.0, grad);
  accumulate_log_factor_grad(tree, target, path.vertices[path.vertices.size() - 2],
                             theta_g, 1.0, grad);
  return grad;
}

void generator_step(std::span<const SampleTrace> traces,
                    const std::vector<std::shared_ptr<const BfsTree>>& trees,
                    EmbeddingTable& theta_g, const EmbeddingTable& theta_d,
                    double learning_rate) {
  if (traces.size() != trees.size())
    throw std::invalid_argument("generator_step: traces/trees size mismatch");
  const std::size_t k = theta_g.dim();
  SparseGrad batch;
  for (std::size_t i = 0; i < traces.size(); ++i) {
    const SampleTrace& trace = traces[i];
    double d = std::min(d_score(trace.sampled, trace.root(), theta_d), kDClampHigh);
    double weight = std::log(1.0 - d);
    SparseGrad grad = log_graph_softmax_grad(*trees[i], trace.sampled, theta_g);
    for (std::size_t r = 0; r < grad.rows.size(); ++r) {
      auto& acc = batch.row(grad.rows[r], k);
      for (std::size_t d_i = 0; d_i < k; ++d_i) acc[d_i] += weight * grad.values[r][d_i];
    }
  }
  for (std::size_t r = 0; r < batch.rows.size(); ++r) {
    auto row = theta_g.row(batch.rows[r]);
    for (std::size_t d_i = 0; d_i < k; ++d_i) {
      row[d_i] -= learning_rate * batch.values[r][d_i];
      if (!std::isfinite(row[d_i]))
        throw std::runtime_error("generator_step: non-finite parameter at vertex " +
                                 std::to_string(batch.rows[r]));
    }
  }
}

}  // namespace graphgan
