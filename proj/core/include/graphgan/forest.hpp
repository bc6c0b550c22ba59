#pragma once

#include <list>
#include <memory>
#include <mutex>
#include <unordered_map>
#include <vector>

#include "graphgan/graph.hpp"

namespace graphgan {

/// Read-only source of per-root BFS-trees for training and sampling.
class TreeProvider {
 public:
  virtual ~TreeProvider() = default;
  virtual std::shared_ptr<const BfsTree> tree(VertexId root) const = 0;
  /// Roots whose connectivity distribution is trained.
  virtual const std::vector<VertexId>& roots() const = 0;
};

/// Forest over every non-isolated vertex. With lru_capacity == 0 all trees
/// are prebuilt (concurrently); otherwise trees are built on demand and
/// kept in an LRU cache of that size.
class BfsForest : public TreeProvider {
 public:
  BfsForest(const Graph& graph, std::size_t lru_capacity = 0, std::size_t threads = 1);

  std::shared_ptr<const BfsTree> tree(VertexId root) const override;
  const std::vector<VertexId>& roots() const override { return roots_; }

 private:
  const Graph& graph_;
  std::vector<VertexId> roots_;
  std::vector<std::shared_ptr<const BfsTree>> prebuilt_;
  std::size_t capacity_ = 0;
  mutable std::mutex cache_mutex_;
  mutable std::list<VertexId> lru_order_;
  mutable std::unordered_map<VertexId,
      std::pair<std::shared_ptr<const BfsTree>, std::list<VertexId>::iterator>> cache_;
};

/// Forest for the bipartite recommendation setting: one shortcut tree per
/// user, so every root's distribution is supported on movies only.
class ShortcutForest : public TreeProvider {
 public:
  ShortcutForest(const Graph& graph, std::vector<char> is_user, std::size_t threads = 1);

  std::shared_ptr<const BfsTree> tree(VertexId root) const override;
  const std::vector<VertexId>& roots() const override { return roots_; }
  const std::vector<char>& is_user() const { return is_user_; }

 private:
  std::vector<char> is_user_;
  std::vector<VertexId> roots_;
  std::vector<std::shared_ptr<const BfsTree>> trees_;  // indexed by vertex id
};

}  // namespace graphgan
