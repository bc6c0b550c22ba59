#include "graphgan/forest.hpp"

#include <stdexcept>

#include "graphgan/parallel.hpp"

namespace graphgan {

BfsForest::BfsForest(const Graph& graph, std::size_t lru_capacity, std::size_t threads)
    : graph_(graph), capacity_(lru_capacity) {
  for (VertexId v = 0; v < graph.vertex_count(); ++v)
    if (graph.degree(v) > 0) roots_.push_back(v);
  if (capacity_ == 0) {
    prebuilt_.assign(graph.vertex_count(), nullptr);
    parallel_for(roots_.size(), threads, [&](std::size_t i) {
      VertexId root = roots_[i];
      prebuilt_[root] = std::make_shared<BfsTree>(bfs_tree(graph_, root));
    });
  }
}

std::shared_ptr<const BfsTree> BfsForest::tree(VertexId root) const {
  if (capacity_ == 0) {
    auto t = root < prebuilt_.size() ? prebuilt_[root] : nullptr;
    if (!t) throw std::invalid_argument("forest: no tree for isolated or unknown vertex");
    return t;
  }
  std::lock_guard<std::mutex> lock(cache_mutex_);
  auto it = cache_.find(root);
  if (it != cache_.end()) {
    lru_order_.splice(lru_order_.begin(), lru_order_, it->second.second);
    return it->second.first;
  }
  auto t = std::make_shared<const BfsTree>(bfs_tree(graph_, root));
  lru_order_.push_front(root);
  cache_.emplace(root, std::make_pair(t, lru_order_.begin()));
  if (cache_.size() > capacity_) {
    cache_.erase(lru_order_.back());
    lru_order_.pop_back();
  }
  return t;
}

ShortcutForest::ShortcutForest(const Graph& graph, std::vector<char> is_user,
                               std::size_t threads)
    : is_user_(std::move(is_user)) {
  if (is_user_.size() != graph.vertex_count())
    throw std::invalid_argument("shortcut forest: is_user size mismatch");
  for (VertexId v = 0; v < graph.vertex_count(); ++v)
    if (is_user_[v] && graph.degree(v) > 0) roots_.push_back(v);
  trees_.assign(graph.vertex_count(), nullptr);
  parallel_for(roots_.size(), threads, [&](std::size_t i) {
    VertexId root = roots_[i];
    trees_[root] = std::make_shared<BfsTree>(shortcut_bipartite_tree(graph, root, is_user_));
  });
}

std::shared_ptr<const BfsTree> ShortcutForest::tree(VertexId root) const {
  auto t = root < trees_.size() ? trees_[root] : nullptr;
  if (!t) throw std::invalid_argument("shortcut forest: root is not a trained user");
  return t;
}

}  // namespace graphgan
