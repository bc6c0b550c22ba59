#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace graphgan {

using VertexId = std::uint32_t;
inline constexpr std::int32_t kNoVertex = -1;

/// Undirected simple graph with dense vertex ids. Immutable after
/// construction; adjacency lists are sorted ascending, symmetric, and free
/// of self-loops and duplicates.
class Graph {
 public:
  Graph() = default;
  Graph(std::vector<std::vector<VertexId>> adjacency,
        std::vector<std::string> labels);

  std::size_t vertex_count() const { return adjacency_.size(); }
  std::size_t edge_count() const { return edge_count_; }

  const std::vector<VertexId>& neighbors(VertexId v) const { return adjacency_[v]; }
  std::size_t degree(VertexId v) const { return adjacency_[v].size(); }
  bool has_edge(VertexId u, VertexId v) const;

  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(VertexId v) const { return labels_[v]; }
  std::optional<VertexId> index_of(const std::string& label) const;

  /// All edges as (u, v) pairs with u < v, lexicographically ordered.
  std::vector<std::pair<VertexId, VertexId>> edges() const;

 private:
  std::vector<std::vector<VertexId>> adjacency_;
  std::vector<std::string> labels_;
  std::unordered_map<std::string, VertexId> index_;
  std::size_t edge_count_ = 0;
};

struct LoadOptions {
  std::optional<double> min_rating_threshold;
};

/// Incremental builder: external labels are mapped to dense indices in
/// first-appearance order; duplicate edges and self-loops are dropped.
class GraphBuilder {
 public:
  VertexId intern(const std::string& label);
  void add_edge(const std::string& u, const std::string& v);
  void add_edge(VertexId u, VertexId v);
  Graph build() const;

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, VertexId> index_;
  std::vector<std::unordered_set<VertexId>> adjacency_;
};

/// Parses `<label> <label> [weight]` lines; `#` comments and blank lines
/// are ignored. Throws std::runtime_error with a line number on malformed
/// input and on an empty result.
Graph load_edge_list(std::istream& in, const LoadOptions& options = {});
Graph load_edge_list_file(const std::string& path, const LoadOptions& options = {});

/// Ratings-style ingestion: first-column labels are users, second-column
/// labels are movies. Errors if a label appears on both sides.
struct BipartiteGraph {
  Graph graph;
  std::vector<char> is_user;
};
BipartiteGraph load_bipartite_edge_list(std::istream& in, const LoadOptions& options = {});
BipartiteGraph load_bipartite_edge_list_file(const std::string& path,
                                             const LoadOptions& options = {});

/// Shortest-path tree rooted at `root`. depth[v] == -1 marks vertices
/// outside the root's component.
struct BfsTree {
  VertexId root = 0;
  std::vector<std::int32_t> parent;  // kNoVertex for root / unreachable
  std::vector<std::int32_t> depth;   // -1 unreachable
  std::vector<std::vector<VertexId>> children;

  bool reachable(VertexId v) const { return depth[v] >= 0; }
  std::int32_t height() const;

  /// Tree neighbors of v: parent (if any) first, then children ascending.
  std::vector<VertexId> tree_neighbors(VertexId v) const;
};

struct TreePath {
  std::vector<VertexId> vertices;  // root first, target last
  std::size_t length() const { return vertices.size() - 1; }
};

/// BFS with deterministic ascending-index expansion order.
BfsTree bfs_tree(const Graph& graph, VertexId root);

/// Unique root-to-target tree path. Throws if target is unreachable or is
/// the root itself.
TreePath path_to(const BfsTree& tree, VertexId target);

/// BFS-tree over {user_root} ∪ movies in the derived graph that connects
/// the root to its rated movies and any two movies co-rated by some user.
/// `is_user[v]` marks the user side of the bipartition.
BfsTree shortcut_bipartite_tree(const Graph& graph, VertexId user_root,
                                const std::vector<char>& is_user);

std::optional<std::uint32_t> shortest_distance(const Graph& graph, VertexId u, VertexId v);

}  // namespace graphgan
