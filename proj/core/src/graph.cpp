#include "graphgan/graph.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "graphgan/text.hpp"

namespace graphgan {

Graph::Graph(std::vector<std::vector<VertexId>> adjacency,
             std::vector<std::string> labels)
    : adjacency_(std::move(adjacency)), labels_(std::move(labels)) {
  if (adjacency_.size() != labels_.size())
    throw std::invalid_argument("graph: adjacency/label size mismatch");
  std::size_t half_edges = 0;
  for (std::size_t v = 0; v < adjacency_.size(); ++v) {
    auto& list = adjacency_[v];
    std::sort(list.begin(), list.end());
    if (std::adjacent_find(list.begin(), list.end()) != list.end())
      throw std::invalid_argument("graph: duplicate neighbor entry");
    for (VertexId u : list) {
      if (u >= adjacency_.size()) throw std::invalid_argument("graph: neighbor out of range");
      if (u == v) throw std::invalid_argument("graph: self-loop");
    }
    half_edges += list.size();
  }
  if (half_edges % 2 != 0) throw std::invalid_argument("graph: asymmetric adjacency");
  edge_count_ = half_edges / 2;
  index_.reserve(labels_.size());
  for (std::size_t v = 0; v < labels_.size(); ++v)
    index_.emplace(labels_[v], static_cast<VertexId>(v));
}

bool Graph::has_edge(VertexId u, VertexId v) const {
  const auto& list = adjacency_[u];
  return std::binary_search(list.begin(), list.end(), v);
}

std::optional<VertexId> Graph::index_of(const std::string& label) const {
  auto it = index_.find(label);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::pair<VertexId, VertexId>> Graph::edges() const {
  std::vector<std::pair<VertexId, VertexId>> out;
  out.reserve(edge_count_);
  for (VertexId u = 0; u < adjacency_.size(); ++u)
    for (VertexId v : adjacency_[u])
      if (u < v) out.emplace_back(u, v);
  return out;
}

VertexId GraphBuilder::intern(const std::string& label) {
  auto it = index_.find(label);
  if (it != index_.end()) return it->second;
  VertexId id = static_cast<VertexId>(labels_.size());
  labels_.push_back(label);
  index_.emplace(label, id);
  adjacency_.emplace_back();
  return id;
}

void GraphBuilder::add_edge(const std::string& u, const std::string& v) {
  add_edge(intern(u), intern(v));
}

void GraphBuilder::add_edge(VertexId u, VertexId v) {
  if (u == v) return;  // self-loops normalized away
  adjacency_[u].insert(v);
  adjacency_[v].insert(u);
}

Graph GraphBuilder::build() const {
  std::vector<std::vector<VertexId>> adjacency(adjacency_.size());
  for (std::size_t v = 0; v < adjacency_.size(); ++v)
    adjacency[v].assign(adjacency_[v].begin(), adjacency_[v].end());
  return Graph(std::move(adjacency), labels_);
}

Graph load_edge_list(std::istream& in, const LoadOptions& options) {
  GraphBuilder builder;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    std::string u, v, weight_token;
    if (!(fields >> u >> v))
      throw std::runtime_error("edge list line " + std::to_string(line_no) +
                               ": expected two vertex labels");
    if (fields >> weight_token) {
      double weight;
      if (!parse_double(weight_token, weight))
        throw std::runtime_error("edge list line " + std::to_string(line_no) +
                                 ": bad weight '" + weight_token + "'");
      std::string extra;
      if (fields >> extra)
        throw std::runtime_error("edge list line " + std::to_string(line_no) +
                                 ": trailing tokens");
      if (options.min_rating_threshold && weight < *options.min_rating_threshold)
        continue;
    }
    builder.add_edge(u, v);
  }
  Graph graph = builder.build();
  if (graph.vertex_count() == 0)
    throw std::runtime_error("edge list: no edges found");
  return graph;
}

Graph load_edge_list_file(const std::string& path, const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open edge list: " + path);
  return load_edge_list(in, options);
}

BipartiteGraph load_bipartite_edge_list(std::istream& in, const LoadOptions& options) {
  GraphBuilder builder;
  std::vector<char> is_user;
  auto intern_side = [&](const std::string& label, bool user, std::size_t line_no) {
    VertexId id = builder.intern(label);
    if (id == is_user.size()) {
      is_user.push_back(user ? 1 : 0);
    } else if (static_cast<bool>(is_user[id]) != user) {
      throw std::runtime_error("edge list line " + std::to_string(line_no) + ": label '" +
                               label + "' appears as both user and movie");
    }
    return id;
  };
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    std::string u, v, weight_token;
    if (!(fields >> u >> v))
      throw std::runtime_error("edge list line " + std::to_string(line_no) +
                               ": expected user and movie labels");
    bool skip = false;
    if (fields >> weight_token) {
      double weight;
      if (!parse_double(weight_token, weight))
        throw std::runtime_error("edge list line " + std::to_string(line_no) +
                                 ": bad weight '" + weight_token + "'");
      if (options.min_rating_threshold && weight < *options.min_rating_threshold) skip = true;
    }
    VertexId user = intern_side(u, true, line_no);
    VertexId movie = intern_side(v, false, line_no);
    if (!skip) builder.add_edge(user, movie);
  }
  BipartiteGraph result{builder.build(), std::move(is_user)};
  if (result.graph.vertex_count() == 0)
    throw std::runtime_error("edge list: no edges found");
  return result;
}

BipartiteGraph load_bipartite_edge_list_file(const std::string& path,
                                             const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open edge list: " + path);
  return load_bipartite_edge_list(in, options);
}

std::int32_t BfsTree::height() const {
  std::int32_t h = 0;
  for (std::int32_t d : depth) h = std::max(h, d);
  return h;
}

std::vector<VertexId> BfsTree::tree_neighbors(VertexId v) const {
  std::vector<VertexId> out;
  out.reserve(children[v].size() + 1);
  if (parent[v] != kNoVertex) out.push_back(static_cast<VertexId>(parent[v]));
  out.insert(out.end(), children[v].begin(), children[v].end());
  return out;
}

BfsTree bfs_tree(const Graph& graph, VertexId root) {
  const std::size_t n = graph.vertex_count();
  if (root >= n) throw std::invalid_argument("bfs_tree: root out of range");
  BfsTree tree;
  tree.root = root;
  tree.parent.assign(n, kNoVertex);
  tree.depth.assign(n, -1);
  tree.children.assign(n, {});
  std::deque<VertexId> frontier{root};
  tree.depth[root] = 0;
  while (!frontier.empty()) {
    VertexId v = frontier.front();
    frontier.pop_front();
    for (VertexId u : graph.neighbors(v)) {  // ascending index order
      if (tree.depth[u] >= 0) continue;
      tree.depth[u] = tree.depth[v] + 1;
      tree.parent[u] = static_cast<std::int32_t>(v);
      tree.children[v].push_back(u);
      frontier.push_back(u);
    }
  }
  return tree;
}

TreePath path_to(const BfsTree& tree, VertexId target) {
  if (target >= tree.depth.size() || !tree.reachable(target))
    throw std::invalid_argument("path_to: target not in root's component");
  if (target == tree.root)
    throw std::invalid_argument("path_to: target equals root");
  TreePath path;
  path.vertices.resize(static_cast<std::size_t>(tree.depth[target]) + 1);
  VertexId v = target;
  for (std::size_t i = path.vertices.size(); i-- > 0;) {
    path.vertices[i] = v;
    if (i > 0) v = static_cast<VertexId>(tree.parent[v]);
  }
  return path;
}

BfsTree shortcut_bipartite_tree(const Graph& graph, VertexId user_root,
                                const std::vector<char>& is_user) {
  const std::size_t n = graph.vertex_count();
  if (user_root >= n || !is_user[user_root])
    throw std::invalid_argument("shortcut tree: root must be a user vertex");
  for (VertexId u = 0; u < n; ++u)
    for (VertexId v : graph.neighbors(u))
      if (u < v && is_user[u] == is_user[v])
        throw std::invalid_argument("shortcut tree: graph is not bipartite between users and movies");

  BfsTree tree;
  tree.root = user_root;
  tree.parent.assign(n, kNoVertex);
  tree.depth.assign(n, -1);
  tree.children.assign(n, {});
  tree.depth[user_root] = 0;
  std::deque<VertexId> frontier{user_root};
  std::vector<VertexId> candidates;
  while (!frontier.empty()) {
    VertexId v = frontier.front();
    frontier.pop_front();
    candidates.clear();
    if (v == user_root) {
      // root connects directly to its own movies
      candidates.assign(graph.neighbors(v).begin(), graph.neighbors(v).end());
    } else {
      // movie–movie shortcut edges: movies co-rated with v by any user
      for (VertexId user : graph.neighbors(v))
        for (VertexId movie : graph.neighbors(user))
          if (movie != v) candidates.push_back(movie);
      std::sort(candidates.begin(), candidates.end());
      candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    }
    for (VertexId u : candidates) {
      if (tree.depth[u] >= 0) continue;
      tree.depth[u] = tree.depth[v] + 1;
      tree.parent[u] = static_cast<std::int32_t>(v);
      tree.children[v].push_back(u);
      frontier.push_back(u);
    }
  }
  return tree;
}

std::optional<std::uint32_t> shortest_distance(const Graph& graph, VertexId u, VertexId v) {
  const std::size_t n = graph.vertex_count();
  if (u >= n || v >= n) throw std::invalid_argument("shortest_distance: vertex out of range");
  if (u == v) return 0;
  std::vector<std::int32_t> dist(n, -1);
  dist[u] = 0;
  std::deque<VertexId> frontier{u};
  while (!frontier.empty()) {
    VertexId x = frontier.front();
    frontier.pop_front();
    for (VertexId y : graph.neighbors(x)) {
      if (dist[y] >= 0) continue;
      dist[y] = dist[x] + 1;
      if (y == v) return static_cast<std::uint32_t>(dist[y]);
      frontier.push_back(y);
    }
  }
  return std::nullopt;
}

}  // namespace graphgan
