#include "graphgan/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "graphgan/parallel.hpp"
#include "graphgan/rng.hpp"

namespace graphgan {

namespace {

constexpr std::uint64_t kStreamSplit = 0x5eed01;
constexpr std::uint64_t kStreamNegatives = 0x5eed02;
constexpr std::uint64_t kStreamClassifier = 0x5eed03;
constexpr std::uint64_t kStreamNodeSplit = 0x5eed04;
constexpr std::uint64_t kStreamRecSplit = 0x5eed05;
constexpr std::uint64_t kStreamPairs = 0x5eed06;

template <typename T>
void shuffle_in_place(std::vector<T>& items, std::mt19937_64& rng) {
  for (std::size_t i = items.size(); i > 1; --i)
    std::swap(items[i - 1], items[uniform_index(rng, i)]);
}

std::size_t round_half_up(double x) {
  return static_cast<std::size_t>(std::floor(x + 0.5));
}

std::vector<double> hadamard(std::span<const double> a, std::span<const double> b) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

double binary_macro_f1(std::size_t tp, std::size_t fp, std::size_t tn, std::size_t fn) {
  auto f1 = [](std::size_t tpos, std::size_t fpos, std::size_t fneg) {
    double denom = static_cast<double>(2 * tpos + fpos + fneg);
    return denom == 0.0 ? 0.0 : 2.0 * static_cast<double>(tpos) / denom;
  };
  return 0.5 * (f1(tp, fp, fn) + f1(tn, fn, fp));
}

Graph graph_without_edges(const Graph& graph, const std::set<Edge>& removed) {
  GraphBuilder builder;
  for (const std::string& label : graph.labels()) builder.intern(label);
  for (auto [u, v] : graph.edges())
    if (!removed.count({u, v})) builder.add_edge(u, v);
  return builder.build();
}

}  // namespace

LinkSplit split_edges(const Graph& graph, double holdout_fraction, std::uint64_t seed) {
  if (!(holdout_fraction > 0.0 && holdout_fraction < 1.0))
    throw std::invalid_argument("split_edges: fraction must be in (0, 1)");
  auto edges = graph.edges();
  auto rng = stream_rng(seed, {kStreamSplit});
  shuffle_in_place(edges, rng);
  std::size_t holdout = round_half_up(holdout_fraction * static_cast<double>(edges.size()));
  holdout = std::min(holdout, edges.size());

  LinkSplit split;
  split.test_positives.assign(edges.begin(), edges.begin() + static_cast<std::ptrdiff_t>(holdout));
  split.train_graph = graph_without_edges(
      graph, std::set<Edge>(split.test_positives.begin(), split.test_positives.end()));

  const std::size_t n = graph.vertex_count();
  std::size_t possible_non_edges = n * (n - 1) / 2 - graph.edge_count();
  if (possible_non_edges < holdout)
    throw std::runtime_error("split_edges: graph too dense to sample negatives");
  std::set<Edge> chosen;
  auto neg_rng = stream_rng(seed, {kStreamNegatives});
  std::size_t attempts = 0;
  const std::size_t attempt_cap = 1000 + 200 * holdout;
  while (chosen.size() < holdout) {
    if (++attempts > attempt_cap)
      throw std::runtime_error("split_edges: negative sampling did not converge");
    VertexId u = static_cast<VertexId>(uniform_index(neg_rng, n));
    VertexId v = static_cast<VertexId>(uniform_index(neg_rng, n));
    if (u == v) continue;
    if (u > v) std::swap(u, v);
    if (graph.has_edge(u, v)) continue;
    chosen.insert({u, v});
  }
  split.test_negatives.assign(chosen.begin(), chosen.end());
  return split;
}

double LogisticModel::predict(std::span<const double> features) const {
  double z = bias;
  for (std::size_t i = 0; i < weights.size(); ++i) z += weights[i] * features[i];
  return 1.0 / (1.0 + std::exp(-z));
}

LogisticModel train_logistic(const std::vector<std::vector<double>>& features,
                             const std::vector<int>& labels, std::size_t epochs,
                             double learning_rate) {
  if (features.size() != labels.size())
    throw std::invalid_argument("train_logistic: feature/label count mismatch");
  if (features.empty()) throw std::invalid_argument("train_logistic: empty training set");
  const std::size_t dim = features.front().size();
  for (const auto& row : features)
    if (row.size() != dim)
      throw std::invalid_argument("train_logistic: inconsistent feature dimension");

  LogisticModel model;
  model.weights.assign(dim, 0.0);
  const double inv_n = 1.0 / static_cast<double>(features.size());
  std::vector<double> grad(dim);
  for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double bias_grad = 0.0;
    for (std::size_t i = 0; i < features.size(); ++i) {
      double error = model.predict(features[i]) - static_cast<double>(labels[i]);
      for (std::size_t d = 0; d < dim; ++d) grad[d] += error * features[i][d];
      bias_grad += error;
    }
    for (std::size_t d = 0; d < dim; ++d) model.weights[d] -= learning_rate * inv_n * grad[d];
    model.bias -= learning_rate * inv_n * bias_grad;
  }
  return model;
}

ClassificationMetrics link_prediction_eval(const EmbeddingTable& embeddings,
                                           const LinkSplit& split, std::uint64_t seed) {
  const Graph& train = split.train_graph;
  if (embeddings.vertex_count() != train.vertex_count())
    throw std::invalid_argument("link eval: embeddings do not cover all vertices");
  std::set<Edge> test_pos(split.test_positives.begin(), split.test_positives.end());

  std::vector<std::vector<double>> features;
  std::vector<int> labels;
  for (auto [u, v] : train.edges()) {
    features.push_back(hadamard(embeddings.row(u), embeddings.row(v)));
    labels.push_back(1);
  }
  const std::size_t positives = features.size();
  auto rng = stream_rng(seed, {kStreamClassifier});
  const std::size_t n = train.vertex_count();
  std::size_t attempts = 0;
  const std::size_t attempt_cap = 1000 + 200 * positives;
  for (std::size_t got = 0; got < positives;) {
    if (++attempts > attempt_cap)
      throw std::runtime_error("link eval: non-edge sampling did not converge");
    VertexId u = static_cast<VertexId>(uniform_index(rng, n));
    VertexId v = static_cast<VertexId>(uniform_index(rng, n));
    if (u == v) continue;
    if (u > v) std::swap(u, v);
    if (train.has_edge(u, v) || test_pos.count({u, v})) continue;
    features.push_back(hadamard(embeddings.row(u), embeddings.row(v)));
    labels.push_back(0);
    ++got;
  }
  LogisticModel model = train_logistic(features, labels, 300, 0.5);

  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  for (auto [u, v] : split.test_positives) {
    auto f = hadamard(embeddings.row(u), embeddings.row(v));
    (model.predict(f) >= 0.5 ? tp : fn)++;
  }
  for (auto [u, v] : split.test_negatives) {
    auto f = hadamard(embeddings.row(u), embeddings.row(v));
    (model.predict(f) >= 0.5 ? fp : tn)++;
  }
  ClassificationMetrics metrics;
  std::size_t total = tp + fp + tn + fn;
  metrics.accuracy = total ? static_cast<double>(tp + tn) / static_cast<double>(total) : 0.0;
  metrics.macro_f1 = binary_macro_f1(tp, fp, tn, fn);
  return metrics;
}

VertexLabels load_labels_file(const std::string& path, const Graph& graph) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open label file: " + path);
  VertexLabels out;
  out.classes_of.assign(graph.vertex_count(), {});
  std::unordered_map<std::string, int> class_index;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    std::string vertex_label, class_label;
    if (!(fields >> vertex_label >> class_label))
      throw std::runtime_error("label file line " + std::to_string(line_no) +
                               ": expected vertex and class label");
    auto vertex = graph.index_of(vertex_label);
    if (!vertex)
      throw std::runtime_error("label file line " + std::to_string(line_no) +
                               ": unknown vertex '" + vertex_label + "'");
    do {
      auto [it, inserted] = class_index.try_emplace(
          class_label, static_cast<int>(out.class_names.size()));
      if (inserted) out.class_names.push_back(class_label);
      auto& classes = out.classes_of[*vertex];
      if (std::find(classes.begin(), classes.end(), it->second) == classes.end())
        classes.push_back(it->second);
    } while (fields >> class_label);
  }
  return out;
}

ClassificationMetrics node_classification_eval(const EmbeddingTable& embeddings,
                                               const VertexLabels& labels,
                                               double train_fraction, std::uint64_t seed) {
  if (embeddings.vertex_count() != labels.classes_of.size())
    throw std::invalid_argument("node eval: embeddings do not cover all vertices");
  std::vector<VertexId> labeled;
  for (VertexId v = 0; v < labels.classes_of.size(); ++v)
    if (!labels.classes_of[v].empty()) labeled.push_back(v);
  if (labeled.size() < 2) throw std::invalid_argument("node eval: not enough labeled vertices");

  auto rng = stream_rng(seed, {kStreamNodeSplit});
  shuffle_in_place(labeled, rng);
  std::size_t train_count =
      std::clamp<std::size_t>(round_half_up(train_fraction * static_cast<double>(labeled.size())),
                              1, labeled.size() - 1);
  std::span<const VertexId> train_set(labeled.data(), train_count);
  std::span<const VertexId> test_set(labeled.data() + train_count,
                                     labeled.size() - train_count);

  const int num_classes = static_cast<int>(labels.class_names.size());
  std::vector<std::vector<double>> train_features;
  train_features.reserve(train_set.size());
  for (VertexId v : train_set) {
    auto row = embeddings.row(v);
    train_features.emplace_back(row.begin(), row.end());
  }

  std::vector<LogisticModel> models(static_cast<std::size_t>(num_classes));
  std::vector<char> has_train_positive(static_cast<std::size_t>(num_classes), 0);
  for (int c = 0; c < num_classes; ++c) {
    std::vector<int> y(train_set.size(), 0);
    for (std::size_t i = 0; i < train_set.size(); ++i) {
      const auto& classes = labels.classes_of[train_set[i]];
      if (std::find(classes.begin(), classes.end(), c) != classes.end()) y[i] = 1;
    }
    has_train_positive[static_cast<std::size_t>(c)] =
        std::find(y.begin(), y.end(), 1) != y.end();
    if (!has_train_positive[static_cast<std::size_t>(c)])
      std::cerr << "warning: class '" << labels.class_names[static_cast<std::size_t>(c)]
                << "' has no training examples; excluded from macro-F1\n";
    models[static_cast<std::size_t>(c)] = train_logistic(train_features, y, 200, 0.5);
  }

  std::size_t correct = 0;
  std::vector<std::size_t> tp(static_cast<std::size_t>(num_classes), 0);
  std::vector<std::size_t> fp(static_cast<std::size_t>(num_classes), 0);
  std::vector<std::size_t> fn(static_cast<std::size_t>(num_classes), 0);
  for (VertexId v : test_set) {
    auto row = embeddings.row(v);
    std::vector<double> feature(row.begin(), row.end());
    int best = 0;
    double best_prob = -1.0;
    for (int c = 0; c < num_classes; ++c) {
      double p = models[static_cast<std::size_t>(c)].predict(feature);
      if (p > best_prob) {
        best_prob = p;
        best = c;
      }
    }
    const auto& truth = labels.classes_of[v];
    bool hit = std::find(truth.begin(), truth.end(), best) != truth.end();
    if (hit) ++correct;
    for (int c = 0; c < num_classes; ++c) {
      bool is_true = std::find(truth.begin(), truth.end(), c) != truth.end();
      bool is_pred = c == best;
      if (is_pred && is_true) ++tp[static_cast<std::size_t>(c)];
      else if (is_pred) ++fp[static_cast<std::size_t>(c)];
      else if (is_true) ++fn[static_cast<std::size_t>(c)];
    }
  }
  ClassificationMetrics metrics;
  metrics.accuracy = static_cast<double>(correct) / static_cast<double>(test_set.size());
  double f1_sum = 0.0;
  std::size_t f1_classes = 0;
  for (int c = 0; c < num_classes; ++c) {
    if (!has_train_positive[static_cast<std::size_t>(c)]) continue;
    std::size_t i = static_cast<std::size_t>(c);
    double denom = static_cast<double>(2 * tp[i] + fp[i] + fn[i]);
    f1_sum += denom == 0.0 ? 0.0 : 2.0 * static_cast<double>(tp[i]) / denom;
    ++f1_classes;
  }
  metrics.macro_f1 = f1_classes ? f1_sum / static_cast<double>(f1_classes) : 0.0;
  return metrics;
}

RecommendationSplit split_user_edges(const Graph& graph, const std::vector<char>& is_user,
                                     double fraction, std::uint64_t seed) {
  if (is_user.size() != graph.vertex_count())
    throw std::invalid_argument("split_user_edges: is_user size mismatch");
  RecommendationSplit split;
  std::set<Edge> hidden;
  for (VertexId user = 0; user < graph.vertex_count(); ++user) {
    if (!is_user[user]) continue;
    std::vector<VertexId> movies(graph.neighbors(user).begin(), graph.neighbors(user).end());
    if (movies.size() < 2) continue;  // keep at least one training edge
    auto rng = stream_rng(seed, {kStreamRecSplit, user});
    shuffle_in_place(movies, rng);
    std::size_t h = std::min(round_half_up(fraction * static_cast<double>(movies.size())),
                             movies.size() - 1);
    for (std::size_t i = 0; i < h; ++i) {
      VertexId movie = movies[i];
      split.hidden.emplace_back(user, movie);
      hidden.insert({std::min(user, movie), std::max(user, movie)});
    }
  }
  split.train_graph = graph_without_edges(graph, hidden);
  return split;
}

RankingResult recommendation_eval(const EmbeddingTable& embeddings,
                                  const Graph& train_graph, const std::vector<char>& is_user,
                                  const std::vector<Edge>& hidden_edges,
                                  const std::vector<std::size_t>& k_list) {
  if (embeddings.vertex_count() != train_graph.vertex_count())
    throw std::invalid_argument("rec eval: embeddings do not cover all vertices");
  if (k_list.empty()) throw std::invalid_argument("rec eval: empty K list");
  std::unordered_map<VertexId, std::unordered_set<VertexId>> hidden_of;
  for (auto [user, movie] : hidden_edges) hidden_of[user].insert(movie);

  std::vector<VertexId> movies;
  for (VertexId v = 0; v < train_graph.vertex_count(); ++v)
    if (!is_user[v]) movies.push_back(v);

  RankingResult result;
  result.k_values = k_list;
  result.precision_at_k.assign(k_list.size(), 0.0);
  result.recall_at_k.assign(k_list.size(), 0.0);
  const std::size_t max_k = *std::max_element(k_list.begin(), k_list.end());

  for (const auto& [user, hidden] : std::map<VertexId, std::unordered_set<VertexId>>(
           hidden_of.begin(), hidden_of.end())) {
    const auto& watched = train_graph.neighbors(user);
    std::vector<std::pair<double, VertexId>> scored;
    for (VertexId movie : movies) {
      if (std::binary_search(watched.begin(), watched.end(), movie)) continue;
      scored.emplace_back(-embeddings.dot(user, movie), movie);  // desc score, asc index
    }
    if (scored.empty()) {
      std::cerr << "warning: user '" << train_graph.label(user)
                << "' has no unwatched movies; skipped\n";
      continue;
    }
    std::size_t top = std::min(max_k, scored.size());
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(top),
                      scored.end());
    for (std::size_t ki = 0; ki < k_list.size(); ++ki) {
      std::size_t k = std::min(k_list[ki], top);
      std::size_t hits = 0;
      for (std::size_t i = 0; i < k; ++i) hits += hidden.count(scored[i].second);
      result.precision_at_k[ki] +=
          static_cast<double>(hits) / static_cast<double>(k_list[ki]);
      result.recall_at_k[ki] += static_cast<double>(hits) / static_cast<double>(hidden.size());
    }
    ++result.users_evaluated;
  }
  if (result.users_evaluated > 0) {
    for (double& p : result.precision_at_k) p /= static_cast<double>(result.users_evaluated);
    for (double& r : result.recall_at_k) r /= static_cast<double>(result.users_evaluated);
  }
  return result;
}

std::optional<LinearFit> least_squares_fit(std::span<const double> xs,
                                           std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2) return std::nullopt;
  const double n = static_cast<double>(xs.size());
  double mean_x = 0.0, mean_y = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mean_x += xs[i];
    mean_y += ys[i];
  }
  mean_x /= n;
  mean_y /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mean_x) * (xs[i] - mean_x);
    sxy += (xs[i] - mean_x) * (ys[i] - mean_y);
    syy += (ys[i] - mean_y) * (ys[i] - mean_y);
  }
  if (sxx == 0.0) return std::nullopt;
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = mean_y - fit.slope * mean_x;
  fit.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return fit;
}

DistanceStudy distance_study(const Graph& graph, std::size_t num_pairs,
                             std::uint64_t seed, std::size_t threads) {
  if (num_pairs == 0) throw std::invalid_argument("distance_study: num_pairs must be >= 1");
  const std::size_t n = graph.vertex_count();
  if (n < 2) throw std::invalid_argument("distance_study: graph too small");

  auto rng = stream_rng(seed, {kStreamPairs});
  struct PairSample {
    VertexId u, v;
    bool had_edge;
  };
  std::vector<PairSample> samples;
  samples.reserve(num_pairs);
  for (std::size_t i = 0; i < num_pairs; ++i) {
    VertexId u = static_cast<VertexId>(uniform_index(rng, n));
    VertexId v = static_cast<VertexId>(uniform_index(rng, n));
    if (u == v) {
      --i;
      continue;
    }
    if (u > v) std::swap(u, v);
    samples.push_back({u, v, graph.has_edge(u, v)});
  }

  // one BFS per distinct source for non-edge pairs, one edge-removed BFS
  // per edge pair (edge pairs are a small fraction of uniform samples)
  std::vector<std::int32_t> distances(samples.size(), -1);
  std::unordered_map<VertexId, std::vector<std::size_t>> by_source;
  std::vector<std::size_t> edge_pair_indices;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].had_edge)
      edge_pair_indices.push_back(i);
    else
      by_source[samples[i].u].push_back(i);
  }
  std::vector<std::pair<VertexId, std::vector<std::size_t>>> source_groups(
      by_source.begin(), by_source.end());

  auto bfs_distances = [&](VertexId source, std::optional<Edge> removed) {
    std::vector<std::int32_t> dist(n, -1);
    dist[source] = 0;
    std::vector<VertexId> frontier{source}, next;
    while (!frontier.empty()) {
      next.clear();
      for (VertexId x : frontier)
        for (VertexId y : graph.neighbors(x)) {
          if (removed && ((x == removed->first && y == removed->second) ||
                          (x == removed->second && y == removed->first)))
            continue;
          if (dist[y] >= 0) continue;
          dist[y] = dist[x] + 1;
          next.push_back(y);
        }
      frontier.swap(next);
    }
    return dist;
  };

  parallel_for(source_groups.size(), threads, [&](std::size_t g) {
    auto& [source, indices] = source_groups[g];
    auto dist = bfs_distances(source, std::nullopt);
    for (std::size_t i : indices) distances[i] = dist[samples[i].v];
  });
  parallel_for(edge_pair_indices.size(), threads, [&](std::size_t g) {
    std::size_t i = edge_pair_indices[g];
    auto dist = bfs_distances(samples[i].u, Edge{samples[i].u, samples[i].v});
    distances[i] = dist[samples[i].v];
  });

  std::map<std::uint32_t, std::pair<std::size_t, std::size_t>> buckets;  // pairs, edges
  std::size_t connected = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (distances[i] < 0) continue;  // disconnected pairs omitted
    ++connected;
    auto& [pairs, edges] = buckets[static_cast<std::uint32_t>(distances[i])];
    ++pairs;
    if (samples[i].had_edge) ++edges;
  }
  if (connected == 0) throw std::runtime_error("distance_study: no connected pairs sampled");

  DistanceStudy study;
  std::vector<double> fit_x, fit_y;
  for (auto& [distance, counts] : buckets) {
    DistanceBucket bucket;
    bucket.distance = distance;
    bucket.pairs = counts.first;
    bucket.edges = counts.second;
    bucket.edge_probability =
        static_cast<double>(counts.second) / static_cast<double>(counts.first);
    study.buckets.push_back(bucket);
    if (bucket.edges >= 1 && bucket.pairs >= 100) {
      fit_x.push_back(static_cast<double>(distance));
      fit_y.push_back(std::log(bucket.edge_probability));
    }
  }
  study.log_probability_fit = least_squares_fit(fit_x, fit_y);
  return study;
}

}  // namespace graphgan
