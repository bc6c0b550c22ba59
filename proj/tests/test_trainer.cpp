#include <doctest.h>

#include <cmath>
#include <map>

#include "graphgan/trainer.hpp"
#include "oracles.hpp"

using namespace graphgan;

namespace {

TrainConfig tiny_config() {
  TrainConfig config;
  config.dim = 4;
  config.samples_per_vertex = 3;
  config.learning_rate = 0.01;
  config.g_steps = 2;
  config.d_steps = 2;
  config.max_iterations = 3;
  config.seed = 9;
  return config;
}

}  // namespace

TEST_CASE("sample_positives: degree-1 vertex repeats its only neighbor") {
  Graph g = oracles::from_edges(3, {{0, 1}, {1, 2}});
  auto rng = stream_rng(1, {1});
  auto draws = sample_positives(g, 0, 5, rng);
  CHECK(draws == std::vector<VertexId>(5, 1));
}

TEST_CASE("sample_positives: uniform over neighbors") {
  Graph g = oracles::from_edges(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}});
  auto rng = stream_rng(2, {2});
  std::map<VertexId, std::size_t> counts;
  const std::size_t draws = 100000;
  for (VertexId v : sample_positives(g, 0, draws, rng)) ++counts[v];
  for (VertexId v = 1; v < 5; ++v)
    CHECK(std::abs(static_cast<double>(counts[v]) / draws - 0.25) < 0.01);
}

TEST_CASE("sample_positives: isolated vertex gives empty list") {
  Graph g = oracles::from_edges(3, {{1, 2}});
  auto rng = stream_rng(3, {3});
  CHECK(sample_positives(g, 0, 5, rng).empty());
}

TEST_CASE("train: identical seeds give bitwise-identical parameters") {
  auto rng = stream_rng(4, {4});
  Graph g = oracles::random_connected_graph(15, 0.15, rng);
  TrainConfig config = tiny_config();
  TrainResult a = train(g, config);
  TrainResult b = train(g, config);
  CHECK(a.theta_g == b.theta_g);
  CHECK(a.theta_d == b.theta_d);
  REQUIRE(a.metrics.size() == b.metrics.size());
  for (std::size_t i = 0; i < a.metrics.size(); ++i) {
    CHECK(a.metrics[i].value_estimate == b.metrics[i].value_estimate);
    CHECK(a.metrics[i].d_loss == b.metrics[i].d_loss);
  }
  config.seed = 10;
  TrainResult c = train(g, config);
  CHECK(a.theta_g != c.theta_g);
}

TEST_CASE("train: thread count does not change the result") {
  auto rng = stream_rng(5, {5});
  Graph g = oracles::random_connected_graph(12, 0.2, rng);
  TrainConfig config = tiny_config();
  config.threads = 1;
  TrainResult serial = train(g, config);
  config.threads = 4;
  TrainResult parallel = train(g, config);
  CHECK(serial.theta_g == parallel.theta_g);
  CHECK(serial.theta_d == parallel.theta_d);
}

TEST_CASE("train: metrics are per-iteration, monotone, finite") {
  auto rng = stream_rng(6, {6});
  Graph g = oracles::random_connected_graph(10, 0.2, rng);
  TrainConfig config = tiny_config();
  config.max_iterations = 5;
  config.convergence_tol = 0.0;  // disable early stop
  TrainResult result = train(g, config);
  REQUIRE(result.metrics.size() == 5);
  for (std::size_t i = 0; i < result.metrics.size(); ++i) {
    CHECK(result.metrics[i].iteration == i);
    CHECK(std::isfinite(result.metrics[i].value_estimate));
    CHECK(std::isfinite(result.metrics[i].d_loss));
    CHECK(std::isfinite(result.metrics[i].g_reward_mean));
  }
}

TEST_CASE("train: d_steps = 0 freezes the discriminator, g_steps = 0 the generator") {
  auto rng = stream_rng(7, {7});
  Graph g = oracles::random_connected_graph(10, 0.2, rng);
  TrainConfig config = tiny_config();
  config.d_steps = 0;
  config.max_iterations = 1;
  TrainResult one = train(g, config);
  config.max_iterations = 4;
  TrainResult four = train(g, config);
  CHECK(one.theta_d == four.theta_d);  // never updated
  CHECK(one.theta_g != four.theta_g);

  config.d_steps = 2;
  config.g_steps = 0;
  config.max_iterations = 1;
  TrainResult g_one = train(g, config);
  config.max_iterations = 4;
  TrainResult g_four = train(g, config);
  CHECK(g_one.theta_g == g_four.theta_g);
  CHECK(g_one.theta_d != g_four.theta_d);
}

TEST_CASE("train: triangle generator mass on true neighbors beats uniform") {
  Graph g = oracles::from_edges(3, {{0, 1}, {0, 2}, {1, 2}});
  TrainConfig config;
  config.dim = 4;
  config.samples_per_vertex = 5;
  config.learning_rate = 0.005;
  config.g_steps = 3;
  config.d_steps = 3;
  config.max_iterations = 200;
  config.convergence_tol = 0.0;
  config.seed = 1;
  TrainResult result = train(g, config);
  for (VertexId root = 0; root < 3; ++root) {
    BfsTree t = bfs_tree(g, root);
    double neighbor_mass = 0.0;
    for (VertexId v : g.neighbors(root)) neighbor_mass += graph_softmax(t, v, result.theta_g);
    CHECK(neighbor_mass >= doctest::Approx(1.0));  // all non-roots are neighbors
  }
}

TEST_CASE("train: pre-training epochs change the starting point deterministically") {
  auto rng = stream_rng(8, {8});
  Graph g = oracles::random_connected_graph(10, 0.2, rng);
  TrainConfig config = tiny_config();
  config.pretrain_epochs = 2;
  TrainResult a = train(g, config);
  TrainResult b = train(g, config);
  CHECK(a.theta_g == b.theta_g);
  config.pretrain_epochs = 0;
  TrainResult c = train(g, config);
  CHECK(a.theta_g != c.theta_g);
}

TEST_CASE("train: config validation") {
  Graph g = oracles::from_edges(2, {{0, 1}});
  TrainConfig config = tiny_config();
  config.learning_rate = 0.0;
  CHECK_THROWS_AS(train(g, config), std::invalid_argument);
  config = tiny_config();
  config.dim = 0;
  CHECK_THROWS_AS(train(g, config), std::invalid_argument);
  config = tiny_config();
  config.pairs_per_vertex = 0;
  CHECK_THROWS_AS(train(g, config), std::invalid_argument);
}

TEST_CASE("train: lazy tree cache gives the same result as prebuilt forest") {
  auto rng = stream_rng(9, {9});
  Graph g = oracles::random_connected_graph(12, 0.2, rng);
  TrainConfig config = tiny_config();
  TrainResult prebuilt = train(g, config);
  config.tree_lru_capacity = 3;
  TrainResult lazy = train(g, config);
  CHECK(prebuilt.theta_g == lazy.theta_g);
  CHECK(prebuilt.theta_d == lazy.theta_d);
}

TEST_CASE("train: shortcut forest trains user roots only") {
  // users {0, 1}, movies {2, 3, 4}
  Graph g = oracles::from_edges(5, {{0, 2}, {0, 3}, {1, 3}, {1, 4}});
  std::vector<char> is_user{1, 1, 0, 0, 0};
  ShortcutForest forest(g, is_user);
  CHECK(forest.roots() == std::vector<VertexId>{0, 1});
  TrainConfig config = tiny_config();
  TrainResult result = train(g, forest, config);
  CHECK(result.theta_g.all_finite());
  // root 0's distribution is supported on movies only
  auto tree = forest.tree(0);
  CHECK(!tree->reachable(1));
  double total = 0.0;
  for (VertexId movie = 2; movie < 5; ++movie)
    if (tree->reachable(movie)) total += graph_softmax(*tree, movie, result.theta_g);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
}
