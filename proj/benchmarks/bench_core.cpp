#include <benchmark/benchmark.h>

#include "graphgan/discriminator.hpp"
#include "graphgan/generator.hpp"
#include "graphgan/graph.hpp"
#include "graphgan/rng.hpp"

using namespace graphgan;

namespace {

Graph make_graph(std::size_t n, double extra_edge_prob, std::mt19937_64& rng) {
  GraphBuilder builder;
  for (std::size_t v = 0; v < n; ++v) builder.intern("v" + std::to_string(v));
  for (VertexId v = 1; v < n; ++v)
    builder.add_edge(v, static_cast<VertexId>(uniform_index(rng, v)));
  for (VertexId u = 0; u < n; ++u)
    for (VertexId v = u + 1; v < n; ++v)
      if (uniform_unit(rng) < extra_edge_prob) builder.add_edge(u, v);
  return builder.build();
}

EmbeddingTable make_embeddings(std::size_t n, std::size_t dim, std::mt19937_64& rng) {
  EmbeddingTable table(n, dim);
  for (std::size_t v = 0; v < n; ++v)
    for (double& x : table.row(v)) x = uniform_unit(rng) - 0.5;
  return table;
}

void BM_BfsTree(benchmark::State& state) {
  auto rng = stream_rng(1, {1});
  std::size_t n = static_cast<std::size_t>(state.range(0));
  Graph g = make_graph(n, 8.0 / static_cast<double>(n), rng);
  VertexId root = 0;
  for (auto _ : state) {
    BfsTree tree = bfs_tree(g, root);
    benchmark::DoNotOptimize(tree.depth.data());
    root = (root + 1) % n;
  }
}
BENCHMARK(BM_BfsTree)->Arg(1000)->Arg(10000);

void BM_GraphSoftmax(benchmark::State& state) {
  auto rng = stream_rng(2, {2});
  std::size_t n = static_cast<std::size_t>(state.range(0));
  Graph g = make_graph(n, 8.0 / static_cast<double>(n), rng);
  auto theta = make_embeddings(n, 20, rng);
  BfsTree tree = bfs_tree(g, 0);
  VertexId target = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(graph_softmax(tree, target, theta));
    target = 1 + (target % (n - 1));
  }
}
BENCHMARK(BM_GraphSoftmax)->Arg(1000)->Arg(10000);

void BM_SampleOnline(benchmark::State& state) {
  auto rng = stream_rng(3, {3});
  std::size_t n = static_cast<std::size_t>(state.range(0));
  Graph g = make_graph(n, 8.0 / static_cast<double>(n), rng);
  auto theta = make_embeddings(n, 20, rng);
  BfsTree tree = bfs_tree(g, 0);
  for (auto _ : state)
    benchmark::DoNotOptimize(sample_online(tree, theta, rng).sampled);
}
BENCHMARK(BM_SampleOnline)->Arg(1000)->Arg(10000);

void BM_DiscriminatorStep(benchmark::State& state) {
  auto rng = stream_rng(4, {4});
  std::size_t n = 10000;
  auto theta = make_embeddings(n, 20, rng);
  std::vector<LabeledPair> batch;
  for (int i = 0; i < 256; ++i)
    batch.push_back({static_cast<VertexId>(uniform_index(rng, n)),
                     static_cast<VertexId>(uniform_index(rng, n - 1)),
                     uniform_unit(rng) < 0.5});
  for (auto& p : batch)
    if (p.v == p.v_c) ++p.v;
  for (auto _ : state) {
    discriminator_step(batch, theta, 1e-4);
    benchmark::DoNotOptimize(theta.row(0).data());
  }
}
BENCHMARK(BM_DiscriminatorStep);

}  // namespace

BENCHMARK_MAIN();
