#include <benchmark/benchmark.h>

#include "graphmax/hierarchy.hpp"
#include "graphmax/periphery.hpp"
#include "graphmax/rng.hpp"
#include "graphmax/synthetic.hpp"

using namespace graphmax;

namespace {

Graph chain_graph(int n, int d, std::uint64_t seed) {
  Rng rng(seed);
  Graph g;
  g.adjacency = Matrix(n, n);
  for (int i = 0; i + 1 < n; ++i) {
    g.adjacency(i, i + 1) = 1.0;
    g.adjacency(i + 1, i) = 1.0;
  }
  g.features = Matrix(n, d);
  for (int i = 0; i < n; ++i) g.features(i, rng.range(0, d)) = 1.0;
  return g;
}

// Full per-graph coarsening pass at production widths, the phase-2 hot path.
void bm_hierarchy_forward(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  const int d = 16, k = 128;
  Graph g = chain_graph(n, d, 4);
  LevelSpec spec = derive_level_sizes(n, 0.5, 3, k);
  HierarchyParams params = init_hierarchy(spec, d, 7);
  for (auto _ : state) {
    LevelTrace trace = forward_hierarchy(params, g);
    benchmark::DoNotOptimize(trace.x_g.data());
  }
}
BENCHMARK(bm_hierarchy_forward)->Arg(16)->Arg(32)->Arg(64)->Arg(128);

// Encoder application plus the subtraction split, the phase-1 per-graph cost
// outside training.
void bm_periphery_split(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  const int d = 16;
  Graph g = chain_graph(n, d, 5);
  EncoderConfig config;
  config.num_layers = 2;
  config.hidden_units = {128};
  EncoderParams encoder = init_encoder(d, config, 8);
  for (auto _ : state) {
    Matrix h = encode(encoder, g);
    PeripheryOutput out = periphery(g, h);
    benchmark::DoNotOptimize(out.summary.data());
  }
}
BENCHMARK(bm_periphery_split)->Arg(16)->Arg(64)->Arg(256);

}  // namespace
