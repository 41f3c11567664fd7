#include <benchmark/benchmark.h>

#include "graphmax/autodiff.hpp"
#include "graphmax/gin.hpp"
#include "graphmax/matrix.hpp"
#include "graphmax/periphery.hpp"
#include "graphmax/rng.hpp"

using namespace graphmax;

namespace {

Matrix random_matrix(Rng& rng, int r, int c) {
  Matrix m(r, c);
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < c; ++j) m(i, j) = rng.uniform(-1.0, 1.0);
  }
  return m;
}

void bm_matmul(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  Rng rng(1);
  Matrix a = random_matrix(rng, n, n);
  Matrix b = random_matrix(rng, n, n);
  for (auto _ : state) {
    Matrix c = matmul(a, b);
    benchmark::DoNotOptimize(c.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n) * n * n);
}
BENCHMARK(bm_matmul)->Arg(16)->Arg(64)->Arg(128);

// One reverse-mode pass through a GIN layer: build the graph, run backward,
// read the parameter gradients. Measures tape overhead end to end.
void bm_gin_forward_backward(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  const int d = 32;
  Rng rng(2);
  ParamStore store;
  GinLayerRef layer = init_gin_layer(store, rng, "g", d, d);
  Matrix adjacency(n, n);
  for (int i = 0; i + 1 < n; ++i) {
    adjacency(i, i + 1) = 1.0;
    adjacency(i + 1, i) = 1.0;
  }
  Matrix x = random_matrix(rng, n, d);
  for (auto _ : state) {
    Tape tape;
    std::vector<Var> bound = store.bind(tape);
    Var out = gin_layer_forward(tape, layer, bound, tape.constant(adjacency),
                                tape.constant(x), true);
    Var loss = tape.mean_all(tape.mul(out, out));
    tape.backward(loss);
    benchmark::DoNotOptimize(tape.grad(bound[layer.w1]).data());
  }
}
BENCHMARK(bm_gin_forward_backward)->Arg(16)->Arg(64)->Arg(128);

// Adjacency-reconstruction objective, the phase-1 inner loop body.
void bm_reconstruction_loss(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  const int d = 16;
  Rng rng(3);
  Matrix adjacency(n, n);
  for (int i = 0; i + 1 < n; ++i) {
    adjacency(i, i + 1) = 1.0;
    adjacency(i + 1, i) = 1.0;
  }
  Matrix h = random_matrix(rng, n, d);
  for (auto _ : state) {
    Tape tape;
    Var hv = tape.leaf(h);
    Var loss = reconstruction_loss_on_tape(tape, hv, adjacency);
    tape.backward(loss);
    benchmark::DoNotOptimize(tape.grad(hv).data());
  }
}
BENCHMARK(bm_reconstruction_loss)->Arg(16)->Arg(64)->Arg(128);

}  // namespace
