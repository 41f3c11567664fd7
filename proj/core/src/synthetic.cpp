#include "graphmax/synthetic.hpp"

#include <stdexcept>
#include <string>

namespace graphmax {

Graph make_cycle_graph(int n) {
  if (n < 3) throw std::invalid_argument("make_cycle_graph: need n >= 3, got " + std::to_string(n));
  Graph g;
  g.adjacency = Matrix(n, n);
  for (int v = 0; v < n; ++v) {
    int u = (v + 1) % n;
    g.adjacency(v, u) = 1.0;
    g.adjacency(u, v) = 1.0;
  }
  return g;
}

Graph make_complete_graph(int n) {
  if (n < 2) throw std::invalid_argument("make_complete_graph: need n >= 2, got " + std::to_string(n));
  Graph g;
  g.adjacency = Matrix(n, n);
  for (int v = 0; v < n; ++v) {
    for (int u = 0; u < n; ++u) {
      if (u != v) g.adjacency(v, u) = 1.0;
    }
  }
  return g;
}

GraphDataset make_cycle_clique_dataset(int per_class, int min_nodes, int max_nodes,
                                       std::uint64_t seed) {
  if (per_class < 1 || min_nodes < 3 || max_nodes < min_nodes) {
    throw std::invalid_argument("make_cycle_clique_dataset: bad sizes");
  }
  Rng rng(split_seed(seed, seed_stream::kSynthetic));
  GraphDataset dataset;
  dataset.name = "cycles-vs-cliques";
  dataset.num_classes = 2;
  dataset.graphs.reserve(2 * per_class);
  for (int i = 0; i < per_class; ++i) {
    Graph g = make_cycle_graph(rng.range(min_nodes, max_nodes + 1));
    g.label = 0;
    dataset.graphs.push_back(std::move(g));
  }
  for (int i = 0; i < per_class; ++i) {
    Graph g = make_complete_graph(rng.range(min_nodes, max_nodes + 1));
    g.label = 1;
    dataset.graphs.push_back(std::move(g));
  }
  return dataset;
}

Graph make_random_graph(Rng& rng, int n, double edge_prob) {
  if (n < 1) throw std::invalid_argument("make_random_graph: need n >= 1");
  Graph g;
  g.adjacency = Matrix(n, n);
  for (int v = 0; v < n; ++v) {
    for (int u = v + 1; u < n; ++u) {
      if (rng.uniform() < edge_prob) {
        g.adjacency(v, u) = 1.0;
        g.adjacency(u, v) = 1.0;
      }
    }
  }
  return g;
}

}  // namespace graphmax
