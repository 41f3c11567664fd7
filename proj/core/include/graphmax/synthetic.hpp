#pragma once

#include <cstdint>

#include "graphmax/graph.hpp"
#include "graphmax/rng.hpp"

namespace graphmax {

// Cycle graphs (label 0) vs complete graphs (label 1) with node counts drawn
// uniformly from [min_nodes, max_nodes]. Features are left to a policy pass.
GraphDataset make_cycle_clique_dataset(int per_class, int min_nodes, int max_nodes,
                                       std::uint64_t seed);

Graph make_cycle_graph(int n);
Graph make_complete_graph(int n);

// Erdos-Renyi-style undirected graph, no self-loops.
Graph make_random_graph(Rng& rng, int n, double edge_prob);

}  // namespace graphmax
