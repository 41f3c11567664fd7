#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "graphmax/gin.hpp"
#include "graphmax/graph.hpp"

namespace graphmax {

// Level sizes for the coarsening hierarchy, shared by every graph in a
// dataset. level_sizes holds [N_2, ..., N_R] with N_R == 1 and strict
// decrease.
struct LevelSpec {
  int num_levels = 0;  // R
  int embed_dim = 0;   // K
  std::vector<int> level_sizes;
};

// N_2 = max(1, ceil(gamma * max_nodes)), then N_{r+1} = max(1, ceil(gamma *
// N_r)), final size forced to 1; collisions are resolved walking upward so
// sizes stay strictly decreasing. Rejected if the adjusted N_2 would exceed
// max_nodes.
LevelSpec derive_level_sizes(int max_nodes, double pool_ratio, int num_levels, int embed_dim);

// One embedding GIN and one pooling GIN per level transition r = 1..R-1.
struct HierarchyParams {
  ParamStore store;
  std::vector<GinLayerRef> embed;
  std::vector<GinLayerRef> pool;
  LevelSpec spec;
  int feature_dim = 0;  // D at level 1
};

// Discriminators may append onto params.store afterwards so one optimizer
// covers the whole phase.
HierarchyParams init_hierarchy(const LevelSpec& spec, int feature_dim, std::uint64_t seed);

// Exact number of scalars init_hierarchy registers; the count depends only on
// (spec, feature_dim), never on graph sizes or dataset size.
std::size_t hierarchy_param_count(const LevelSpec& spec, int feature_dim);

struct HierarchyForward {
  Var x_g;                              // 1 x K, the final-level feature row
  std::vector<Var> intermediates;      // Z_r blocks for levels 2..R-1
  std::vector<Var> z, p, a, x;         // per transition: Z_r, P_r, A_{r+1}, X_{r+1}
};

HierarchyForward forward_hierarchy_on_tape(Tape& tape, const HierarchyParams& params,
                                           const std::vector<Var>& bound, Var adjacency,
                                           Var features);

// Value-level trace of a full pass, for inspection and invariant checks.
struct LevelTrace {
  std::vector<Matrix> adjacency;  // A_1..A_R
  std::vector<Matrix> features;   // X_1..X_R
  std::vector<Matrix> z;          // Z_1..Z_{R-1}
  std::vector<Matrix> p;          // P_1..P_{R-1}
  Matrix x_g;                     // 1 x K
  Matrix intermediates;           // all rows of Z_2..Z_{R-1}, empty when R == 2
  std::vector<std::pair<int, int>> intermediate_ids;  // (level, node) per row
};

LevelTrace forward_hierarchy(const HierarchyParams& params, const Graph& graph);

// One coarsening application with an explicit assignment matrix:
// A' = P^T A P, X' = P^T Z.
std::pair<Matrix, Matrix> coarsen_with(const Matrix& assignment, const Matrix& adjacency,
                                       const Matrix& z);

// Versioned binary dump of a trace, for debugging.
void dump_level_trace(const LevelTrace& trace, const std::string& path);

}  // namespace graphmax
