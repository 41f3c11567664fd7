#include "graphmax/hierarchy.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "binio.hpp"

namespace graphmax {

namespace {

// Ceiling with a small slack so exact products of the form gamma * n do not
// round up from representation error (0.1 * 100 is slightly above 10.0).
int slack_ceil(double q) { return static_cast<int>(std::ceil(q - 1e-9)); }

}  // namespace

LevelSpec derive_level_sizes(int max_nodes, double pool_ratio, int num_levels, int embed_dim) {
  if (max_nodes < 1) throw std::invalid_argument("derive_level_sizes: max_nodes must be >= 1");
  if (pool_ratio <= 0.0 || pool_ratio >= 1.0) {
    throw std::invalid_argument("derive_level_sizes: pool_ratio must lie in (0, 1), got " +
                                std::to_string(pool_ratio));
  }
  if (num_levels < 2) throw std::invalid_argument("derive_level_sizes: num_levels must be >= 2");
  if (embed_dim < 1) throw std::invalid_argument("derive_level_sizes: embed_dim must be >= 1");

  LevelSpec spec;
  spec.num_levels = num_levels;
  spec.embed_dim = embed_dim;
  spec.level_sizes.resize(num_levels - 1);
  for (int i = 0; i + 1 < num_levels - 1; ++i) {
    int prev = (i == 0) ? max_nodes : spec.level_sizes[i - 1];
    spec.level_sizes[i] = std::max(1, slack_ceil(pool_ratio * prev));
  }
  spec.level_sizes[num_levels - 2] = 1;

  for (int i = num_levels - 3; i >= 0; --i) {
    if (spec.level_sizes[i] <= spec.level_sizes[i + 1]) {
      spec.level_sizes[i] = spec.level_sizes[i + 1] + 1;
    }
  }
  if (spec.level_sizes[0] > max_nodes) {
    throw std::invalid_argument(
        "derive_level_sizes: num_levels " + std::to_string(num_levels) + " with pool_ratio " +
        std::to_string(pool_ratio) + " cannot produce strictly decreasing sizes under " +
        std::to_string(max_nodes) + " nodes");
  }
  return spec;
}

HierarchyParams init_hierarchy(const LevelSpec& spec, int feature_dim, std::uint64_t seed) {
  if (spec.num_levels < 2 || static_cast<int>(spec.level_sizes.size()) != spec.num_levels - 1) {
    throw std::invalid_argument("init_hierarchy: malformed level spec");
  }
  if (feature_dim < 1) throw std::invalid_argument("init_hierarchy: feature_dim must be >= 1");
  HierarchyParams params;
  params.spec = spec;
  params.feature_dim = feature_dim;
  Rng rng(seed);
  int in_dim = feature_dim;
  for (int t = 0; t < spec.num_levels - 1; ++t) {
    params.embed.push_back(init_gin_layer(params.store, rng,
                                          "hierarchy.embed" + std::to_string(t + 1), in_dim,
                                          spec.embed_dim));
    params.pool.push_back(init_gin_layer(params.store, rng,
                                         "hierarchy.pool" + std::to_string(t + 1), in_dim,
                                         spec.level_sizes[t]));
    in_dim = spec.embed_dim;  // X_{r+1} = P^T Z_r has K columns
  }
  return params;
}

std::size_t hierarchy_param_count(const LevelSpec& spec, int feature_dim) {
  auto gin_count = [](int in, int out) {
    // Two linear maps (hidden width = out) with biases, plus epsilon.
    return static_cast<std::size_t>(in) * out + out + static_cast<std::size_t>(out) * out + out +
           1;
  };
  std::size_t total = 0;
  int in_dim = feature_dim;
  for (int t = 0; t < spec.num_levels - 1; ++t) {
    total += gin_count(in_dim, spec.embed_dim);
    total += gin_count(in_dim, spec.level_sizes[t]);
    in_dim = spec.embed_dim;
  }
  return total;
}

HierarchyForward forward_hierarchy_on_tape(Tape& tape, const HierarchyParams& params,
                                           const std::vector<Var>& bound, Var adjacency,
                                           Var features) {
  const Matrix& x0 = tape.value(features);
  if (x0.cols() != params.feature_dim) {
    throw std::invalid_argument("forward_hierarchy: features have " + std::to_string(x0.cols()) +
                                " columns, expected " + std::to_string(params.feature_dim));
  }
  HierarchyForward fwd;
  Var a = adjacency;
  Var h = features;
  int transitions = params.spec.num_levels - 1;
  for (int t = 0; t < transitions; ++t) {
    Var z = gin_layer_forward(tape, params.embed[t], bound, a, h, /*final_relu=*/false);
    Var logits = gin_layer_forward(tape, params.pool[t], bound, a, h, /*final_relu=*/false);
    Var p = tape.row_softmax(logits);
    Var pt = tape.transpose(p);
    Var a_next = tape.matmul(pt, tape.matmul(a, p));
    Var x_next = tape.matmul(pt, z);
    fwd.z.push_back(z);
    fwd.p.push_back(p);
    fwd.a.push_back(a_next);
    fwd.x.push_back(x_next);
    if (t >= 1) fwd.intermediates.push_back(z);  // Z_r for level r = t+1 in [2, R-1]
    a = a_next;
    h = x_next;
  }
  fwd.x_g = fwd.x.back();
  return fwd;
}

LevelTrace forward_hierarchy(const HierarchyParams& params, const Graph& graph) {
  Tape tape;
  std::vector<Var> bound = params.store.bind(tape, /*trainable=*/false);
  Var a = tape.constant(graph.adjacency);
  Var x = tape.constant(graph.features);
  HierarchyForward fwd = forward_hierarchy_on_tape(tape, params, bound, a, x);

  LevelTrace trace;
  trace.adjacency.push_back(graph.adjacency);
  trace.features.push_back(graph.features);
  for (std::size_t t = 0; t < fwd.z.size(); ++t) {
    trace.z.push_back(tape.value(fwd.z[t]));
    trace.p.push_back(tape.value(fwd.p[t]));
    trace.adjacency.push_back(tape.value(fwd.a[t]));
    trace.features.push_back(tape.value(fwd.x[t]));
  }
  trace.x_g = tape.value(fwd.x_g);

  int rows = 0;
  for (Var v : fwd.intermediates) rows += tape.value(v).rows();
  if (rows > 0) {
    trace.intermediates = Matrix(rows, params.spec.embed_dim);
    int at = 0;
    for (std::size_t i = 0; i < fwd.intermediates.size(); ++i) {
      const Matrix& block = tape.value(fwd.intermediates[i]);
      int level = static_cast<int>(i) + 2;
      for (int r = 0; r < block.rows(); ++r, ++at) {
        for (int c = 0; c < block.cols(); ++c) trace.intermediates(at, c) = block(r, c);
        trace.intermediate_ids.emplace_back(level, r);
      }
    }
  }
  return trace;
}

std::pair<Matrix, Matrix> coarsen_with(const Matrix& assignment, const Matrix& adjacency,
                                       const Matrix& z) {
  if (assignment.rows() != adjacency.rows() || adjacency.rows() != adjacency.cols() ||
      z.rows() != assignment.rows()) {
    throw std::invalid_argument("coarsen_with: P " + assignment.shape_str() + ", A " +
                                adjacency.shape_str() + ", Z " + z.shape_str() +
                                " are inconsistent");
  }
  Matrix pt = transposed(assignment);
  return {matmul(pt, matmul(adjacency, assignment)), matmul(pt, z)};
}

void dump_level_trace(const LevelTrace& trace, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("dump_level_trace: cannot open " + path);
  const char magic[8] = {'G', 'M', 'X', 'T', 'R', 'A', 'C', '\0'};
  out.write(magic, sizeof(magic));
  binio::write_u32(out, 1);  // version
  auto write_list = [&out](const std::vector<Matrix>& list) {
    binio::write_u32(out, static_cast<std::uint32_t>(list.size()));
    for (const Matrix& m : list) binio::write_matrix(out, m);
  };
  write_list(trace.adjacency);
  write_list(trace.features);
  write_list(trace.z);
  write_list(trace.p);
  binio::write_matrix(out, trace.x_g);
  binio::write_matrix(out, trace.intermediates);
  binio::write_u32(out, static_cast<std::uint32_t>(trace.intermediate_ids.size()));
  for (auto [level, node] : trace.intermediate_ids) {
    binio::write_i32(out, level);
    binio::write_i32(out, node);
  }
  if (!out) throw std::runtime_error("dump_level_trace: write failed for " + path);
}

}  // namespace graphmax
