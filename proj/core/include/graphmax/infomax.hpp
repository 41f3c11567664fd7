#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "graphmax/autodiff.hpp"
#include "graphmax/params.hpp"
#include "graphmax/rng.hpp"

namespace graphmax {

// Affine logistic scorer over a concatenated (global, local) pair:
// sigma(w^T [global ; local] + b). Exactly global_dim + local_dim + 1
// parameters.
struct DiscriminatorRefs {
  int w = -1;  // (global_dim + local_dim) x 1
  int b = -1;  // 1 x 1
  int global_dim = 0;
  int local_dim = 0;
};

// Zero-initialized: the untrained scorer outputs 0.5 for every pair.
DiscriminatorRefs init_discriminator(ParamStore& store, const std::string& prefix,
                                     int global_dim, int local_dim);

Var discriminate_on_tape(Tape& tape, const DiscriminatorRefs& d, const std::vector<Var>& bound,
                         Var global_row, Var local_row);
double discriminate(const DiscriminatorRefs& d, const ParamStore& store, const Matrix& global_row,
                    const Matrix& local_row);

// The weight vector sliced once per tape so every pair score reuses the same
// halves: logit = global . w_global + local . w_local + b.
struct SplitDiscriminator {
  Var w_global;
  Var w_local;
  Var bias;
};

SplitDiscriminator split_discriminator(Tape& tape, const DiscriminatorRefs& d,
                                       const std::vector<Var>& bound);

// One graph's contribution to the periphery objective: BCE of the matched
// (x, s) pair against 1 plus the mean over negative summaries of BCE against
// 0. The full loss is the mean of these terms over the dataset.
Var periphery_term(Tape& tape, const SplitDiscriminator& d, Var x_row, Var s_positive,
                   const std::vector<Var>& s_negatives);

// One graph's contribution to the hierarchical objective. Blocks are stacked
// intermediate embedding rows; the BCE over a graph's rows is averaged so
// graphs with different intermediate counts weigh equally.
Var hierarchical_term(Tape& tape, const SplitDiscriminator& d, Var x_row,
                      const std::vector<Var>& positive_blocks,
                      const std::vector<std::vector<Var>>& negative_blocks);

// Per-positive negative draws: n distinct graph ids != positive, uniform over
// the rest of the dataset. Deterministic for a fixed seed and call sequence.
class NegativeSampler {
 public:
  NegativeSampler(int count, std::uint64_t seed);
  std::vector<int> sample(int positive, int universe);
  int count() const { return count_; }

 private:
  int count_;
  Rng rng_;
};

// Negated noise-contrastive objective over (graph embedding, periphery
// summary) pairs: per graph, BCE of the matched pair against 1 plus the mean
// over sampled negatives of BCE against 0; averaged over graphs.
Var periphery_loss_on_tape(Tape& tape, const DiscriminatorRefs& d, const std::vector<Var>& bound,
                           const std::vector<Var>& x_rows, const std::vector<Var>& s_rows,
                           const std::vector<std::vector<int>>& negatives);

// Same objective over (graph embedding, intermediate node embedding) pairs;
// inner sums over a graph's intermediate rows are means, so graphs with
// different intermediate counts weigh equally.
Var hierarchical_loss_on_tape(Tape& tape, const DiscriminatorRefs& d,
                              const std::vector<Var>& bound, const std::vector<Var>& x_rows,
                              const std::vector<std::vector<Var>>& intermediate_blocks,
                              const std::vector<std::vector<int>>& negatives);

// Value-level entry points matching the trainer's wiring; the sampler draws
// one negative set per graph in dataset order.
double periphery_loss(const std::vector<Matrix>& x_rows, const std::vector<Matrix>& s_rows,
                      const DiscriminatorRefs& d, const ParamStore& store,
                      NegativeSampler& sampler);
double hierarchical_loss(const std::vector<Matrix>& x_rows,
                         const std::vector<Matrix>& intermediates,
                         const DiscriminatorRefs& d, const ParamStore& store,
                         NegativeSampler& sampler);

std::vector<std::vector<int>> draw_all_negatives(NegativeSampler& sampler, int universe);

}  // namespace graphmax
