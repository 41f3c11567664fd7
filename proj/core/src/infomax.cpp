#include "graphmax/infomax.hpp"

#include <stdexcept>
#include <string>

namespace graphmax {

DiscriminatorRefs init_discriminator(ParamStore& store, const std::string& prefix,
                                     int global_dim, int local_dim) {
  if (global_dim < 1 || local_dim < 1) {
    throw std::invalid_argument("init_discriminator: dims must be positive");
  }
  DiscriminatorRefs d;
  d.global_dim = global_dim;
  d.local_dim = local_dim;
  d.w = store.add(prefix + ".w", Matrix(global_dim + local_dim, 1));
  d.b = store.add(prefix + ".b", Matrix(1, 1));
  return d;
}

SplitDiscriminator split_discriminator(Tape& tape, const DiscriminatorRefs& d,
                                       const std::vector<Var>& bound) {
  SplitDiscriminator s;
  s.w_global = tape.slice_rows(bound[d.w], 0, d.global_dim);
  s.w_local = tape.slice_rows(bound[d.w], d.global_dim, d.global_dim + d.local_dim);
  s.bias = bound[d.b];
  return s;
}

namespace {

void check_row(const Matrix& row, int dim, const char* what) {
  if (row.rows() != 1 || row.cols() != dim) {
    throw std::invalid_argument(std::string("discriminate: ") + what + " must be 1x" +
                                std::to_string(dim) + ", got " + row.shape_str());
  }
}

// 1x1 logit contribution shared by every pair with this global row.
Var global_part(Tape& tape, const SplitDiscriminator& s, Var global_row) {
  return tape.add(tape.matmul(global_row, s.w_global), s.bias);
}

void check_loss_inputs(std::size_t graphs, std::size_t locals,
                       const std::vector<std::vector<int>>& negatives, const char* name) {
  if (graphs < 2) {
    throw std::invalid_argument(std::string(name) +
                                ": need at least 2 graphs (no negatives exist)");
  }
  if (locals != graphs || negatives.size() != graphs) {
    throw std::invalid_argument(std::string(name) + ": per-graph input lists must align");
  }
  for (std::size_t g = 0; g < graphs; ++g) {
    if (negatives[g].empty()) {
      throw std::invalid_argument(std::string(name) + ": empty negative draw for graph " +
                                  std::to_string(g));
    }
    for (int id : negatives[g]) {
      if (id < 0 || id >= static_cast<int>(graphs) || id == static_cast<int>(g)) {
        throw std::invalid_argument(std::string(name) + ": negative id " + std::to_string(id) +
                                    " invalid for graph " + std::to_string(g));
      }
    }
  }
}

// Mean BCE over one graph's intermediate rows against a constant target,
// sharing a fixed 1x1 global part. Rows batch through one matmul per block.
Var blocks_mean_bce(Tape& tape, const SplitDiscriminator& s, Var xpart,
                    const std::vector<Var>& blocks, double target) {
  if (blocks.empty()) {
    throw std::invalid_argument(
        "hierarchical_term: a graph has no intermediate embeddings (2-level hierarchies have "
        "none; drop this objective via the -H variant)");
  }
  Var sum{};
  int rows = 0;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    int block_rows = tape.value(blocks[b]).rows();
    Var logits = tape.add_scalar_var(tape.matmul(blocks[b], s.w_local), xpart);
    Var bce = tape.sum_all(tape.bce_with_logits(logits, Matrix::constant(block_rows, 1, target)));
    sum = (b == 0) ? bce : tape.add(sum, bce);
    rows += block_rows;
  }
  return tape.scale(sum, 1.0 / static_cast<double>(rows));
}

}  // namespace

Var discriminate_on_tape(Tape& tape, const DiscriminatorRefs& d, const std::vector<Var>& bound,
                         Var global_row, Var local_row) {
  check_row(tape.value(global_row), d.global_dim, "global row");
  check_row(tape.value(local_row), d.local_dim, "local row");
  SplitDiscriminator s = split_discriminator(tape, d, bound);
  Var logit = tape.add(tape.matmul(local_row, s.w_local), global_part(tape, s, global_row));
  return tape.sigmoid(logit);
}

double discriminate(const DiscriminatorRefs& d, const ParamStore& store, const Matrix& global_row,
                    const Matrix& local_row) {
  Tape tape;
  std::vector<Var> bound = store.bind(tape, /*trainable=*/false);
  Var p = discriminate_on_tape(tape, d, bound, tape.constant(global_row),
                               tape.constant(local_row));
  return tape.value(p)(0, 0);
}

NegativeSampler::NegativeSampler(int count, std::uint64_t seed) : count_(count), rng_(seed) {
  if (count < 1) throw std::invalid_argument("NegativeSampler: count must be >= 1");
}

std::vector<int> NegativeSampler::sample(int positive, int universe) {
  if (positive < 0 || positive >= universe) {
    throw std::invalid_argument("NegativeSampler: positive id " + std::to_string(positive) +
                                " outside universe of " + std::to_string(universe));
  }
  if (universe <= count_) {
    throw std::invalid_argument("NegativeSampler: drawing " + std::to_string(count_) +
                                " negatives needs at least " + std::to_string(count_ + 1) +
                                " graphs, have " + std::to_string(universe));
  }
  // Uniform over the other graphs: draw from [0, universe-1) and shift ids at
  // or past the positive up by one.
  std::vector<int> ids = rng_.sample_without_replacement(universe - 1, count_);
  for (int& id : ids) {
    if (id >= positive) ++id;
  }
  return ids;
}

std::vector<std::vector<int>> draw_all_negatives(NegativeSampler& sampler, int universe) {
  std::vector<std::vector<int>> out(static_cast<std::size_t>(universe));
  for (int g = 0; g < universe; ++g) out[static_cast<std::size_t>(g)] = sampler.sample(g, universe);
  return out;
}

Var periphery_term(Tape& tape, const SplitDiscriminator& d, Var x_row, Var s_positive,
                   const std::vector<Var>& s_negatives) {
  if (s_negatives.empty()) throw std::invalid_argument("periphery_term: empty negative draw");
  Var xpart = global_part(tape, d, x_row);
  Var pos_logit = tape.add(tape.matmul(s_positive, d.w_local), xpart);
  Var term = tape.bce_with_logits(pos_logit, Matrix::constant(1, 1, 1.0));

  Var neg_sum{};
  for (std::size_t i = 0; i < s_negatives.size(); ++i) {
    Var logit = tape.add(tape.matmul(s_negatives[i], d.w_local), xpart);
    Var bce = tape.bce_with_logits(logit, Matrix(1, 1));
    neg_sum = (i == 0) ? bce : tape.add(neg_sum, bce);
  }
  return tape.add(term, tape.scale(neg_sum, 1.0 / static_cast<double>(s_negatives.size())));
}

Var hierarchical_term(Tape& tape, const SplitDiscriminator& d, Var x_row,
                      const std::vector<Var>& positive_blocks,
                      const std::vector<std::vector<Var>>& negative_blocks) {
  if (negative_blocks.empty()) {
    throw std::invalid_argument("hierarchical_term: empty negative draw");
  }
  Var xpart = global_part(tape, d, x_row);
  Var term = blocks_mean_bce(tape, d, xpart, positive_blocks, 1.0);

  Var neg_sum{};
  for (std::size_t i = 0; i < negative_blocks.size(); ++i) {
    Var one = blocks_mean_bce(tape, d, xpart, negative_blocks[i], 0.0);
    neg_sum = (i == 0) ? one : tape.add(neg_sum, one);
  }
  return tape.add(term, tape.scale(neg_sum, 1.0 / static_cast<double>(negative_blocks.size())));
}

Var periphery_loss_on_tape(Tape& tape, const DiscriminatorRefs& d, const std::vector<Var>& bound,
                           const std::vector<Var>& x_rows, const std::vector<Var>& s_rows,
                           const std::vector<std::vector<int>>& negatives) {
  check_loss_inputs(x_rows.size(), s_rows.size(), negatives, "periphery_loss");
  const int m = static_cast<int>(x_rows.size());
  SplitDiscriminator s = split_discriminator(tape, d, bound);

  Var total{};
  for (int g = 0; g < m; ++g) {
    std::vector<Var> negs;
    negs.reserve(negatives[g].size());
    for (int id : negatives[g]) negs.push_back(s_rows[id]);
    Var term = periphery_term(tape, s, x_rows[g], s_rows[g], negs);
    total = (g == 0) ? term : tape.add(total, term);
  }
  return tape.scale(total, 1.0 / m);
}

Var hierarchical_loss_on_tape(Tape& tape, const DiscriminatorRefs& d,
                              const std::vector<Var>& bound, const std::vector<Var>& x_rows,
                              const std::vector<std::vector<Var>>& intermediate_blocks,
                              const std::vector<std::vector<int>>& negatives) {
  check_loss_inputs(x_rows.size(), intermediate_blocks.size(), negatives, "hierarchical_loss");
  const int m = static_cast<int>(x_rows.size());
  SplitDiscriminator s = split_discriminator(tape, d, bound);

  Var total{};
  for (int g = 0; g < m; ++g) {
    std::vector<std::vector<Var>> negs;
    negs.reserve(negatives[g].size());
    for (int id : negatives[g]) negs.push_back(intermediate_blocks[id]);
    Var term = hierarchical_term(tape, s, x_rows[g], intermediate_blocks[g], negs);
    total = (g == 0) ? term : tape.add(total, term);
  }
  return tape.scale(total, 1.0 / m);
}

double periphery_loss(const std::vector<Matrix>& x_rows, const std::vector<Matrix>& s_rows,
                      const DiscriminatorRefs& d, const ParamStore& store,
                      NegativeSampler& sampler) {
  Tape tape;
  std::vector<Var> bound = store.bind(tape, /*trainable=*/false);
  std::vector<Var> x, s;
  for (const Matrix& r : x_rows) x.push_back(tape.constant(r));
  for (const Matrix& r : s_rows) s.push_back(tape.constant(r));
  auto negatives = draw_all_negatives(sampler, static_cast<int>(x_rows.size()));
  Var loss = periphery_loss_on_tape(tape, d, bound, x, s, negatives);
  return tape.value(loss)(0, 0);
}

double hierarchical_loss(const std::vector<Matrix>& x_rows,
                         const std::vector<Matrix>& intermediates, const DiscriminatorRefs& d,
                         const ParamStore& store, NegativeSampler& sampler) {
  Tape tape;
  std::vector<Var> bound = store.bind(tape, /*trainable=*/false);
  std::vector<Var> x;
  std::vector<std::vector<Var>> blocks;
  for (const Matrix& r : x_rows) x.push_back(tape.constant(r));
  for (const Matrix& b : intermediates) {
    if (b.empty()) {
      blocks.emplace_back();
    } else {
      blocks.push_back({tape.constant(b)});
    }
  }
  auto negatives = draw_all_negatives(sampler, static_cast<int>(x_rows.size()));
  Var loss = hierarchical_loss_on_tape(tape, d, bound, x, blocks, negatives);
  return tape.value(loss)(0, 0);
}

}  // namespace graphmax
