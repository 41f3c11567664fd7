#pragma once

#include <string>
#include <vector>

#include "graphmax/autodiff.hpp"
#include "graphmax/matrix.hpp"

namespace graphmax {

// Flat ordered registry of named learnable tensors. Model structs hold
// indices into one store; binding puts every tensor on a tape in order, so
// grads line up index-for-index for the optimizer.
struct ParamStore {
  std::vector<std::string> names;
  std::vector<Matrix> values;

  int add(std::string name, Matrix value);
  int size() const { return static_cast<int>(values.size()); }
  std::size_t scalar_count() const;

  // Leaves when trainable, constants when frozen.
  std::vector<Var> bind(Tape& tape, bool trainable = true) const;

  // Gradients for every bound leaf, in store order.
  static std::vector<Matrix> collect_grads(const Tape& tape, const std::vector<Var>& bound);

  int index_of(const std::string& name) const;  // -1 when absent
};

}  // namespace graphmax
