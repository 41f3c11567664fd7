#include "graphmax/params.hpp"

#include <stdexcept>

namespace graphmax {

int ParamStore::add(std::string name, Matrix value) {
  if (value.empty()) throw std::invalid_argument("ParamStore::add: empty tensor " + name);
  if (index_of(name) >= 0) {
    throw std::invalid_argument("ParamStore::add: duplicate name " + name);
  }
  names.push_back(std::move(name));
  values.push_back(std::move(value));
  return static_cast<int>(values.size()) - 1;
}

std::size_t ParamStore::scalar_count() const {
  std::size_t n = 0;
  for (const Matrix& m : values) n += m.size();
  return n;
}

std::vector<Var> ParamStore::bind(Tape& tape, bool trainable) const {
  std::vector<Var> vars;
  vars.reserve(values.size());
  for (const Matrix& m : values) {
    vars.push_back(trainable ? tape.leaf(m) : tape.constant(m));
  }
  return vars;
}

std::vector<Matrix> ParamStore::collect_grads(const Tape& tape, const std::vector<Var>& bound) {
  std::vector<Matrix> grads;
  grads.reserve(bound.size());
  for (Var v : bound) grads.push_back(tape.grad(v));
  return grads;
}

int ParamStore::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return static_cast<int>(i);
  }
  return -1;
}

}  // namespace graphmax
