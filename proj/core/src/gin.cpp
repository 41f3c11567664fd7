#include "graphmax/gin.hpp"

#include <cmath>
#include <stdexcept>

namespace graphmax {

Matrix xavier_uniform(Rng& rng, int fan_in, int fan_out) {
  double bound = std::sqrt(6.0 / (fan_in + fan_out));
  Matrix w(fan_in, fan_out);
  for (int i = 0; i < fan_in; ++i) {
    for (int j = 0; j < fan_out; ++j) w(i, j) = rng.uniform(-bound, bound);
  }
  return w;
}

GinLayerRef init_gin_layer(ParamStore& store, Rng& rng, const std::string& prefix,
                           int in_dim, int out_dim) {
  if (in_dim < 1 || out_dim < 1) {
    throw std::invalid_argument("init_gin_layer: dims must be positive");
  }
  GinLayerRef layer;
  layer.in_dim = in_dim;
  layer.hidden_dim = out_dim;
  layer.out_dim = out_dim;
  layer.w1 = store.add(prefix + ".w1", xavier_uniform(rng, in_dim, layer.hidden_dim));
  layer.b1 = store.add(prefix + ".b1", Matrix(1, layer.hidden_dim));
  layer.w2 = store.add(prefix + ".w2", xavier_uniform(rng, layer.hidden_dim, out_dim));
  layer.b2 = store.add(prefix + ".b2", Matrix(1, out_dim));
  layer.eps = store.add(prefix + ".eps", Matrix(1, 1));
  return layer;
}

Var gin_layer_forward(Tape& tape, const GinLayerRef& layer, const std::vector<Var>& bound,
                      Var adjacency, Var states, bool final_relu) {
  const Matrix& a = tape.value(adjacency);
  const Matrix& h = tape.value(states);
  if (a.rows() != a.cols()) {
    throw std::invalid_argument("gin_layer: adjacency must be square, got " + a.shape_str());
  }
  if (h.rows() != a.rows() || h.cols() != layer.in_dim) {
    throw std::invalid_argument("gin_layer: states " + h.shape_str() + " do not match adjacency " +
                                a.shape_str() + " and in_dim " + std::to_string(layer.in_dim));
  }
  Var one_plus_eps = tape.add_scalar(bound[layer.eps], 1.0);
  Var agg = tape.add(tape.scale_by(states, one_plus_eps), tape.matmul(adjacency, states));
  Var hidden = tape.relu(tape.add_row(tape.matmul(agg, bound[layer.w1]), bound[layer.b1]));
  Var out = tape.add_row(tape.matmul(hidden, bound[layer.w2]), bound[layer.b2]);
  return final_relu ? tape.relu(out) : out;
}

Var gin_stack_forward(Tape& tape, const std::vector<GinLayerRef>& stack,
                      const std::vector<Var>& bound, Var adjacency, Var states) {
  if (stack.empty()) throw std::invalid_argument("gin_stack_forward: empty stack");
  Var h = states;
  for (std::size_t l = 0; l < stack.size(); ++l) {
    bool final_relu = (l + 1 < stack.size());  // no activation after the last layer
    h = gin_layer_forward(tape, stack[l], bound, adjacency, h, final_relu);
  }
  return h;
}

Matrix gin_layer_eval(const GinLayerRef& layer, const ParamStore& store,
                      const Matrix& adjacency, const Matrix& states, bool final_relu) {
  Tape tape;
  std::vector<Var> bound = store.bind(tape, /*trainable=*/false);
  Var out = gin_layer_forward(tape, layer, bound, tape.constant(adjacency),
                              tape.constant(states), final_relu);
  return tape.value(out);
}

}  // namespace graphmax
