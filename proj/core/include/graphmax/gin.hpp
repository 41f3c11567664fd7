#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "graphmax/autodiff.hpp"
#include "graphmax/params.hpp"
#include "graphmax/rng.hpp"

namespace graphmax {

// One graph-isomorphism layer: row v of the output is
// MLP((1 + eps) * h_v + sum over neighbors u of h_u), evaluated densely as
// MLP(((1 + eps) * I + A) * H). The internal MLP is two linear maps with a
// ReLU between; hidden width equals the output width.
struct GinLayerRef {
  int w1 = -1, b1 = -1, w2 = -1, b2 = -1, eps = -1;  // ParamStore indices
  int in_dim = 0, hidden_dim = 0, out_dim = 0;
};

// Xavier-uniform weights (+-sqrt(6/(fan_in+fan_out))), zero biases, eps = 0.
GinLayerRef init_gin_layer(ParamStore& store, Rng& rng, const std::string& prefix,
                           int in_dim, int out_dim);

// `final_relu` applies the activation after the MLP; stacks leave it off on
// their last layer.
Var gin_layer_forward(Tape& tape, const GinLayerRef& layer, const std::vector<Var>& bound,
                      Var adjacency, Var states, bool final_relu);

// Sequential stack starting at h^0 = X.
Var gin_stack_forward(Tape& tape, const std::vector<GinLayerRef>& stack,
                      const std::vector<Var>& bound, Var adjacency, Var states);

// Value-level convenience for a single layer (fresh private tape).
Matrix gin_layer_eval(const GinLayerRef& layer, const ParamStore& store,
                      const Matrix& adjacency, const Matrix& states, bool final_relu);

Matrix xavier_uniform(Rng& rng, int fan_in, int fan_out);

}  // namespace graphmax
