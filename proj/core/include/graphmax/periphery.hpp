#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "graphmax/config.hpp"
#include "graphmax/gin.hpp"
#include "graphmax/graph.hpp"

namespace graphmax {

// Reconstruction-trained GIN encoder, one per dataset, shared across graphs.
// The last layer outputs the input feature dimension D.
struct EncoderParams {
  ParamStore store;
  std::vector<GinLayerRef> layers;
  int feature_dim = 0;
};

EncoderParams init_encoder(int feature_dim, const EncoderConfig& config, std::uint64_t seed);

Var encode_on_tape(Tape& tape, const EncoderParams& encoder, const std::vector<Var>& bound,
                   Var adjacency, Var features);
Matrix encode(const EncoderParams& encoder, const Graph& graph);

// Mean over all |V|^2 entries of BCE between sigmoid(H H^T) and the adjacency
// with its diagonal set to 1.
Var reconstruction_loss_on_tape(Tape& tape, Var h, const Matrix& adjacency);
double reconstruction_loss(const Matrix& h, const Matrix& adjacency);

struct PeripheryOutput {
  Matrix H;        // renormalized so S + H == X bitwise
  Matrix S;        // X - H
  Matrix summary;  // 1 x D column means of S
};

PeripheryOutput periphery(const Graph& graph, const Matrix& h);

struct EncoderTrainResult {
  EncoderParams encoder;  // parameters of the best epoch
  double best_loss = 0.0;
  int best_epoch = 0;   // 1-based
  int epochs_run = 0;
  double seconds = 0.0;
  std::vector<double> loss_trace;  // loss per epoch, pre-update parameters
};

// Full-batch ADAM over the mean reconstruction loss; early-stops after
// `patience` epochs without the best loss improving by more than 1e-6.
// Metrics lines "epoch, loss_total, loss_P, loss_H, seconds" go to `metrics`
// when given (loss_P and loss_H are zero in this phase).
EncoderTrainResult train_encoder(const GraphDataset& dataset, const EncoderConfig& config,
                                 std::uint64_t seed, int workers = 1,
                                 std::ostream* metrics = nullptr);

}  // namespace graphmax
