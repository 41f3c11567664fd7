#include "graphmax/periphery.hpp"

#include <chrono>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "graphmax/adam.hpp"
#include "graphmax/log.hpp"
#include "graphmax/parallel.hpp"

namespace graphmax {

EncoderParams init_encoder(int feature_dim, const EncoderConfig& config, std::uint64_t seed) {
  if (feature_dim < 1) throw std::invalid_argument("init_encoder: feature_dim must be positive");
  if (static_cast<int>(config.hidden_units.size()) != config.num_layers - 1) {
    throw std::invalid_argument("init_encoder: hidden_units must list num_layers - 1 widths");
  }
  EncoderParams enc;
  enc.feature_dim = feature_dim;
  Rng rng(seed);
  int in_dim = feature_dim;
  for (int l = 0; l < config.num_layers; ++l) {
    bool last = (l == config.num_layers - 1);
    int out_dim = last ? feature_dim : config.hidden_units[l];
    enc.layers.push_back(
        init_gin_layer(enc.store, rng, "encoder.layer" + std::to_string(l), in_dim, out_dim));
    in_dim = out_dim;
  }
  return enc;
}

Var encode_on_tape(Tape& tape, const EncoderParams& encoder, const std::vector<Var>& bound,
                   Var adjacency, Var features) {
  if (tape.value(features).cols() != encoder.feature_dim) {
    throw std::invalid_argument("encode: features have " +
                                std::to_string(tape.value(features).cols()) +
                                " columns, encoder expects " +
                                std::to_string(encoder.feature_dim));
  }
  return gin_stack_forward(tape, encoder.layers, bound, adjacency, features);
}

Matrix encode(const EncoderParams& encoder, const Graph& graph) {
  Tape tape;
  std::vector<Var> bound = encoder.store.bind(tape, /*trainable=*/false);
  Var h = encode_on_tape(tape, encoder, bound, tape.constant(graph.adjacency),
                         tape.constant(graph.features));
  return tape.value(h);
}

Var reconstruction_loss_on_tape(Tape& tape, Var h, const Matrix& adjacency) {
  const Matrix& hv = tape.value(h);
  if (adjacency.rows() != adjacency.cols() || adjacency.rows() != hv.rows()) {
    throw std::invalid_argument("reconstruction_loss: H " + hv.shape_str() +
                                " does not match adjacency " + adjacency.shape_str());
  }
  Matrix target = adjacency;
  for (int i = 0; i < target.rows(); ++i) target(i, i) = 1.0;
  Var logits = tape.matmul(h, tape.transpose(h));
  return tape.mean_all(tape.bce_with_logits(logits, std::move(target)));
}

double reconstruction_loss(const Matrix& h, const Matrix& adjacency) {
  require_finite(h, "reconstruction_loss");
  Tape tape;
  Var loss = reconstruction_loss_on_tape(tape, tape.constant(h), adjacency);
  return tape.value(loss)(0, 0);
}

PeripheryOutput periphery(const Graph& graph, const Matrix& h) {
  require_same_shape(graph.features, h, "periphery");
  require_finite(h, "periphery");
  PeripheryOutput out;
  out.S = sub(graph.features, h);
  // Re-deriving H from the rounded S keeps S + H == X bitwise.
  out.H = sub(graph.features, out.S);
  out.summary = Matrix(1, out.S.cols());
  for (int j = 0; j < out.S.cols(); ++j) {
    double acc = 0.0;
    for (int i = 0; i < out.S.rows(); ++i) acc += out.S(i, j);
    out.summary(0, j) = acc / out.S.rows();
  }
  return out;
}

EncoderTrainResult train_encoder(const GraphDataset& dataset, const EncoderConfig& config,
                                 std::uint64_t seed, int workers, std::ostream* metrics) {
  if (dataset.graphs.empty()) throw std::invalid_argument("train_encoder: empty dataset");
  if (dataset.feature_dim < 1) {
    throw std::invalid_argument("train_encoder: dataset has no features; run a feature policy");
  }
  const int m = dataset.size();
  EncoderParams enc = init_encoder(dataset.feature_dim, config, seed);
  Adam adam(enc.store.values, AdamConfig{config.learning_rate});

  EncoderTrainResult result;
  result.encoder = enc;
  result.best_loss = std::numeric_limits<double>::infinity();
  auto t0 = std::chrono::steady_clock::now();

  int stall = 0;
  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    auto e0 = std::chrono::steady_clock::now();
    std::vector<double> worker_loss(static_cast<std::size_t>(std::max(workers, 1)), 0.0);
    std::vector<std::vector<Matrix>> worker_grads(worker_loss.size());
    try {
      parallel_chunks(m, workers, [&](int w, int begin, int end) {
        if (begin == end) {
          worker_grads[w] = std::vector<Matrix>();
          return;
        }
        Tape tape;
        std::vector<Var> bound = enc.store.bind(tape);
        Var total{};
        for (int g = begin; g < end; ++g) {
          const Graph& graph = dataset.graphs[g];
          Var h = encode_on_tape(tape, enc, bound, tape.constant(graph.adjacency),
                                 tape.constant(graph.features));
          Var loss = reconstruction_loss_on_tape(tape, h, graph.adjacency);
          total = (g == begin) ? loss : tape.add(total, loss);
        }
        tape.backward(total);
        worker_loss[w] = tape.value(total)(0, 0);
        worker_grads[w] = ParamStore::collect_grads(tape, bound);
      });
    } catch (const std::exception& e) {
      throw std::runtime_error("train_encoder: epoch " + std::to_string(epoch) +
                               " failed: " + e.what());
    }

    double loss = 0.0;
    std::vector<Matrix> grads;
    for (std::size_t w = 0; w < worker_grads.size(); ++w) {
      loss += worker_loss[w];
      if (worker_grads[w].empty()) continue;
      if (grads.empty()) {
        grads = std::move(worker_grads[w]);
      } else {
        for (std::size_t k = 0; k < grads.size(); ++k) {
          grads[k] = add(grads[k], worker_grads[w][k]);
        }
      }
    }
    loss /= m;
    for (Matrix& g : grads) g = scaled(g, 1.0 / m);

    result.loss_trace.push_back(loss);
    if (loss < result.best_loss - 1e-6) {
      result.best_loss = loss;
      result.best_epoch = epoch;
      result.encoder = enc;  // snapshot of the parameters this loss was measured at
      stall = 0;
    } else {
      ++stall;
    }

    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - e0).count();
    if (metrics != nullptr) {
      char line[160];
      std::snprintf(line, sizeof(line), "%d, %.17g, %.17g, %.17g, %.3f\n", epoch, loss, 0.0, 0.0,
                    secs);
      *metrics << line;
    }
    result.epochs_run = epoch;
    if (stall > config.patience) break;

    adam.step(enc.store.values, grads);
  }

  result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  log_info("encoder: best loss " + std::to_string(result.best_loss) + " at epoch " +
           std::to_string(result.best_epoch) + "/" + std::to_string(result.epochs_run));
  return result;
}

}  // namespace graphmax
