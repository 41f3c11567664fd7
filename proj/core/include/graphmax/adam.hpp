#pragma once

#include <vector>

#include "graphmax/matrix.hpp"

namespace graphmax {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Adam with bias correction. One state per parameter list; moments are kept
// in parameter order.
class Adam {
 public:
  Adam(const std::vector<Matrix>& params, AdamConfig config = {});

  // In-place update; grads must match params shape-for-shape.
  void step(std::vector<Matrix>& params, const std::vector<Matrix>& grads);

  long long steps_taken() const { return t_; }
  const AdamConfig& config() const { return config_; }

 private:
  AdamConfig config_;
  long long t_ = 0;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
};

}  // namespace graphmax
