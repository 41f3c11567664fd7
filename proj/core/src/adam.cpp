#include "graphmax/adam.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace graphmax {

Adam::Adam(const std::vector<Matrix>& params, AdamConfig config) : config_(config) {
  if (config.learning_rate <= 0.0 || config.beta1 < 0.0 || config.beta1 >= 1.0 ||
      config.beta2 < 0.0 || config.beta2 >= 1.0 || config.epsilon <= 0.0) {
    throw std::invalid_argument("Adam: invalid hyperparameters");
  }
  m_.reserve(params.size());
  v_.reserve(params.size());
  for (const Matrix& p : params) {
    m_.emplace_back(p.rows(), p.cols());
    v_.emplace_back(p.rows(), p.cols());
  }
}

void Adam::step(std::vector<Matrix>& params, const std::vector<Matrix>& grads) {
  if (params.size() != m_.size() || grads.size() != m_.size()) {
    throw std::invalid_argument("Adam::step: expected " + std::to_string(m_.size()) +
                                " tensors, got " + std::to_string(params.size()) +
                                " params and " + std::to_string(grads.size()) + " grads");
  }
  ++t_;
  double bc1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
  double bc2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
  for (std::size_t k = 0; k < params.size(); ++k) {
    require_same_shape(params[k], grads[k], "Adam::step");
    require_same_shape(params[k], m_[k], "Adam::step state");
    require_finite(grads[k], "Adam::step grad");
    double* p = params[k].data();
    const double* g = grads[k].data();
    double* m = m_[k].data();
    double* v = v_[k].data();
    for (std::size_t i = 0; i < params[k].size(); ++i) {
      m[i] = config_.beta1 * m[i] + (1.0 - config_.beta1) * g[i];
      v[i] = config_.beta2 * v[i] + (1.0 - config_.beta2) * g[i] * g[i];
      double mhat = m[i] / bc1;
      double vhat = v[i] / bc2;
      p[i] -= config_.learning_rate * mhat / (std::sqrt(vhat) + config_.epsilon);
    }
  }
}

}  // namespace graphmax
