#pragma once

#include <functional>
#include <string>
#include <vector>

#include "graphmax/autodiff.hpp"
#include "graphmax/matrix.hpp"

namespace graphmax {

// Builds a 1x1 loss from leaves previously bound onto the tape, one leaf per
// entry of the evaluation point.
using ScalarFn = std::function<Var(Tape&, const std::vector<Var>&)>;

struct GradCheckEntry {
  std::string name;
  double max_rel_err = 0.0;
};

struct GradCheckReport {
  std::vector<GradCheckEntry> leaves;
  double max_rel_err = 0.0;
  bool passed(double tol) const { return max_rel_err < tol; }
  std::string worst() const;  // "name: err" of the worst leaf
};

// Central-difference check of reverse-mode gradients at the given point.
// Relative error per entry is |analytic - numeric| / max(1, |analytic|, |numeric|).
GradCheckReport grad_check(const ScalarFn& fn, const std::vector<Matrix>& point,
                           double step = 1e-5,
                           const std::vector<std::string>& names = {});

}  // namespace graphmax
