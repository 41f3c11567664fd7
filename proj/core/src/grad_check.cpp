#include "graphmax/grad_check.hpp"

#include <cmath>
#include <stdexcept>

namespace graphmax {

namespace {

double eval_loss(const ScalarFn& fn, const std::vector<Matrix>& point) {
  Tape tape;
  std::vector<Var> leaves;
  leaves.reserve(point.size());
  for (const Matrix& m : point) leaves.push_back(tape.leaf(m));
  Var loss = fn(tape, leaves);
  const Matrix& v = tape.value(loss);
  if (v.rows() != 1 || v.cols() != 1) {
    throw std::invalid_argument("grad_check: fn must produce a 1x1 loss, got " +
                                v.shape_str());
  }
  return v(0, 0);
}

}  // namespace

std::string GradCheckReport::worst() const {
  const GradCheckEntry* w = nullptr;
  for (const GradCheckEntry& e : leaves) {
    if (w == nullptr || e.max_rel_err > w->max_rel_err) w = &e;
  }
  if (w == nullptr) return "no leaves";
  return w->name + ": " + std::to_string(w->max_rel_err);
}

GradCheckReport grad_check(const ScalarFn& fn, const std::vector<Matrix>& point,
                           double step, const std::vector<std::string>& names) {
  if (step <= 0.0) throw std::invalid_argument("grad_check: step must be positive");
  if (!names.empty() && names.size() != point.size()) {
    throw std::invalid_argument("grad_check: names/point size mismatch");
  }

  // One analytic pass.
  Tape tape;
  std::vector<Var> leaves;
  leaves.reserve(point.size());
  for (const Matrix& m : point) leaves.push_back(tape.leaf(m));
  Var loss = fn(tape, leaves);
  tape.backward(loss);

  GradCheckReport report;
  std::vector<Matrix> probe = point;
  for (std::size_t k = 0; k < point.size(); ++k) {
    const Matrix& analytic = tape.grad(leaves[k]);
    GradCheckEntry entry;
    entry.name = names.empty() ? "leaf" + std::to_string(k) : names[k];
    for (std::size_t i = 0; i < probe[k].size(); ++i) {
      double saved = probe[k].data()[i];
      probe[k].data()[i] = saved + step;
      double up = eval_loss(fn, probe);
      probe[k].data()[i] = saved - step;
      double down = eval_loss(fn, probe);
      probe[k].data()[i] = saved;
      double numeric = (up - down) / (2.0 * step);
      double a = analytic.data()[i];
      double rel = std::fabs(a - numeric) /
                   std::max({1.0, std::fabs(a), std::fabs(numeric)});
      entry.max_rel_err = std::max(entry.max_rel_err, rel);
    }
    report.max_rel_err = std::max(report.max_rel_err, entry.max_rel_err);
    report.leaves.push_back(std::move(entry));
  }
  return report;
}

}  // namespace graphmax
