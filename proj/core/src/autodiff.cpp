#include "graphmax/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace graphmax {

namespace {

double stable_sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

void accumulate(Matrix& acc, const Matrix& x) {
  for (std::size_t i = 0; i < acc.size(); ++i) acc.data()[i] += x.data()[i];
}

}  // namespace

Var Tape::push(Node node) {
  nodes_.push_back(std::move(node));
  return Var{static_cast<int>(nodes_.size()) - 1, this};
}

int Tape::check(Var v, const char* op) const {
  if (v.tape != this || v.id < 0 || v.id >= static_cast<int>(nodes_.size())) {
    throw std::invalid_argument(std::string(op) + ": variable does not belong to this tape");
  }
  return v.id;
}

const Tape::Node& Tape::at(Var v, const char* op) const {
  return nodes_[check(v, op)];
}

Matrix& Tape::grad_buf(int id) {
  Node& n = nodes_[id];
  if (n.grad.empty()) n.grad = Matrix(n.value.rows(), n.value.cols());
  return n.grad;
}

Var Tape::leaf(Matrix value) {
  if (value.empty()) throw std::invalid_argument("leaf: empty matrix");
  require_finite(value, "leaf");
  Node n;
  n.op = Op::kLeaf;
  n.value = std::move(value);
  n.needs_grad = true;
  return push(std::move(n));
}

Var Tape::constant(Matrix value) {
  if (value.empty()) throw std::invalid_argument("constant: empty matrix");
  require_finite(value, "constant");
  Node n;
  n.op = Op::kConstant;
  n.value = std::move(value);
  return push(std::move(n));
}

#define GRAPHMAX_BINARY_PRELUDE(name)             \
  int ia = check(a, name);                        \
  int ib = check(b, name);                        \
  Node n;                                         \
  n.a = ia;                                       \
  n.b = ib;                                       \
  n.needs_grad = nodes_[ia].needs_grad || nodes_[ib].needs_grad

#define GRAPHMAX_UNARY_PRELUDE(name) \
  int ia = check(a, name);           \
  Node n;                            \
  n.a = ia;                          \
  n.needs_grad = nodes_[ia].needs_grad

Var Tape::matmul(Var a, Var b) {
  GRAPHMAX_BINARY_PRELUDE("matmul");
  n.op = Op::kMatmul;
  n.value = graphmax::matmul(nodes_[ia].value, nodes_[ib].value);
  require_finite(n.value, "matmul");
  return push(std::move(n));
}

Var Tape::transpose(Var a) {
  GRAPHMAX_UNARY_PRELUDE("transpose");
  n.op = Op::kTranspose;
  n.value = transposed(nodes_[ia].value);
  return push(std::move(n));
}

Var Tape::add(Var a, Var b) {
  GRAPHMAX_BINARY_PRELUDE("add");
  n.op = Op::kAdd;
  n.value = graphmax::add(nodes_[ia].value, nodes_[ib].value);
  require_finite(n.value, "add");
  return push(std::move(n));
}

Var Tape::sub(Var a, Var b) {
  GRAPHMAX_BINARY_PRELUDE("sub");
  n.op = Op::kSub;
  n.value = graphmax::sub(nodes_[ia].value, nodes_[ib].value);
  require_finite(n.value, "sub");
  return push(std::move(n));
}

Var Tape::mul(Var a, Var b) {
  GRAPHMAX_BINARY_PRELUDE("mul");
  n.op = Op::kMul;
  n.value = hadamard(nodes_[ia].value, nodes_[ib].value);
  require_finite(n.value, "mul");
  return push(std::move(n));
}

Var Tape::scale(Var a, double c) {
  if (!std::isfinite(c)) throw std::invalid_argument("scale: non-finite factor");
  GRAPHMAX_UNARY_PRELUDE("scale");
  n.op = Op::kScale;
  n.c = c;
  n.value = scaled(nodes_[ia].value, c);
  require_finite(n.value, "scale");
  return push(std::move(n));
}

Var Tape::scale_by(Var a, Var s) {
  Var b = s;
  GRAPHMAX_BINARY_PRELUDE("scale_by");
  const Matrix& sv = nodes_[ib].value;
  if (sv.rows() != 1 || sv.cols() != 1) {
    throw std::invalid_argument("scale_by: factor must be 1x1, got " + sv.shape_str());
  }
  n.op = Op::kScaleBy;
  n.value = scaled(nodes_[ia].value, sv(0, 0));
  require_finite(n.value, "scale_by");
  return push(std::move(n));
}

Var Tape::add_scalar(Var a, double c) {
  if (!std::isfinite(c)) throw std::invalid_argument("add_scalar: non-finite addend");
  GRAPHMAX_UNARY_PRELUDE("add_scalar");
  n.op = Op::kAddScalar;
  n.c = c;
  n.value = nodes_[ia].value;
  for (std::size_t i = 0; i < n.value.size(); ++i) n.value.data()[i] += c;
  require_finite(n.value, "add_scalar");
  return push(std::move(n));
}

Var Tape::add_scalar_var(Var a, Var s) {
  Var b = s;
  GRAPHMAX_BINARY_PRELUDE("add_scalar_var");
  const Matrix& sv = nodes_[ib].value;
  if (sv.rows() != 1 || sv.cols() != 1) {
    throw std::invalid_argument("add_scalar_var: addend must be 1x1, got " + sv.shape_str());
  }
  n.op = Op::kAddScalarVar;
  n.value = nodes_[ia].value;
  for (std::size_t i = 0; i < n.value.size(); ++i) n.value.data()[i] += sv(0, 0);
  require_finite(n.value, "add_scalar_var");
  return push(std::move(n));
}

Var Tape::add_row(Var a, Var row) {
  Var b = row;
  GRAPHMAX_BINARY_PRELUDE("add_row");
  const Matrix& av = nodes_[ia].value;
  const Matrix& rv = nodes_[ib].value;
  if (rv.rows() != 1 || rv.cols() != av.cols()) {
    throw std::invalid_argument("add_row: row " + rv.shape_str() +
                                " does not broadcast over " + av.shape_str());
  }
  n.op = Op::kAddRow;
  n.value = av;
  for (int i = 0; i < av.rows(); ++i) {
    for (int j = 0; j < av.cols(); ++j) n.value(i, j) += rv(0, j);
  }
  require_finite(n.value, "add_row");
  return push(std::move(n));
}

Var Tape::relu(Var a) {
  GRAPHMAX_UNARY_PRELUDE("relu");
  n.op = Op::kRelu;
  n.value = nodes_[ia].value;
  for (std::size_t i = 0; i < n.value.size(); ++i) {
    n.value.data()[i] = std::max(0.0, n.value.data()[i]);
  }
  return push(std::move(n));
}

Var Tape::sigmoid(Var a) {
  GRAPHMAX_UNARY_PRELUDE("sigmoid");
  n.op = Op::kSigmoid;
  n.value = nodes_[ia].value;
  for (std::size_t i = 0; i < n.value.size(); ++i) {
    n.value.data()[i] = stable_sigmoid(n.value.data()[i]);
  }
  return push(std::move(n));
}

Var Tape::row_softmax(Var a) {
  GRAPHMAX_UNARY_PRELUDE("row_softmax");
  n.op = Op::kRowSoftmax;
  const Matrix& x = nodes_[ia].value;
  n.value = Matrix(x.rows(), x.cols());
  for (int i = 0; i < x.rows(); ++i) {
    double m = x(i, 0);
    for (int j = 1; j < x.cols(); ++j) m = std::max(m, x(i, j));
    double denom = 0.0;
    for (int j = 0; j < x.cols(); ++j) denom += std::exp(x(i, j) - m);
    for (int j = 0; j < x.cols(); ++j) n.value(i, j) = std::exp(x(i, j) - m) / denom;
  }
  return push(std::move(n));
}

Var Tape::mean_rows(Var a) {
  GRAPHMAX_UNARY_PRELUDE("mean_rows");
  n.op = Op::kMeanRows;
  const Matrix& x = nodes_[ia].value;
  n.value = Matrix(1, x.cols());
  for (int j = 0; j < x.cols(); ++j) {
    double s = 0.0;
    for (int i = 0; i < x.rows(); ++i) s += x(i, j);
    n.value(0, j) = s / x.rows();
  }
  require_finite(n.value, "mean_rows");
  return push(std::move(n));
}

Var Tape::sum_rows(Var a) {
  GRAPHMAX_UNARY_PRELUDE("sum_rows");
  n.op = Op::kSumRows;
  const Matrix& x = nodes_[ia].value;
  n.value = Matrix(1, x.cols());
  for (int j = 0; j < x.cols(); ++j) {
    double s = 0.0;
    for (int i = 0; i < x.rows(); ++i) s += x(i, j);
    n.value(0, j) = s;
  }
  require_finite(n.value, "sum_rows");
  return push(std::move(n));
}

Var Tape::concat_cols(Var a, Var b) {
  GRAPHMAX_BINARY_PRELUDE("concat_cols");
  const Matrix& av = nodes_[ia].value;
  const Matrix& bv = nodes_[ib].value;
  if (av.rows() != bv.rows()) {
    throw std::invalid_argument("concat_cols: row counts differ, " + av.shape_str() +
                                " vs " + bv.shape_str());
  }
  n.op = Op::kConcatCols;
  n.value = Matrix(av.rows(), av.cols() + bv.cols());
  for (int i = 0; i < av.rows(); ++i) {
    for (int j = 0; j < av.cols(); ++j) n.value(i, j) = av(i, j);
    for (int j = 0; j < bv.cols(); ++j) n.value(i, av.cols() + j) = bv(i, j);
  }
  return push(std::move(n));
}

Var Tape::slice_rows(Var a, int r0, int r1) {
  GRAPHMAX_UNARY_PRELUDE("slice_rows");
  const Matrix& x = nodes_[ia].value;
  if (r0 < 0 || r1 > x.rows() || r0 >= r1) {
    throw std::invalid_argument("slice_rows: bounds [" + std::to_string(r0) + ", " +
                                std::to_string(r1) + ") invalid for " + x.shape_str());
  }
  n.op = Op::kSliceRows;
  n.r0 = r0;
  n.r1 = r1;
  n.value = Matrix(r1 - r0, x.cols());
  for (int i = r0; i < r1; ++i) {
    for (int j = 0; j < x.cols(); ++j) n.value(i - r0, j) = x(i, j);
  }
  return push(std::move(n));
}

Var Tape::bce_with_logits(Var logits, Matrix targets) {
  Var a = logits;
  GRAPHMAX_UNARY_PRELUDE("bce_with_logits");
  const Matrix& z = nodes_[ia].value;
  require_same_shape(z, targets, "bce_with_logits");
  require_finite(targets, "bce_with_logits targets");
  n.op = Op::kBceWithLogits;
  n.value = Matrix(z.rows(), z.cols());
  for (int i = 0; i < z.rows(); ++i) {
    for (int j = 0; j < z.cols(); ++j) {
      double zij = z(i, j);
      n.value(i, j) = std::max(zij, 0.0) - zij * targets(i, j) +
                      std::log1p(std::exp(-std::fabs(zij)));
    }
  }
  n.aux = std::move(targets);
  require_finite(n.value, "bce_with_logits");
  return push(std::move(n));
}

Var Tape::softmax_cross_entropy(Var logits, Matrix onehot) {
  Var a = logits;
  GRAPHMAX_UNARY_PRELUDE("softmax_cross_entropy");
  const Matrix& z = nodes_[ia].value;
  require_same_shape(z, onehot, "softmax_cross_entropy");
  require_finite(onehot, "softmax_cross_entropy targets");
  n.op = Op::kSoftmaxXent;
  double total = 0.0;
  for (int i = 0; i < z.rows(); ++i) {
    double m = z(i, 0);
    for (int j = 1; j < z.cols(); ++j) m = std::max(m, z(i, j));
    double denom = 0.0;
    double dot = 0.0;
    for (int j = 0; j < z.cols(); ++j) {
      denom += std::exp(z(i, j) - m);
      dot += onehot(i, j) * z(i, j);
    }
    total += m + std::log(denom) - dot;
  }
  n.value = Matrix(1, 1, {total / z.rows()});
  n.aux = std::move(onehot);
  require_finite(n.value, "softmax_cross_entropy");
  return push(std::move(n));
}

Var Tape::sum_all(Var a) {
  GRAPHMAX_UNARY_PRELUDE("sum_all");
  n.op = Op::kSumAll;
  n.value = Matrix(1, 1, {graphmax::sum_all(nodes_[ia].value)});
  require_finite(n.value, "sum_all");
  return push(std::move(n));
}

Var Tape::mean_all(Var a) {
  GRAPHMAX_UNARY_PRELUDE("mean_all");
  n.op = Op::kMeanAll;
  const Matrix& x = nodes_[ia].value;
  n.value = Matrix(1, 1, {graphmax::sum_all(x) / static_cast<double>(x.size())});
  require_finite(n.value, "mean_all");
  return push(std::move(n));
}

#undef GRAPHMAX_BINARY_PRELUDE
#undef GRAPHMAX_UNARY_PRELUDE

void Tape::backward(Var loss) {
  int lid = check(loss, "backward");
  if (backward_done_) {
    throw std::logic_error("backward: may only run once per tape");
  }
  backward_done_ = true;
  const Matrix& lv = nodes_[lid].value;
  if (lv.rows() != 1 || lv.cols() != 1) {
    throw std::invalid_argument("backward: loss must be 1x1, got " + lv.shape_str());
  }

  if (nodes_[lid].needs_grad) {
    grad_buf(lid)(0, 0) = 1.0;
    for (int i = lid; i >= 0; --i) {
      Node& n = nodes_[i];
      if (n.grad.empty()) continue;
      const Matrix& g = n.grad;
      switch (n.op) {
        case Op::kLeaf:
        case Op::kConstant:
          break;
        case Op::kMatmul: {
          if (nodes_[n.a].needs_grad) {
            accumulate(grad_buf(n.a), graphmax::matmul(g, transposed(nodes_[n.b].value)));
          }
          if (nodes_[n.b].needs_grad) {
            accumulate(grad_buf(n.b), graphmax::matmul(transposed(nodes_[n.a].value), g));
          }
          break;
        }
        case Op::kTranspose:
          if (nodes_[n.a].needs_grad) accumulate(grad_buf(n.a), transposed(g));
          break;
        case Op::kAdd:
          if (nodes_[n.a].needs_grad) accumulate(grad_buf(n.a), g);
          if (nodes_[n.b].needs_grad) accumulate(grad_buf(n.b), g);
          break;
        case Op::kSub: {
          if (nodes_[n.a].needs_grad) accumulate(grad_buf(n.a), g);
          if (nodes_[n.b].needs_grad) {
            Matrix& gb = grad_buf(n.b);
            for (std::size_t k = 0; k < gb.size(); ++k) gb.data()[k] -= g.data()[k];
          }
          break;
        }
        case Op::kMul:
          if (nodes_[n.a].needs_grad) {
            accumulate(grad_buf(n.a), hadamard(g, nodes_[n.b].value));
          }
          if (nodes_[n.b].needs_grad) {
            accumulate(grad_buf(n.b), hadamard(g, nodes_[n.a].value));
          }
          break;
        case Op::kScale:
          if (nodes_[n.a].needs_grad) accumulate(grad_buf(n.a), scaled(g, n.c));
          break;
        case Op::kScaleBy: {
          if (nodes_[n.a].needs_grad) {
            accumulate(grad_buf(n.a), scaled(g, nodes_[n.b].value(0, 0)));
          }
          if (nodes_[n.b].needs_grad) {
            grad_buf(n.b)(0, 0) += graphmax::sum_all(hadamard(g, nodes_[n.a].value));
          }
          break;
        }
        case Op::kAddScalar:
          if (nodes_[n.a].needs_grad) accumulate(grad_buf(n.a), g);
          break;
        case Op::kAddScalarVar:
          if (nodes_[n.a].needs_grad) accumulate(grad_buf(n.a), g);
          if (nodes_[n.b].needs_grad) grad_buf(n.b)(0, 0) += graphmax::sum_all(g);
          break;
        case Op::kAddRow: {
          if (nodes_[n.a].needs_grad) accumulate(grad_buf(n.a), g);
          if (nodes_[n.b].needs_grad) {
            Matrix& gr = grad_buf(n.b);
            for (int r = 0; r < g.rows(); ++r) {
              for (int c2 = 0; c2 < g.cols(); ++c2) gr(0, c2) += g(r, c2);
            }
          }
          break;
        }
        case Op::kRelu: {
          if (nodes_[n.a].needs_grad) {
            Matrix& ga = grad_buf(n.a);
            const Matrix& x = nodes_[n.a].value;
            for (std::size_t k = 0; k < ga.size(); ++k) {
              if (x.data()[k] > 0.0) ga.data()[k] += g.data()[k];
            }
          }
          break;
        }
        case Op::kSigmoid: {
          if (nodes_[n.a].needs_grad) {
            Matrix& ga = grad_buf(n.a);
            const Matrix& y = n.value;
            for (std::size_t k = 0; k < ga.size(); ++k) {
              double yk = y.data()[k];
              ga.data()[k] += g.data()[k] * yk * (1.0 - yk);
            }
          }
          break;
        }
        case Op::kRowSoftmax: {
          if (nodes_[n.a].needs_grad) {
            Matrix& ga = grad_buf(n.a);
            const Matrix& y = n.value;
            for (int r = 0; r < y.rows(); ++r) {
              double dot = 0.0;
              for (int c2 = 0; c2 < y.cols(); ++c2) dot += g(r, c2) * y(r, c2);
              for (int c2 = 0; c2 < y.cols(); ++c2) {
                ga(r, c2) += y(r, c2) * (g(r, c2) - dot);
              }
            }
          }
          break;
        }
        case Op::kMeanRows: {
          if (nodes_[n.a].needs_grad) {
            Matrix& ga = grad_buf(n.a);
            double inv = 1.0 / ga.rows();
            for (int r = 0; r < ga.rows(); ++r) {
              for (int c2 = 0; c2 < ga.cols(); ++c2) ga(r, c2) += g(0, c2) * inv;
            }
          }
          break;
        }
        case Op::kSumRows: {
          if (nodes_[n.a].needs_grad) {
            Matrix& ga = grad_buf(n.a);
            for (int r = 0; r < ga.rows(); ++r) {
              for (int c2 = 0; c2 < ga.cols(); ++c2) ga(r, c2) += g(0, c2);
            }
          }
          break;
        }
        case Op::kConcatCols: {
          int pa = nodes_[n.a].value.cols();
          if (nodes_[n.a].needs_grad) {
            Matrix& ga = grad_buf(n.a);
            for (int r = 0; r < ga.rows(); ++r) {
              for (int c2 = 0; c2 < pa; ++c2) ga(r, c2) += g(r, c2);
            }
          }
          if (nodes_[n.b].needs_grad) {
            Matrix& gb = grad_buf(n.b);
            for (int r = 0; r < gb.rows(); ++r) {
              for (int c2 = 0; c2 < gb.cols(); ++c2) gb(r, c2) += g(r, pa + c2);
            }
          }
          break;
        }
        case Op::kSliceRows: {
          if (nodes_[n.a].needs_grad) {
            Matrix& ga = grad_buf(n.a);
            for (int r = n.r0; r < n.r1; ++r) {
              for (int c2 = 0; c2 < ga.cols(); ++c2) ga(r, c2) += g(r - n.r0, c2);
            }
          }
          break;
        }
        case Op::kBceWithLogits: {
          if (nodes_[n.a].needs_grad) {
            Matrix& ga = grad_buf(n.a);
            const Matrix& z = nodes_[n.a].value;
            for (std::size_t k = 0; k < ga.size(); ++k) {
              ga.data()[k] += g.data()[k] * (stable_sigmoid(z.data()[k]) - n.aux.data()[k]);
            }
          }
          break;
        }
        case Op::kSoftmaxXent: {
          if (nodes_[n.a].needs_grad) {
            Matrix& ga = grad_buf(n.a);
            const Matrix& z = nodes_[n.a].value;
            double scale = g(0, 0) / z.rows();
            for (int r = 0; r < z.rows(); ++r) {
              double m = z(r, 0);
              for (int c2 = 1; c2 < z.cols(); ++c2) m = std::max(m, z(r, c2));
              double denom = 0.0;
              for (int c2 = 0; c2 < z.cols(); ++c2) denom += std::exp(z(r, c2) - m);
              for (int c2 = 0; c2 < z.cols(); ++c2) {
                double p = std::exp(z(r, c2) - m) / denom;
                ga(r, c2) += scale * (p - n.aux(r, c2));
              }
            }
          }
          break;
        }
        case Op::kSumAll: {
          if (nodes_[n.a].needs_grad) {
            Matrix& ga = grad_buf(n.a);
            for (std::size_t k = 0; k < ga.size(); ++k) ga.data()[k] += g(0, 0);
          }
          break;
        }
        case Op::kMeanAll: {
          if (nodes_[n.a].needs_grad) {
            Matrix& ga = grad_buf(n.a);
            double inv = g(0, 0) / static_cast<double>(ga.size());
            for (std::size_t k = 0; k < ga.size(); ++k) ga.data()[k] += inv;
          }
          break;
        }
      }
    }
  }

  // Leaves untouched by the loss still report a well-defined zero gradient.
  for (Node& n : nodes_) {
    if (n.op == Op::kLeaf && n.grad.empty()) {
      n.grad = Matrix(n.value.rows(), n.value.cols());
    }
  }
}

const Matrix& Tape::value(Var v) const { return at(v, "value").value; }

const Matrix& Tape::grad(Var v) const {
  const Node& n = at(v, "grad");
  if (n.grad.empty()) {
    throw std::logic_error("grad: no gradient recorded (backward not run, or not a leaf)");
  }
  return n.grad;
}

namespace {

Tape& same_tape(Var a, Var b, const char* op) {
  if (a.tape == nullptr || a.tape != b.tape) {
    throw std::invalid_argument(std::string(op) + ": operands must share a tape");
  }
  return *a.tape;
}

}  // namespace

Var operator+(Var a, Var b) { return same_tape(a, b, "operator+").add(a, b); }
Var operator-(Var a, Var b) { return same_tape(a, b, "operator-").sub(a, b); }
Var operator*(Var a, Var b) { return same_tape(a, b, "operator*").mul(a, b); }
Var matmul(Var a, Var b) { return same_tape(a, b, "matmul").matmul(a, b); }

Var relu(Var a) {
  if (a.tape == nullptr) throw std::invalid_argument("relu: null tape");
  return a.tape->relu(a);
}

Var sigmoid(Var a) {
  if (a.tape == nullptr) throw std::invalid_argument("sigmoid: null tape");
  return a.tape->sigmoid(a);
}

}  // namespace graphmax
