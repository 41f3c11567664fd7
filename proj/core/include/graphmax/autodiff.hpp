#pragma once

#include <cstddef>
#include <vector>

#include "graphmax/matrix.hpp"

namespace graphmax {

class Tape;

// Handle to a node on a Tape. Cheap to copy; only valid for the tape that
// produced it.
struct Var {
  int id = -1;
  Tape* tape = nullptr;
};

// Define-by-run reverse-mode tape. A fresh graph is recorded on every forward
// pass; backward() runs one reverse sweep and accumulates gradients into every
// node that (transitively) depends on a differentiable leaf.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Differentiable leaf: receives a gradient after backward().
  Var leaf(Matrix value);
  // Constant input: never accumulates a gradient and backward skips the
  // subtree cost for it.
  Var constant(Matrix value);

  Var matmul(Var a, Var b);
  Var transpose(Var a);
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);  // elementwise
  Var scale(Var a, double c);
  Var scale_by(Var a, Var s);        // s is 1x1
  Var add_scalar(Var a, double c);
  Var add_scalar_var(Var a, Var s);  // s is 1x1, broadcast
  Var add_row(Var a, Var row);       // row is 1xC, broadcast over rows
  Var relu(Var a);
  Var sigmoid(Var a);
  Var row_softmax(Var a);
  Var mean_rows(Var a);  // RxC -> 1xC
  Var sum_rows(Var a);   // RxC -> 1xC
  Var concat_cols(Var a, Var b);          // RxP, RxQ -> Rx(P+Q)
  Var slice_rows(Var a, int r0, int r1);  // rows [r0, r1)
  // Elementwise binary cross-entropy against fixed targets, computed from
  // logits in the overflow-safe form max(z,0) - z*t + log1p(exp(-|z|)).
  Var bce_with_logits(Var logits, Matrix targets);
  // Mean over rows of softmax cross-entropy against fixed one-hot rows -> 1x1.
  Var softmax_cross_entropy(Var logits, Matrix onehot);
  Var sum_all(Var a);   // -> 1x1
  Var mean_all(Var a);  // -> 1x1

  // Reverse sweep from a 1x1 loss. May be called once per recorded graph.
  void backward(Var loss);

  const Matrix& value(Var v) const;
  // Gradient of the last backward()'s loss w.r.t. v. Leaves the loss does not
  // depend on report zeros.
  const Matrix& grad(Var v) const;

  std::size_t node_count() const { return nodes_.size(); }

 private:
  enum class Op {
    kLeaf,
    kConstant,
    kMatmul,
    kTranspose,
    kAdd,
    kSub,
    kMul,
    kScale,
    kScaleBy,
    kAddScalar,
    kAddScalarVar,
    kAddRow,
    kRelu,
    kSigmoid,
    kRowSoftmax,
    kMeanRows,
    kSumRows,
    kConcatCols,
    kSliceRows,
    kBceWithLogits,
    kSoftmaxXent,
    kSumAll,
    kMeanAll,
  };

  struct Node {
    Op op;
    int a = -1;
    int b = -1;
    double c = 0.0;        // scalar payload
    int r0 = 0, r1 = 0;    // slice bounds
    Matrix aux;            // fixed targets / cached softmax
    Matrix value;
    Matrix grad;           // allocated lazily during backward
    bool needs_grad = false;
  };

  Var push(Node node);
  const Node& at(Var v, const char* op) const;
  int check(Var v, const char* op) const;
  Matrix& grad_buf(int id);

  std::vector<Node> nodes_;
  bool backward_done_ = false;
};

// Formula sugar; both operands must live on the same tape.
Var operator+(Var a, Var b);
Var operator-(Var a, Var b);
Var operator*(Var a, Var b);  // elementwise
Var matmul(Var a, Var b);
Var relu(Var a);
Var sigmoid(Var a);

}  // namespace graphmax
