#pragma once

#include <functional>
#include <vector>

#include "mompo/tensor.hpp"

namespace mompo {

class Tape;

// Handle to a tape node. Valid only for the tape that produced it, until the
// next clear().
struct Var {
  int id = -1;
  bool valid() const { return id >= 0; }
};

// Recorded-tape reverse mode over a fixed op vocabulary: matmul, add/sub/mul,
// elementwise activations, reductions, log, exp, softmax, layer norm.
// Reductions accumulate in 64-bit.
class Tape {
 public:
  Var leaf(const DenseArray& value, bool needs_grad);
  Var constant(const DenseArray& value) { return leaf(value, false); }
  Var constant_scalar(float v) { return leaf(DenseArray::scalar(v), false); }

  const DenseArray& value(Var v) const { return nodes_[v.id].value; }
  // Gradient of the last backward() loss w.r.t. v; zeros if unreached.
  const DenseArray& grad(Var v) const;

  Var matmul(Var a, Var b);            // [m,k] x [k,n] -> [m,n]
  Var add(Var a, Var b);               // same shape, or b a row vector broadcast over a's rows
  Var sub(Var a, Var b);               // same shape
  Var mul(Var a, Var b);               // elementwise, same shape
  Var scale(Var a, float c);
  Var add_scalar(Var a, float c);
  Var neg(Var a) { return scale(a, -1.0f); }

  Var relu(Var a);
  Var elu(Var a);                      // alpha = 1
  Var tanh(Var a);
  Var softplus(Var a);
  Var exp(Var a);
  Var log(Var a);
  Var square(Var a);

  Var sum_rows(Var a);                 // [m,n] -> [m]
  Var sum_all(Var a);                  // -> scalar
  Var mean_all(Var a);                 // -> scalar

  Var log_softmax_rows(Var logits);    // [m,n] -> [m,n]
  // Per-row normalization to zero mean / unit variance, then affine with
  // gain/offset (row vectors). normalized_out, if given, receives the
  // pre-affine normalized value node.
  Var layer_norm(Var x, Var gain, Var offset, Var* normalized_out = nullptr);

  // Reverse sweep from a scalar loss. Rejects non-scalar loss nodes.
  void backward(Var loss);

  void clear();
  size_t node_count() const { return nodes_.size(); }

  static constexpr float kLayerNormEps = 1e-5f;

 private:
  struct Node {
    DenseArray value;
    DenseArray grad;
    bool needs_grad = false;
    bool grad_set = false;
    std::function<void(Tape&, int)> back;  // pulls this node's grad into parents
  };

  int push(DenseArray value, bool needs_grad, std::function<void(Tape&, int)> back);
  DenseArray& grad_buf(int id);
  void accumulate(int id, const DenseArray& g);
  bool needs(Var v) const { return nodes_[v.id].needs_grad; }

  std::vector<Node> nodes_;
  DenseArray zero_scratch_;

  friend struct TapeTestPeer;
};

}  // namespace mompo
