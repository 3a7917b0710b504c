#pragma once

#include <deque>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "dress/array.hpp"
#include "dress/rng.hpp"

namespace dress::nd {

// A trainable parameter: value plus a gradient accumulator of the same shape.
// Gradients accumulate across backward passes until zero_grads() is called.
struct Tensor {
  std::string name;
  Array value;
  Array grad;

  Tensor() = default;
  Tensor(std::string n, Array v) : name(std::move(n)), value(std::move(v)), grad(value.shape()) {}

  void init_uniform(Rng& rng, double lo, double hi) {
    for (std::size_t i = 0; i < value.size(); ++i) value[i] = rng.uniform(lo, hi);
  }
};

struct Node {
  Array value;
  Array grad;  // allocated lazily during backward
  bool needs_grad = false;
  std::function<void(Node&)> back;  // empty for leaves and no-grad graphs
};

// Reverse-mode tape over dense arrays. Operations append nodes in evaluation
// order; backward() sweeps the tape once in reverse. Parameter-consuming ops
// reference Tensor storage directly (no copy) and accumulate into Tensor::grad.
// With grads disabled the same ops build value-only nodes, which is the
// inference path.
class Graph {
 public:
  explicit Graph(bool grad_enabled = true) : grad_enabled_(grad_enabled) {}

  bool grad_enabled() const { return grad_enabled_; }

  Node* constant(Array v);

  // Leaf that views a parameter; backward adds into t.grad.
  Node* param(Tensor& t);

  // Row `row` of a 2-d parameter table (embedding lookup).
  Node* embedding_row(Tensor& table, int row);

  Node* matvec(Tensor& w, Node* x);           // (m,n)·(n) -> (m)
  Node* matvec(Node* w, Node* x);             // node-valued matrix
  Node* matvec_transposed(Node* w, Node* x);  // (n,d)(n) -> (d), i.e. wᵀx

  // Rows (each shape (d)) stacked into an (n,d) matrix node.
  Node* stack_rows(const std::vector<Node*>& rows);

  Node* add(Node* a, Node* b);
  Node* add_many(const std::vector<Node*>& xs);
  Node* mul(Node* a, Node* b);  // elementwise
  Node* scale(Node* a, double k);
  Node* sigmoid(Node* a);
  Node* tanh(Node* a);
  Node* slice(Node* a, int offset, int len);  // 1-d contiguous view
  Node* sum(Node* a);                         // scalar

  // Numerically stable softmax over a vector; rejects NaN input.
  Node* softmax(Node* a);

  // log softmax(logits)[index] as a scalar; the stable path for NLL terms.
  Node* log_softmax_pick(Node* logits, int index);

  // Σ coeffs[i]·xs[i] over scalar nodes, coefficients constant.
  Node* weighted_scalar_sum(const std::vector<Node*>& xs, const std::vector<double>& coeffs);

  // Inverted dropout: train mode zeroes entries with probability `rate` and
  // scales survivors by 1/(1-rate); eval mode is the identity.
  Node* dropout(Node* a, double rate, bool train, Rng& rng);

  // Populates gradients of every reachable parameter for a scalar loss.
  void backward(Node* loss);

  std::size_t size() const { return nodes_.size(); }

 private:
  Node* make(Array value);
  static Array& ensure_grad(Node* n);

  std::deque<Node> nodes_;
  bool grad_enabled_;
};

void zero_grads(std::span<Tensor* const> params);
double grad_norm(std::span<Tensor* const> params);

}  // namespace dress::nd
