#include "dress/lstm.hpp"

#include <stdexcept>

namespace dress::nd {

LstmState lstm_step(Graph& g, LstmLayer& layer, Node* x, const LstmState& prev) {
  int h = layer.hidden;
  if (x->value.ndim() != 1 || x->value.dim(0) != layer.input_dim)
    throw std::invalid_argument("lstm_step: input shape mismatch");
  if (prev.h->value.dim(0) != h || prev.c->value.dim(0) != h)
    throw std::invalid_argument("lstm_step: state shape mismatch");
  Node* z = g.add_many({g.matvec(layer.wx, x), g.matvec(layer.wh, prev.h), g.param(layer.b)});
  Node* gate_i = g.sigmoid(g.slice(z, 0, h));
  Node* gate_f = g.sigmoid(g.slice(z, h, h));
  Node* gate_o = g.sigmoid(g.slice(z, 2 * h, h));
  Node* cand = g.tanh(g.slice(z, 3 * h, h));
  Node* c = g.add(g.mul(gate_f, prev.c), g.mul(gate_i, cand));
  Node* hidden = g.mul(gate_o, g.tanh(c));
  return {hidden, c};
}

LstmState lstm_zero_state(Graph& g, int hidden) {
  return {g.constant(Array::vec(hidden)), g.constant(Array::vec(hidden))};
}

std::vector<LstmState> LstmStack::zero_state(Graph& g) const {
  std::vector<LstmState> out;
  out.reserve(layers.size());
  for (const auto& l : layers) out.push_back(lstm_zero_state(g, l.hidden));
  return out;
}

std::vector<LstmState> LstmStack::step(Graph& g, Node* x, const std::vector<LstmState>& prev,
                                       double dropout_rate, bool train, Rng& rng) {
  if (prev.size() != layers.size()) throw std::invalid_argument("LstmStack::step: state depth mismatch");
  std::vector<LstmState> next;
  next.reserve(layers.size());
  Node* input = x;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    input = g.dropout(input, dropout_rate, train, rng);
    next.push_back(lstm_step(g, layers[l], input, prev[l]));
    input = next.back().h;
  }
  return next;
}

}  // namespace dress::nd
