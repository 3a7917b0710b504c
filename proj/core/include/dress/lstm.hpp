#pragma once

#include <string>
#include <vector>

#include "dress/graph.hpp"

namespace dress::nd {

// One LSTM layer with fused gate parameters. Rows of wx/wh hold the four
// gates in i, f, o, g order (input, forget, output, candidate).
struct LstmLayer {
  int input_dim = 0;
  int hidden = 0;
  Tensor wx;  // (4h, input_dim)
  Tensor wh;  // (4h, hidden)
  Tensor b;   // (4h)

  LstmLayer() = default;
  LstmLayer(const std::string& name, int in_dim, int hid)
      : input_dim(in_dim),
        hidden(hid),
        wx(name + ".wx", Array::mat(4 * hid, in_dim)),
        wh(name + ".wh", Array::mat(4 * hid, hid)),
        b(name + ".b", Array::vec(4 * hid)) {}

  void init_uniform(Rng& rng, double lo, double hi) {
    wx.init_uniform(rng, lo, hi);
    wh.init_uniform(rng, lo, hi);
    b.init_uniform(rng, lo, hi);
  }

  std::vector<Tensor*> params() { return {&wx, &wh, &b}; }
};

struct LstmState {
  Node* h = nullptr;
  Node* c = nullptr;
};

// Standard gate equations: c = f⊙c_prev + i⊙g, h = o⊙tanh(c).
LstmState lstm_step(Graph& g, LstmLayer& layer, Node* x, const LstmState& prev);

LstmState lstm_zero_state(Graph& g, int hidden);

// A stack of LSTM layers. Dropout is applied to non-recurrent connections
// only: the input of every layer, in train mode.
struct LstmStack {
  std::vector<LstmLayer> layers;

  LstmStack() = default;
  LstmStack(const std::string& name, int num_layers, int input_dim, int hidden) {
    for (int l = 0; l < num_layers; ++l) {
      layers.emplace_back(name + ".l" + std::to_string(l), l == 0 ? input_dim : hidden, hidden);
    }
  }

  int hidden() const { return layers.empty() ? 0 : layers.front().hidden; }
  int depth() const { return static_cast<int>(layers.size()); }

  void init_uniform(Rng& rng, double lo, double hi) {
    for (auto& l : layers) l.init_uniform(rng, lo, hi);
  }

  std::vector<Tensor*> params() {
    std::vector<Tensor*> out;
    for (auto& l : layers) {
      for (Tensor* t : l.params()) out.push_back(t);
    }
    return out;
  }

  std::vector<LstmState> zero_state(Graph& g) const;

  // Advances every layer one step; returns the new per-layer states. The top
  // state is states.back().h.
  std::vector<LstmState> step(Graph& g, Node* x, const std::vector<LstmState>& prev, double dropout_rate,
                              bool train, Rng& rng);
};

}  // namespace dress::nd
