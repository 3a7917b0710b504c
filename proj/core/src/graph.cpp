#include "dress/graph.hpp"

#include <cmath>
#include <stdexcept>

namespace dress::nd {

namespace {

void check_vector(const Node* n, const char* op) {
  if (n->value.ndim() != 1) throw std::invalid_argument(std::string(op) + ": expects a vector");
}

void accumulate(Array& dst, const Array& src) {
  double* d = dst.data();
  const double* s = src.data();
  for (std::size_t i = 0; i < dst.size(); ++i) d[i] += s[i];
}

}  // namespace

Node* Graph::make(Array value) {
  nodes_.emplace_back();
  Node* n = &nodes_.back();
  n->value = std::move(value);
  return n;
}

Array& Graph::ensure_grad(Node* n) {
  if (n->grad.empty()) n->grad = Array(n->value.shape());
  return n->grad;
}

Node* Graph::constant(Array v) { return make(std::move(v)); }

Node* Graph::param(Tensor& t) {
  Node* n = make(t.value);
  if (!grad_enabled_) return n;
  n->needs_grad = true;
  Tensor* tp = &t;
  n->back = [tp](Node& self) { accumulate(tp->grad, self.grad); };
  return n;
}

Node* Graph::embedding_row(Tensor& table, int row) {
  if (table.value.ndim() != 2) throw std::invalid_argument("embedding_row: table must be 2-d");
  if (row < 0 || row >= table.value.dim(0)) throw std::out_of_range("embedding_row: row out of range");
  int cols = table.value.dim(1);
  Array v = Array::vec(cols);
  const double* src = table.value.data() + static_cast<std::size_t>(row) * cols;
  for (int j = 0; j < cols; ++j) v[j] = src[j];
  Node* n = make(std::move(v));
  if (!grad_enabled_) return n;
  n->needs_grad = true;
  Tensor* tp = &table;
  n->back = [tp, row, cols](Node& self) {
    double* g = tp->grad.data() + static_cast<std::size_t>(row) * cols;
    const double* sg = self.grad.data();
    for (int j = 0; j < cols; ++j) g[j] += sg[j];
  };
  return n;
}

Node* Graph::matvec(Tensor& w, Node* x) {
  if (w.value.ndim() != 2) throw std::invalid_argument("matvec: weight must be 2-d");
  check_vector(x, "matvec");
  int m = w.value.dim(0), k = w.value.dim(1);
  if (x->value.dim(0) != k) throw std::invalid_argument("matvec: shape mismatch");
  Array y = Array::vec(m);
  const double* wd = w.value.data();
  const double* xd = x->value.data();
  for (int i = 0; i < m; ++i) {
    const double* row = wd + static_cast<std::size_t>(i) * k;
    double acc = 0.0;
    for (int j = 0; j < k; ++j) acc += row[j] * xd[j];
    y[i] = acc;
  }
  Node* n = make(std::move(y));
  if (!grad_enabled_) return n;
  n->needs_grad = true;
  Tensor* wp = &w;
  n->back = [wp, x, m, k](Node& self) {
    const double* gy = self.grad.data();
    const double* xd = x->value.data();
    double* gw = wp->grad.data();
    for (int i = 0; i < m; ++i) {
      double gi = gy[i];
      if (gi == 0.0) continue;
      double* grow = gw + static_cast<std::size_t>(i) * k;
      for (int j = 0; j < k; ++j) grow[j] += gi * xd[j];
    }
    if (x->needs_grad) {
      double* gx = ensure_grad(x).data();
      const double* wd = wp->value.data();
      for (int i = 0; i < m; ++i) {
        double gi = gy[i];
        if (gi == 0.0) continue;
        const double* row = wd + static_cast<std::size_t>(i) * k;
        for (int j = 0; j < k; ++j) gx[j] += gi * row[j];
      }
    }
  };
  return n;
}

Node* Graph::matvec(Node* w, Node* x) {
  if (w->value.ndim() != 2) throw std::invalid_argument("matvec: weight must be 2-d");
  check_vector(x, "matvec");
  int m = w->value.dim(0), k = w->value.dim(1);
  if (x->value.dim(0) != k) throw std::invalid_argument("matvec: shape mismatch");
  Array y = Array::vec(m);
  for (int i = 0; i < m; ++i) {
    const double* row = w->value.data() + static_cast<std::size_t>(i) * k;
    double acc = 0.0;
    for (int j = 0; j < k; ++j) acc += row[j] * x->value[j];
    y[i] = acc;
  }
  Node* n = make(std::move(y));
  if (!grad_enabled_ || (!w->needs_grad && !x->needs_grad)) return n;
  n->needs_grad = true;
  n->back = [w, x, m, k](Node& self) {
    const double* gy = self.grad.data();
    if (w->needs_grad) {
      double* gw = ensure_grad(w).data();
      const double* xd = x->value.data();
      for (int i = 0; i < m; ++i) {
        double gi = gy[i];
        if (gi == 0.0) continue;
        double* grow = gw + static_cast<std::size_t>(i) * k;
        for (int j = 0; j < k; ++j) grow[j] += gi * xd[j];
      }
    }
    if (x->needs_grad) {
      double* gx = ensure_grad(x).data();
      const double* wd = w->value.data();
      for (int i = 0; i < m; ++i) {
        double gi = gy[i];
        if (gi == 0.0) continue;
        const double* row = wd + static_cast<std::size_t>(i) * k;
        for (int j = 0; j < k; ++j) gx[j] += gi * row[j];
      }
    }
  };
  return n;
}

Node* Graph::matvec_transposed(Node* w, Node* x) {
  if (w->value.ndim() != 2) throw std::invalid_argument("matvec_transposed: weight must be 2-d");
  check_vector(x, "matvec_transposed");
  int n_rows = w->value.dim(0), d = w->value.dim(1);
  if (x->value.dim(0) != n_rows) throw std::invalid_argument("matvec_transposed: shape mismatch");
  Array y = Array::vec(d);
  for (int i = 0; i < n_rows; ++i) {
    double xi = x->value[i];
    if (xi == 0.0) continue;
    const double* row = w->value.data() + static_cast<std::size_t>(i) * d;
    for (int j = 0; j < d; ++j) y[j] += xi * row[j];
  }
  Node* n = make(std::move(y));
  if (!grad_enabled_ || (!w->needs_grad && !x->needs_grad)) return n;
  n->needs_grad = true;
  n->back = [w, x, n_rows, d](Node& self) {
    const double* gy = self.grad.data();
    if (w->needs_grad) {
      double* gw = ensure_grad(w).data();
      for (int i = 0; i < n_rows; ++i) {
        double xi = x->value[i];
        if (xi == 0.0) continue;
        double* grow = gw + static_cast<std::size_t>(i) * d;
        for (int j = 0; j < d; ++j) grow[j] += xi * gy[j];
      }
    }
    if (x->needs_grad) {
      double* gx = ensure_grad(x).data();
      for (int i = 0; i < n_rows; ++i) {
        const double* row = w->value.data() + static_cast<std::size_t>(i) * d;
        double acc = 0.0;
        for (int j = 0; j < d; ++j) acc += row[j] * gy[j];
        gx[i] += acc;
      }
    }
  };
  return n;
}

Node* Graph::stack_rows(const std::vector<Node*>& rows) {
  if (rows.empty()) throw std::invalid_argument("stack_rows: no rows");
  int d = rows[0]->value.dim(0);
  int n_rows = static_cast<int>(rows.size());
  Array m = Array::mat(n_rows, d);
  bool any_grad = false;
  for (int i = 0; i < n_rows; ++i) {
    check_vector(rows[i], "stack_rows");
    if (rows[i]->value.dim(0) != d) throw std::invalid_argument("stack_rows: ragged rows");
    for (int j = 0; j < d; ++j) m.at(i, j) = rows[i]->value[j];
    any_grad |= rows[i]->needs_grad;
  }
  Node* n = make(std::move(m));
  if (!grad_enabled_ || !any_grad) return n;
  n->needs_grad = true;
  std::vector<Node*> parents = rows;
  n->back = [parents, d](Node& self) {
    for (std::size_t i = 0; i < parents.size(); ++i) {
      if (!parents[i]->needs_grad) continue;
      double* g = ensure_grad(parents[i]).data();
      const double* sg = self.grad.data() + i * d;
      for (int j = 0; j < d; ++j) g[j] += sg[j];
    }
  };
  return n;
}

Node* Graph::add(Node* a, Node* b) { return add_many({a, b}); }

Node* Graph::add_many(const std::vector<Node*>& xs) {
  if (xs.empty()) throw std::invalid_argument("add_many: no inputs");
  Array y = xs[0]->value;
  bool any_grad = xs[0]->needs_grad;
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (!xs[i]->value.same_shape(y)) throw std::invalid_argument("add: shape mismatch");
    accumulate(y, xs[i]->value);
    any_grad |= xs[i]->needs_grad;
  }
  Node* n = make(std::move(y));
  if (!grad_enabled_ || !any_grad) return n;
  n->needs_grad = true;
  std::vector<Node*> parents = xs;
  n->back = [parents](Node& self) {
    for (Node* p : parents) {
      if (p->needs_grad) accumulate(ensure_grad(p), self.grad);
    }
  };
  return n;
}

Node* Graph::mul(Node* a, Node* b) {
  if (!a->value.same_shape(b->value)) throw std::invalid_argument("mul: shape mismatch");
  Array y = a->value;
  for (std::size_t i = 0; i < y.size(); ++i) y[i] *= b->value[i];
  Node* n = make(std::move(y));
  if (!grad_enabled_ || (!a->needs_grad && !b->needs_grad)) return n;
  n->needs_grad = true;
  n->back = [a, b](Node& self) {
    const double* g = self.grad.data();
    if (a->needs_grad) {
      double* ga = ensure_grad(a).data();
      for (std::size_t i = 0; i < self.grad.size(); ++i) ga[i] += g[i] * b->value[i];
    }
    if (b->needs_grad) {
      double* gb = ensure_grad(b).data();
      for (std::size_t i = 0; i < self.grad.size(); ++i) gb[i] += g[i] * a->value[i];
    }
  };
  return n;
}

Node* Graph::scale(Node* a, double k) {
  Array y = a->value;
  for (std::size_t i = 0; i < y.size(); ++i) y[i] *= k;
  Node* n = make(std::move(y));
  if (!grad_enabled_ || !a->needs_grad) return n;
  n->needs_grad = true;
  n->back = [a, k](Node& self) {
    double* ga = ensure_grad(a).data();
    for (std::size_t i = 0; i < self.grad.size(); ++i) ga[i] += k * self.grad[i];
  };
  return n;
}

Node* Graph::sigmoid(Node* a) {
  Array y = a->value;
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = 1.0 / (1.0 + std::exp(-y[i]));
  Node* n = make(std::move(y));
  if (!grad_enabled_ || !a->needs_grad) return n;
  n->needs_grad = true;
  n->back = [a](Node& self) {
    double* ga = ensure_grad(a).data();
    for (std::size_t i = 0; i < self.grad.size(); ++i) {
      double s = self.value[i];
      ga[i] += self.grad[i] * s * (1.0 - s);
    }
  };
  return n;
}

Node* Graph::tanh(Node* a) {
  Array y = a->value;
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = std::tanh(y[i]);
  Node* n = make(std::move(y));
  if (!grad_enabled_ || !a->needs_grad) return n;
  n->needs_grad = true;
  n->back = [a](Node& self) {
    double* ga = ensure_grad(a).data();
    for (std::size_t i = 0; i < self.grad.size(); ++i) {
      double t = self.value[i];
      ga[i] += self.grad[i] * (1.0 - t * t);
    }
  };
  return n;
}

Node* Graph::slice(Node* a, int offset, int len) {
  check_vector(a, "slice");
  if (offset < 0 || len <= 0 || offset + len > a->value.dim(0))
    throw std::out_of_range("slice: range out of bounds");
  Array y = Array::vec(len);
  for (int i = 0; i < len; ++i) y[i] = a->value[offset + i];
  Node* n = make(std::move(y));
  if (!grad_enabled_ || !a->needs_grad) return n;
  n->needs_grad = true;
  n->back = [a, offset, len](Node& self) {
    double* ga = ensure_grad(a).data();
    for (int i = 0; i < len; ++i) ga[offset + i] += self.grad[i];
  };
  return n;
}

Node* Graph::sum(Node* a) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a->value.size(); ++i) acc += a->value[i];
  Node* n = make(Array::scalar(acc));
  if (!grad_enabled_ || !a->needs_grad) return n;
  n->needs_grad = true;
  n->back = [a](Node& self) {
    double g = self.grad[0];
    double* ga = ensure_grad(a).data();
    for (std::size_t i = 0; i < a->value.size(); ++i) ga[i] += g;
  };
  return n;
}

Node* Graph::softmax(Node* a) {
  check_vector(a, "softmax");
  int d = a->value.dim(0);
  double mx = a->value[0];
  for (int i = 0; i < d; ++i) {
    if (std::isnan(a->value[i])) throw std::invalid_argument("softmax: NaN input");
    if (a->value[i] > mx) mx = a->value[i];
  }
  Array y = Array::vec(d);
  double z = 0.0;
  for (int i = 0; i < d; ++i) {
    y[i] = std::exp(a->value[i] - mx);
    z += y[i];
  }
  for (int i = 0; i < d; ++i) y[i] /= z;
  Node* n = make(std::move(y));
  if (!grad_enabled_ || !a->needs_grad) return n;
  n->needs_grad = true;
  n->back = [a, d](Node& self) {
    double dot = 0.0;
    for (int i = 0; i < d; ++i) dot += self.grad[i] * self.value[i];
    double* ga = ensure_grad(a).data();
    for (int i = 0; i < d; ++i) ga[i] += self.value[i] * (self.grad[i] - dot);
  };
  return n;
}

Node* Graph::log_softmax_pick(Node* logits, int index) {
  check_vector(logits, "log_softmax_pick");
  int d = logits->value.dim(0);
  if (index < 0 || index >= d) throw std::out_of_range("log_softmax_pick: index out of range");
  double mx = logits->value[0];
  for (int i = 0; i < d; ++i) {
    if (std::isnan(logits->value[i])) throw std::invalid_argument("log_softmax_pick: NaN input");
    if (logits->value[i] > mx) mx = logits->value[i];
  }
  double z = 0.0;
  for (int i = 0; i < d; ++i) z += std::exp(logits->value[i] - mx);
  double lse = mx + std::log(z);
  Node* n = make(Array::scalar(logits->value[index] - lse));
  if (!grad_enabled_ || !logits->needs_grad) return n;
  n->needs_grad = true;
  n->back = [logits, index, d, lse](Node& self) {
    double g = self.grad[0];
    double* ga = ensure_grad(logits).data();
    for (int i = 0; i < d; ++i) {
      double p = std::exp(logits->value[i] - lse);
      ga[i] += g * ((i == index ? 1.0 : 0.0) - p);
    }
  };
  return n;
}

Node* Graph::weighted_scalar_sum(const std::vector<Node*>& xs, const std::vector<double>& coeffs) {
  if (xs.size() != coeffs.size() || xs.empty())
    throw std::invalid_argument("weighted_scalar_sum: size mismatch");
  double acc = 0.0;
  bool any_grad = false;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i]->value.size() != 1) throw std::invalid_argument("weighted_scalar_sum: non-scalar term");
    acc += coeffs[i] * xs[i]->value[0];
    any_grad |= xs[i]->needs_grad;
  }
  Node* n = make(Array::scalar(acc));
  if (!grad_enabled_ || !any_grad) return n;
  n->needs_grad = true;
  std::vector<Node*> parents = xs;
  std::vector<double> cs = coeffs;
  n->back = [parents, cs](Node& self) {
    double g = self.grad[0];
    for (std::size_t i = 0; i < parents.size(); ++i) {
      if (parents[i]->needs_grad) ensure_grad(parents[i])[0] += g * cs[i];
    }
  };
  return n;
}

Node* Graph::dropout(Node* a, double rate, bool train, Rng& rng) {
  if (rate < 0.0 || rate >= 1.0) throw std::invalid_argument("dropout: rate must be in [0,1)");
  if (!train || rate == 0.0) return a;
  double keep = 1.0 - rate;
  double inv = 1.0 / keep;
  Array mask(a->value.shape());
  Array y = a->value;
  for (std::size_t i = 0; i < y.size(); ++i) {
    mask[i] = rng.next_double() < rate ? 0.0 : inv;
    y[i] *= mask[i];
  }
  Node* n = make(std::move(y));
  if (!grad_enabled_ || !a->needs_grad) return n;
  n->needs_grad = true;
  n->back = [a, m = std::move(mask)](Node& self) {
    double* ga = ensure_grad(a).data();
    for (std::size_t i = 0; i < self.grad.size(); ++i) ga[i] += self.grad[i] * m[i];
  };
  return n;
}

void Graph::backward(Node* loss) {
  if (!grad_enabled_) throw std::logic_error("backward: graph built with grads disabled");
  if (loss->value.size() != 1) throw std::invalid_argument("backward: loss must be scalar");
  for (Node& n : nodes_) n.grad = Array();
  ensure_grad(loss)[0] = 1.0;
  for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
    if (it->back && !it->grad.empty()) it->back(*it);
  }
}

void zero_grads(std::span<Tensor* const> params) {
  for (Tensor* p : params) p->grad.zero();
}

double grad_norm(std::span<Tensor* const> params) {
  double sq = 0.0;
  for (const Tensor* p : params) {
    for (std::size_t i = 0; i < p->grad.size(); ++i) sq += p->grad[i] * p->grad[i];
  }
  return std::sqrt(sq);
}

}  // namespace dress::nd
