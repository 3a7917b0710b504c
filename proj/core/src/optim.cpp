#include "dress/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace dress::nd {

double clip_gradients(std::span<Tensor* const> params, double max_norm) {
  if (max_norm <= 0.0) throw std::invalid_argument("clip_gradients: max_norm must be positive");
  double norm = grad_norm(params);
  if (norm > max_norm) {
    double s = max_norm / norm;
    for (Tensor* p : params) {
      for (std::size_t i = 0; i < p->grad.size(); ++i) p->grad[i] *= s;
    }
  }
  return norm;
}

void sgd_step(std::span<Tensor* const> params, double lr) {
  if (lr <= 0.0) throw std::invalid_argument("sgd_step: lr must be positive");
  for (Tensor* p : params) {
    for (std::size_t i = 0; i < p->value.size(); ++i) p->value[i] -= lr * p->grad[i];
  }
}

void Adam::init(std::span<Tensor* const> params) {
  m_.clear();
  v_.clear();
  t_ = 0;
  for (const Tensor* p : params) {
    m_.emplace_back(p->value.shape());
    v_.emplace_back(p->value.shape());
  }
}

void Adam::step(std::span<Tensor* const> params) {
  if (params.size() != m_.size()) throw std::invalid_argument("Adam::step: parameter set mismatch");
  ++t_;
  double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t k = 0; k < params.size(); ++k) {
    Tensor* p = params[k];
    if (!m_[k].same_shape(p->value)) throw std::invalid_argument("Adam::step: shape mismatch");
    double* m = m_[k].data();
    double* v = v_[k].data();
    double* w = p->value.data();
    const double* g = p->grad.data();
    for (std::size_t i = 0; i < p->value.size(); ++i) {
      m[i] = beta1_ * m[i] + (1.0 - beta1_) * g[i];
      v[i] = beta2_ * v[i] + (1.0 - beta2_) * g[i] * g[i];
      double mhat = m[i] / bc1;
      double vhat = v[i] / bc2;
      w[i] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
    }
  }
}

void Adam::restore(std::int64_t t, std::vector<Array> m, std::vector<Array> v) {
  t_ = t;
  m_ = std::move(m);
  v_ = std::move(v);
}

}  // namespace dress::nd
