#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dress/graph.hpp"

namespace dress::nd {

// Rescales all gradients by max_norm/g when the global L2 norm g exceeds
// max_norm. Returns the pre-clip norm.
double clip_gradients(std::span<Tensor* const> params, double max_norm);

// param <- param - lr * grad
void sgd_step(std::span<Tensor* const> params, double lr);

// Adam with bias correction. Moment accumulators are positional, so the
// parameter list must be identical (order and shapes) on every call.
class Adam {
 public:
  Adam() = default;
  Adam(double lr, double beta1, double beta2, double eps = 1e-8)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

  void init(std::span<Tensor* const> params);
  bool initialized() const { return !m_.empty(); }
  void step(std::span<Tensor* const> params);

  double lr() const { return lr_; }
  std::int64_t steps() const { return t_; }

  const std::vector<Array>& first_moments() const { return m_; }
  const std::vector<Array>& second_moments() const { return v_; }

  // Serialization hooks for checkpoint resume.
  void restore(std::int64_t t, std::vector<Array> m, std::vector<Array> v);

 private:
  double lr_ = 0.001;
  double beta1_ = 0.9;
  double beta2_ = 0.999;
  double eps_ = 1e-8;
  std::int64_t t_ = 0;
  std::vector<Array> m_;
  std::vector<Array> v_;
};

}  // namespace dress::nd
