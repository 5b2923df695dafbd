#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace igel {

enum class OptimizerKind { kSgd, kAdam };

/// First-order minimizer over a flat parameter span.
///
/// Adam keeps per-parameter first/second moment estimates with the usual
/// bias correction (beta1 0.9, beta2 0.999, eps 1e-8).
class Optimizer {
 public:
  Optimizer(OptimizerKind kind, double learning_rate, std::size_t size)
      : kind_(kind), lr_(learning_rate) {
    if (kind_ == OptimizerKind::kAdam) {
      m_.assign(size, 0.0);
      v_.assign(size, 0.0);
    }
  }

  /// params -= step(grad). `grad` is the gradient of the loss to minimize.
  void step(std::span<double> params, std::span<const double> grad) {
    update(grad, [&](std::size_t i, double delta) { params[i] -= delta; });
  }

  /// Advances the optimizer state and calls apply(i, delta) for every
  /// parameter, where the caller performs params[i] -= delta.
  template <typename Apply>
  void update(std::span<const double> grad, Apply&& apply) {
    if (kind_ == OptimizerKind::kSgd) {
      for (std::size_t i = 0; i < grad.size(); ++i) apply(i, lr_ * grad[i]);
      return;
    }
    ++t_;
    const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(t_));
    const double step = lr_ * std::sqrt(c2) / c1;
    const double eps = kEps * std::sqrt(c2);
    for (std::size_t i = 0; i < grad.size(); ++i) {
      m_[i] = kBeta1 * m_[i] + (1.0 - kBeta1) * grad[i];
      v_[i] = kBeta2 * v_[i] + (1.0 - kBeta2) * grad[i] * grad[i];
      apply(i, step * m_[i] / (std::sqrt(v_[i]) + eps));
    }
  }

  double learning_rate() const { return lr_; }

 private:
  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEps = 1e-8;

  OptimizerKind kind_;
  double lr_;
  long long t_ = 0;
  std::vector<double> m_;
  std::vector<double> v_;
};

}  // namespace igel
