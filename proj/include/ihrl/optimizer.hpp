#pragma once

#include <cmath>
#include <string>
#include <string_view>

#include "ihrl/errors.hpp"
#include "ihrl/mlp.hpp"

namespace ihrl {

enum class OptimizerKind { kSgd, kAdam };

inline std::string to_string(OptimizerKind kind) { return kind == OptimizerKind::kSgd ? "sgd" : "adam"; }
inline OptimizerKind optimizer_from_string(std::string_view s) {
  if (s == "sgd") return OptimizerKind::kSgd;
  if (s == "adam") return OptimizerKind::kAdam;
  throw ConfigError("unknown optimizer '" + std::string(s) + "'");
}

/// Plain SGD or Adam with optional global-norm gradient clipping.
template <typename Scalar>
class Optimizer {
 public:
  using Vector = typename Mlp<Scalar>::Vector;

  Optimizer() = default;
  Optimizer(OptimizerKind kind, double lr, Eigen::Index n, double max_grad_norm = 0.0)
      : kind_(kind), lr_(lr), max_grad_norm_(max_grad_norm) {
    if (kind_ == OptimizerKind::kAdam) {
      m_ = Vector::Zero(n);
      v_ = Vector::Zero(n);
    }
  }

  void step(Vector& params, Vector grad) {
    if (max_grad_norm_ > 0) {
      const double norm = double(grad.norm());
      if (norm > max_grad_norm_) grad *= Scalar(max_grad_norm_ / norm);
    }
    if (kind_ == OptimizerKind::kSgd) {
      params -= Scalar(lr_) * grad;
      return;
    }
    ++t_;
    m_ = Scalar(kBeta1) * m_ + Scalar(1 - kBeta1) * grad;
    v_ = Scalar(kBeta2) * v_ + Scalar(1 - kBeta2) * grad.cwiseProduct(grad);
    const double c1 = 1.0 - std::pow(kBeta1, double(t_));
    const double c2 = 1.0 - std::pow(kBeta2, double(t_));
    params.array() -= Scalar(lr_ / c1) * m_.array() / ((v_.array() / Scalar(c2)).sqrt() + Scalar(kEps));
  }

  OptimizerKind kind() const { return kind_; }
  double lr() const { return lr_; }
  double max_grad_norm() const { return max_grad_norm_; }
  long steps() const { return t_; }
  const Vector& first_moment() const { return m_; }
  const Vector& second_moment() const { return v_; }
  void restore(long t, Vector m, Vector v) {
    t_ = t;
    m_ = std::move(m);
    v_ = std::move(v);
  }

  bool operator==(const Optimizer& o) const {
    return kind_ == o.kind_ && lr_ == o.lr_ && max_grad_norm_ == o.max_grad_norm_ && t_ == o.t_ &&
           m_ == o.m_ && v_ == o.v_;
  }

 private:
  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEps = 1e-8;

  OptimizerKind kind_ = OptimizerKind::kSgd;
  double lr_ = 7e-4;
  double max_grad_norm_ = 0.0;
  long t_ = 0;
  Vector m_;
  Vector v_;
};

}  // namespace ihrl
