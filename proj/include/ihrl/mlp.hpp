#pragma once

#include <Eigen/Core>
#include <cmath>
#include <string>
#include <vector>

#include "ihrl/errors.hpp"
#include "ihrl/random.hpp"

namespace ihrl {

/// Fully connected network with ReLU hidden layers and a linear output.
/// Inputs are column-major batches (features x batch). All weights and
/// biases live in one flat parameter vector so optimizers and gradient
/// checks can treat the network as a point in R^n.
template <typename Scalar>
class Mlp {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  struct Cache {
    std::vector<Matrix> inputs;  // input of each layer
  };

  Mlp() = default;

  /// sizes = {input, hidden..., output}; parameters start at zero.
  explicit Mlp(std::vector<int> sizes) : sizes_(std::move(sizes)) {
    if (sizes_.size() < 2) throw UsageError("an MLP needs at least an input and an output size");
    Eigen::Index total = 0;
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
      if (sizes_[l] < 1 || sizes_[l + 1] < 1) throw UsageError("MLP layer sizes must be positive");
      offsets_.push_back(total);
      total += Eigen::Index(sizes_[l + 1]) * sizes_[l] + sizes_[l + 1];
    }
    params_ = Vector::Zero(total);
  }

  /// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights, zero biases. The last
  /// layer is scaled by `output_scale`.
  void init(Rng& rng, double output_scale = 1.0) {
    for (std::size_t l = 0; l < layers(); ++l) {
      const double bound = 1.0 / std::sqrt(double(sizes_[l])) *
                           (l + 1 == layers() ? output_scale : 1.0);
      std::uniform_real_distribution<double> dist(-bound, bound);
      auto w = weight(l);
      for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = static_cast<Scalar>(dist(rng));
      bias(l).setZero();
    }
  }

  std::size_t layers() const { return offsets_.size(); }
  int input_dim() const { return sizes_.front(); }
  int output_dim() const { return sizes_.back(); }
  const std::vector<int>& sizes() const { return sizes_; }
  Eigen::Index num_params() const { return params_.size(); }
  Vector& params() { return params_; }
  const Vector& params() const { return params_; }

  Eigen::Map<Matrix> weight(std::size_t l) {
    return {params_.data() + offsets_[l], sizes_[l + 1], sizes_[l]};
  }
  Eigen::Map<const Matrix> weight(std::size_t l) const {
    return {params_.data() + offsets_[l], sizes_[l + 1], sizes_[l]};
  }
  Eigen::Map<Vector> bias(std::size_t l) {
    return {params_.data() + offsets_[l] + Eigen::Index(sizes_[l + 1]) * sizes_[l], sizes_[l + 1]};
  }
  Eigen::Map<const Vector> bias(std::size_t l) const {
    return {params_.data() + offsets_[l] + Eigen::Index(sizes_[l + 1]) * sizes_[l], sizes_[l + 1]};
  }

  Matrix forward(const Matrix& x) const {
    Cache unused;
    return forward(x, unused, false);
  }

  Matrix forward(const Matrix& x, Cache& cache, bool keep = true) const {
    if (x.rows() != input_dim())
      throw UsageError("MLP input has " + std::to_string(x.rows()) + " features, expected " +
                       std::to_string(input_dim()));
    if (keep) cache.inputs.clear();
    Matrix a = x;
    for (std::size_t l = 0; l < layers(); ++l) {
      if (keep) cache.inputs.push_back(a);
      Matrix z = weight(l) * a;
      z.colwise() += bias(l);
      if (l + 1 < layers()) z = z.cwiseMax(Scalar(0));
      a = std::move(z);
    }
    return a;
  }

  /// Gradient of a loss with respect to all parameters, given dL/d(output).
  Vector backward(const Cache& cache, const Matrix& d_out) const {
    if (cache.inputs.size() != layers()) throw UsageError("backward without a forward cache");
    if (d_out.rows() != output_dim() || d_out.cols() != cache.inputs.front().cols())
      throw UsageError("output gradient has the wrong shape");
    Vector grad = Vector::Zero(num_params());
    Matrix dz = d_out;
    for (std::size_t l = layers(); l-- > 0;) {
      const Matrix& input = cache.inputs[l];
      Eigen::Map<Matrix> gw(grad.data() + offsets_[l], sizes_[l + 1], sizes_[l]);
      Eigen::Map<Vector> gb(grad.data() + offsets_[l] + Eigen::Index(sizes_[l + 1]) * sizes_[l],
                            sizes_[l + 1]);
      gw.noalias() = dz * input.transpose();
      gb = dz.rowwise().sum();
      if (l == 0) break;
      Matrix da = weight(l).transpose() * dz;
      // input of layer l is relu(z_{l-1}); its derivative is 1 where the input is positive
      dz = da.cwiseProduct((input.array() > Scalar(0)).template cast<Scalar>().matrix());
    }
    return grad;
  }

  bool operator==(const Mlp& other) const {
    return sizes_ == other.sizes_ && params_ == other.params_;
  }

 private:
  std::vector<int> sizes_;
  std::vector<Eigen::Index> offsets_;
  Vector params_;
};

}  // namespace ihrl
