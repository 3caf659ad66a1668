#pragma once

#include <functional>
#include <vector>

#include "ihrl/mlp.hpp"
#include "ihrl/random.hpp"
#include "support/oracles.hpp"

namespace ihrl::ref {

using Net = Mlp<double>;

/// Entries uniform in [-1, 1).
inline Net::Matrix random_matrix(int rows, int cols, Rng& rng) {
  Net::Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = uniform01(rng) * 2 - 1;
  return m;
}

inline std::vector<double> to_std(const Net::Vector& v) { return {v.data(), v.data() + v.size()}; }

/// Finite-difference gradient of `loss()` with respect to the parameters of
/// `net`; the parameters are restored afterwards.
inline std::vector<double> fd_gradient(Net& net, const std::function<double()>& loss) {
  const Net::Vector saved = net.params();
  auto f = [&](const std::vector<double>& x) {
    net.params() = Eigen::Map<const Net::Vector>(x.data(), Eigen::Index(x.size()));
    return loss();
  };
  auto g = numeric_gradient(f, to_std(saved));
  net.params() = saved;
  return g;
}

}  // namespace ihrl::ref
