#pragma once

// Reference computations used by the unit and acceptance tests. Nothing here
// calls into the learners; each oracle works from the environment definition
// or from plain arithmetic.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <vector>

#include "ihrl/compression.hpp"
#include "ihrl/env.hpp"
#include "ihrl/tabular_worker.hpp"

namespace ihrl::ref {

/// Central differences of f at x.
inline std::vector<double> numeric_gradient(const std::function<double(const std::vector<double>&)>& f,
                                            std::vector<double> x, double eps = 1e-6) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = x[i];
    x[i] = saved + eps;
    const double up = f(x);
    x[i] = saved - eps;
    const double down = f(x);
    x[i] = saved;
    g[i] = (up - down) / (2 * eps);
  }
  return g;
}

/// ||a - b|| / max(||a|| + ||b||, floor)
inline double relative_error(const std::vector<double>& a, const std::vector<double>& b, double floor = 1e-12) {
  double diff = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return std::sqrt(diff) / std::max(std::sqrt(na) + std::sqrt(nb), floor);
}

/// One enumerated option MDP M_{z,z'} on the noise-free invariant kernel:
/// interior cells of z, exits to z' pay +0.8, exits elsewhere -0.1.
struct OptionMdp {
  struct Outcome {
    Cell next;
    double reward = 0.0;
    bool terminal = false;
  };
  std::vector<Cell> states;
  std::map<Cell, std::array<Outcome, kNumActions>> table;
};

inline OptionMdp enumerate_option_mdp(const GridEnv& env, const Compression& f, RegionId z, RegionId target) {
  OptionMdp mdp;
  for (int y = 0; y < env.height(); ++y)
    for (int x = 0; x < env.width(); ++x) {
      const Cell c{x, y};
      if (!env.map().floor(c) || f(c) != z) continue;
      mdp.states.push_back(c);
      auto& row = mdp.table[c];
      for (int a = 0; a < kNumActions; ++a) {
        const Cell n = env.invariant_move(c, a);
        if (f(n) == z) {
          row[std::size_t(a)] = {n, 0.0, false};
        } else {
          row[std::size_t(a)] = {n, f(n) == target ? 0.8 : -0.1, true};
        }
      }
    }
  return mdp;
}

/// Edges (z, z') with a one-move crossing on the invariant kernel.
inline std::vector<std::pair<RegionId, RegionId>> enumerate_edges(const GridEnv& env, const Compression& f) {
  std::vector<std::pair<RegionId, RegionId>> edges;
  for (int y = 0; y < env.height(); ++y)
    for (int x = 0; x < env.width(); ++x) {
      const Cell c{x, y};
      if (!env.map().floor(c)) continue;
      for (int a = 0; a < kNumActions; ++a) {
        const Cell n = env.invariant_move(c, a);
        if (f(n) == f(c)) continue;
        const std::pair e{f(c), f(n)};
        if (std::find(edges.begin(), edges.end(), e) == edges.end()) edges.push_back(e);
      }
    }
  std::sort(edges.begin(), edges.end());
  return edges;
}

using QTable = std::map<Cell, std::array<double, kNumActions>>;

inline QTable value_iteration(const OptionMdp& mdp, double gamma, double tol = 1e-14) {
  QTable q;
  for (Cell s : mdp.states) q[s].fill(0.0);
  for (int sweep = 0; sweep < 100000; ++sweep) {
    double delta = 0;
    for (Cell s : mdp.states)
      for (int a = 0; a < kNumActions; ++a) {
        const auto& o = mdp.table.at(s)[std::size_t(a)];
        const double boot = o.terminal ? 0.0 : *std::max_element(q[o.next].begin(), q[o.next].end());
        const double v = o.reward + gamma * boot;
        delta = std::max(delta, std::abs(v - q[s][std::size_t(a)]));
        q[s][std::size_t(a)] = v;
      }
    if (delta < tol) break;
  }
  return q;
}

/// Sweeps tabular updates over every (s, a) of the enumerated MDP with a
/// learning rate that decays from 1 towards `alpha_floor`.
inline void train_by_sweeps(TabularWorker& w, const OptionMdp& mdp, int sweeps, double alpha_floor = 0.5) {
  for (int k = 0; k < sweeps; ++k) {
    w.config().alpha = std::max(alpha_floor, 1.0 / (1.0 + 0.1 * k));
    for (Cell s : mdp.states)
      for (int a = 0; a < kNumActions; ++a) {
        const auto& o = mdp.table.at(s)[std::size_t(a)];
        w.update(s, a, o.reward, o.next, o.terminal);
      }
  }
}

inline double sup_norm(const TabularWorker& w, const QTable& q) {
  double err = 0;
  for (const auto& [s, row] : q)
    for (int a = 0; a < kNumActions; ++a) err = std::max(err, std::abs(w.q(s, a) - row[std::size_t(a)]));
  return err;
}

/// Deterministic SMDP: from state i, option j leads to next[i][j] after
/// duration[i][j] steps with discounted reward reward[i][j]; terminal[i][j]
/// ends the episode.
struct ChainSmdp {
  std::vector<std::vector<int>> next;
  std::vector<std::vector<int>> duration;
  std::vector<std::vector<double>> reward;
  std::vector<std::vector<bool>> terminal;
};

inline std::vector<std::vector<double>> smdp_value_iteration(const ChainSmdp& m, double gamma, double tol = 1e-14) {
  std::vector<std::vector<double>> q(m.next.size());
  for (std::size_t i = 0; i < q.size(); ++i) q[i].assign(m.next[i].size(), 0.0);
  for (int sweep = 0; sweep < 100000; ++sweep) {
    double delta = 0;
    for (std::size_t i = 0; i < q.size(); ++i)
      for (std::size_t j = 0; j < q[i].size(); ++j) {
        double boot = 0;
        if (!m.terminal[i][j]) {
          const auto& row = q[std::size_t(m.next[i][j])];
          boot = *std::max_element(row.begin(), row.end());
        }
        const double v = m.reward[i][j] + std::pow(gamma, m.duration[i][j]) * boot;
        delta = std::max(delta, std::abs(v - q[i][j]));
        q[i][j] = v;
      }
    if (delta < tol) break;
  }
  return q;
}

}  // namespace ihrl::ref
