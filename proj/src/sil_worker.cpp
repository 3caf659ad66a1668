#include "ihrl/sil_worker.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#if defined(__GLIBC__)
#include <malloc.h>
#endif

#include "ihrl/sil_losses.hpp"

namespace ihrl {

namespace {

std::vector<int> layer_sizes(int input, const std::vector<int>& hidden, int output) {
  std::vector<int> sizes{input};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(output);
  return sizes;
}

// Batch matrices (64 x 512 floats) sit just above glibc's mmap threshold, so
// every update would otherwise map and unmap fresh pages.
void keep_batch_buffers_on_heap() {
#if defined(__GLIBC__)
  static std::once_flag once;
  std::call_once(once, [] {
    mallopt(M_MMAP_THRESHOLD, 64 << 20);
    mallopt(M_TRIM_THRESHOLD, 256 << 20);
  });
#endif
}

}  // namespace

SilWorker::SilWorker(SilConfig config, ObservationEncoder encoder, std::uint64_t seed)
    : config_(std::move(config)),
      encoder_(encoder),
      policy_(layer_sizes(encoder.dim(), config_.hidden, kNumActions)),
      value_(layer_sizes(encoder.dim(), config_.hidden, 1)),
      replay_(config_.capacity, config_.priority_alpha, config_.priority_floor),
      rng_(seed) {
  if (config_.n_step < 1) throw ConfigError("n-step must be at least 1");
  if (config_.sil_batch < 1) throw ConfigError("SIL batch must be at least 1");
  keep_batch_buffers_on_heap();
  // small output layer keeps the initial policy close to uniform
  policy_.init(rng_, 0.01);
  value_.init(rng_, 1.0);
  policy_opt_ = Optimizer<Scalar>(config_.optimizer, config_.lr, policy_.num_params(),
                                  config_.max_grad_norm);
  value_opt_ = Optimizer<Scalar>(config_.optimizer, config_.lr, value_.num_params(),
                                 config_.max_grad_norm);
}

SilWorker::Matrix SilWorker::encode_batch(const std::vector<WorkerObs>& obs) const {
  Matrix m(encoder_.dim(), Eigen::Index(obs.size()));
  for (std::size_t i = 0; i < obs.size(); ++i) encoder_.encode(obs[i], m.col(Eigen::Index(i)).data());
  return m;
}

std::vector<double> SilWorker::action_probabilities(const WorkerObs& obs) const {
  const Matrix probs = softmax_columns<Scalar>(policy_.forward(encode_batch({obs})));
  std::vector<double> out(kNumActions);
  for (int a = 0; a < kNumActions; ++a) out[static_cast<std::size_t>(a)] = probs(a, 0);
  return out;
}

double SilWorker::state_value(const WorkerObs& obs) const {
  return value_.forward(encode_batch({obs}))(0, 0);
}

int SilWorker::act(const WorkerObs& obs, bool greedy, Rng& rng) const {
  const std::vector<double> probs = action_probabilities(obs);
  if (greedy) return int(std::max_element(probs.begin(), probs.end()) - probs.begin());
  double u = uniform01(rng);
  for (int a = 0; a < kNumActions; ++a) {
    u -= probs[static_cast<std::size_t>(a)];
    if (u < 0) return a;
  }
  return kNumActions - 1;
}

void SilWorker::observe(const WorkerStep& step, bool /*defer*/) {
  rollout_.push_back(step);
  episode_.push_back(step);
  if (int(rollout_.size()) >= config_.n_step || step.terminal || step.truncated) {
    update_on_policy();
    for (int k = 0; k < config_.sil_updates; ++k) update_self_imitation();
  }
}

void SilWorker::update_on_policy() {
  if (rollout_.empty()) return;
  std::vector<WorkerObs> obs;
  std::vector<int> actions;
  obs.reserve(rollout_.size());
  for (const auto& s : rollout_) {
    obs.push_back(s.obs);
    actions.push_back(s.action);
  }
  const Matrix x = encode_batch(obs);
  const WorkerStep& last = rollout_.back();
  double ret = last.terminal ? 0.0 : state_value(last.next_obs);
  std::vector<double> returns(rollout_.size());
  for (std::size_t i = rollout_.size(); i-- > 0;) {
    ret = rollout_[i].reward + config_.gamma * ret;
    returns[i] = ret;
  }
  const Matrix v = value_.forward(x);
  std::vector<double> advantages(returns.size());
  for (std::size_t i = 0; i < returns.size(); ++i) advantages[i] = returns[i] - v(0, Eigen::Index(i));

  auto pg = policy_gradient_term(policy_, x, actions, advantages);
  auto ent = entropy_term(policy_, x, config_.entropy);
  auto vt = value_term(value_, x, returns, {}, false, 1.0);
  policy_opt_.step(policy_.params(), pg.grad + ent.grad);
  value_opt_.step(value_.params(), vt.grad);
  rollout_.clear();
  ++updates_;
}

void SilWorker::update_self_imitation() {
  if (replay_.empty()) return;
  const auto batch =
      replay_.sample(static_cast<std::size_t>(config_.sil_batch), config_.priority_beta, rng_);
  Matrix x(encoder_.dim(), Eigen::Index(batch.indices.size()));
  std::vector<int> actions(batch.indices.size());
  std::vector<double> returns(batch.indices.size());
  for (std::size_t i = 0; i < batch.indices.size(); ++i) {
    const auto& e = replay_.entry(batch.indices[i]);
    std::copy(e.obs.begin(), e.obs.end(), x.col(Eigen::Index(i)).data());
    actions[i] = e.action;
    returns[i] = e.ret;
  }
  auto loss = sil_loss(policy_, value_, x, actions, returns, batch.weights, config_.sil_policy_weight,
                       config_.sil_value_weight);
  policy_opt_.step(policy_.params(), loss.policy.grad);
  value_opt_.step(value_.params(), loss.value.grad);
  for (std::size_t i = 0; i < batch.indices.size(); ++i) replay_.update(batch.indices[i], loss.clipped[i]);
}

void SilWorker::add_episode(const std::vector<WorkerStep>& episode) {
  if (episode.empty()) return;
  std::vector<WorkerObs> obs;
  obs.reserve(episode.size());
  for (const auto& s : episode) obs.push_back(s.obs);
  const Matrix x = encode_batch(obs);
  const Matrix v = value_.forward(x);
  const WorkerStep& last = episode.back();
  double ret = (last.truncated && !last.terminal) ? state_value(last.next_obs) : 0.0;
  std::vector<double> returns(episode.size());
  for (std::size_t i = episode.size(); i-- > 0;) {
    ret = episode[i].reward + config_.gamma * ret;
    returns[i] = ret;
  }
  for (std::size_t i = 0; i < episode.size(); ++i) {
    PrioritizedReplay::Entry entry;
    entry.obs.assign(x.col(Eigen::Index(i)).data(), x.col(Eigen::Index(i)).data() + x.rows());
    entry.action = episode[i].action;
    entry.ret = returns[i];
    replay_.add(std::move(entry), std::max(returns[i] - double(v(0, Eigen::Index(i))), 0.0));
  }
}

std::optional<DeferredCredit> SilWorker::end_episode(bool defer) {
  if (!rollout_.empty()) {
    update_on_policy();
    for (int k = 0; k < config_.sil_updates; ++k) update_self_imitation();
  }
  if (episode_.empty()) return std::nullopt;
  std::vector<WorkerStep> episode = std::move(episode_);
  episode_.clear();
  if (defer) return DeferredCredit{std::move(episode)};
  add_episode(episode);
  return std::nullopt;
}

void SilWorker::credit(const DeferredCredit& deferred, double bonus) {
  if (deferred.trajectory.empty()) return;
  std::vector<WorkerStep> episode = deferred.trajectory;
  episode.back().reward += bonus;
  add_episode(episode);
}

bool SilWorker::operator==(const SilWorker& o) const {
  return config_ == o.config_ && encoder_ == o.encoder_ && policy_ == o.policy_ && value_ == o.value_ &&
         policy_opt_ == o.policy_opt_ && value_opt_ == o.value_opt_;
}

}  // namespace ihrl
