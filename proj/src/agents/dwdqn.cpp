#include "dwpi/agents/dwdqn.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dwpi::agents {

namespace {

std::vector<std::size_t> network_shape(std::size_t obs, std::size_t k, const AgentHyperparams& hp) {
  std::vector<std::size_t> sizes{obs + k};
  sizes.insert(sizes.end(), hp.hidden.begin(), hp.hidden.end());
  sizes.push_back(envs::kActionCount);
  return sizes;
}

int argmax(const auto& column) {
  int best = 0;
  for (int a = 1; a < static_cast<int>(column.size()); ++a)
    if (column(a) > column(best)) best = a;
  return best;
}

}  // namespace

SparseObservation SparseObservation::from_dense(std::span<const double> dense) {
  SparseObservation s;
  for (std::size_t i = 0; i < dense.size(); ++i)
    if (dense[i] != 0.0) s.entries.emplace_back(static_cast<std::uint32_t>(i), dense[i]);
  return s;
}

void SparseObservation::scatter(std::span<double> dense) const {
  std::fill(dense.begin(), dense.end(), 0.0);
  for (const auto& [i, v] : entries) dense[i] = v;
}

ReplayMemory::ReplayMemory(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("replay capacity must be positive");
}

void ReplayMemory::push(Transition t) {
  if (data_.size() < capacity_) {
    data_.push_back(std::move(t));
  } else {
    data_[next_] = std::move(t);
  }
  next_ = (next_ + 1) % capacity_;
}

std::vector<std::size_t> ReplayMemory::sample(std::size_t batch, Rng& rng) const {
  if (data_.empty()) throw std::logic_error("sampling from empty replay memory");
  std::uniform_int_distribution<std::size_t> pick(0, data_.size() - 1);
  std::vector<std::size_t> idx(batch);
  for (auto& i : idx) i = pick(rng);
  return idx;
}

DwdqnAgent::DwdqnAgent(std::size_t observation_size, std::size_t objective_count, AgentHyperparams hp, Rng& rng)
    : DwdqnAgent(observation_size, objective_count, hp,
                 nn::Mlp::glorot(network_shape(observation_size, objective_count, hp), rng)) {}

DwdqnAgent::DwdqnAgent(std::size_t observation_size, std::size_t objective_count, AgentHyperparams hp,
                       nn::Mlp online)
    : obs_size_(observation_size),
      objectives_(objective_count),
      hp_(std::move(hp)),
      online_(std::move(online)),
      target_(online_),
      opt_(online_, nn::AdamConfig{.learning_rate = hp_.learning_rate}),
      replay_(hp_.replay_capacity) {
  if (online_.input_size() != obs_size_ + objectives_ || online_.output_size() != envs::kActionCount)
    throw std::invalid_argument("Q-network shape does not match environment");
}

nn::Vector DwdqnAgent::input(std::span<const double> observation, std::span<const double> weights) const {
  if (observation.size() != obs_size_ || weights.size() != objectives_)
    throw DomainError("DWDQN input dimension mismatch");
  nn::Vector x(obs_size_ + objectives_);
  for (std::size_t i = 0; i < obs_size_; ++i) x(i) = observation[i];
  for (std::size_t j = 0; j < objectives_; ++j) x(obs_size_ + j) = weights[j];
  return x;
}

std::vector<double> DwdqnAgent::q_values(std::span<const double> observation, const PreferenceVector& pref) const {
  const auto w = pref.effective_weights();
  const nn::Vector q = online_.forward(input(observation, w));
  return {q.data(), q.data() + q.size()};
}

int DwdqnAgent::greedy_action(std::span<const double> observation, std::span<const double> weights) const {
  return argmax(online_.forward(input(observation, weights)));
}

int DwdqnAgent::greedy_action(const envs::Environment& env, const PreferenceVector& pref) const {
  const auto obs = env.observation();
  return greedy_action(obs, pref.effective_weights());
}

double DwdqnAgent::learn(Rng& rng, const PreferenceSampler* relabel) {
  const std::size_t batch = hp_.batch_size;
  const auto idx = replay_.sample(batch, rng);
  const Eigen::Index in = static_cast<Eigen::Index>(obs_size_ + objectives_);
  std::vector<Eigen::Triplet<double>> cells, next_cells;
  std::vector<double> rewards(batch);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (std::size_t c = 0; c < batch; ++c) {
    const auto& t = replay_.at(idx[c]);
    const auto col = static_cast<int>(c);
    for (const auto& [i, v] : t.state.entries) cells.emplace_back(static_cast<int>(i), col, v);
    for (const auto& [i, v] : t.next_state.entries) next_cells.emplace_back(static_cast<int>(i), col, v);
    rewards[c] = t.reward;
    std::vector<double> fresh;
    const bool rescore = relabel && hp_.relabel_fraction > 0.0 && t.reward_vector.size() == objectives_ &&
                         coin(rng) < hp_.relabel_fraction;
    if (rescore) {
      fresh = (*relabel)(rng).effective_weights();
      rewards[c] = 0.0;
      for (std::size_t j = 0; j < objectives_; ++j) rewards[c] += fresh[j] * t.reward_vector[j];
    }
    const auto& w = rescore ? fresh : t.weights;
    for (std::size_t j = 0; j < objectives_; ++j) {
      if (w[j] == 0.0) continue;
      cells.emplace_back(static_cast<int>(obs_size_ + j), col, w[j]);
      next_cells.emplace_back(static_cast<int>(obs_size_ + j), col, w[j]);
    }
  }
  nn::SparseMatrix x(in, static_cast<Eigen::Index>(batch)), xn(in, static_cast<Eigen::Index>(batch));
  x.setFromTriplets(cells.begin(), cells.end());
  xn.setFromTriplets(next_cells.begin(), next_cells.end());

  nn::Tape tape;
  const nn::Matrix q = online_.forward_batch(x, tape);
  const nn::Matrix q_next = target_.forward_batch(xn);
  nn::Matrix q_select;
  if (hp_.double_q) q_select = online_.forward_batch(xn);

  nn::Matrix grad = nn::Matrix::Zero(q.rows(), q.cols());
  double loss = 0.0;
  for (std::size_t c = 0; c < batch; ++c) {
    const auto& t = replay_.at(idx[c]);
    double y = rewards[c];
    if (!t.terminal) {
      const int a = hp_.double_q ? argmax(q_select.col(c)) : argmax(q_next.col(c));
      y += hp_.gamma * q_next(a, c);
    }
    const double diff = q(t.action, c) - y;
    loss += diff * diff;
    // Huber loss with unit threshold.
    grad(t.action, c) = std::clamp(diff, -1.0, 1.0) / static_cast<double>(batch);
  }
  loss /= static_cast<double>(batch);
  if (!std::isfinite(loss))
    throw nn::DivergenceError("divergence: non-finite Q loss at gradient step " + std::to_string(gradient_steps_));

  opt_.step(online_, online_.backward(tape, grad));
  ++gradient_steps_;
  if (gradient_steps_ % hp_.target_sync == 0) target_ = online_;
  return loss;
}

DwdqnAgent train_dwdqn(envs::Environment& env, const AgentHyperparams& hp, const PreferenceSampler& sampler,
                       std::uint64_t seed, TrainingLog* log) {
  hp.validate();
  Rng init_rng(derive_seed(seed, "init"));
  Rng pref_rng(derive_seed(seed, "preference"));
  Rng act_rng(derive_seed(seed, "explore"));
  Rng batch_rng(derive_seed(seed, "replay"));
  const std::uint64_t env_seed = derive_seed(seed, "episode");
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<int> any_action(0, envs::kActionCount - 1);

  DwdqnAgent agent(env.observation_size(), env.objective_count(), hp, init_rng);
  std::vector<double> obs(env.observation_size()), next(env.observation_size());

  for (int ep = 0; ep < hp.episodes; ++ep) {
    const PreferenceVector pref = sampler(pref_rng);
    if (pref.size() != env.objective_count()) throw DomainError("sampled preference has wrong dimension");
    const auto w = pref.effective_weights();
    const double eps = epsilon_at(hp, ep);

    env.reset(derive_seed(env_seed, static_cast<std::uint64_t>(ep)));
    env.observe(obs);
    double util = 0.0;
    for (int t = 0; hp.max_steps == 0 || t < hp.max_steps; ++t) {
      const int a = coin(act_rng) < eps ? any_action(act_rng) : agent.greedy_action(obs, w);
      const auto res = env.step(a);
      double r = 0.0;
      for (std::size_t j = 0; j < w.size(); ++j) r += w[j] * res.reward[j];
      util += r;
      env.observe(next);
      agent.remember({SparseObservation::from_dense(obs), a, SparseObservation::from_dense(next), r, w, res.terminal,
                      hp.relabel_fraction > 0.0 ? res.reward : RewardVector{}});
      std::swap(obs, next);
      if (res.done) break;
    }
    if (log) log->episode_utility.push_back(util);

    if (ep + 1 > hp.threshold && agent.replay().size() >= hp.batch_size && hp.updates_per_episode > 0) {
      double loss = 0.0;
      for (int u = 0; u < hp.updates_per_episode; ++u) loss += agent.learn(batch_rng, &sampler);
      if (log) log->loss.push_back(loss / hp.updates_per_episode);
    }
  }
  return agent;
}

}  // namespace dwpi::agents
