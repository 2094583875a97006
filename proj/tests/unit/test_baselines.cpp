#include <cmath>
#include <random>

#include "doctest.h"
#include "dwpi/agents/dwdqn.hpp"
#include "dwpi/agents/dwtq.hpp"
#include "dwpi/baselines/mwal.hpp"
#include "dwpi/baselines/projection.hpp"
#include "dwpi/envs/cdst.hpp"
#include "dwpi/envs/pareto.hpp"

using namespace dwpi;
using namespace dwpi::baselines;
using namespace dwpi::envs;

namespace {

PreferenceVector tw(double w) { return PreferenceVector({1 - w, w}); }

agents::AgentHyperparams cdst_hp() {
  agents::AgentHyperparams hp;
  hp.episodes = 1500;
  return hp;
}

std::vector<Trajectory> expert_demos(double w, int n) {
  CdstEnv env(default_spec(EnvName::Cdst));
  const auto agent = dwtq_trainer(env.spec(), cdst_hp())(tw(w), 5);
  return agents::rollout(*agent, env, tw(w), n, 9);
}

FeatureScaler cdst_scaler(std::span<const Trajectory> demos) {
  CdstEnv env(default_spec(EnvName::Cdst));
  const std::vector<std::vector<double>> extra{expert_mu(demos, 1.0).mu};
  return FeatureScaler::from_random_policy(env, 1.0, 3, extra);
}

}  // namespace

TEST_CASE("feature expectation of a deterministic policy") {
  CdstEnv env(default_spec(EnvName::Cdst));
  const auto agent = dwtq_trainer(env.spec(), cdst_hp())(tw(0.9), 1);
  const auto one = estimate_mu(*agent, env, tw(0.9), 1, 1.0, 4);
  const auto many = estimate_mu(*agent, env, tw(0.9), 100, 1.0, 8);
  CHECK(one.mu == many.mu);
  const auto front = cdst_pareto_front(env.spec());
  CHECK(one.mu == std::vector<double>{-double(front.back().steps), front.back().value});
  CHECK(one.mu == std::vector<double>{-19, 124});
  CHECK_THROWS_AS(estimate_mu(*agent, env, tw(0.9), 0, 1.0, 4), DomainError);
  CHECK_THROWS_AS(expert_mu({}, 1.0), DomainError);
}

TEST_CASE("feature expectation of a stochastic environment stabilizes") {
  auto env = make_environment(EnvName::Traffic);
  Rng rng(2);
  const agents::DwdqnAgent agent(env->observation_size(), env->objective_count(), agents::AgentHyperparams{}, rng);
  const PreferenceVector pref({0.2, 0.2, 0.2, 0.2, 0.2});
  const auto trajs = agents::rollout(agent, *env, pref, 1000, 6);
  const auto full = expert_mu(trajs, 1.0);
  const auto half = expert_mu(std::span(trajs).first(500), 1.0);
  for (std::size_t j = 0; j < full.size(); ++j) CHECK(std::abs(full[j] - half[j]) < 0.1);
}

TEST_CASE("feature scaler maps bounds onto the unit interval") {
  const std::vector<std::vector<double>> rs{{-10, 0}, {-2, 5}, {-6, 1}};
  const auto s = FeatureScaler::from_returns(rs);
  CHECK(s.scale(std::vector<double>{-10, 0}) == std::vector<double>{0, 0});
  CHECK(s.scale(std::vector<double>{-2, 5}) == std::vector<double>{1, 1});
  CHECK(s.scale(std::vector<double>{-6, 2.5}) == std::vector<double>{0.5, 0.5});
  const std::vector<std::vector<double>> extra{{-1, 10}};
  const auto wide = FeatureScaler::from_returns(rs, extra);
  CHECK(wide.hi() == std::vector<double>{-1, 10});
  const auto flat = FeatureScaler::from_returns(std::vector<std::vector<double>>{{1, 2}});
  CHECK(flat.scale(std::vector<double>{1, 2}) == std::vector<double>{0, 0});
  CHECK_THROWS_AS(FeatureScaler({0, 0}, {1}), DomainError);

  CdstEnv env(default_spec(EnvName::Cdst));
  const auto rand = FeatureScaler::from_random_policy(env, 1.0, 1);
  CHECK(rand.lo()[0] == -env.spec().max_steps);
  CHECK(rand.hi()[1] > 0);
}

TEST_CASE("mwal update matches the multiplicative rule") {
  const std::vector<double> omega{0.5, 0.5}, mu{1.0, 0.0}, mu_e{0.0, 0.0};
  const auto raw = mwal_multiply(omega, mu, mu_e, 100);
  CHECK(raw[0] == doctest::Approx(0.5 / (1 + std::sqrt(2 * std::log(2.0) / 100))).epsilon(1e-12));
  CHECK(std::abs(raw[0] - 0.4473) < 1e-3);
  CHECK(raw[1] == 0.5);
  const auto up = mwal_multiply(omega, std::vector<double>{0.0, 0.0}, std::vector<double>{1.0, 0.0}, 100);
  CHECK(up[0] == doctest::Approx(0.5 * (1 + std::sqrt(2 * std::log(2.0) / 100))).epsilon(1e-12));

  const auto updated = mwal_update(tw(0.5), mu, mu_e, 100);
  CHECK(updated[0] + updated[1] == doctest::Approx(1.0));
  CHECK(updated[0] < 0.5);
  CHECK_THROWS_AS(mwal_multiply(std::vector<double>{1.0}, std::vector<double>{0}, std::vector<double>{0}, 10),
                  DomainError);
}

TEST_CASE("mwal update is an exact no-op at the expert's features") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 200; ++i) {
    std::vector<double> w{u(rng), u(rng), u(rng)}, mu{u(rng), u(rng), u(rng)};
    const auto omega = normalize(w, true);
    CHECK(mwal_update(omega, mu, mu, 50) == omega);
  }
}

TEST_CASE("mwal update stays on the simplex") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> w{u(rng), u(rng), u(rng), u(rng)}, mu(4), mu_e(4);
    for (int j = 0; j < 4; ++j) {
      mu[j] = u(rng);
      mu_e[j] = u(rng);
    }
    const auto out = mwal_update(normalize(w), mu, mu_e, 1 + i % 50);
    double sum = 0;
    for (double x : out.weights()) {
      CHECK(x >= 0.0);
      sum += x;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("mwal self-consistency on CDST") {
  CdstEnv env(default_spec(EnvName::Cdst));
  const auto demos = expert_demos(0.9, 5);
  const auto scaler = cdst_scaler(demos);
  SearchConfig cfg;
  cfg.initial = tw(0.9);
  cfg.mu_episodes = 1;
  const auto res = run_mwal(env, demos, dwtq_trainer(env.spec(), cdst_hp()), scaler, cfg, 1);
  CHECK(res.converged);
  REQUIRE(res.log.size() == 1);
  CHECK(res.log[0].residual < 0.05);
  CHECK(res.best == tw(0.9));
}

TEST_CASE("mwal with one iteration applies exactly one update") {
  CdstEnv env(default_spec(EnvName::Cdst));
  const auto demos = expert_demos(0.05, 3);
  const auto scaler = cdst_scaler(demos);
  SearchConfig cfg;
  cfg.max_iterations = 1;
  cfg.mu_episodes = 1;
  const auto trainer = dwtq_trainer(env.spec(), cdst_hp());
  const auto res = run_mwal(env, demos, trainer, scaler, cfg, 2);
  REQUIRE(res.log.size() == 1);
  CHECK_FALSE(res.converged);
  CHECK(res.best == tw(0.5));
  const auto agent = trainer(tw(0.5), derive_seed(derive_seed(2, 1), "train"));
  const auto mu = scaler.scale(estimate_mu(*agent, env, tw(0.5), 1, 1.0, 0).mu);
  CHECK(res.final == mwal_update(tw(0.5), mu, scaler.scale(expert_mu(demos, 1.0).mu), 1));
}

TEST_CASE("mwal iteration log is bounded by N") {
  CdstEnv env(default_spec(EnvName::Cdst));
  const auto demos = expert_demos(0.3, 2);
  SearchConfig cfg;
  cfg.max_iterations = 7;
  cfg.mu_episodes = 1;
  const auto res = run_mwal(env, demos, dwtq_trainer(env.spec(), cdst_hp()), cdst_scaler(demos), cfg, 3);
  CHECK(res.log.size() <= 7);
  for (std::size_t i = 0; i < res.log.size(); ++i) CHECK(res.log[i].iteration == static_cast<int>(i) + 1);
  const auto csv = format_iteration_log(res.log);
  CHECK(csv.rfind("iteration,residual,w0,w1,ms\n1,", 0) == 0);
}

TEST_CASE("projection step never moves away from the expert") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-1, 2);
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> bar{u(rng), u(rng), u(rng)}, mu{u(rng), u(rng), u(rng)}, e{u(rng), u(rng), u(rng)};
    const auto next = project_mu_bar(bar, mu, e);
    auto dist = [&](const std::vector<double>& a) {
      double s = 0;
      for (int j = 0; j < 3; ++j) s += (a[j] - e[j]) * (a[j] - e[j]);
      return s;
    };
    CHECK(dist(next) <= dist(bar) + 1e-12);
  }
  // Exact projection when the expert lies between mu_bar and mu.
  CHECK(project_mu_bar(std::vector<double>{0, 0}, std::vector<double>{2, 0}, std::vector<double>{1, 1}) ==
        std::vector<double>{1, 0});
}

TEST_CASE("projection direction clamps negatives") {
  const auto w = projection_direction(std::vector<double>{0.5, 1.0}, std::vector<double>{0.7, 0.6}, std::nullopt);
  CHECK(w == tw(1.0));
  const auto none = projection_direction(std::vector<double>{0, 0, 0}, std::vector<double>{1, 1, 1}, true);
  CHECK(none[0] == doctest::Approx(1.0 / 3));
  CHECK(none.cooperative() == true);
}

TEST_CASE("pm stops at once when the first candidate matches the expert") {
  CdstEnv env(default_spec(EnvName::Cdst));
  const auto demos = expert_demos(0.26, 4);
  SearchConfig cfg;
  cfg.initial = tw(0.26);
  cfg.mu_episodes = 1;
  const auto res = run_pm(env, demos, dwtq_trainer(env.spec(), cdst_hp()), cdst_scaler(demos), cfg, 5);
  CHECK(res.converged);
  REQUIRE(res.log.size() == 1);
  CHECK(res.log[0].residual == 0.0);
  CHECK(res.best == tw(0.26));
}

TEST_CASE("pm residuals are non-increasing") {
  CdstEnv env(default_spec(EnvName::Cdst));
  const auto front = cdst_pareto_front(env.spec());
  for (const auto& p : front) {
    const auto demos = expert_demos(p.interval->mid(), 2);
    SearchConfig cfg;
    cfg.mu_episodes = 1;
    cfg.max_iterations = 15;
    const auto res = run_pm(env, demos, dwtq_trainer(env.spec(), cdst_hp()), cdst_scaler(demos), cfg,
                            static_cast<std::uint64_t>(p.treasure));
    REQUIRE(!res.log.empty());
    for (std::size_t i = 1; i < res.log.size(); ++i) CHECK(res.log[i].residual <= res.log[i - 1].residual + 1e-12);
    CHECK(format_iteration_log(res.log).find("\n1,") != std::string::npos);
  }
}

TEST_CASE("baseline config validation and time budget") {
  SearchConfig cfg;
  cfg.max_iterations = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.epsilon = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

  CdstEnv env(default_spec(EnvName::Cdst));
  const auto demos = expert_demos(0.05, 1);
  cfg = {};
  cfg.max_iterations = 50;
  cfg.mu_episodes = 1;
  cfg.time_budget_ms = 1e-6;
  const auto res = run_pm(env, demos, dwtq_trainer(env.spec(), cdst_hp()), cdst_scaler(demos), cfg, 1);
  CHECK(res.log.size() == 1);
}

TEST_CASE("shared trainer hands out the same agent") {
  CdstEnv env(default_spec(EnvName::Cdst));
  std::shared_ptr<const agents::Agent> agent = dwtq_trainer(env.spec(), cdst_hp())(tw(0.5), 1);
  const auto t = shared_agent_trainer(agent);
  CHECK(t(tw(0.1), 1) == agent);
  CHECK(t(tw(0.9), 2) == agent);
}
