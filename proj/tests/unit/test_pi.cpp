#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <random>

#include "doctest.h"
#include "dwpi/agents/dwtq.hpp"
#include "dwpi/envs/cdst.hpp"
#include "dwpi/envs/pareto.hpp"
#include "dwpi/pi/dataset.hpp"
#include "dwpi/pi/inference_model.hpp"

using namespace dwpi;
using namespace dwpi::agents;
using namespace dwpi::envs;
using namespace dwpi::pi;

namespace {

struct CdstPipeline {
  CdstEnv env{default_spec(EnvName::Cdst)};
  std::vector<PreferenceVector> grid = preference_grid(0.01);
  QTableSet agent;
  PiDataset train;
  InferenceModel model;
  TrainingReport report;
  std::vector<ParetoPoint> front;
};

const CdstPipeline& pipeline() {
  static const CdstPipeline p = [] {
    CdstPipeline p;
    AgentHyperparams hp;
    hp.episodes = 1500;
    p.agent = train_dwtq(p.env, p.grid, hp, 42);
    p.train = generate_dataset(p.agent, p.env, list_sampler(p.grid), DatasetOptions{}, 7);
    p.model = train_inference_model(p.train, default_inference_config(EnvName::Cdst), 11, &p.report);
    p.front = cdst_pareto_front(p.env.spec());
    return p;
  }();
  return p;
}

PiDataset held_out() {
  const auto& p = pipeline();
  CdstEnv env(default_spec(EnvName::Cdst));
  DatasetOptions opt;
  opt.samples = 5000;
  return generate_dataset(p.agent, env, list_sampler(p.grid), opt, 1234);
}

double treasure_weight_mse(const InferenceModel& model, const PiDataset& ds) {
  double sum = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) sum += std::pow(model.predict(ds.features[i])[1] - ds.targets[i][1], 2);
  return sum / static_cast<double>(ds.size());
}

// Trained on ω exactly, so demos come from the optimal policy for that ω.
Trajectory expert_demo(double treasure_weight, std::uint64_t seed) {
  CdstEnv env(default_spec(EnvName::Cdst));
  AgentHyperparams hp;
  hp.episodes = 1500;
  const std::vector<PreferenceVector> one{PreferenceVector({1 - treasure_weight, treasure_weight})};
  const auto agent = train_dwtq(env, one, hp, seed);
  return rollout(agent, env, one.front(), 1, seed).front();
}

PiDataset constant_dataset(std::size_t n, const PreferenceVector& target) {
  PiDataset ds;
  ds.objective_names = {"time", "treasure"};
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-20, 0);
  for (std::size_t i = 0; i < n; ++i) {
    ds.features.push_back({u(rng), -u(rng) * 6});
    ds.targets.push_back(target);
  }
  return ds;
}

}  // namespace

TEST_CASE("noise subtracts extra steps from the time component only") {
  CHECK(apply_noise({-3, 124}, 2, NoiseSpec{}) == std::vector<double>{-5, 124});
  CHECK(apply_noise({-3, 124}, 0, NoiseSpec{}) == std::vector<double>{-3, 124});
  NoiseSpec traffic;
  traffic.time_objective_index = 0;
  CHECK(apply_noise({-4, -1, 0, 1}, 1, traffic) == std::vector<double>{-5, -1, 0, 1});
  NoiseSpec bad;
  bad.time_objective_index = 2;
  CHECK_THROWS_AS(apply_noise({-3, 124}, 1, bad), std::invalid_argument);
  bad = {};
  bad.extra_steps_min = 3;
  CHECK_THROWS_AS(bad.validate(2), std::invalid_argument);
}

TEST_CASE("appended idle steps match the feature perturbation") {
  const auto demo = expert_demo(0.26, 5);
  for (int k = 1; k <= 2; ++k) {
    const auto longer = add_extra_steps(demo, k, NoiseSpec{});
    CHECK(longer.steps.size() == demo.steps.size() + static_cast<std::size_t>(k));
    CHECK(discounted_return(longer, 1.0).components ==
          apply_noise(discounted_return(demo, 1.0).components, k, NoiseSpec{}));
  }
}

TEST_CASE("zero noise fraction keeps clean returns") {
  const auto& p = pipeline();
  CdstEnv env(default_spec(EnvName::Cdst));
  DatasetOptions opt;
  opt.samples = 300;
  opt.noise_fraction = 0;
  const auto ds = generate_dataset(p.agent, env, list_sampler(p.grid), opt, 5);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto clean = rollout(p.agent, env, ds.targets[i], 1, 0).front();
    CHECK(ds.features[i] == discounted_return(clean, 1.0).components);
    CHECK_FALSE(ds.noised[i]);
  }
}

TEST_CASE("noised fraction stays within the binomial bound") {
  const auto& p = pipeline();
  CdstEnv env(default_spec(EnvName::Cdst));
  DatasetOptions opt;
  opt.samples = 10000;
  const auto ds = generate_dataset(p.agent, env, list_sampler(p.grid), opt, 99);
  const auto noised = std::count(ds.noised.begin(), ds.noised.end(), true);
  CHECK(noised >= 7200);
  CHECK(noised <= 7800);
}

TEST_CASE("noise only lowers the time feature") {
  const auto& p = pipeline();
  CdstEnv env(default_spec(EnvName::Cdst));
  DatasetOptions opt;
  opt.samples = 2000;
  const auto ds = generate_dataset(p.agent, env, list_sampler(p.grid), opt, 8);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto clean = discounted_return(rollout(p.agent, env, ds.targets[i], 1, 0).front(), 1.0).components;
    const double dt = clean[0] - ds.features[i][0];
    CHECK(ds.features[i][1] == clean[1]);
    if (ds.noised[i]) {
      CHECK((dt == 1.0 || dt == 2.0));
    } else {
      CHECK(dt == 0.0);
    }
  }
}

TEST_CASE("dataset generation is bit-reproducible") {
  const auto& p = pipeline();
  CdstEnv env(default_spec(EnvName::Cdst));
  DatasetOptions opt;
  opt.samples = 500;
  const auto a = generate_dataset(p.agent, env, list_sampler(p.grid), opt, 17);
  const auto b = generate_dataset(p.agent, env, list_sampler(p.grid), opt, 17);
  const auto c = generate_dataset(p.agent, env, list_sampler(p.grid), opt, 18);
  CHECK(format_dataset(a) == format_dataset(b));
  CHECK(format_dataset(a) != format_dataset(c));
  opt.samples = 0;
  CHECK_THROWS_AS(generate_dataset(p.agent, env, list_sampler(p.grid), opt, 1), std::invalid_argument);
}

TEST_CASE("dataset file round trip") {
  const auto& p = pipeline();
  CdstEnv env(default_spec(EnvName::Cdst));
  DatasetOptions opt;
  opt.samples = 200;
  auto ds = generate_dataset(p.agent, env, list_sampler(p.grid), opt, 4);
  ds.targets[0] = ds.targets[0].with_cooperative(false);
  ds.targets[1] = ds.targets[1].with_cooperative(true);
  const auto path = std::filesystem::temp_directory_path() / "dwpi_test_dataset.txt";
  save_dataset(path, ds);
  const auto back = load_dataset(path);
  std::filesystem::remove(path);
  CHECK(back.env == ds.env);
  CHECK(back.objective_names == ds.objective_names);
  CHECK(back.noise_fraction == ds.noise_fraction);
  CHECK(back.noise.extra_steps_max == ds.noise.extra_steps_max);
  CHECK(back.features == ds.features);
  CHECK(back.targets == ds.targets);
  CHECK(format_dataset(back) == format_dataset(ds));

  CHECK_THROWS_AS(parse_dataset("no header\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_dataset("# dwpi-dataset 1 env=cdst objectives=time,treasure\n-1,2|0.5\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_dataset("# dwpi-dataset 1 env=cdst objectives=time,treasure\n-1,2,0.5,0.5\n"),
                  std::invalid_argument);
}

TEST_CASE("constant targets are fitted") {
  const PreferenceVector target({0.3, 0.7});
  const auto ds = constant_dataset(1000, target);
  for (bool cosine : {true, false}) {
    auto cfg = default_inference_config(EnvName::Cdst);
    cfg.cosine_schedule = cosine;
    TrainingReport rep;
    const auto model = train_inference_model(ds, cfg, 2, &rep);
    CHECK(rep.best_val_loss < 1e-4);
    CHECK(rep.val_size == 100);
    CHECK(rep.train_size == 900);
    const auto out = model.predict(std::vector<double>{-5, 30});
    CHECK(out[1] == doctest::Approx(0.7).epsilon(0.01));
  }
}

TEST_CASE("plateau schedule returns the lowest-validation parameters") {
  const auto ds = constant_dataset(1000, PreferenceVector({0.3, 0.7}));
  auto cfg = default_inference_config(EnvName::Cdst);
  cfg.cosine_schedule = false;
  cfg.max_epochs = 200;
  TrainingReport rep;
  train_inference_model(ds, cfg, 2, &rep);
  const auto lowest = std::min_element(rep.val_loss.begin(), rep.val_loss.end());
  CHECK(rep.best_val_loss == *lowest);
  CHECK(rep.best_epoch == lowest - rep.val_loss.begin());
  CHECK(static_cast<int>(rep.val_loss.size()) >= cfg.min_epochs);
}

TEST_CASE("inference training loss decreases") {
  const auto& rep = pipeline().report;
  REQUIRE(rep.train_loss.size() >= 2);
  CHECK(rep.train_loss.back() < rep.train_loss.front());
  CHECK(rep.train_loss.size() == 80);
}

TEST_CASE("inference training rejects bad input") {
  PiDataset tiny = constant_dataset(5, PreferenceVector({0.5, 0.5}));
  CHECK_THROWS_AS(train_inference_model(tiny, {}, 1), std::invalid_argument);
  InferenceConfig cfg;
  cfg.validation_fraction = 1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  auto ds = constant_dataset(200, PreferenceVector({0.5, 0.5}));
  ds.features[3][0] = std::nan("");
  CHECK_THROWS_AS(train_inference_model(ds, {}, 1), nn::DivergenceError);
}

TEST_CASE("inference averages demos") {
  const auto& p = pipeline();
  const auto demo = expert_demo(0.26, 3);
  const std::vector<Trajectory> one{demo};
  const std::vector<Trajectory> five(5, demo);
  CHECK(infer(p.model, one, 1.0) == infer(p.model, five, 1.0));
  CHECK_THROWS_AS(infer(p.model, std::vector<Trajectory>{}, 1.0), DomainError);
}

TEST_CASE("inference output lies on the simplex") {
  const auto& p = pipeline();
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> t(-40, 0), v(-50, 200);
  for (int i = 0; i < 1000; ++i) {
    const auto w = p.model.predict(std::vector<double>{t(rng), v(rng)});
    CHECK(w[0] >= 0.0);
    CHECK(w[1] >= 0.0);
    CHECK(w[0] + w[1] == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("model file round trip") {
  const auto& p = pipeline();
  const auto back = InferenceModel::deserialize(p.model.serialize());
  CHECK(back.serialize() == p.model.serialize());
  const std::vector<double> f{-9, 78};
  CHECK(back.predict(f) == p.model.predict(f));
  CHECK_THROWS_AS(InferenceModel::deserialize("dwpi-inference 2\n"), nn::FormatError);
}

TEST_CASE("demo at treasure weight 0.26 infers treasure #8") {
  const auto& p = pipeline();
  const auto demo = expert_demo(0.26, 21);
  const auto w = infer(p.model, std::vector<Trajectory>{demo}, 1.0);
  CHECK(interval_index(p.front, w[1]) == 7);
}

TEST_CASE("every treasure interval is recovered from clean and sub-optimal demos") {
  const auto& p = pipeline();
  std::mt19937_64 rng(77);
  for (const auto& point : p.front) {
    const auto& iv = *point.interval;
    for (int trial = 0; trial < 3; ++trial) {
      const double w = iv.lo + (iv.hi - iv.lo) * std::uniform_real_distribution<double>(0.02, 0.98)(rng);
      const auto demo = expert_demo(w, 100 + static_cast<std::uint64_t>(trial));
      REQUIRE(discounted_return(demo, 1.0)[1] == point.value);
      for (int k = 0; k <= 2; ++k) {
        const std::vector<Trajectory> demos(10, k ? add_extra_steps(demo, k, NoiseSpec{}) : demo);
        const auto inferred = infer(p.model, demos, 1.0);
        INFO("treasure " << point.treasure << " w " << w << " extra " << k << " inferred " << inferred[1]);
        CHECK(iv.contains(inferred[1]));
      }
    }
  }
}

TEST_CASE("held-out MSE is close to the within-interval floor") {
  const auto& p = pipeline();
  const auto test = held_out();
  // Oracle: the best any regressor can do is predict each feature's mean target.
  std::map<std::vector<double>, std::pair<double, int>> groups;
  for (std::size_t i = 0; i < test.size(); ++i) {
    auto& g = groups[test.features[i]];
    g.first += test.targets[i][1];
    ++g.second;
  }
  double floor = 0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    const auto& g = groups[test.features[i]];
    floor += std::pow(test.targets[i][1] - g.first / g.second, 2);
  }
  floor /= static_cast<double>(test.size());
  const double mse = treasure_weight_mse(p.model, test);
  MESSAGE("held-out MSE " << mse << ", floor " << floor);
  CHECK(floor > 5e-3);
  CHECK(mse >= floor - 1e-12);
  CHECK(mse < floor + 2e-3);
}

// Below the irreducible floor measured above; expected to fail.
TEST_CASE("held-out CDST treasure-weight MSE below 1e-3" * doctest::should_fail()) {
  CHECK(treasure_weight_mse(pipeline().model, held_out()) < 1e-3);
}
