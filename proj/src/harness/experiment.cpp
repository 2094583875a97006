#include "dwpi/harness/experiment.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>

#include "dwpi/agents/dwdqn.hpp"
#include "dwpi/agents/dwtq.hpp"
#include "dwpi/agents/persist.hpp"
#include "dwpi/baselines/mwal.hpp"
#include "dwpi/baselines/projection.hpp"
#include "dwpi/envs/pareto.hpp"
#include "dwpi/envs/scenarios.hpp"
#include "dwpi/harness/hashing.hpp"
#include "dwpi/metrics/metrics.hpp"

#ifndef DWPI_VERSION
#define DWPI_VERSION "dev"
#endif

namespace dwpi::harness {

namespace fs = std::filesystem;

std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

namespace {

bool starts_with(const std::string& s, std::string_view prefix) { return s.rfind(prefix, 0) == 0; }

std::string suffix(const ExperimentConfig& cfg) { return cfg.suboptimal ? "_suboptimal" : ""; }

// Runs a stage body and tags unexpected failures with the stage name.
template <class F>
auto guarded(const std::string& stage, F&& body) {
  try {
    return body();
  } catch (const MissingArtifact&) {
    throw;
  } catch (const ConfigError&) {
    throw;
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage, e.what());
  }
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

std::string format_manifest(const RunManifest& m) {
  std::ostringstream out;
  out << "dwpi-manifest 1\n"
      << "version " << m.version << "\n"
      << "config_hash " << m.config_hash << "\n"
      << "started " << m.started << "\n"
      << "finished " << m.finished << "\n";
  for (const auto& s : m.stages) {
    out << "stage " << s.stage << " " << (s.cached ? "cached" : "ran") << " key=" << s.key << " ms=" << s.ms << "\n";
    for (const auto& a : s.artifacts) out << "  artifact " << a.string() << "\n";
  }
  for (const auto& r : m.reports) out << "report " << r.string() << "\n";
  return out.str();
}

std::string config_hash(const ExperimentConfig& cfg) {
  auto entries = config_entries(cfg);
  entries.erase("experiment.output");
  if (cfg.grid_file) entries["experiment.grid"] = sha256_file(*cfg.grid_file);
  std::string text;
  for (const auto& [k, v] : entries) text += k + "=" + v + "\n";
  return sha256_hex(text);
}

Experiment::Experiment(ExperimentConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  spec_ = cfg_.env_spec();
}

fs::path Experiment::agent_path() const { return cfg_.output_dir / "agent.txt"; }
fs::path Experiment::dataset_path() const { return cfg_.output_dir / "dataset.txt"; }
fs::path Experiment::model_path() const { return cfg_.output_dir / "model.txt"; }
fs::path Experiment::reports_dir() const { return cfg_.output_dir / "reports"; }
fs::path Experiment::logs_dir() const { return cfg_.output_dir / "logs"; }
fs::path Experiment::manifest_path() const { return cfg_.output_dir / "manifest.txt"; }

std::string Experiment::stage_key(const std::string& stage) const {
  auto entries = config_entries(cfg_);
  if (cfg_.grid_file) entries["experiment.grid"] = sha256_file(*cfg_.grid_file);
  std::vector<std::string> prefixes;
  std::string text = "stage=" + stage + "\nseed=" + std::to_string(cfg_.seed_for(stage)) + "\n";
  if (stage == "agent") {
    prefixes = {"experiment.env", "experiment.agent", "experiment.grid", "agent."};
  } else if (stage == "dataset") {
    prefixes = {"dataset."};
    text += "upstream.agent=" + sha256_file(agent_path()) + "\n";
  } else if (stage == "inference") {
    prefixes = {"inference."};
    text += "upstream.dataset=" + sha256_file(dataset_path()) + "\n";
  } else {
    prefixes = {"experiment.env", "experiment.grid", "agent.", "dataset.gamma", "dataset.extra_steps", "dataset.time_index",
                "baselines.", "metrics.", "evaluation."};
    text += "upstream.agent=" + sha256_file(agent_path()) + "\nupstream.model=" + sha256_file(model_path()) + "\n";
  }
  for (const auto& [k, v] : entries) {
    if (starts_with(k, stage + ".seed") || k == "agent.seed") continue;  // resolved seed is already in the text
    for (const auto& p : prefixes)
      if (starts_with(k, p)) {
        text += k + "=" + v + "\n";
        break;
      }
  }
  return sha256_hex(text);
}

bool Experiment::cached(const fs::path& key_file, const std::string& key, const std::vector<fs::path>& artifacts,
                        double* ms) const {
  if (!fs::exists(key_file)) return false;
  for (const auto& a : artifacts)
    if (!fs::exists(a)) return false;
  std::ifstream in(key_file);
  std::string word, stored;
  double t = 0.0;
  if (!(in >> word >> stored) || word != "key" || stored != key) return false;
  if (in >> word >> t && word == "ms" && ms) *ms = t;
  return true;
}

void Experiment::write_key(const fs::path& key_file, const std::string& key, double ms) const {
  std::ostringstream out;
  out << "key " << key << "\nms " << ms << "\n";
  agents::save_text(key_file, out.str());
}

void Experiment::require(const fs::path& artifact, const char* producer) const {
  if (!fs::exists(artifact))
    throw MissingArtifact("missing artifact " + artifact.string() + " (run '" + producer + "' first)");
}

StageRecord Experiment::train_agent() {
  return guarded("agent", [&] {
    StageRecord rec{"agent", {agent_path()}, stage_key("agent")};
    const fs::path key_file = agent_path().string() + ".key";
    if (cached(key_file, rec.key, rec.artifacts, &rec.ms)) {
      rec.cached = true;
      return rec;
    }
    const auto start = std::chrono::steady_clock::now();
    auto env = envs::make_environment(spec_);
    std::string text;
    if (cfg_.agent_kind == AgentKind::Dwtq) {
      const auto grid = agents::preference_grid(cfg_.preference_step);
      text = agents::serialize(agents::train_dwtq(*env, grid, cfg_.agent, cfg_.seed_for("agent")));
    } else {
      text = agents::serialize(
          agents::train_dwdqn(*env, cfg_.agent, agents::default_sampler(cfg_.env), cfg_.seed_for("agent")));
    }
    rec.ms = elapsed_ms(start);
    agents::save_text(agent_path(), text);
    write_key(key_file, rec.key, rec.ms);
    return rec;
  });
}

std::shared_ptr<const agents::Agent> Experiment::load_agent() const {
  require(agent_path(), "train-agent");
  const auto text = agents::load_text(agent_path());
  if (cfg_.agent_kind == AgentKind::Dwtq) return std::make_shared<agents::QTableSet>(agents::deserialize_qtables(text));
  return std::make_shared<agents::DwdqnAgent>(agents::deserialize_dwdqn(text));
}

pi::InferenceModel Experiment::load_model() const {
  require(model_path(), "train-inference");
  return pi::InferenceModel::deserialize(agents::load_text(model_path()));
}

StageRecord Experiment::generate_dataset() {
  require(agent_path(), "train-agent");
  return guarded("dataset", [&] {
    StageRecord rec{"dataset", {dataset_path()}, stage_key("dataset")};
    const fs::path key_file = dataset_path().string() + ".key";
    if (cached(key_file, rec.key, rec.artifacts, &rec.ms)) {
      rec.cached = true;
      return rec;
    }
    const auto start = std::chrono::steady_clock::now();
    const auto agent = load_agent();
    auto env = envs::make_environment(spec_);
    const auto sampler = cfg_.env == envs::EnvName::Cdst
                             ? agents::list_sampler(agents::preference_grid(cfg_.preference_step))
                             : agents::default_sampler(cfg_.env);
    const auto ds = pi::generate_dataset(*agent, *env, sampler, cfg_.dataset, cfg_.seed_for("dataset"));
    rec.ms = elapsed_ms(start);
    pi::save_dataset(dataset_path(), ds);
    write_key(key_file, rec.key, rec.ms);
    return rec;
  });
}

StageRecord Experiment::train_inference() {
  require(dataset_path(), "gen-dataset");
  return guarded("inference", [&] {
    StageRecord rec{"inference", {model_path()}, stage_key("inference")};
    const fs::path key_file = model_path().string() + ".key";
    if (cached(key_file, rec.key, rec.artifacts, &rec.ms)) {
      rec.cached = true;
      return rec;
    }
    const auto start = std::chrono::steady_clock::now();
    const auto ds = pi::load_dataset(dataset_path());
    const auto model = pi::train_inference_model(ds, cfg_.inference, cfg_.seed_for("inference"));
    rec.ms = elapsed_ms(start);
    agents::save_text(model_path(), model.serialize());
    write_key(key_file, rec.key, rec.ms);
    return rec;
  });
}

double Experiment::dwpi_training_ms() const {
  double total = 0.0;
  for (const auto& p : {agent_path(), dataset_path(), model_path()}) {
    std::ifstream in(p.string() + ".key");
    std::string word, key;
    double ms = 0.0;
    if (in >> word >> key >> word >> ms) total += ms;
  }
  return total;
}

std::vector<EvalCase> Experiment::cases() const {
  std::vector<EvalCase> out;
  if (cfg_.env == envs::EnvName::Cdst) {
    Rng rng(derive_seed(cfg_.seed_for("evaluation"), "truths"));
    std::uniform_real_distribution<double> interior(0.02, 0.98);
    for (const auto& p : envs::cdst_pareto_front(spec_)) {
      if (!p.interval) continue;
      for (int j = 0; j < cfg_.truths_per_treasure; ++j) {
        const double w = p.interval->lo + (p.interval->hi - p.interval->lo) * interior(rng);
        EvalCase c;
        c.label = std::to_string(p.treasure) + (cfg_.truths_per_treasure > 1 ? "." + std::to_string(j + 1) : "");
        c.truth = PreferenceVector({1.0 - w, w});
        c.treasure = p.treasure;
        c.interval = p.interval;
        out.push_back(std::move(c));
      }
    }
  } else {
    for (const auto& s : envs::scenario_preferences(cfg_.env)) out.push_back({s.slug, s.preference, 0, std::nullopt});
  }
  if (cfg_.scenarios.empty()) return out;
  std::vector<EvalCase> picked;
  for (const auto& name : cfg_.scenarios) {
    bool found = false;
    for (const auto& c : out) {
      bool match = c.label == name || (c.treasure && std::to_string(c.treasure) == name);
      if (!c.treasure)
        for (const auto& s : envs::scenario_preferences(cfg_.env)) match = match || (s.slug == c.label && s.label == name);
      if (match) {
        picked.push_back(c);
        found = true;
      }
    }
    if (!found) throw ConfigError("unknown scenario '" + name + "' for " + std::string(envs::to_string(cfg_.env)));
  }
  return picked;
}

EvalCase Experiment::find_case(const std::string& name) const {
  if (cfg_.env != envs::EnvName::Cdst) {
    try {
      const auto& s = envs::find_scenario(envs::scenario_preferences(cfg_.env), name);
      return {s.slug, s.preference, 0, std::nullopt};
    } catch (const std::exception&) {
      throw ConfigError("unknown scenario '" + name + "' for " + std::string(envs::to_string(cfg_.env)));
    }
  }
  const auto front = envs::cdst_pareto_front(spec_);
  EvalCase c;
  try {
    if (starts_with(name, "w=")) {
      const double w = std::stod(name.substr(2));
      if (!(w >= 0.0 && w <= 1.0)) throw std::out_of_range(name);
      const int idx = envs::interval_index(front, w);
      c.label = name;
      c.truth = PreferenceVector({1.0 - w, w});
      if (idx >= 0) {
        c.treasure = front[static_cast<std::size_t>(idx)].treasure;
        c.interval = front[static_cast<std::size_t>(idx)].interval;
      }
      return c;
    }
    const int t = std::stoi(name);
    for (const auto& p : front)
      if (p.treasure == t && p.interval) {
        const double w = p.interval->mid();
        return {name, PreferenceVector({1.0 - w, w}), t, p.interval};
      }
  } catch (const std::invalid_argument&) {
  } catch (const std::out_of_range&) {
  }
  throw ConfigError("unknown cdst scenario '" + name + "' (use a treasure number or w=<weight>)");
}

std::vector<Trajectory> Experiment::demonstrations(const EvalCase& c) const {
  const std::uint64_t case_seed = derive_seed(cfg_.seed_for("evaluation"), c.label);
  std::shared_ptr<const agents::Agent> expert;
  if (cfg_.expert == ExpertSource::Fresh) {
    auto hp = cfg_.agent;
    const auto trainer = cfg_.agent_kind == AgentKind::Dwtq ? baselines::dwtq_trainer(spec_, hp)
                                                              : baselines::dwdqn_trainer(spec_, hp);
    expert = trainer(c.truth, derive_seed(case_seed, "expert"));
  } else {
    expert = load_agent();
  }
  auto env = envs::make_environment(spec_);
  auto demos = agents::rollout(*expert, *env, c.truth, cfg_.demo_episodes, derive_seed(case_seed, "demos"));
  if (cfg_.suboptimal) {
    Rng rng(derive_seed(case_seed, "noise"));
    std::uniform_int_distribution<int> extra(cfg_.dataset.noise.extra_steps_min, cfg_.dataset.noise.extra_steps_max);
    for (auto& d : demos) d = pi::add_extra_steps(d, extra(rng), cfg_.dataset.noise);
  }
  return demos;
}

baselines::AgentTrainer Experiment::baseline_trainer() const {
  if (cfg_.baseline_trainer == BaselineTrainer::Shared) return baselines::shared_agent_trainer(load_agent());
  auto hp = cfg_.agent;
  if (cfg_.baseline_agent_episodes > 0) hp.episodes = cfg_.baseline_agent_episodes;
  return cfg_.agent_kind == AgentKind::Dwtq ? baselines::dwtq_trainer(spec_, hp) : baselines::dwdqn_trainer(spec_, hp);
}

baselines::BaselineResult Experiment::run_baseline(const std::string& method, const EvalCase& c,
                                                   std::optional<double> time_budget_ms) const {
  const std::uint64_t case_seed = derive_seed(cfg_.seed_for("evaluation"), c.label);
  const auto demos = demonstrations(c);
  auto env = envs::make_environment(spec_);
  const std::vector<std::vector<double>> expert{baselines::expert_mu(demos, cfg_.dataset.gamma).mu};
  const auto scaler = baselines::FeatureScaler::from_random_policy(
      *env, cfg_.dataset.gamma, derive_seed(cfg_.seed_for("evaluation"), "scaler"), expert, cfg_.scaler_episodes);
  auto search = cfg_.search;
  search.gamma = cfg_.dataset.gamma;
  if (cfg_.env == envs::EnvName::ItemGathering) search.cooperative_flag = true;
  if (time_budget_ms) search.time_budget_ms = time_budget_ms;
  const auto trainer = baseline_trainer();
  const std::uint64_t seed = derive_seed(case_seed, method);
  if (method == "pm") return baselines::run_pm(*env, demos, trainer, scaler, search, seed);
  if (method == "mwal") return baselines::run_mwal(*env, demos, trainer, scaler, search, seed);
  throw ConfigError("unknown baseline method '" + method + "'");
}

StageRecord Experiment::evaluate(Evaluation* out) {
  require(agent_path(), "train-agent");
  require(model_path(), "train-inference");
  return guarded("evaluation", [&] {
    const std::string tag = suffix(cfg_);
    const auto all_cases = cases();
    std::vector<fs::path> files;
    if (cfg_.env == envs::EnvName::Cdst) {
      files.push_back(reports_dir() / ("report" + tag + ".csv"));
    } else {
      for (const auto& c : all_cases) files.push_back(reports_dir() / (c.label + tag + ".csv"));
    }
    const fs::path timings = reports_dir() / ("timings" + tag + ".csv");
    StageRecord rec{"evaluation" + tag, files, stage_key("evaluation")};
    rec.artifacts.push_back(timings);
    const fs::path key_file = reports_dir() / ("evaluation" + tag + ".key");
    if (cached(key_file, rec.key, rec.artifacts, &rec.ms)) {
      rec.cached = true;
      if (out) out->report_files = files;
      return rec;
    }
    const auto start = std::chrono::steady_clock::now();
    const auto agent = load_agent();
    const auto model = load_model();
    auto env = envs::make_environment(spec_);
    std::optional<double> budget;
    if (cfg_.matched_time_budget) budget = dwpi_training_ms();

    Evaluation result;
    std::vector<std::vector<metrics::EvalReport>> per_case;
    for (const auto& c : all_cases) {
      const std::uint64_t case_seed = derive_seed(cfg_.seed_for("evaluation"), c.label);
      std::vector<metrics::EvalReport> rows;
      std::vector<metrics::UtilityComparison> utility;
      auto finish = [&](metrics::EvalReport r, double ms) {
        r.kl = metrics::kl_for(r.truth, r.inferred, cfg_.kl_order);
        if (c.interval) r.interval_correct = c.interval->contains(r.inferred[1]);
        const std::uint64_t useed = derive_seed(case_seed, "utility");
        const auto u = metrics::compare_utility(*agent, *env, r.inferred, r.truth, cfg_.utility_episodes, useed, useed,
                                                cfg_.utility_convention);
        r.utility_abs_err = u.abs_error;
        utility.push_back(u);
        r.wall_clock_ms = static_cast<std::int64_t>(std::llround(ms));
        rows.push_back(std::move(r));
      };
      const auto demos = demonstrations(c);
      const auto dwpi = metrics::timed([&] { return pi::infer(model, demos, cfg_.dataset.gamma); });
      finish(metrics::make_report("dwpi", c.label, dwpi.value, c.truth), dwpi.ms);
      for (const auto& method : cfg_.baselines) {
        const auto run = metrics::timed([&] { return run_baseline(method, c, budget); });
        const fs::path log = logs_dir() / (method + "_" + c.label + tag + ".csv");
        agents::save_text(log, baselines::format_iteration_log(run.value.log));
        result.log_files.push_back(log);
        finish(metrics::make_report(method, c.label, run.value.best, c.truth), run.ms);
      }
      per_case.push_back(std::move(rows));
      result.utility.insert(result.utility.end(), utility.begin(), utility.end());
    }
    for (const auto& rows : per_case) result.reports.insert(result.reports.end(), rows.begin(), rows.end());
    if (cfg_.env == envs::EnvName::Cdst) {
      agents::save_text(files.front(),
                        metrics::format_reports_csv(result.reports) + metrics::accuracy_lines(result.reports));
    } else {
      for (std::size_t i = 0; i < per_case.size(); ++i) agents::save_text(files[i], metrics::format_reports_csv(per_case[i]));
    }
    agents::save_text(timings, metrics::format_timings_csv(result.reports));
    rec.ms = elapsed_ms(start);
    write_key(key_file, rec.key, rec.ms);
    result.report_files = files;
    if (out) *out = std::move(result);
    return rec;
  });
}

RunManifest run_experiment(const ExperimentConfig& cfg) {
  Experiment e(cfg);
  RunManifest m;
  m.config_hash = config_hash(cfg);
  m.version = DWPI_VERSION;
  m.started = utc_timestamp();
  m.stages.push_back(e.train_agent());
  m.stages.push_back(e.generate_dataset());
  m.stages.push_back(e.train_inference());
  Evaluation ev;
  m.stages.push_back(e.evaluate(&ev));
  m.reports = ev.report_files;
  m.finished = utc_timestamp();
  agents::save_text(e.manifest_path(), format_manifest(m));
  return m;
}

}  // namespace dwpi::harness
