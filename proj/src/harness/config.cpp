#include "dwpi/harness/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace dwpi::harness {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <class T>
T parse_integer(const std::string& key, const std::string& v) {
  T out{};
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) throw ConfigError(key + ": expected an integer, got '" + v + "'");
  return out;
}

double parse_real(const std::string& key, const std::string& v) {
  double out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size() || !std::isfinite(out))
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
  if (v == "false" || v == "no" || v == "0" || v == "off") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

std::vector<std::string> parse_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<std::size_t> parse_sizes(const std::string& key, const std::string& v) {
  std::vector<std::size_t> out;
  for (const auto& item : parse_list(v)) out.push_back(parse_integer<std::size_t>(key, item));
  return out;
}

std::string real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? "," : "") + items[i];
  return out;
}

std::string join(const std::vector<std::size_t>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? "," : "") + std::to_string(items[i]);
  return out;
}

std::string opt_seed(const std::optional<std::uint64_t>& s) { return s ? std::to_string(*s) : ""; }

struct Field {
  std::function<void(ExperimentConfig&, const std::string& key, const std::string& value)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

#define DWPI_INT(path, member)                                                                                      \
  {                                                                                                                 \
    path, {                                                                                                         \
      [](ExperimentConfig& c, const std::string& k, const std::string& v) {                                         \
        c.member = parse_integer<std::decay_t<decltype(c.member)>>(k, v);                                           \
      },                                                                                                            \
          [](const ExperimentConfig& c) { return std::to_string(c.member); }                                        \
    }                                                                                                               \
  }
#define DWPI_REAL(path, member)                                                                                     \
  {                                                                                                                 \
    path, {                                                                                                         \
      [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.member = parse_real(k, v); },         \
          [](const ExperimentConfig& c) { return real(c.member); }                                                  \
    }                                                                                                               \
  }
#define DWPI_BOOL(path, member)                                                                                     \
  {                                                                                                                 \
    path, {                                                                                                         \
      [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.member = parse_bool(k, v); },         \
          [](const ExperimentConfig& c) { return std::string(c.member ? "true" : "false"); }                       \
    }                                                                                                               \
  }
#define DWPI_SEED(path, member)                                                                                     \
  {                                                                                                                 \
    path, {                                                                                                         \
      [](ExperimentConfig& c, const std::string& k, const std::string& v) {                                         \
        if (v.empty()) c.member.reset(); else c.member = parse_integer<std::uint64_t>(k, v);                         \
      },                                                                                                            \
          [](const ExperimentConfig& c) { return opt_seed(c.member); }                                              \
    }                                                                                                               \
  }

const std::map<std::string, Field>& fields() {
  static const std::map<std::string, Field> table = {
      {"experiment.env",
       {[](ExperimentConfig& c, const std::string& k, const std::string& v) {
          try {
            c.env = envs::parse_env_name(v);
          } catch (const std::exception&) {
            throw ConfigError(k + ": unknown environment '" + v + "'");
          }
        },
        [](const ExperimentConfig& c) { return std::string(envs::to_string(c.env)); }}},
      {"experiment.agent",
       {[](ExperimentConfig& c, const std::string& k, const std::string& v) {
          if (v == "dwtq") {
            c.agent_kind = AgentKind::Dwtq;
          } else if (v == "dwdqn") {
            c.agent_kind = AgentKind::Dwdqn;
          } else {
            throw ConfigError(k + ": expected dwtq or dwdqn, got '" + v + "'");
          }
        },
        [](const ExperimentConfig& c) { return std::string(to_string(c.agent_kind)); }}},
      {"experiment.grid",
       {[](ExperimentConfig& c, const std::string&, const std::string& v) {
          if (v.empty()) {
            c.grid_file.reset();
          } else {
            c.grid_file = v;
          }
        },
        [](const ExperimentConfig& c) { return c.grid_file ? c.grid_file->string() : std::string(); }}},
      {"experiment.seed",
       {[](ExperimentConfig& c, const std::string& k, const std::string& v) { c.seed = parse_integer<std::uint64_t>(k, v); },
        [](const ExperimentConfig& c) { return std::to_string(c.seed); }}},
      {"experiment.output",
       {[](ExperimentConfig& c, const std::string&, const std::string& v) { c.output_dir = v; },
        [](const ExperimentConfig& c) { return c.output_dir.string(); }}},

      DWPI_REAL("agent.alpha", agent.alpha),
      DWPI_REAL("agent.gamma", agent.gamma),
      DWPI_REAL("agent.epsilon_start", agent.epsilon_start),
      DWPI_REAL("agent.epsilon_end", agent.epsilon_end),
      DWPI_REAL("agent.epsilon_decay_fraction", agent.epsilon_decay_fraction),
      DWPI_INT("agent.episodes", agent.episodes),
      DWPI_INT("agent.max_steps", agent.max_steps),
      DWPI_INT("agent.replay_capacity", agent.replay_capacity),
      DWPI_INT("agent.batch_size", agent.batch_size),
      DWPI_INT("agent.target_sync", agent.target_sync),
      DWPI_INT("agent.threshold", agent.threshold),
      DWPI_INT("agent.updates_per_episode", agent.updates_per_episode),
      {"agent.hidden",
       {[](ExperimentConfig& c, const std::string& k, const std::string& v) { c.agent.hidden = parse_sizes(k, v); },
        [](const ExperimentConfig& c) { return join(c.agent.hidden); }}},
      DWPI_REAL("agent.learning_rate", agent.learning_rate),
      DWPI_BOOL("agent.double_q", agent.double_q),
      DWPI_REAL("agent.relabel_fraction", agent.relabel_fraction),
      DWPI_REAL("agent.preference_step", preference_step),
      DWPI_SEED("agent.seed", agent_seed),

      DWPI_INT("dataset.samples", dataset.samples),
      DWPI_REAL("dataset.noise_fraction", dataset.noise_fraction),
      DWPI_INT("dataset.extra_steps_min", dataset.noise.extra_steps_min),
      DWPI_INT("dataset.extra_steps_max", dataset.noise.extra_steps_max),
      DWPI_INT("dataset.time_index", dataset.noise.time_objective_index),
      DWPI_REAL("dataset.gamma", dataset.gamma),
      DWPI_SEED("dataset.seed", dataset_seed),

      {"inference.hidden",
       {[](ExperimentConfig& c, const std::string& k, const std::string& v) { c.inference.hidden = parse_sizes(k, v); },
        [](const ExperimentConfig& c) { return join(c.inference.hidden); }}},
      DWPI_REAL("inference.learning_rate", inference.learning_rate),
      DWPI_INT("inference.batch_size", inference.batch_size),
      DWPI_INT("inference.max_epochs", inference.max_epochs),
      DWPI_BOOL("inference.cosine_schedule", inference.cosine_schedule),
      DWPI_INT("inference.min_epochs", inference.min_epochs),
      DWPI_INT("inference.patience", inference.patience),
      DWPI_REAL("inference.min_delta", inference.min_delta),
      DWPI_INT("inference.lr_decay_patience", inference.lr_decay_patience),
      DWPI_REAL("inference.lr_decay", inference.lr_decay),
      DWPI_REAL("inference.min_learning_rate", inference.min_learning_rate),
      DWPI_REAL("inference.validation_fraction", inference.validation_fraction),
      DWPI_SEED("inference.seed", inference_seed),

      {"baselines.methods",
       {[](ExperimentConfig& c, const std::string&, const std::string& v) {
          c.baselines = v == "none" ? std::vector<std::string>{} : parse_list(v);
        },
        [](const ExperimentConfig& c) { return c.baselines.empty() ? std::string("none") : join(c.baselines); }}},
      DWPI_INT("baselines.max_iterations", search.max_iterations),
      DWPI_REAL("baselines.epsilon", search.epsilon),
      DWPI_INT("baselines.mu_episodes", search.mu_episodes),
      {"baselines.time_budget_ms",
       {[](ExperimentConfig& c, const std::string& k, const std::string& v) {
          const double ms = parse_real(k, v);
          if (ms > 0) {
            c.search.time_budget_ms = ms;
          } else {
            c.search.time_budget_ms.reset();
          }
        },
        [](const ExperimentConfig& c) { return c.search.time_budget_ms ? real(*c.search.time_budget_ms) : "0"; }}},
      {"baselines.trainer",
       {[](ExperimentConfig& c, const std::string& k, const std::string& v) {
          if (v == "fresh") {
            c.baseline_trainer = BaselineTrainer::Fresh;
          } else if (v == "shared") {
            c.baseline_trainer = BaselineTrainer::Shared;
          } else {
            throw ConfigError(k + ": expected fresh or shared, got '" + v + "'");
          }
        },
        [](const ExperimentConfig& c) { return std::string(to_string(c.baseline_trainer)); }}},
      DWPI_INT("baselines.agent_episodes", baseline_agent_episodes),
      DWPI_INT("baselines.scaler_episodes", scaler_episodes),
      DWPI_BOOL("baselines.matched_time_budget", matched_time_budget),

      {"metrics.kl_order",
       {[](ExperimentConfig& c, const std::string& k, const std::string& v) {
          if (v == "truth_to_inferred") {
            c.kl_order = metrics::KlOrder::TruthToInferred;
          } else if (v == "inferred_to_truth") {
            c.kl_order = metrics::KlOrder::InferredToTruth;
          } else {
            throw ConfigError(k + ": expected truth_to_inferred or inferred_to_truth");
          }
        },
        [](const ExperimentConfig& c) {
          return std::string(c.kl_order == metrics::KlOrder::TruthToInferred ? "truth_to_inferred" : "inferred_to_truth");
        }}},
      {"metrics.utility_convention",
       {[](ExperimentConfig& c, const std::string& k, const std::string& v) {
          if (v == "true_weights") {
            c.utility_convention = metrics::UtilityConvention::TrueWeights;
          } else if (v == "own_weights") {
            c.utility_convention = metrics::UtilityConvention::OwnWeights;
          } else {
            throw ConfigError(k + ": expected true_weights or own_weights");
          }
        },
        [](const ExperimentConfig& c) {
          return std::string(c.utility_convention == metrics::UtilityConvention::TrueWeights ? "true_weights"
                                                                                           : "own_weights");
        }}},
      DWPI_INT("metrics.utility_episodes", utility_episodes),

      DWPI_INT("evaluation.demo_episodes", demo_episodes),
      DWPI_INT("evaluation.truths_per_treasure", truths_per_treasure),
      {"evaluation.expert",
       {[](ExperimentConfig& c, const std::string& k, const std::string& v) {
          if (v == "fresh") {
            c.expert = ExpertSource::Fresh;
          } else if (v == "trained") {
            c.expert = ExpertSource::Trained;
          } else {
            throw ConfigError(k + ": expected fresh or trained, got '" + v + "'");
          }
        },
        [](const ExperimentConfig& c) { return std::string(to_string(c.expert)); }}},
      DWPI_BOOL("evaluation.suboptimal", suboptimal),
      {"evaluation.scenarios",
       {[](ExperimentConfig& c, const std::string&, const std::string& v) { c.scenarios = parse_list(v); },
        [](const ExperimentConfig& c) { return join(c.scenarios); }}},
      DWPI_SEED("evaluation.seed", evaluation_seed),
  };
  return table;
}

#undef DWPI_INT
#undef DWPI_REAL
#undef DWPI_BOOL
#undef DWPI_SEED

}  // namespace

std::string_view to_string(AgentKind kind) { return kind == AgentKind::Dwtq ? "dwtq" : "dwdqn"; }
std::string_view to_string(ExpertSource source) { return source == ExpertSource::Fresh ? "fresh" : "trained"; }
std::string_view to_string(BaselineTrainer trainer) { return trainer == BaselineTrainer::Fresh ? "fresh" : "shared"; }

ExperimentConfig default_config(envs::EnvName env) {
  ExperimentConfig c;
  c.env = env;
  c.inference = pi::default_inference_config(env);
  if (env == envs::EnvName::Cdst) {
    c.agent_kind = AgentKind::Dwtq;
    c.expert = ExpertSource::Fresh;
    c.baseline_trainer = BaselineTrainer::Fresh;
  } else {
    c.agent_kind = AgentKind::Dwdqn;
    c.expert = ExpertSource::Trained;
    c.baseline_trainer = BaselineTrainer::Fresh;
    c.agent.gamma = 0.95;
    c.agent.hidden = {64, 64};
    c.agent.learning_rate = 1e-3;
    c.agent.updates_per_episode = 32;
    c.agent.relabel_fraction = 0.5;
    c.agent.episodes = env == envs::EnvName::Traffic ? 2000 : 4000;
    c.baseline_agent_episodes = env == envs::EnvName::Traffic ? 300 : 200;
    c.search.max_iterations = 5;
  }
  return c;
}

void ExperimentConfig::validate() const {
  const bool tabular = env == envs::EnvName::Cdst;
  if (tabular != (agent_kind == AgentKind::Dwtq))
    throw ConfigError("agent kind " + std::string(to_string(agent_kind)) + " does not match environment " +
                      std::string(envs::to_string(env)) + " (cdst uses dwtq, traffic and item_gathering use dwdqn)");
  try {
    agent.validate();
    inference.validate();
    search.validate();
    dataset.noise.validate(envs::default_spec(env).objective_count);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (!(preference_step > 0.0 && preference_step <= 1.0)) throw ConfigError("agent.preference_step must lie in (0, 1]");
  if (dataset.samples < 1000) throw ConfigError("dataset.samples must be at least 1000");
  if (!(dataset.noise_fraction >= 0.0 && dataset.noise_fraction <= 1.0))
    throw ConfigError("dataset.noise_fraction must lie in [0, 1]");
  if (!(dataset.gamma > 0.0 && dataset.gamma <= 1.0)) throw ConfigError("dataset.gamma must lie in (0, 1]");
  for (const auto& m : baselines)
    if (m != "pm" && m != "mwal") throw ConfigError("baselines.methods: unknown method '" + m + "'");
  if (baseline_agent_episodes < 0) throw ConfigError("baselines.agent_episodes must not be negative");
  if (scaler_episodes < 1) throw ConfigError("baselines.scaler_episodes must be positive");
  if (utility_episodes < 1) throw ConfigError("metrics.utility_episodes must be positive");
  if (demo_episodes < 1) throw ConfigError("evaluation.demo_episodes must be positive");
  if (truths_per_treasure < 1) throw ConfigError("evaluation.truths_per_treasure must be positive");
  if (output_dir.empty()) throw ConfigError("experiment.output must not be empty");
}

std::uint64_t ExperimentConfig::seed_for(std::string_view stage) const {
  const std::optional<std::uint64_t>* fixed = nullptr;
  if (stage == "agent") fixed = &agent_seed;
  if (stage == "dataset") fixed = &dataset_seed;
  if (stage == "inference") fixed = &inference_seed;
  if (stage == "evaluation") fixed = &evaluation_seed;
  if (fixed && *fixed) return **fixed;
  return derive_seed(seed, stage);
}

envs::EnvSpec ExperimentConfig::env_spec() const {
  if (!grid_file) return envs::default_spec(env);
  std::ifstream in(*grid_file);
  if (!in) throw ConfigError("cannot read grid file " + grid_file->string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return envs::spec_with_grid(env, envs::parse_grid(ss.str()));
  } catch (const std::exception& e) {
    throw ConfigError("grid file " + grid_file->string() + ": " + e.what());
  }
}

ExperimentConfig parse_config(std::string_view text) {
  boost::property_tree::ptree tree;
  try {
    std::istringstream in{std::string(text)};
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError("malformed config: " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  std::vector<std::pair<std::string, std::string>> entries;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) throw ConfigError("config key '" + section + "' lies outside a section");
    for (const auto& [key, value] : body) entries.emplace_back(section + "." + key, trim(value.data()));
  }
  std::optional<envs::EnvName> env;
  for (const auto& [key, value] : entries)
    if (key == "experiment.env") {
      ExperimentConfig probe;
      fields().at(key).set(probe, key, value);
      env = probe.env;
    }
  if (!env) throw ConfigError("config must set [experiment] env");
  ExperimentConfig cfg = default_config(*env);
  for (const auto& [key, value] : entries) {
    const auto it = fields().find(key);
    if (it == fields().end()) throw ConfigError("unknown config key '" + key + "'");
    it->second.set(cfg, key, value);
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::map<std::string, std::string> config_entries(const ExperimentConfig& cfg) {
  std::map<std::string, std::string> out;
  for (const auto& [key, field] : fields()) out[key] = field.get(cfg);
  return out;
}

std::string canonical_config(const ExperimentConfig& cfg) {
  std::string out;
  for (const auto& [key, value] : config_entries(cfg)) out += key + "=" + value + "\n";
  return out;
}

}  // namespace dwpi::harness
