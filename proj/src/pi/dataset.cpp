#include "dwpi/pi/dataset.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>

#include "dwpi/agents/persist.hpp"

namespace dwpi::pi {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_number(std::string_view s) {
  double v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw std::invalid_argument("dataset: bad number '" + std::string(s) + "'");
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

void NoiseSpec::validate(std::size_t objective_count) const {
  if (extra_steps_min < 0 || extra_steps_max < extra_steps_min)
    throw std::invalid_argument("noise: need 0 <= extra_steps_min <= extra_steps_max");
  if (time_objective_index >= objective_count) throw std::invalid_argument("noise: time objective index out of range");
}

std::vector<double> apply_noise(std::vector<double> feature, int extra_steps, const NoiseSpec& noise) {
  noise.validate(feature.size());
  feature[noise.time_objective_index] -= extra_steps;
  return feature;
}

Trajectory add_extra_steps(const Trajectory& traj, int extra_steps, const NoiseSpec& noise) {
  if (traj.steps.empty()) throw DomainError("empty trajectory");
  const std::size_t k = traj.steps.front().reward.size();
  noise.validate(k);
  Trajectory out = traj;
  RewardVector idle(k, 0.0);
  idle[noise.time_objective_index] = -1.0;
  for (int i = 0; i < extra_steps; ++i) out.steps.push_back({traj.steps.back().state, traj.steps.back().action, idle});
  return out;
}

PiDataset generate_dataset(const agents::Agent& agent, envs::Environment& env,
                           const agents::PreferenceSampler& sampler, const DatasetOptions& options,
                           std::uint64_t seed) {
  if (options.samples == 0) throw std::invalid_argument("dataset needs at least one sample");
  if (!(options.noise_fraction >= 0.0 && options.noise_fraction <= 1.0))
    throw std::invalid_argument("noise fraction must lie in [0, 1]");
  options.noise.validate(env.objective_count());

  PiDataset ds;
  ds.env = env.name();
  ds.objective_names = env.spec().objective_names;
  ds.gamma = options.gamma;
  ds.noise_fraction = options.noise_fraction;
  ds.noise = options.noise;
  ds.features.reserve(options.samples);
  ds.targets.reserve(options.samples);

  Rng pref_rng(derive_seed(seed, "preference"));
  Rng noise_rng(derive_seed(seed, "noise"));
  const std::uint64_t episode_seed = derive_seed(seed, "episode");
  std::bernoulli_distribution noisy(options.noise_fraction);
  std::uniform_int_distribution<int> extra(options.noise.extra_steps_min, options.noise.extra_steps_max);

  for (std::size_t i = 0; i < options.samples; ++i) {
    auto pref = sampler(pref_rng);
    const auto demo = agents::rollout(agent, env, pref, 1, derive_seed(episode_seed, i));
    auto feature = discounted_return(demo.front(), options.gamma).components;
    const bool add_noise = noisy(noise_rng);
    if (add_noise) feature = apply_noise(std::move(feature), extra(noise_rng), options.noise);
    ds.features.push_back(std::move(feature));
    ds.targets.push_back(std::move(pref));
    ds.noised.push_back(add_noise);
  }
  return ds;
}

std::string format_dataset(const PiDataset& ds) {
  std::string out = "# dwpi-dataset 1 env=" + std::string(envs::to_string(ds.env)) + " objectives=";
  for (std::size_t j = 0; j < ds.objective_names.size(); ++j) out += (j ? "," : "") + ds.objective_names[j];
  out += " gamma=" + num(ds.gamma) + " noise_fraction=" + num(ds.noise_fraction) +
         " extra_steps=" + std::to_string(ds.noise.extra_steps_min) + ".." + std::to_string(ds.noise.extra_steps_max) +
         " time_index=" + std::to_string(ds.noise.time_objective_index) + "\n";
  for (std::size_t i = 0; i < ds.size(); ++i) {
    for (std::size_t j = 0; j < ds.features[i].size(); ++j) out += (j ? "," : "") + num(ds.features[i][j]);
    out += '|';
    const auto& t = ds.targets[i];
    for (std::size_t j = 0; j < t.size(); ++j) out += (j ? "," : "") + num(t[j]);
    if (t.cooperative()) out += *t.cooperative() ? ",CF=1" : ",CF=0";
    out += '\n';
  }
  return out;
}

PiDataset parse_dataset(std::string_view text) {
  PiDataset ds;
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line.rfind("# dwpi-dataset ", 0) != 0)
    throw std::invalid_argument("dataset: missing header line");
  {
    std::istringstream header(line.substr(2));
    std::string word;
    header >> word >> word;
    if (word != "1") throw std::invalid_argument("dataset: unsupported format version " + word);
    bool have_env = false, have_objectives = false;
    while (header >> word) {
      const auto eq = word.find('=');
      if (eq == std::string::npos) throw std::invalid_argument("dataset: bad header field '" + word + "'");
      const std::string key = word.substr(0, eq), value = word.substr(eq + 1);
      if (key == "env") {
        ds.env = envs::parse_env_name(value);
        have_env = true;
      } else if (key == "objectives") {
        for (auto name : split(value, ',')) ds.objective_names.emplace_back(name);
        have_objectives = true;
      } else if (key == "gamma") {
        ds.gamma = parse_number(value);
      } else if (key == "noise_fraction") {
        ds.noise_fraction = parse_number(value);
      } else if (key == "extra_steps") {
        const auto dots = value.find("..");
        if (dots == std::string::npos) throw std::invalid_argument("dataset: bad extra_steps '" + value + "'");
        ds.noise.extra_steps_min = static_cast<int>(parse_number(value.substr(0, dots)));
        ds.noise.extra_steps_max = static_cast<int>(parse_number(value.substr(dots + 2)));
      } else if (key == "time_index") {
        ds.noise.time_objective_index = static_cast<std::size_t>(parse_number(value));
      }
    }
    if (!have_env || !have_objectives) throw std::invalid_argument("dataset: header lacks env or objectives");
  }
  const std::size_t k = ds.objective_names.size();
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto bar = line.find('|');
    if (bar == std::string::npos) throw std::invalid_argument("dataset line " + std::to_string(line_no) + ": missing '|'");
    std::vector<double> feature;
    for (auto f : split(std::string_view(line).substr(0, bar), ',')) feature.push_back(parse_number(f));
    std::vector<double> weights;
    std::optional<bool> cf;
    for (auto f : split(std::string_view(line).substr(bar + 1), ',')) {
      if (f.rfind("CF=", 0) == 0) {
        cf = f.substr(3) == "1";
      } else {
        weights.push_back(parse_number(f));
      }
    }
    if (feature.size() != k || weights.size() != k)
      throw std::invalid_argument("dataset line " + std::to_string(line_no) + ": wrong number of components");
    ds.features.push_back(std::move(feature));
    ds.targets.emplace_back(std::move(weights), cf);
  }
  return ds;
}

void save_dataset(const std::filesystem::path& path, const PiDataset& ds) {
  agents::save_text(path, format_dataset(ds));
}

PiDataset load_dataset(const std::filesystem::path& path) { return parse_dataset(agents::load_text(path)); }

}  // namespace dwpi::pi
