#include "dwpi/agents/persist.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace dwpi::agents {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class Tokens {
 public:
  explicit Tokens(std::string_view text) : in_(std::string(text)) {}

  std::string word(const char* what) {
    std::string w;
    if (!(in_ >> w)) throw nn::FormatError(std::string("agent file truncated: expected ") + what);
    return w;
  }
  void expect(std::string_view key) {
    const auto w = word(std::string(key).c_str());
    if (w != key) throw nn::FormatError("agent file: expected '" + std::string(key) + "', got '" + w + "'");
  }
  template <typename T>
  T value(const char* what) {
    const auto w = word(what);
    T v{};
    auto [p, ec] = std::from_chars(w.data(), w.data() + w.size(), v);
    if (ec != std::errc() || p != w.data() + w.size())
      throw nn::FormatError(std::string("agent file: bad ") + what + " '" + w + "'");
    return v;
  }
  std::string rest() {
    std::string r((std::istreambuf_iterator<char>(in_)), std::istreambuf_iterator<char>());
    return r;
  }

 private:
  std::istringstream in_;
};

std::optional<bool> parse_flag(const std::string& w) {
  if (w == "none") return std::nullopt;
  if (w == "1") return true;
  if (w == "0") return false;
  throw nn::FormatError("agent file: bad cooperative flag '" + w + "'");
}

std::string flag_text(std::optional<bool> f) { return f ? (*f ? "1" : "0") : "none"; }

}  // namespace

std::string serialize(const QTableSet& set) {
  std::string out = "dwpi-qtables 1\n";
  out += "states " + std::to_string(set.state_count()) + "\n";
  out += "objectives " + std::to_string(set.objective_count()) + "\n";
  out += "tables " + std::to_string(set.tables().size()) + "\n";
  for (const auto& t : set.tables()) {
    out += "pref";
    for (double w : t.pref.weights()) out += " " + num(w);
    out += " cf " + flag_text(t.pref.cooperative()) + "\n";
    for (std::size_t s = 0; s < set.state_count(); ++s) {
      const std::size_t base = s * envs::kActionCount;
      for (int a = 0; a < envs::kActionCount; ++a) out += num(t.q[base + a]) + " ";
      for (int a = 0; a < envs::kActionCount; ++a) {
        out += num(t.steps_to_go[base + a]);
        out += a + 1 < envs::kActionCount ? " " : "\n";
      }
    }
  }
  out += "end\n";
  return out;
}

QTableSet deserialize_qtables(std::string_view text) {
  Tokens in(text);
  if (in.word("magic") != "dwpi-qtables") throw nn::FormatError("not a Q-table file");
  if (const int v = in.value<int>("version"); v != 1)
    throw nn::FormatError("unsupported Q-table format version " + std::to_string(v) + " (expected 1)");
  in.expect("states");
  const auto states = in.value<std::size_t>("state count");
  in.expect("objectives");
  const auto k = in.value<std::size_t>("objective count");
  in.expect("tables");
  const auto n = in.value<std::size_t>("table count");
  QTableSet set(states, k);
  const std::size_t cells = states * envs::kActionCount;
  for (std::size_t i = 0; i < n; ++i) {
    in.expect("pref");
    std::vector<double> w(k);
    for (auto& x : w) x = in.value<double>("weight");
    in.expect("cf");
    const auto flag = parse_flag(in.word("cooperative flag"));
    QTableSet::Table t{PreferenceVector(std::move(w), flag), std::vector<double>(cells),
                       std::vector<double>(cells), {}};
    for (std::size_t s = 0; s < states; ++s) {
      const std::size_t base = s * envs::kActionCount;
      for (int a = 0; a < envs::kActionCount; ++a) t.q[base + a] = in.value<double>("q value");
      for (int a = 0; a < envs::kActionCount; ++a) t.steps_to_go[base + a] = in.value<double>("steps value");
    }
    set.tables().push_back(std::move(t));
  }
  in.expect("end");
  return set;
}

std::string serialize(const DwdqnAgent& agent) {
  const auto& hp = agent.hyperparams();
  std::string out = "dwpi-dwdqn 1\n";
  out += "observation " + std::to_string(agent.observation_size()) + "\n";
  out += "objectives " + std::to_string(agent.objective_count()) + "\n";
  out += "gamma " + num(hp.gamma) + "\n";
  out += "learning_rate " + num(hp.learning_rate) + "\n";
  out += "episodes " + std::to_string(hp.episodes) + "\n";
  out += "batch_size " + std::to_string(hp.batch_size) + "\n";
  out += "replay_capacity " + std::to_string(hp.replay_capacity) + "\n";
  out += "target_sync " + std::to_string(hp.target_sync) + "\n";
  out += "threshold " + std::to_string(hp.threshold) + "\n";
  out += "updates_per_episode " + std::to_string(hp.updates_per_episode) + "\n";
  out += "double_q " + std::to_string(hp.double_q ? 1 : 0) + "\n";
  out += "relabel_fraction " + num(hp.relabel_fraction) + "\n";
  out += "gradient_steps " + std::to_string(agent.gradient_steps()) + "\n";
  out += "network\n";
  out += nn::serialize(agent.online());
  return out;
}

DwdqnAgent deserialize_dwdqn(std::string_view text) {
  Tokens in(text);
  if (in.word("magic") != "dwpi-dwdqn") throw nn::FormatError("not a DWDQN file");
  if (const int v = in.value<int>("version"); v != 1)
    throw nn::FormatError("unsupported DWDQN format version " + std::to_string(v) + " (expected 1)");
  AgentHyperparams hp;
  in.expect("observation");
  const auto obs = in.value<std::size_t>("observation size");
  in.expect("objectives");
  const auto k = in.value<std::size_t>("objective count");
  in.expect("gamma");
  hp.gamma = in.value<double>("gamma");
  in.expect("learning_rate");
  hp.learning_rate = in.value<double>("learning rate");
  in.expect("episodes");
  hp.episodes = in.value<int>("episodes");
  in.expect("batch_size");
  hp.batch_size = in.value<std::size_t>("batch size");
  in.expect("replay_capacity");
  hp.replay_capacity = in.value<std::size_t>("replay capacity");
  in.expect("target_sync");
  hp.target_sync = in.value<int>("target sync");
  in.expect("threshold");
  hp.threshold = in.value<int>("threshold");
  in.expect("updates_per_episode");
  hp.updates_per_episode = in.value<int>("updates per episode");
  in.expect("double_q");
  hp.double_q = in.value<int>("double_q") != 0;
  in.expect("relabel_fraction");
  hp.relabel_fraction = in.value<double>("relabel fraction");
  in.expect("gradient_steps");
  (void)in.value<long>("gradient steps");
  in.expect("network");
  nn::Mlp net = nn::deserialize(in.rest());
  hp.hidden.assign(net.layer_sizes().begin() + 1, net.layer_sizes().end() - 1);
  return DwdqnAgent(obs, k, hp, std::move(net));
}

void save_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << text;
    if (!out) throw std::runtime_error("write failed for " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

std::string load_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace dwpi::agents
