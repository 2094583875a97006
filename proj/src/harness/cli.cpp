#include "dwpi/harness/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <sstream>

#include "dwpi/agents/persist.hpp"
#include "dwpi/harness/experiment.hpp"
#include "dwpi/metrics/metrics.hpp"

#ifndef DWPI_VERSION
#define DWPI_VERSION "dev"
#endif

namespace dwpi::harness {

namespace {

struct Options {
  std::string config;
  std::string env = "cdst";
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::vector<std::string> scenarios;
  bool suboptimal = false;
  std::string method;
  std::string scenario;
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config, "INI configuration file");
  cmd->add_option("--env", o.env, "environment used when no config file is given (cdst, traffic, item_gathering)");
  cmd->add_option("--seed", o.seed, "master seed");
  cmd->add_option("--out", o.out, "output directory");
}

ExperimentConfig resolve(const Options& o) {
  ExperimentConfig cfg;
  if (!o.config.empty()) {
    cfg = load_config(o.config);
  } else {
    try {
      cfg = default_config(envs::parse_env_name(o.env));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  if (o.seed) cfg.seed = *o.seed;
  if (o.out) cfg.output_dir = *o.out;
  if (!o.scenarios.empty()) cfg.scenarios = o.scenarios;
  if (o.suboptimal) cfg.suboptimal = true;
  cfg.validate();
  return cfg;
}

std::string join(const PreferenceVector& p) {
  std::string s;
  char buf[32];
  for (std::size_t i = 0; i < p.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%s%.6f", i ? " " : "", p[i]);
    s += buf;
  }
  if (p.cooperative()) s += *p.cooperative() ? " CF=1" : " CF=0";
  return s;
}

void print_stage(std::ostream& out, const StageRecord& r) {
  out << "stage " << r.stage << (r.cached ? " cached" : " done") << " (" << static_cast<long long>(r.ms) << " ms)\n";
  for (const auto& a : r.artifacts) out << "  " << a.string() << "\n";
}

void print_evaluation(std::ostream& out, const Evaluation& ev, const StageRecord& rec) {
  print_stage(out, rec);
  for (const auto& s : metrics::summarize(ev.reports)) {
    out << s.method << ": mse " << s.mean_mse << " kl " << s.mean_kl << " utility_abs_err " << s.mean_utility_abs_err;
    if (s.accuracy) out << " accuracy " << *s.accuracy;
    out << "\n";
  }
}

int dispatch(CLI::App& app, const Options& o, std::ostream& out) {
  const std::string name = app.get_subcommands().front()->get_name();
  const ExperimentConfig cfg = resolve(o);
  Experiment e(cfg);
  if (name == "train-agent") {
    print_stage(out, e.train_agent());
  } else if (name == "gen-dataset") {
    print_stage(out, e.generate_dataset());
  } else if (name == "train-inference") {
    print_stage(out, e.train_inference());
  } else if (name == "infer") {
    const auto c = e.find_case(o.scenario);
    const auto model = e.load_model();
    const auto demos = e.demonstrations(c);
    const auto t = metrics::timed([&] { return pi::infer(model, demos, cfg.dataset.gamma); });
    out << "scenario " << c.label << "\ntruth " << join(c.truth) << "\ninferred " << join(t.value) << "\nmse "
        << metrics::mse(c.truth, t.value) << "\nms " << t.ms << "\n";
    if (c.interval) out << "interval " << (c.interval->contains(t.value[1]) ? "correct" : "wrong") << "\n";
  } else if (name == "baseline") {
    const auto c = e.find_case(o.scenario);
    const auto res = e.run_baseline(o.method, c);
    const auto log = e.logs_dir() / (o.method + "_" + c.label + (cfg.suboptimal ? "_suboptimal" : "") + ".csv");
    agents::save_text(log, baselines::format_iteration_log(res.log));
    out << "scenario " << c.label << "\ntruth " << join(c.truth) << "\ninferred " << join(res.best) << "\nmse "
        << metrics::mse(c.truth, res.best) << "\niterations " << res.log.size() << "\nconverged "
        << (res.converged ? "yes" : "no") << "\nlog " << log.string() << "\n";
  } else if (name == "evaluate") {
    Evaluation ev;
    const auto rec = e.evaluate(&ev);
    print_evaluation(out, ev, rec);
  } else if (name == "run") {
    const auto m = run_experiment(cfg);
    for (const auto& s : m.stages) print_stage(out, s);
    out << "manifest " << e.manifest_path().string() << "\n";
  } else if (name == "reproduce-dst") {
    if (cfg.env != envs::EnvName::Cdst) throw ConfigError("reproduce-dst needs env = cdst");
    (void)e.cases();
    RunManifest m;
    m.config_hash = config_hash(cfg);
    m.version = DWPI_VERSION;
    m.started = utc_timestamp();
    m.stages.push_back(e.train_agent());
    m.stages.push_back(e.generate_dataset());
    m.stages.push_back(e.train_inference());
    for (const auto& s : m.stages) print_stage(out, s);
    for (bool sub : {false, true}) {
      auto variant = cfg;
      variant.suboptimal = sub;
      Experiment ve(variant);
      Evaluation ev;
      const auto rec = ve.evaluate(&ev);
      print_evaluation(out, ev, rec);
      const auto text = agents::load_text(rec.artifacts.front());
      std::istringstream lines(text);
      for (std::string line; std::getline(lines, line);)
        if (line.rfind("# accuracy", 0) == 0)
          out << (sub ? "sub-optimal " : "optimal ") << line.substr(2) << "\n";
      m.stages.push_back(rec);
      m.reports.insert(m.reports.end(), ev.report_files.begin(), ev.report_files.end());
    }
    m.finished = utc_timestamp();
    agents::save_text(e.manifest_path(), format_manifest(m));
    out << "manifest " << e.manifest_path().string() << "\n";
  }
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Preference inference from demonstrations with dynamic-weight agents", "dwpi"};
  app.set_version_flag("--version", std::string(DWPI_VERSION));
  app.require_subcommand(1, 1);
  Options o;

  add_common(app.add_subcommand("train-agent", "train the dynamic-weight agent"), o);
  add_common(app.add_subcommand("gen-dataset", "roll out the agent into an inference dataset"), o);
  add_common(app.add_subcommand("train-inference", "fit the inference model on the dataset"), o);
  add_common(app.add_subcommand("run", "every stage in order, then write the manifest"), o);
  auto* infer = app.add_subcommand("infer", "infer the preference behind demonstrations of one scenario");
  add_common(infer, o);
  infer->add_option("--scenario", o.scenario, "scenario name, CDST treasure number or w=<treasure weight>")->required();
  infer->add_flag("--suboptimal", o.suboptimal, "add extra steps to the demonstrations");
  auto* baseline = app.add_subcommand("baseline", "run one inverse RL baseline on one scenario");
  add_common(baseline, o);
  baseline->add_option("--method", o.method, "pm or mwal")->required()->check(CLI::IsMember({"pm", "mwal"}));
  baseline->add_option("--scenario", o.scenario, "scenario name, CDST treasure number or w=<treasure weight>")
      ->required();
  baseline->add_flag("--suboptimal", o.suboptimal, "add extra steps to the demonstrations");
  auto* evaluate = app.add_subcommand("evaluate", "evaluate DWPI and the baselines on every scenario");
  add_common(evaluate, o);
  evaluate->add_option("--scenario", o.scenarios, "restrict to these scenarios");
  evaluate->add_flag("--suboptimal", o.suboptimal, "add extra steps to the demonstrations");
  add_common(app.add_subcommand("reproduce-dst", "full pipeline on CDST with optimal and sub-optimal demonstrations"), o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    return dispatch(app, o, out);
  } catch (const ConfigError& e) {
    err << "dwpi: invalid configuration: " << e.what() << "\n";
    return 3;
  } catch (const MissingArtifact& e) {
    err << "dwpi: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "dwpi: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace dwpi::harness
