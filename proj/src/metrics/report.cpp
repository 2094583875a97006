#include "dwpi/metrics/report.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "dwpi/metrics/metrics.hpp"

namespace dwpi::metrics {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string weights(const PreferenceVector& p) {
  std::string out;
  for (std::size_t i = 0; i < p.size(); ++i) out += (i ? ";" : "") + num(p[i]);
  return out;
}

std::string flag(std::optional<bool> b) { return b ? (*b ? "1" : "0") : ""; }

// Labels are written raw, so they must not break the CSV.
void check_label(const std::string& s, const char* what) {
  if (s.empty() || s.find_first_of(",\n\"") != std::string::npos)
    throw std::invalid_argument(std::string("report ") + what + " label must be non-empty without commas or quotes");
}

}  // namespace

void EvalReport::validate() const {
  check_label(method, "method");
  check_label(scenario, "scenario");
  if (!(mse >= 0.0) || !(kl >= 0.0) || !(utility_abs_err >= 0.0) || wall_clock_ms < 0)
    throw std::invalid_argument("report metrics must be non-negative");
}

EvalReport make_report(std::string method, std::string scenario, PreferenceVector inferred, PreferenceVector truth) {
  EvalReport r;
  r.method = std::move(method);
  r.scenario = std::move(scenario);
  r.mse = mse(inferred, truth);
  r.kl = kl_for(truth, inferred);
  r.inferred = std::move(inferred);
  r.truth = std::move(truth);
  return r;
}

std::string format_reports_csv(std::span<const EvalReport> reports) {
  std::string out = "# dwpi-report " + std::to_string(kReportSchemaVersion) + "\n";
  out += "method,scenario,inferred,inferred_cf,truth,truth_cf,interval_correct,mse,kl,utility_abs_err\n";
  for (const auto& r : reports) {
    r.validate();
    out += r.method + "," + r.scenario + "," + weights(r.inferred) + "," + flag(r.inferred.cooperative()) + "," +
           weights(r.truth) + "," + flag(r.truth.cooperative()) + "," + flag(r.interval_correct) + "," + num(r.mse) +
           "," + num(r.kl) + "," + num(r.utility_abs_err) + "\n";
  }
  return out;
}

std::string format_timings_csv(std::span<const EvalReport> reports) {
  std::string out = "method,scenario,wall_clock_ms\n";
  for (const auto& r : reports) out += r.method + "," + r.scenario + "," + std::to_string(r.wall_clock_ms) + "\n";
  return out;
}

std::vector<MethodSummary> summarize(std::span<const EvalReport> reports) {
  std::vector<MethodSummary> out;
  std::vector<std::pair<std::size_t, std::size_t>> hits;  // correct, judged
  for (const auto& r : reports) {
    std::size_t i = 0;
    while (i < out.size() && out[i].method != r.method) ++i;
    if (i == out.size()) {
      out.emplace_back();
      out.back().method = r.method;
      hits.emplace_back(0, 0);
    }
    auto& s = out[i];
    ++s.count;
    s.mean_mse += r.mse;
    s.mean_kl += r.kl;
    s.mean_utility_abs_err += r.utility_abs_err;
    s.total_ms += r.wall_clock_ms;
    if (r.interval_correct) {
      hits[i].first += *r.interval_correct;
      ++hits[i].second;
    }
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double n = static_cast<double>(out[i].count);
    out[i].mean_mse /= n;
    out[i].mean_kl /= n;
    out[i].mean_utility_abs_err /= n;
    if (hits[i].second) out[i].accuracy = static_cast<double>(hits[i].first) / static_cast<double>(hits[i].second);
  }
  return out;
}

std::string accuracy_lines(std::span<const EvalReport> reports) {
  std::string out;
  for (const auto& s : summarize(reports)) {
    if (!s.accuracy) continue;
    std::size_t judged = 0, correct = 0;
    for (const auto& r : reports)
      if (r.method == s.method && r.interval_correct) {
        ++judged;
        correct += *r.interval_correct;
      }
    char buf[128];
    std::snprintf(buf, sizeof buf, "# accuracy %s %.3f (%zu/%zu)\n", s.method.c_str(), *s.accuracy, correct, judged);
    out += buf;
  }
  return out;
}

}  // namespace dwpi::metrics
