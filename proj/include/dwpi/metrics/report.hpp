#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dwpi/core.hpp"

namespace dwpi::metrics {

inline constexpr int kReportSchemaVersion = 1;

struct EvalReport {
  std::string method;    // "dwpi", "pm", "mwal"
  std::string scenario;  // treasure number or scenario slug
  PreferenceVector inferred;
  PreferenceVector truth;
  std::optional<bool> interval_correct;  // CDST only
  double mse = 0.0;
  double kl = 0.0;
  double utility_abs_err = 0.0;
  std::int64_t wall_clock_ms = 0;

  void validate() const;
};

/// Fills mse and kl from inferred and truth.
EvalReport make_report(std::string method, std::string scenario, PreferenceVector inferred, PreferenceVector truth);

/// Metric rows in fixed column order behind a schema comment. Wall-clock
/// times are left out so that the file is deterministic.
std::string format_reports_csv(std::span<const EvalReport> reports);
/// method,scenario,wall_clock_ms
std::string format_timings_csv(std::span<const EvalReport> reports);

struct MethodSummary {
  std::string method;
  std::size_t count = 0;
  std::optional<double> accuracy;  // over rows with interval_correct
  double mean_mse = 0.0;
  double mean_kl = 0.0;
  double mean_utility_abs_err = 0.0;
  std::int64_t total_ms = 0;
};

/// One summary per method, in order of first appearance.
std::vector<MethodSummary> summarize(std::span<const EvalReport> reports);
/// "# accuracy dwpi 1.000 (10/10)" style lines, one per method with
/// interval rows.
std::string accuracy_lines(std::span<const EvalReport> reports);

}  // namespace dwpi::metrics
