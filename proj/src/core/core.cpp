#include "dwpi/core.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>

namespace dwpi {

namespace {

constexpr double kSimplexTolerance = 1e-9;

void check_simplex(const std::vector<double>& w) {
  if (w.empty()) throw DomainError("empty preference vector");
  double sum = 0.0;
  for (double x : w) {
    if (!std::isfinite(x) || x < 0.0) throw DomainError("preference weights must be finite and non-negative");
    sum += x;
  }
  if (std::abs(sum - 1.0) > kSimplexTolerance) throw DomainError("preference weights must sum to 1");
}

}  // namespace

PreferenceVector::PreferenceVector(std::vector<double> weights, std::optional<bool> cooperative)
    : weights_(std::move(weights)), cooperative_(cooperative) {
  check_simplex(weights_);
}

std::vector<double> PreferenceVector::effective_weights() const {
  std::vector<double> w = weights_;
  if (cooperative_.has_value() && !*cooperative_ && !w.empty()) w.back() = -w.back();
  return w;
}

PreferenceVector PreferenceVector::with_cooperative(std::optional<bool> flag) const {
  PreferenceVector copy = *this;
  copy.cooperative_ = flag;
  return copy;
}

Return discounted_return(const Trajectory& traj, double gamma) {
  if (traj.steps.empty()) throw DomainError("empty trajectory");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw DomainError("gamma must lie in (0, 1]");
  Return ret;
  ret.gamma = gamma;
  ret.components.assign(traj.steps.front().reward.size(), 0.0);
  double discount = 1.0;
  for (const auto& step : traj.steps) {
    if (step.reward.size() != ret.components.size()) throw DomainError("reward dimension changed within trajectory");
    for (std::size_t j = 0; j < step.reward.size(); ++j) ret.components[j] += discount * step.reward[j];
    discount *= gamma;
  }
  return ret;
}

double utility(std::span<const double> ret, const PreferenceVector& pref) {
  if (ret.size() != pref.size()) throw DomainError("utility: dimension mismatch");
  const auto w = pref.effective_weights();
  return std::inner_product(w.begin(), w.end(), ret.begin(), 0.0);
}

double utility(const Return& ret, const PreferenceVector& pref) {
  return utility(std::span<const double>(ret.components), pref);
}

PreferenceVector normalize(std::span<const double> weights, std::optional<bool> cooperative) {
  std::vector<double> w(weights.begin(), weights.end());
  double sum = 0.0;
  for (double& x : w) {
    if (!std::isfinite(x)) throw DomainError("non-finite preference weight");
    x = std::max(x, 0.0);
    sum += x;
  }
  if (!(sum > 0.0)) throw DomainError("degenerate preference");
  for (double& x : w) x /= sum;
  return PreferenceVector(std::move(w), cooperative);
}

std::vector<double> mean_of(std::span<const std::vector<double>> rows) {
  if (rows.empty()) throw DomainError("mean of empty set");
  std::vector<double> mean(rows.front().size(), 0.0);
  for (const auto& row : rows) {
    if (row.size() != mean.size()) throw DomainError("mean: dimension mismatch");
    for (std::size_t j = 0; j < row.size(); ++j) mean[j] += row[j];
  }
  for (double& x : mean) x /= static_cast<double>(rows.size());
  return mean;
}

std::string format_weights(const PreferenceVector& pref, int decimals) {
  std::string out;
  char buf[32];
  for (std::size_t i = 0; i < pref.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.*f", decimals, pref[i]);
    if (i) out += ' ';
    out += buf;
  }
  if (pref.cooperative()) out += *pref.cooperative() ? " CF=1" : " CF=0";
  return out;
}

}  // namespace dwpi
