#include "dwpi/pi/inference_model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>
#include <sstream>

#include "dwpi/nn/adam.hpp"

namespace dwpi::pi {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_number(const std::string& s) {
  double v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw nn::FormatError("inference model: bad number '" + s + "'");
  return v;
}

}  // namespace

void InferenceConfig::validate() const {
  if (hidden.empty()) throw std::invalid_argument("inference model needs hidden layers");
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");
  if (batch_size == 0) throw std::invalid_argument("batch size must be positive");
  if (max_epochs <= 0 || patience <= 0 || lr_decay_patience <= 0 || min_epochs < 0)
    throw std::invalid_argument("epochs and patience must be positive");
  if (!(lr_decay > 0.0 && lr_decay <= 1.0)) throw std::invalid_argument("lr_decay must lie in (0, 1]");
  if (!(validation_fraction > 0.0 && validation_fraction < 1.0))
    throw std::invalid_argument("validation fraction must lie in (0, 1)");
}

InferenceConfig default_inference_config(envs::EnvName env) {
  InferenceConfig cfg;
  cfg.learning_rate = env == envs::EnvName::ItemGathering ? 5e-3 : 1e-3;
  return cfg;
}

InferenceModel::InferenceModel(envs::EnvName env, std::vector<double> mean, std::vector<double> scale, nn::Mlp net)
    : env_(env), mean_(std::move(mean)), scale_(std::move(scale)), net_(std::move(net)) {
  if (mean_.size() != scale_.size() || net_.input_size() != mean_.size() || net_.output_size() != mean_.size())
    throw std::invalid_argument("inference model: inconsistent dimensions");
}

nn::Vector InferenceModel::standardize(std::span<const double> feature) const {
  if (feature.size() != mean_.size()) throw DomainError("inference: feature dimension mismatch");
  nn::Vector x(static_cast<Eigen::Index>(feature.size()));
  for (std::size_t j = 0; j < feature.size(); ++j) x(j) = (feature[j] - mean_[j]) / scale_[j];
  return x;
}

std::vector<double> InferenceModel::raw(std::span<const double> feature) const {
  const nn::Vector y = net_.forward(standardize(feature));
  return {y.data(), y.data() + y.size()};
}

PreferenceVector InferenceModel::predict(std::span<const double> feature) const {
  auto out = raw(feature);
  std::optional<bool> cf;
  if (signed_last()) {
    cf = out.back() >= 0.0;
    out.back() = std::abs(out.back());
  }
  double positive = 0.0;
  for (double v : out) positive += std::max(v, 0.0);
  if (!(positive > 0.0) || !std::isfinite(positive)) {
    std::vector<double> uniform(out.size(), 1.0 / static_cast<double>(out.size()));
    return PreferenceVector(std::move(uniform), cf);
  }
  return normalize(out, cf);
}

std::string InferenceModel::serialize() const {
  std::string out = "dwpi-inference 1\nenv " + std::string(envs::to_string(env_)) + "\nmean";
  for (double m : mean_) out += " " + num(m);
  out += "\nscale";
  for (double s : scale_) out += " " + num(s);
  out += "\nnetwork\n" + nn::serialize(net_);
  return out;
}

InferenceModel InferenceModel::deserialize(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string word;
  auto next = [&](const char* what) {
    if (!(in >> word)) throw nn::FormatError(std::string("inference model truncated: expected ") + what);
    return word;
  };
  if (next("magic") != "dwpi-inference") throw nn::FormatError("not an inference model file");
  if (next("version") != "1") throw nn::FormatError("unsupported inference model version " + word + " (expected 1)");
  if (next("env") != "env") throw nn::FormatError("inference model: expected 'env'");
  const auto env = envs::parse_env_name(next("environment"));
  if (next("mean") != "mean") throw nn::FormatError("inference model: expected 'mean'");
  std::vector<double> mean, scale;
  while (next("scale") != "scale") mean.push_back(parse_number(word));
  for (std::size_t j = 0; j < mean.size(); ++j) scale.push_back(parse_number(next("scale value")));
  if (next("network") != "network") throw nn::FormatError("inference model: expected 'network'");
  std::string rest((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return InferenceModel(env, std::move(mean), std::move(scale), nn::deserialize(rest));
}

std::vector<double> regression_target(const PreferenceVector& pref) { return pref.effective_weights(); }

InferenceModel train_inference_model(const PiDataset& ds, const InferenceConfig& cfg, std::uint64_t seed,
                                     TrainingReport* report) {
  cfg.validate();
  const std::size_t n = ds.size();
  const std::size_t k = ds.objective_count();
  if (n < 10) throw std::invalid_argument("inference training needs at least 10 samples");
  if (ds.targets.size() != n) throw std::invalid_argument("dataset features and targets differ in length");

  Rng rng(seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  const auto n_val = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(cfg.validation_fraction * n)));
  const std::vector<std::size_t> val_idx(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_val));
  std::vector<std::size_t> train_idx(order.begin() + static_cast<std::ptrdiff_t>(n_val), order.end());

  std::vector<double> mean(k, 0.0), scale(k, 0.0);
  for (auto i : train_idx)
    for (std::size_t j = 0; j < k; ++j) mean[j] += ds.features[i][j];
  for (double& m : mean) m /= static_cast<double>(train_idx.size());
  for (auto i : train_idx)
    for (std::size_t j = 0; j < k; ++j) scale[j] += std::pow(ds.features[i][j] - mean[j], 2);
  for (double& s : scale) {
    s = std::sqrt(s / static_cast<double>(train_idx.size()));
    if (!(s > 1e-12)) s = 1.0;
  }

  std::vector<std::size_t> sizes{k};
  sizes.insert(sizes.end(), cfg.hidden.begin(), cfg.hidden.end());
  sizes.push_back(k);
  InferenceModel model(ds.env, mean, scale, nn::Mlp::glorot(sizes, rng));

  auto pack = [&](std::span<const std::size_t> idx, nn::Matrix& x, nn::Matrix& y) {
    x.resize(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(idx.size()));
    y.resize(x.rows(), x.cols());
    for (std::size_t c = 0; c < idx.size(); ++c) {
      x.col(static_cast<Eigen::Index>(c)) = model.standardize(ds.features[idx[c]]);
      const auto t = regression_target(ds.targets[idx[c]]);
      for (std::size_t j = 0; j < k; ++j) y(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(c)) = t[j];
    }
  };
  nn::Matrix x_val, y_val;
  pack(val_idx, x_val, y_val);

  nn::Adam opt(model.network(), {.learning_rate = cfg.learning_rate});
  nn::Mlp best = model.network();
  double best_val = nn::mse_loss(model.network(), x_val, y_val);
  double patience_ref = best_val;
  int best_epoch = -1, since_best = 0;
  bool stopped = false;
  TrainingReport rep;
  rep.train_size = train_idx.size();
  rep.val_size = val_idx.size();

  nn::Matrix xb, yb;
  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    if (cfg.cosine_schedule)
      opt.set_learning_rate(cfg.learning_rate * 0.5 * (1.0 + std::cos(std::numbers::pi * epoch / cfg.max_epochs)));
    std::shuffle(train_idx.begin(), train_idx.end(), rng);
    double sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < train_idx.size(); start += cfg.batch_size) {
      const std::size_t len = std::min(cfg.batch_size, train_idx.size() - start);
      pack(std::span(train_idx).subspan(start, len), xb, yb);
      sum += nn::train_step(model.network(), xb, yb, opt);
      ++batches;
    }
    const double val = nn::mse_loss(model.network(), x_val, y_val);
    if (!std::isfinite(val)) throw nn::DivergenceError("divergence: non-finite validation loss in epoch " + std::to_string(epoch));
    rep.train_loss.push_back(sum / static_cast<double>(batches));
    rep.val_loss.push_back(val);
    if (cfg.cosine_schedule) continue;
    if (val < best_val) {
      best_val = val;
      best = model.network();
      best_epoch = epoch;
    }
    if (val < patience_ref - cfg.min_delta) {
      patience_ref = val;
      since_best = 0;
    } else if (++since_best >= cfg.patience && epoch + 1 >= cfg.min_epochs) {
      stopped = true;
      break;
    } else if (since_best % cfg.lr_decay_patience == 0) {
      opt.set_learning_rate(std::max(cfg.min_learning_rate, opt.config().learning_rate * cfg.lr_decay));
    }
  }
  // The cosine schedule keeps its final, fully annealed parameters.
  rep.early_stopped = stopped;
  if (!cfg.cosine_schedule) {
    model.network() = std::move(best);
  } else {
    best_val = rep.val_loss.back();
    best_epoch = static_cast<int>(rep.val_loss.size()) - 1;
  }
  rep.best_epoch = best_epoch;
  rep.best_val_loss = best_val;
  if (report) *report = std::move(rep);
  return model;
}

PreferenceVector infer(const InferenceModel& model, std::span<const Trajectory> demos, double gamma) {
  if (demos.empty()) throw DomainError("inference needs at least one demonstration");
  std::vector<std::vector<double>> returns;
  returns.reserve(demos.size());
  for (const auto& d : demos) returns.push_back(discounted_return(d, gamma).components);
  return model.predict(mean_of(returns));
}

}  // namespace dwpi::pi
