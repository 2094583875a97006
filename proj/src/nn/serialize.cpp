#include <charconv>
#include <cstdio>
#include <sstream>

#include "dwpi/nn/mlp.hpp"

namespace dwpi::nn {

namespace {

constexpr std::string_view kMagic = "dwpi-mlp";
constexpr int kFormatVersion = 1;

void put(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

class Reader {
 public:
  explicit Reader(std::string_view text) : in_(std::string(text)) {}

  std::string word(const char* what) {
    std::string w;
    if (!(in_ >> w)) throw FormatError(std::string("model blob truncated: expected ") + what);
    return w;
  }

  void expect(std::string_view keyword) {
    const auto w = word(std::string(keyword).c_str());
    if (w != keyword) throw FormatError("model blob: expected '" + std::string(keyword) + "', got '" + w + "'");
  }

  long integer(const char* what) {
    const auto w = word(what);
    long v = 0;
    auto [p, ec] = std::from_chars(w.data(), w.data() + w.size(), v);
    if (ec != std::errc() || p != w.data() + w.size()) throw FormatError("model blob: bad integer '" + w + "'");
    return v;
  }

  double real() {
    const auto w = word("parameter");
    double v = 0;
    auto [p, ec] = std::from_chars(w.data(), w.data() + w.size(), v);
    if (ec != std::errc() || p != w.data() + w.size()) throw FormatError("model blob: bad number '" + w + "'");
    return v;
  }

 private:
  std::istringstream in_;
};

}  // namespace

std::string serialize(const Mlp& model) {
  std::string out;
  out += std::string(kMagic) + " " + std::to_string(kFormatVersion) + "\n";
  out += "layers " + std::to_string(model.layer_sizes().size());
  for (auto s : model.layer_sizes()) out += " " + std::to_string(s);
  out += "\n";
  for (std::size_t i = 0; i < model.layer_count(); ++i) {
    const auto& l = model.layer(i);
    out += "W " + std::to_string(l.weights.rows()) + " " + std::to_string(l.weights.cols()) + "\n";
    for (Eigen::Index r = 0; r < l.weights.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weights.cols(); ++c) {
        if (c) out += ' ';
        put(out, l.weights(r, c));
      }
      out += '\n';
    }
    out += "b " + std::to_string(l.bias.size()) + "\n";
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) {
      if (r) out += ' ';
      put(out, l.bias(r));
    }
    out += "\nend-layer\n";
  }
  out += "end\n";
  return out;
}

Mlp deserialize(std::string_view blob) {
  Reader in(blob);
  if (in.word("magic") != kMagic) throw FormatError("not a model blob");
  const long version = in.integer("version");
  if (version != kFormatVersion)
    throw FormatError("unsupported model format version " + std::to_string(version) + " (expected " +
                      std::to_string(kFormatVersion) + ")");
  in.expect("layers");
  const long count = in.integer("layer count");
  if (count < 2 || count > 64) throw FormatError("model blob: implausible layer count");
  std::vector<std::size_t> sizes;
  for (long i = 0; i < count; ++i) {
    const long s = in.integer("layer size");
    if (s <= 0) throw FormatError("model blob: layer size must be positive");
    sizes.push_back(static_cast<std::size_t>(s));
  }
  Mlp model(sizes);
  for (std::size_t i = 0; i < model.layer_count(); ++i) {
    auto& l = model.layer(i);
    in.expect("W");
    if (in.integer("rows") != l.weights.rows() || in.integer("cols") != l.weights.cols())
      throw FormatError("model blob: weight shape does not match layer sizes");
    for (Eigen::Index r = 0; r < l.weights.rows(); ++r)
      for (Eigen::Index c = 0; c < l.weights.cols(); ++c) l.weights(r, c) = in.real();
    in.expect("b");
    if (in.integer("bias size") != l.bias.size()) throw FormatError("model blob: bias shape mismatch");
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) l.bias(r) = in.real();
    in.expect("end-layer");
  }
  in.expect("end");
  return model;
}

}  // namespace dwpi::nn
