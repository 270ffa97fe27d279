#include <algorithm>
#include <array>
#include <cmath>
#include <utility>

#include "catforget/error.hpp"
#include "catforget/experiments.hpp"

namespace catforget::exp {

namespace {

ContinualConfig fig3a() {
  ContinualConfig c;
  c.n = 3000;
  c.r = 0.8;
  c.q = 0.3;
  c.eta = 1.0;
  c.sigma1_sq = c.sigma2_sq = 0.8;
  c.sigma_b1 = c.sigma_b2 = c.sigma_j = 1.0;
  return c;
}

ContinualConfig fig3b(double q, double sigma_j) {
  ContinualConfig c = fig3a();
  c.q = q;
  c.sigma_j = sigma_j;
  c.sigma1_sq = c.sigma2_sq = 1.7;
  return c;
}

ContinualConfig fig4() {
  ContinualConfig c = fig3a();
  c.n = 1500;
  c.sigma1_sq = c.sigma2_sq = 1.0;
  return c;
}

const std::array<std::pair<std::string_view, ContinualConfig (*)()>, 4>& table() {
  static const std::array<std::pair<std::string_view, ContinualConfig (*)()>, 4> presets = {{
      {"fig3a", &fig3a},
      {"fig3b-caption", [] { return fig3b(0.9, 11.0); }},
      {"fig3b-text", [] { return fig3b(0.7, 2.0); }},
      {"fig4", &fig4},
  }};
  return presets;
}

}  // namespace

std::optional<ContinualConfig> preset(std::string_view name) {
  for (const auto& [key, make] : table()) {
    if (key == name) return make();
  }
  return std::nullopt;
}

std::vector<std::string_view> preset_names() {
  std::vector<std::string_view> out;
  for (const auto& entry : table()) out.push_back(entry.first);
  return out;
}

std::vector<double> Axis::values() const {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(std::max(count, 0)));
  if (count == 1) {
    out.push_back(min);
    return out;
  }
  for (int i = 0; i < count; ++i) {
    // Endpoints are reproduced exactly.
    out.push_back(i == count - 1 ? max : min + (max - min) * i / (count - 1));
  }
  return out;
}

Axis parse_axis(std::string_view text) {
  std::array<std::string, 4> parts;
  std::size_t k = 0;
  for (char ch : text) {
    if (ch == ':') {
      if (++k == parts.size()) break;
    } else {
      parts[k] += ch;
    }
  }
  if (k != 3) throw Error(ErrorCode::parse, "axis must look like name:min:max:count");
  Axis axis;
  axis.name = parts[0];
  try {
    std::size_t used = 0;
    axis.min = std::stod(parts[1], &used);
    if (used != parts[1].size()) throw std::invalid_argument("min");
    axis.max = std::stod(parts[2], &used);
    if (used != parts[2].size()) throw std::invalid_argument("max");
    axis.count = std::stoi(parts[3], &used);
    if (used != parts[3].size()) throw std::invalid_argument("count");
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::parse, "bad number in axis '" + std::string(text) + "'");
  }
  return axis;
}

void set_field(ContinualConfig& cfg, std::string_view name, double value) {
  if (name == "n") {
    if (value != std::floor(value)) throw Error(ErrorCode::out_of_range, "n must be an integer");
    cfg.n = static_cast<std::int64_t>(value);
  } else if (name == "r") {
    cfg.r = value;
  } else if (name == "q") {
    cfg.q = value;
  } else if (name == "eta") {
    cfg.eta = value;
  } else if (name == "sigma1_sq") {
    cfg.sigma1_sq = value;
  } else if (name == "sigma2_sq") {
    cfg.sigma2_sq = value;
  } else if (name == "sigma_b1") {
    cfg.sigma_b1 = value;
  } else if (name == "sigma_b2") {
    cfg.sigma_b2 = value;
  } else if (name == "sigma_j") {
    cfg.sigma_j = value;
  } else {
    throw Error(ErrorCode::out_of_range, "'" + std::string(name) + "' is not a sweepable config field");
  }
}

void SweepSpec::check() const {
  if (replicates < 0) throw Error(ErrorCode::out_of_range, "replicates must be >= 0");
  for (std::size_t i = 0; i < axes.size(); ++i) {
    const auto& a = axes[i];
    ContinualConfig probe;
    set_field(probe, a.name, a.min);
    if (a.count < 1) throw Error(ErrorCode::out_of_range, "axis '" + a.name + "' needs count >= 1");
    if (!(a.min <= a.max)) throw Error(ErrorCode::out_of_range, "axis '" + a.name + "' needs min <= max");
    for (std::size_t k = 0; k < i; ++k) {
      if (axes[k].name == a.name) throw Error(ErrorCode::out_of_range, "axis '" + a.name + "' repeated");
    }
  }
}

}  // namespace catforget::exp
