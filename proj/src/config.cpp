#include "catforget/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "catforget/error.hpp"

namespace catforget {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::out_of_range, what);
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace

std::string_view to_string(TaskOneEndpoint endpoint) {
  return endpoint == TaskOneEndpoint::trained ? "TRAINED" : "EXACT_COPY";
}

std::optional<TaskOneEndpoint> parse_endpoint(std::string_view text) {
  if (text == "TRAINED") return TaskOneEndpoint::trained;
  if (text == "EXACT_COPY") return TaskOneEndpoint::exact_copy;
  return std::nullopt;
}

bool ValidatedConfig::ill_conditioned() const noexcept {
  return std::abs(2.0 - gamma2()) < 1e-6;
}

ValidatedConfig validate(const ContinualConfig& in) {
  require(in.n >= 2, "n must be >= 2");
  require(std::isfinite(in.r) && in.r >= 0.5 && in.r <= 1.0, "r must lie in [0.5, 1]");
  require(std::isfinite(in.q) && in.q >= -1.0 && in.q <= 1.0, "q must lie in [-1, 1]");
  require(std::isfinite(in.eta) && in.eta > 0.0, "eta must be > 0");
  require(std::isfinite(in.sigma1_sq) && in.sigma1_sq > 0.0, "sigma1_sq must be > 0");
  require(std::isfinite(in.sigma2_sq) && in.sigma2_sq > 0.0, "sigma2_sq must be > 0");
  require(std::isfinite(in.sigma_b1) && in.sigma_b1 >= 0.0, "sigma_b1 must be >= 0");
  require(std::isfinite(in.sigma_b2) && in.sigma_b2 >= 0.0, "sigma_b2 must be >= 0");
  require(std::isfinite(in.sigma_j) && in.sigma_j >= 0.0, "sigma_j must be >= 0");

  const double n = static_cast<double>(in.n);
  const std::int64_t block = std::llround(in.r * n);
  const double r_quantized = static_cast<double>(block) / n;
  if (std::abs(r_quantized - in.r) > 0.5 / n * (1.0 + 1e-12) || 2 * block < in.n ||
      block > in.n) {
    throw Error(ErrorCode::unquantizable,
                "no integer rN within 1/(2n) of r = " + fmt(in.r) + " for n = " + std::to_string(in.n));
  }

  ContinualConfig out = in;
  out.r = r_quantized;
  ValidatedConfig v(out, in.r, block);
  if (!in.allow_divergent && (!v.task1_stable() || !v.task2_stable())) {
    throw Error(ErrorCode::divergent, "eta*r*sigma^2 must stay below 2 (gamma1 = " +
                                          fmt(v.gamma1()) + ", gamma2 = " + fmt(v.gamma2()) + ")");
  }
  return v;
}

namespace {

using nlohmann::json;

template <typename T>
T get_as(const json& value, const std::string& key) {
  try {
    return value.get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::parse, "bad value for key '" + key + "'");
  }
}

double get_number(const json& value, const std::string& key) {
  if (!value.is_number()) throw Error(ErrorCode::parse, "key '" + key + "' must be a number");
  return value.get<double>();
}

}  // namespace

ContinualConfig config_from_json(std::string_view text, const ContinualConfig& base) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::parse, e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::parse, "config must be a flat JSON object");

  ContinualConfig cfg = base;
  for (const auto& [key, value] : doc.items()) {
    if (key == "n") {
      if (!value.is_number_integer()) throw Error(ErrorCode::parse, "key 'n' must be an integer");
      cfg.n = value.get<std::int64_t>();
    } else if (key == "r") {
      cfg.r = get_number(value, key);
    } else if (key == "q") {
      cfg.q = get_number(value, key);
    } else if (key == "eta") {
      cfg.eta = get_number(value, key);
    } else if (key == "sigma1_sq") {
      cfg.sigma1_sq = get_number(value, key);
    } else if (key == "sigma2_sq") {
      cfg.sigma2_sq = get_number(value, key);
    } else if (key == "sigma_b1") {
      cfg.sigma_b1 = get_number(value, key);
    } else if (key == "sigma_b2") {
      cfg.sigma_b2 = get_number(value, key);
    } else if (key == "sigma_j") {
      cfg.sigma_j = get_number(value, key);
    } else if (key == "seed") {
      if (!value.is_number_unsigned()) throw Error(ErrorCode::parse, "key 'seed' must be a non-negative integer");
      cfg.seed = value.get<std::uint64_t>();
    } else if (key == "t1_mode") {
      const auto mode = parse_endpoint(get_as<std::string>(value, key));
      if (!mode) throw Error(ErrorCode::parse, "t1_mode must be TRAINED or EXACT_COPY");
      cfg.t1_mode = *mode;
    } else if (key == "allow_divergent") {
      if (!value.is_boolean()) throw Error(ErrorCode::parse, "key 'allow_divergent' must be a boolean");
      cfg.allow_divergent = value.get<bool>();
    } else if (key == "exact_similarity") {
      if (!value.is_boolean()) throw Error(ErrorCode::parse, "key 'exact_similarity' must be a boolean");
      cfg.exact_similarity = value.get<bool>();
    } else {
      throw Error(ErrorCode::parse, "unknown config key '" + key + "'");
    }
  }
  return cfg;
}

ContinualConfig load_config(const std::string& path, const ContinualConfig& base) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::parse, "cannot open config file " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return config_from_json(buffer.str(), base);
}

std::string config_to_json(const ContinualConfig& cfg, int indent) {
  json doc = {
      {"n", cfg.n},
      {"r", cfg.r},
      {"q", cfg.q},
      {"eta", cfg.eta},
      {"sigma1_sq", cfg.sigma1_sq},
      {"sigma2_sq", cfg.sigma2_sq},
      {"sigma_b1", cfg.sigma_b1},
      {"sigma_b2", cfg.sigma_b2},
      {"sigma_j", cfg.sigma_j},
      {"seed", cfg.seed},
      {"t1_mode", std::string(to_string(cfg.t1_mode))},
      {"allow_divergent", cfg.allow_divergent},
      {"exact_similarity", cfg.exact_similarity},
  };
  return doc.dump(indent);
}

}  // namespace catforget
