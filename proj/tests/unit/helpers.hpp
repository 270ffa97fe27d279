#pragma once

#include <cstring>
#include <random>
#include <stdexcept>
#include <string_view>

#include "catforget/config.hpp"
#include "catforget/types.hpp"

namespace testing {

inline double& field(catforget::OrderParamState& s, std::string_view name) {
  using S = catforget::OrderParamState;
  struct Entry {
    const char* name;
    double S::*member;
  };
  static constexpr Entry table[] = {
      {"q1", &S::q1},         {"q2", &S::q2},         {"q12", &S::q12},       {"r1_1", &S::r1_1},
      {"r2_1", &S::r2_1},     {"r1_2", &S::r1_2},     {"r2_2", &S::r2_2},     {"r12_1", &S::r12_1},
      {"r12_2", &S::r12_2},   {"t1_1", &S::t1_1},     {"t2_2", &S::t2_2},     {"t12_1", &S::t12_1},
      {"t12_2", &S::t12_2},   {"q_prime", &S::q_prime},
  };
  for (const auto& e : table) {
    if (name == e.name) return s.*(e.member);
  }
  throw std::invalid_argument("no such order parameter");
}

inline double field(const catforget::OrderParamState& s, std::string_view name) {
  auto copy = s;
  return field(copy, name);
}

/// A random config inside the stable region: n fixed so r quantizes finely.
inline catforget::ContinualConfig random_config(std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  catforget::ContinualConfig c;
  c.n = 1000;
  c.r = 0.5 + 0.5 * u(gen);
  c.q = -1.0 + 2.0 * u(gen);
  c.eta = 0.2 + 1.3 * u(gen);
  c.sigma_b1 = 0.2 + 1.8 * u(gen);
  c.sigma_b2 = 0.2 + 1.8 * u(gen);
  c.sigma_j = 3.0 * u(gen);
  // Keep both gammas below 1.9.
  const double cap = 1.9 / (c.eta * c.r);
  c.sigma1_sq = 0.05 + (cap - 0.05) * u(gen);
  c.sigma2_sq = 0.05 + (cap - 0.05) * u(gen);
  return c;
}

}  // namespace testing
