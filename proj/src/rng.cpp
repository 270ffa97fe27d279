#include "catforget/rng.hpp"

#include <cmath>

namespace catforget {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed, Stream stream)
    : counter_(splitmix64(seed) ^ splitmix64(static_cast<std::uint64_t>(stream))) {}

void Rng::normal_pair(double& a, double& b) {
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  a = u * f;
  b = v * f;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double a, b;
  normal_pair(a, b);
  spare_ = b;
  has_spare_ = true;
  return a;
}

void Rng::fill_normal(std::span<double> out, double stddev) {
  std::size_t i = 0;
  if (has_spare_ && !out.empty()) out[i++] = stddev * normal();
  for (; i + 1 < out.size(); i += 2) {
    double a, b;
    normal_pair(a, b);
    out[i] = stddev * a;
    out[i + 1] = stddev * b;
  }
  if (i < out.size()) out[i] = stddev * normal();
}

}  // namespace catforget
