#pragma once

#include <cstdint>
#include <span>

namespace catforget {

/// Independent random streams derived from one seed.
enum class Stream : std::uint64_t {
  teachers = 1,
  student = 2,
  task_data = 3,
  test_data = 4,
};

std::uint64_t splitmix64(std::uint64_t x);

/// Counter-based SplitMix64: draw k returns splitmix64(base + k * 0x9e3779b97f4a7c15)
/// with base = splitmix64(seed) ^ splitmix64(stream), so a (seed, stream)
/// pair fixes the whole sequence on every platform. Uniforms take the top 53
/// bits. Normals use the polar form of Box-Muller (Marsaglia): uniform pairs
/// in the square are rejected outside the unit disc, and each accepted pair
/// yields two normals, the first returned first.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, Stream stream = Stream::task_data);

  std::uint64_t next_u64() {
    std::uint64_t z = (counter_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  /// Uniform on the open interval (0, 1).
  double uniform() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }
  void fill_normal(std::span<double> out, double stddev);

 private:
  // One accepted polar pair.
  void normal_pair(double& a, double& b);

  std::uint64_t counter_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace catforget
