#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "catforget/types.hpp"

namespace catforget {

/// How the student reaches the end of task 1 before task 2 starts.
enum class TaskOneEndpoint {
  trained,     // phase 2 starts from whatever SGD on task 1 produced
  exact_copy,  // J^i <- B1^i on task 1's support before phase 2
};

std::string_view to_string(TaskOneEndpoint endpoint);
std::optional<TaskOneEndpoint> parse_endpoint(std::string_view text);

/// Hyperparameters of the two-task problem.
struct ContinualConfig {
  std::int64_t n = 3000;
  double r = 0.8;
  double q = 0.3;
  double eta = 1.0;
  double sigma1_sq = 0.8;
  double sigma2_sq = 0.8;
  double sigma_b1 = 1.0;
  double sigma_b2 = 1.0;
  double sigma_j = 1.0;
  std::uint64_t seed = 0;
  TaskOneEndpoint t1_mode = TaskOneEndpoint::exact_copy;
  // Admits eta*r*sigma^2 >= 2. Only for divergence studies.
  bool allow_divergent = false;
  // Rescale teachers so |B1|^2, |B2|^2 and the cosine hit their targets exactly.
  bool exact_similarity = false;

  friend bool operator==(const ContinualConfig&, const ContinualConfig&) = default;
};

/// A config whose r has been snapped to round(rN)/N and whose ranges and
/// stability have been checked. Only validate() constructs one.
class ValidatedConfig {
 public:
  const ContinualConfig& config() const noexcept { return cfg_; }

  std::int64_t n() const noexcept { return cfg_.n; }
  double r() const noexcept { return cfg_.r; }
  double r_requested() const noexcept { return r_requested_; }

  /// rN: support size of each task.
  std::int64_t task_block() const noexcept { return task_block_; }
  /// (1 - r)N: dimensions seen by one task only.
  std::int64_t exclusive_block() const noexcept { return cfg_.n - task_block_; }
  /// (2r - 1)N: dimensions shared by both tasks.
  std::int64_t common_block() const noexcept { return 2 * task_block_ - cfg_.n; }

  double gamma1() const noexcept { return cfg_.eta * cfg_.r * cfg_.sigma1_sq; }
  double gamma2() const noexcept { return cfg_.eta * cfg_.r * cfg_.sigma2_sq; }
  bool task1_stable() const noexcept { return gamma1() < 2.0; }
  bool task2_stable() const noexcept { return gamma2() < 2.0; }
  /// gamma2 within 1e-6 of 2, where the closed forms lose accuracy.
  bool ill_conditioned() const noexcept;

  Time time_of(std::int64_t steps) const { return Time::from_steps(steps, task_block_); }
  std::int64_t steps_of(Time t) const { return t.to_steps(task_block_); }

 private:
  friend ValidatedConfig validate(const ContinualConfig&);
  ValidatedConfig(ContinualConfig cfg, double r_requested, std::int64_t task_block)
      : cfg_(cfg), r_requested_(r_requested), task_block_(task_block) {}

  ContinualConfig cfg_;
  double r_requested_;
  std::int64_t task_block_;
};

/// Range-checks every field, quantizes r and checks the stability of both
/// tasks. Throws Error with out_of_range, unquantizable or divergent.
ValidatedConfig validate(const ContinualConfig& cfg);

/// Flat JSON object using the ContinualConfig field names. Unknown keys and
/// ill-typed values throw Error(parse).
ContinualConfig config_from_json(std::string_view text, const ContinualConfig& base = {});
ContinualConfig load_config(const std::string& path, const ContinualConfig& base = {});
std::string config_to_json(const ContinualConfig& cfg, int indent = 2);

}  // namespace catforget
