#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace catforget {

/// Normalized training time t = m / (rN), where m counts SGD steps and rN is
/// the size of one task's input support.
class Time {
 public:
  constexpr Time() = default;
  explicit Time(double t);

  static Time from_steps(std::int64_t steps, std::int64_t task_block);

  double value() const noexcept { return t_; }
  /// Nearest step count for this time; exact for times built by from_steps.
  std::int64_t to_steps(std::int64_t task_block) const;

 private:
  double t_ = 0.0;
};

/// The masked overlaps of student J and teachers B1, B2. Naming follows
/// R_v^u = B_u^T I_v J, so r2_1 is B1^T I2 J and r1_2 is B2^T I1 J; the "12"
/// quantities use the common-block mask I1 I2.
struct OrderParamState {
  double q1 = 0, q2 = 0, q12 = 0;
  double r1_1 = 0, r2_1 = 0, r1_2 = 0, r2_2 = 0, r12_1 = 0, r12_2 = 0;
  double t1_1 = 0, t2_2 = 0, t12_1 = 0, t12_2 = 0;
  double q_prime = 0;

  static constexpr std::size_t size = 14;
  static const std::array<std::string_view, size>& names();

  std::array<double, size> to_array() const;
  static OrderParamState from_array(const std::array<double, size>& values);

  /// Task-1 generalization error (sigma1^2 / 2)(T1^1 - 2 R1^1 + Q1).
  double eg1(double sigma1_sq) const { return 0.5 * sigma1_sq * (t1_1 - 2.0 * r1_1 + q1); }
  /// Task-2 generalization error (sigma2^2 / 2)(T2^2 - 2 R2^2 + Q2).
  double eg2(double sigma2_sq) const { return 0.5 * sigma2_sq * (t2_2 - 2.0 * r2_2 + q2); }

  bool all_finite() const;

  friend bool operator==(const OrderParamState&, const OrderParamState&) = default;
};

/// Largest absolute componentwise difference.
double max_abs_diff(const OrderParamState& a, const OrderParamState& b);

enum class OvershootVariant { may_not_occur, does_not_occur, occurs, diverges };

std::string_view to_string(OvershootVariant variant);

struct OvershootClass {
  OvershootVariant variant = OvershootVariant::may_not_occur;
  double gamma = 0;  // eta * r * sigma2^2
  double c1 = 0;
  double c2 = 0;
};

}  // namespace catforget
