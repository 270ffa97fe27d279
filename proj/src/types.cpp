#include "catforget/types.hpp"

#include <algorithm>
#include <cmath>

#include "catforget/error.hpp"

namespace catforget {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::out_of_range: return "OUT_OF_RANGE";
    case ErrorCode::divergent: return "DIVERGENT";
    case ErrorCode::unquantizable: return "UNQUANTIZABLE";
    case ErrorCode::non_finite: return "NON_FINITE";
    case ErrorCode::parse: return "PARSE";
    case ErrorCode::hard_gate: return "HARD_GATE";
  }
  return "UNKNOWN";
}

Time::Time(double t) : t_(t) {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw Error(ErrorCode::out_of_range, "time must be finite and >= 0");
  }
}

Time Time::from_steps(std::int64_t steps, std::int64_t task_block) {
  if (steps < 0 || task_block <= 0) {
    throw Error(ErrorCode::out_of_range, "step count and block size must be non-negative");
  }
  return Time(static_cast<double>(steps) / static_cast<double>(task_block));
}

std::int64_t Time::to_steps(std::int64_t task_block) const {
  return std::llround(t_ * static_cast<double>(task_block));
}

const std::array<std::string_view, OrderParamState::size>& OrderParamState::names() {
  static const std::array<std::string_view, size> names = {
      "Q1",   "Q2",   "Q12",  "R1_1", "R2_1", "R1_2",  "R2_2",
      "R12_1", "R12_2", "T1_1", "T2_2", "T12_1", "T12_2", "q_prime"};
  return names;
}

std::array<double, OrderParamState::size> OrderParamState::to_array() const {
  return {q1, q2, q12, r1_1, r2_1, r1_2, r2_2, r12_1, r12_2, t1_1, t2_2, t12_1, t12_2, q_prime};
}

OrderParamState OrderParamState::from_array(const std::array<double, size>& v) {
  OrderParamState s;
  s.q1 = v[0];
  s.q2 = v[1];
  s.q12 = v[2];
  s.r1_1 = v[3];
  s.r2_1 = v[4];
  s.r1_2 = v[5];
  s.r2_2 = v[6];
  s.r12_1 = v[7];
  s.r12_2 = v[8];
  s.t1_1 = v[9];
  s.t2_2 = v[10];
  s.t12_1 = v[11];
  s.t12_2 = v[12];
  s.q_prime = v[13];
  return s;
}

bool OrderParamState::all_finite() const {
  const auto v = to_array();
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

double max_abs_diff(const OrderParamState& a, const OrderParamState& b) {
  const auto x = a.to_array();
  const auto y = b.to_array();
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) worst = std::max(worst, std::abs(x[i] - y[i]));
  return worst;
}

std::string_view to_string(OvershootVariant variant) {
  switch (variant) {
    case OvershootVariant::may_not_occur: return "MAY_NOT_OCCUR";
    case OvershootVariant::does_not_occur: return "DOES_NOT_OCCUR";
    case OvershootVariant::occurs: return "OCCURS";
    case OvershootVariant::diverges: return "DIVERGES";
  }
  return "UNKNOWN";
}

}  // namespace catforget
