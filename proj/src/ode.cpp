#include "catforget/ode.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "catforget/error.hpp"

namespace catforget::ode {

namespace {

double common_fraction(const ValidatedConfig& cfg) {
  return static_cast<double>(cfg.common_block()) / static_cast<double>(cfg.n());
}

constexpr std::array<Component, 8> phase1_components = {
    &OrderParamState::q1,    &OrderParamState::r1_1,  &OrderParamState::q2,
    &OrderParamState::r2_2,  &OrderParamState::q12,   &OrderParamState::r12_1,
    &OrderParamState::r12_2, &OrderParamState::r2_1,
};
constexpr std::array<Component, 2> phase1_core = {&OrderParamState::q1, &OrderParamState::r1_1};

constexpr std::array<Component, 8> phase2_components = {
    &OrderParamState::q2,   &OrderParamState::r2_2, &OrderParamState::r12_1,
    &OrderParamState::r12_2, &OrderParamState::q12, &OrderParamState::r1_1,
    &OrderParamState::q1,   &OrderParamState::r1_2,
};
constexpr std::array<Component, 7> phase2_core = {
    &OrderParamState::q2,    &OrderParamState::r2_2, &OrderParamState::r12_1,
    &OrderParamState::r12_2, &OrderParamState::q12,  &OrderParamState::r1_1,
    &OrderParamState::q1,
};

OrderParamState axpy(const OrderParamState& x, double a, const OrderParamState& y) {
  auto out = x.to_array();
  const auto d = y.to_array();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += a * d[i];
  return OrderParamState::from_array(out);
}

}  // namespace

OrderParamState rhs_phase1(const OrderParamState& s, const ValidatedConfig& cfg) {
  const double g = cfg.gamma1();
  const double c_over_r = common_fraction(cfg) / cfg.r();
  const double gap = s.t1_1 - 2.0 * s.r1_1 + s.q1;

  OrderParamState d;
  d.r1_1 = g * (s.t1_1 - s.r1_1);
  d.q1 = 2.0 * g * (s.r1_1 - s.q1) + g * g * gap;
  d.r12_1 = g * (s.t12_1 - s.r12_1);
  d.r2_1 = d.r12_1;
  d.r12_2 = g * (s.q_prime - s.r12_2);
  d.r2_2 = d.r12_2;
  d.q12 = 2.0 * g * (s.r12_1 - s.q12) + g * g * c_over_r * gap;
  d.q2 = d.q12;
  return d;
}

OrderParamState rhs_phase2(const OrderParamState& s, const ValidatedConfig& cfg) {
  const double g = cfg.gamma2();
  const double c_over_r = common_fraction(cfg) / cfg.r();
  const double gap = s.t2_2 - 2.0 * s.r2_2 + s.q2;

  OrderParamState d;
  d.r2_2 = g * (s.t2_2 - s.r2_2);
  d.q2 = 2.0 * g * (s.r2_2 - s.q2) + g * g * gap;
  d.r12_1 = g * (s.q_prime - s.r12_1);
  d.r1_1 = d.r12_1;
  d.r12_2 = g * (s.t12_2 - s.r12_2);
  d.r1_2 = d.r12_2;
  d.q12 = 2.0 * g * (s.r12_2 - s.q12) + g * g * c_over_r * gap;
  d.q1 = d.q12;
  return d;
}

std::span<const Component> OdeSystem::components() const {
  if (phase_ == Phase::one) return phase1_components;
  return phase2_components;
}

std::span<const Component> OdeSystem::core_components() const {
  if (phase_ == Phase::one) return phase1_core;
  return phase2_core;
}

OrderParamState OdeSystem::rate(const OrderParamState& state) const {
  return phase_ == Phase::one ? rhs_phase1(state, cfg_) : rhs_phase2(state, cfg_);
}

OrderParamState rk4_step(const OdeSystem& system, const OrderParamState& y, double h) {
  const auto k1 = system.rate(y);
  const auto k2 = system.rate(axpy(y, 0.5 * h, k1));
  const auto k3 = system.rate(axpy(y, 0.5 * h, k2));
  const auto k4 = system.rate(axpy(y, h, k3));

  auto out = y.to_array();
  const auto a = k1.to_array(), b = k2.to_array(), c = k3.to_array(), d = k4.to_array();
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] += h / 6.0 * (a[i] + 2.0 * (b[i] + c[i]) + d[i]);
  }
  return OrderParamState::from_array(out);
}

std::vector<Sample> integrate(const OdeSystem& system, const OrderParamState& init, Time t_end,
                              const IntegrateOptions& options) {
  if (!(options.dt > 0.0) || !(options.sample_interval > 0.0)) {
    throw Error(ErrorCode::out_of_range, "dt and sample interval must be > 0");
  }
  if (!init.all_finite()) throw Error(ErrorCode::non_finite, "initial state is not finite");

  const double end = t_end.value();
  const double interval = options.sample_interval;
  // Sample times k * interval, snapping a final point that lands within
  // rounding of t_end onto it.
  auto intervals = static_cast<std::int64_t>(std::floor(end / interval + 1e-9));

  std::vector<double> times;
  times.reserve(static_cast<std::size_t>(intervals) + 2);
  for (std::int64_t i = 0; i <= intervals; ++i) times.push_back(std::min(end, i * interval));
  if (end - times.back() > 1e-12 * std::max(1.0, end)) times.push_back(end);

  std::vector<Sample> out;
  out.reserve(times.size());
  OrderParamState y = init;
  out.push_back({Time(times.front()), y});
  for (std::size_t i = 1; i < times.size(); ++i) {
    const double span = times[i] - times[i - 1];
    const auto steps = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(span / options.dt - 1e-9)));
    const double h = span / static_cast<double>(steps);
    for (std::int64_t k = 0; k < steps; ++k) {
      y = rk4_step(system, y, h);
      if (!y.all_finite()) {
        throw Error(ErrorCode::non_finite, "ODE state left double range near t = " + std::to_string(times[i]));
      }
    }
    out.push_back({Time(times[i]), y});
  }
  return out;
}

}  // namespace catforget::ode
