#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "catforget/config.hpp"
#include "catforget/types.hpp"

// Fixed-step RK4 integration of the order-parameter ODEs, independent of the
// closed forms in theory.hpp.
namespace catforget::ode {

enum class Phase { one, two };

/// Pointers to the OrderParamState members a phase evolves.
using Component = double OrderParamState::*;

/// Derivative of the order parameters while training on task 1. Teacher-only
/// parameters have zero rate, and so does R1^2, whose rate involves B2^T I1 B1.
OrderParamState rhs_phase1(const OrderParamState& state, const ValidatedConfig& cfg);
/// Derivative while training on task 2. R2^1 is held, since its rate
/// involves B1^T I2 B2.
OrderParamState rhs_phase2(const OrderParamState& state, const ValidatedConfig& cfg);

class OdeSystem {
 public:
  OdeSystem(Phase phase, const ValidatedConfig& cfg) : phase_(phase), cfg_(cfg) {}

  Phase phase() const noexcept { return phase_; }
  /// Components with a closed rate: the core (Q1, R1^1 in phase
  /// 1; Q2, R2^2, R12^1, R12^2, Q12, R1^1, Q1 in phase 2) plus the overlaps
  /// that follow along.
  std::span<const Component> components() const;
  /// The minimal set that determines the tracked generalization errors.
  std::span<const Component> core_components() const;
  std::size_t state_dim() const { return components().size(); }

  OrderParamState rate(const OrderParamState& state) const;

 private:
  Phase phase_;
  ValidatedConfig cfg_;
};

struct Sample {
  Time t;
  OrderParamState state;
};

struct IntegrateOptions {
  double dt = 1e-3;
  double sample_interval = 0.01;
};

/// Integrates from t = 0 to t_end, returning the state at every multiple of
/// the sample interval plus t_end. Each interval is split into equal steps of
/// at most dt. Throws Error(non_finite) if the state leaves double range.
std::vector<Sample> integrate(const OdeSystem& system, const OrderParamState& init, Time t_end,
                              const IntegrateOptions& options = {});

/// One classical RK4 step.
OrderParamState rk4_step(const OdeSystem& system, const OrderParamState& state, double h);

}  // namespace catforget::ode
