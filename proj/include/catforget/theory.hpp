#pragma once

#include "catforget/config.hpp"
#include "catforget/types.hpp"

// Closed-form order-parameter and generalization-error dynamics in the
// N -> infinity limit. Phase-1 functions take time since the start of task 1
// from an independent random student; phase-2 functions take time since the
// start of task 2 and assume J equals B1 on task 1's support at t = 0.
namespace catforget::theory {

struct OvershootConstants {
  double c1 = 0;  // (2r-1)(sB1^2 + sB2^2 - 2 q sB1 sB2)
  double c2 = 0;  // (2r-1)/r * (r sB2^2 + (2r-1) sB1^2 + (1-r) sJ^2 - 2(2r-1) q sB1 sB2)
};

OvershootConstants overshoot_constants(const ValidatedConfig& cfg);

/// Teacher-only parameters (T1^1, T2^2, T12^1, T12^2, q') at their
/// expected values; every other field is zero.
OrderParamState teacher_constants(const ValidatedConfig& cfg);

struct PhaseOneParams {
  double r1_1 = 0;
  double q1 = 0;
};

PhaseOneParams phase1_order_params(const ValidatedConfig& cfg, Time t);
/// Every order parameter during task 1, including the task-2 overlaps.
OrderParamState phase1_state(const ValidatedConfig& cfg, Time t);
double eg1_phase1(const ValidatedConfig& cfg, Time t);
double eg2_phase1(const ValidatedConfig& cfg, Time t);

OrderParamState phase2_initial_state(const ValidatedConfig& cfg);
OrderParamState phase2_order_params(const ValidatedConfig& cfg, Time t);
double eg2_phase2(const ValidatedConfig& cfg, Time t);
double eg1_phase2(const ValidatedConfig& cfg, Time t);
double eg1_phase2_derivative(const ValidatedConfig& cfg, Time t);

/// Limit of eg1_phase2 as t -> infinity. Throws Error(divergent) when
/// gamma2 >= 2.
double forgetting_value(const ValidatedConfig& cfg);

/// Sign analysis of the slowest-decaying term of eg1_phase2.
OvershootClass classify_overshoot(const ValidatedConfig& cfg);
OvershootVariant classify_overshoot(double gamma, double c1, double c2);

inline constexpr double gamma_unit_tolerance = 1e-12;

}  // namespace catforget::theory
