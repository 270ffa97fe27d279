#include "catforget/theory.hpp"

#include <cmath>

#include "catforget/error.hpp"

namespace catforget::theory {

namespace {

// Quantities shared by every closed form.
struct Coefficients {
  double r, c;          // r and 2r - 1
  double sb1_sq, sb2_sq, sj_sq;
  double rho;           // q sB1 sB2
  double sigma1_sq, sigma2_sq;
  double gamma1, gamma2;

  explicit Coefficients(const ValidatedConfig& v) {
    const auto& cfg = v.config();
    r = cfg.r;
    c = static_cast<double>(v.common_block()) / static_cast<double>(v.n());
    sb1_sq = cfg.sigma_b1 * cfg.sigma_b1;
    sb2_sq = cfg.sigma_b2 * cfg.sigma_b2;
    sj_sq = cfg.sigma_j * cfg.sigma_j;
    rho = cfg.q * cfg.sigma_b1 * cfg.sigma_b2;
    sigma1_sq = cfg.sigma1_sq;
    sigma2_sq = cfg.sigma2_sq;
    gamma1 = v.gamma1();
    gamma2 = v.gamma2();
  }

  // T2^2 - 2 R2^2 + Q2 at the start of task 2.
  double task2_initial_gap() const { return r * sb2_sq + c * sb1_sq + (1.0 - r) * sj_sq - 2.0 * c * rho; }
};

}  // namespace

OvershootConstants overshoot_constants(const ValidatedConfig& cfg) {
  const Coefficients k(cfg);
  OvershootConstants out;
  out.c1 = k.c * (k.sb1_sq + k.sb2_sq - 2.0 * k.rho);
  out.c2 = k.c / k.r * k.task2_initial_gap();
  return out;
}

OrderParamState teacher_constants(const ValidatedConfig& cfg) {
  const Coefficients k(cfg);
  OrderParamState s;
  s.t1_1 = k.r * k.sb1_sq;
  s.t2_2 = k.r * k.sb2_sq;
  s.t12_1 = k.c * k.sb1_sq;
  s.t12_2 = k.c * k.sb2_sq;
  s.q_prime = k.c * k.rho;
  return s;
}

PhaseOneParams phase1_order_params(const ValidatedConfig& cfg, Time t) {
  const auto s = phase1_state(cfg, t);
  return {s.r1_1, s.q1};
}

OrderParamState phase1_state(const ValidatedConfig& cfg, Time time) {
  const Coefficients k(cfg);
  const double t = time.value();
  const double g = k.gamma1;
  const double learned = -std::expm1(-g * t);  // 1 - e^{-g t}
  const double fast = std::exp(-g * t);
  const double err = std::exp(-g * (2.0 - g) * t);

  OrderParamState s = teacher_constants(cfg);
  // Within task 1's support every coordinate is statistically alike, so the
  // common block carries the fraction c / r of each task-1 quantity.
  const double per_dim_q = (k.sj_sq + k.sb1_sq) * err - 2.0 * k.sb1_sq * fast + k.sb1_sq;
  s.r1_1 = k.r * k.sb1_sq * learned;
  s.q1 = k.r * per_dim_q;
  s.q12 = k.c * per_dim_q;
  s.q2 = s.q12 + (1.0 - k.r) * k.sj_sq;
  s.r12_1 = k.c * k.sb1_sq * learned;
  s.r2_1 = s.r12_1;
  s.r12_2 = k.c * k.rho * learned;
  s.r2_2 = s.r12_2;
  s.r1_2 = k.r * k.rho * learned;
  return s;
}

double eg1_phase1(const ValidatedConfig& cfg, Time t) {
  const Coefficients k(cfg);
  const double g = k.gamma1;
  return 0.5 * k.sigma1_sq * k.r * (k.sb1_sq + k.sj_sq) * std::exp(-t.value() * g * (2.0 - g));
}

double eg2_phase1(const ValidatedConfig& cfg, Time t) {
  return phase1_state(cfg, t).eg2(cfg.config().sigma2_sq);
}

OrderParamState phase2_initial_state(const ValidatedConfig& cfg) {
  const Coefficients k(cfg);
  OrderParamState s = teacher_constants(cfg);
  s.r2_2 = k.c * k.rho;
  s.q2 = k.c * k.sb1_sq + (1.0 - k.r) * k.sj_sq;
  s.r12_1 = k.c * k.sb1_sq;
  s.r12_2 = k.c * k.rho;
  s.q12 = k.c * k.sb1_sq;
  s.r1_1 = k.r * k.sb1_sq;
  s.q1 = k.r * k.sb1_sq;
  s.r1_2 = k.r * k.rho;
  s.r2_1 = k.c * k.sb1_sq;
  return s;
}

OrderParamState phase2_order_params(const ValidatedConfig& cfg, Time time) {
  const Coefficients k(cfg);
  const auto [c1, c2] = overshoot_constants(cfg);
  const double t = time.value();
  const double g = k.gamma2;
  const double slow = std::exp(-g * t);
  const double learned = -std::expm1(-g * t);
  const double err = std::exp(-g * (2.0 - g) * t);
  const double fast = std::exp(-2.0 * g * t);

  OrderParamState s = teacher_constants(cfg);
  s.r2_2 = k.r * k.sb2_sq + (k.c * k.rho - k.r * k.sb2_sq) * slow;
  s.q2 = k.task2_initial_gap() * err + 2.0 * (k.c * k.rho - k.r * k.sb2_sq) * slow + k.r * k.sb2_sq;
  s.r12_1 = k.c * k.rho + k.c * (k.sb1_sq - k.rho) * slow;
  s.r12_2 = k.c * (k.sb2_sq + (k.rho - k.sb2_sq) * slow);
  s.q12 = 2.0 * k.c * (k.rho - k.sb2_sq) * slow + c2 * err + (c1 - c2) * fast + k.c * k.sb2_sq;
  s.r1_1 = k.r * k.sb1_sq - k.c * (k.sb1_sq - k.rho) * learned;
  // Coordinates seen by task 1 only keep their copied values.
  s.q1 = s.q12 + (1.0 - k.r) * k.sb1_sq;
  s.r1_2 = k.r * k.rho + k.c * (k.sb2_sq - k.rho) * learned;
  s.r2_1 = k.r * k.rho + (k.c * k.sb1_sq - k.r * k.rho) * slow;
  return s;
}

double eg2_phase2(const ValidatedConfig& cfg, Time t) {
  const Coefficients k(cfg);
  const double g = k.gamma2;
  return 0.5 * k.sigma2_sq * k.task2_initial_gap() * std::exp(-t.value() * g * (2.0 - g));
}

double eg1_phase2(const ValidatedConfig& cfg, Time time) {
  const Coefficients k(cfg);
  const auto [c1, c2] = overshoot_constants(cfg);
  const double t = time.value();
  const double g = k.gamma2;
  return 0.5 * k.sigma1_sq *
         (c1 + (c1 - c2) * std::exp(-2.0 * g * t) + c2 * std::exp(-g * (2.0 - g) * t) -
          2.0 * c1 * std::exp(-g * t));
}

double eg1_phase2_derivative(const ValidatedConfig& cfg, Time time) {
  const Coefficients k(cfg);
  const auto [c1, c2] = overshoot_constants(cfg);
  const double t = time.value();
  const double g = k.gamma2;
  return 0.5 * k.sigma1_sq * g *
         (-2.0 * (c1 - c2) * std::exp(-2.0 * g * t) - (2.0 - g) * c2 * std::exp(-g * (2.0 - g) * t) +
          2.0 * c1 * std::exp(-g * t));
}

double forgetting_value(const ValidatedConfig& cfg) {
  if (!cfg.task2_stable()) {
    throw Error(ErrorCode::divergent, "forgetting value needs eta*r*sigma2^2 < 2");
  }
  return 0.5 * cfg.config().sigma1_sq * overshoot_constants(cfg).c1;
}

OvershootVariant classify_overshoot(double gamma, double c1, double c2) {
  if (gamma >= 2.0) return OvershootVariant::diverges;
  if (std::abs(gamma - 1.0) <= gamma_unit_tolerance) {
    // Both slow exponentials coincide; their combined coefficient decides.
    return c2 - 2.0 * c1 > 0.0 ? OvershootVariant::occurs : OvershootVariant::does_not_occur;
  }
  return gamma < 1.0 ? OvershootVariant::may_not_occur : OvershootVariant::occurs;
}

OvershootClass classify_overshoot(const ValidatedConfig& cfg) {
  const auto [c1, c2] = overshoot_constants(cfg);
  OvershootClass out;
  out.gamma = cfg.gamma2();
  out.c1 = c1;
  out.c2 = c2;
  out.variant = classify_overshoot(out.gamma, c1, c2);
  return out;
}

}  // namespace catforget::theory
