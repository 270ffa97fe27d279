#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <mutex>
#include <span>
#include <vector>

#include "catforget/config.hpp"
#include "catforget/rng.hpp"
#include "catforget/types.hpp"

// Finite-N online SGD on the two-task teacher-student problem.
namespace catforget::sim {

/// Teachers B1, B2 and student J, each of length N.
struct WeightTriple {
  std::vector<double> b1;
  std::vector<double> b2;
  std::vector<double> j;
};

enum class Task { one = 1, two = 2 };

/// Half-open index range [begin, end) of a task's nonzero inputs.
struct Support {
  std::int64_t begin;
  std::int64_t end;
};

/// Task 1 sees [0, rN), task 2 sees [(1-r)N, N).
Support support(Task task, const ValidatedConfig& cfg);

struct Teachers {
  std::vector<double> b1;
  std::vector<double> b2;
};

/// b1 ~ N(0, sB1^2/N); b2 = q (sB2/sB1) b1 + sqrt(1-q^2) xi with
/// xi ~ N(0, sB2^2/N). With exact_similarity both are rescaled so the norms
/// and the cosine match their targets exactly.
Teachers gen_teachers(const ValidatedConfig& cfg, Rng& rng);

/// J0 ~ N(0, sJ^2/N) elementwise.
std::vector<double> gen_student(const ValidatedConfig& cfg, Rng& rng);

std::vector<double> sample_input(Task task, const ValidatedConfig& cfg, Rng& rng);

/// One SGD update J += (eta/N) x (b^T x - J^T x) on a fresh input of `task`.
/// Returns the residual b^T x - J^T x. Throws Error(non_finite) when the
/// residual overflows.
double sgd_step(WeightTriple& w, Task task, const ValidatedConfig& cfg, Rng& rng);
/// Same update for a given input (length N, zero outside the support).
double sgd_step(WeightTriple& w, Task task, const ValidatedConfig& cfg,
                std::span<const double> x);

OrderParamState measure_order_params(const WeightTriple& w, const ValidatedConfig& cfg);

/// Copies B1 into J on task 1's support.
void apply_exact_copy(WeightTriple& w, const ValidatedConfig& cfg);

struct Schedule {
  std::int64_t steps_task1 = 0;
  std::int64_t steps_task2 = 0;
  std::int64_t record_every = 0;  // 0 selects rN/10
};

/// steps_task1 = steps_task2 = round(duration * rN), recording every rN/10.
Schedule schedule_for(const ValidatedConfig& cfg, double duration);

struct TrajectoryRecord {
  int phase = 1;
  std::int64_t step = 0;
  Time t;
  double eg1 = 0;
  double eg2 = 0;
  OrderParamState order;
  std::uint64_t seed = 0;
};

using Trajectory = std::vector<TrajectoryRecord>;

/// Builds teachers and student from cfg.seed, trains task 1 then task 2 and
/// records every record_every steps of each phase, including the first and
/// last. Phase-2 time restarts at zero. With exact_copy the task-1 trajectory
/// is still simulated (if steps_task1 > 0) and J is then snapped to B1 on
/// task 1's support. A phase with zero steps produces no records.
Trajectory run_continual(const ValidatedConfig& cfg, const Schedule& schedule);

/// Like run_continual but also returns the final weights.
Trajectory run_continual(const ValidatedConfig& cfg, const Schedule& schedule,
                         WeightTriple& final_weights);

/// Runs seeds cfg.seed, cfg.seed + 1, ... on up to `threads` workers
/// (0 = hardware concurrency). Result i belongs to seed cfg.seed + i.
std::vector<Trajectory> run_replicates(const ValidatedConfig& cfg, const Schedule& schedule,
                                       int replicates, int threads = 0);

/// Trajectory CSV with the column set
/// phase,step,t,eg1,eg2,Q1,Q2,Q12,R1_1,R2_1,R1_2,R2_2,R12_1,R12_2,q_prime,seed
/// and 17 significant digits.
void write_trajectory_header(std::ostream& out);
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);

}  // namespace catforget::sim

namespace catforget::sim {

/// Thread-safe collector for trajectories produced by concurrent runs.
class TrajectorySink {
 public:
  void add(Trajectory trajectory);
  /// Trajectories ordered by seed, independent of arrival order.
  std::vector<Trajectory> sorted() const;
  void write_csv(std::ostream& out) const;

 private:
  mutable std::mutex mutex_;
  std::vector<Trajectory> items_;
};

}  // namespace catforget::sim
