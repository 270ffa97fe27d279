#include "catforget/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <ostream>
#include <thread>

#include "catforget/error.hpp"
#include "format.hpp"

namespace catforget::sim {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  // Four fixed lanes keep the sum order deterministic while letting the
  // compiler vectorize.
  double acc[4] = {0, 0, 0, 0};
  const std::size_t n = a.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc[0] += a[i] * b[i];
    acc[1] += a[i + 1] * b[i + 1];
    acc[2] += a[i + 2] * b[i + 2];
    acc[3] += a[i + 3] * b[i + 3];
  }
  for (; i < n; ++i) acc[0] += a[i] * b[i];
  return (acc[0] + acc[1]) + (acc[2] + acc[3]);
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

std::span<const double> block(const std::vector<double>& v, std::int64_t begin, std::int64_t end) {
  return std::span<const double>(v).subspan(static_cast<std::size_t>(begin),
                                            static_cast<std::size_t>(end - begin));
}

// Residual (b - j)^T x over the support, followed by j += scale * residual * x.
double update(std::span<const double> teacher, std::span<double> student, std::span<const double> x,
              double step_size) {
  double acc[4] = {0, 0, 0, 0};
  const std::size_t n = x.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc[0] += (teacher[i] - student[i]) * x[i];
    acc[1] += (teacher[i + 1] - student[i + 1]) * x[i + 1];
    acc[2] += (teacher[i + 2] - student[i + 2]) * x[i + 2];
    acc[3] += (teacher[i + 3] - student[i + 3]) * x[i + 3];
  }
  for (; i < n; ++i) acc[0] += (teacher[i] - student[i]) * x[i];
  const double residual = (acc[0] + acc[1]) + (acc[2] + acc[3]);
  if (!std::isfinite(residual)) return residual;
  const double scale = step_size * residual;
  for (std::size_t k = 0; k < n; ++k) student[k] += scale * x[k];
  return residual;
}

void check_length(const WeightTriple& w, const ValidatedConfig& cfg) {
  const auto n = static_cast<std::size_t>(cfg.n());
  if (w.b1.size() != n || w.b2.size() != n || w.j.size() != n) {
    throw Error(ErrorCode::out_of_range, "weight vectors must have length n");
  }
}

}  // namespace

Support support(Task task, const ValidatedConfig& cfg) {
  if (task == Task::one) return {0, cfg.task_block()};
  return {cfg.exclusive_block(), cfg.n()};
}

Teachers gen_teachers(const ValidatedConfig& v, Rng& rng) {
  const auto& cfg = v.config();
  const auto n = static_cast<std::size_t>(v.n());
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(v.n()));

  Teachers t;
  t.b1.resize(n);
  std::vector<double> xi(n);
  rng.fill_normal(t.b1, cfg.sigma_b1 * inv_sqrt_n);
  rng.fill_normal(xi, cfg.sigma_b2 * inv_sqrt_n);

  const double q = cfg.q;
  const double ortho = std::sqrt(std::max(0.0, 1.0 - q * q));
  t.b2.resize(n);

  if (!cfg.exact_similarity) {
    if (cfg.sigma_b1 > 0.0) {
      const double along = q * cfg.sigma_b2 / cfg.sigma_b1;
      for (std::size_t i = 0; i < n; ++i) t.b2[i] = along * t.b1[i] + ortho * xi[i];
    } else {
      t.b2 = xi;
    }
    return t;
  }

  // Exact mode: unit direction u of b1, unit direction v of xi orthogonal to
  // u, then b1 = sB1 u and b2 = sB2 (q u + sqrt(1 - q^2) v).
  std::vector<double> u = t.b1;
  const double nb1 = norm(u);
  if (nb1 > 0.0) {
    for (auto& x : u) x /= nb1;
    const double proj = dot(xi, u);
    for (std::size_t i = 0; i < n; ++i) xi[i] -= proj * u[i];
  }
  const double nxi = norm(xi);
  if (nxi > 0.0) {
    for (auto& x : xi) x /= nxi;
  }
  for (std::size_t i = 0; i < n; ++i) {
    t.b1[i] = cfg.sigma_b1 * u[i];
    t.b2[i] = cfg.sigma_b2 * (q * u[i] + ortho * xi[i]);
  }
  return t;
}

std::vector<double> gen_student(const ValidatedConfig& v, Rng& rng) {
  std::vector<double> j(static_cast<std::size_t>(v.n()));
  rng.fill_normal(j, v.config().sigma_j / std::sqrt(static_cast<double>(v.n())));
  return j;
}

std::vector<double> sample_input(Task task, const ValidatedConfig& v, Rng& rng) {
  const auto [begin, end] = support(task, v);
  const double variance = task == Task::one ? v.config().sigma1_sq : v.config().sigma2_sq;
  std::vector<double> x(static_cast<std::size_t>(v.n()), 0.0);
  rng.fill_normal(std::span<double>(x).subspan(static_cast<std::size_t>(begin),
                                               static_cast<std::size_t>(end - begin)),
                  std::sqrt(variance));
  return x;
}

double sgd_step(WeightTriple& w, Task task, const ValidatedConfig& v, std::span<const double> x) {
  check_length(w, v);
  if (x.size() != w.j.size()) throw Error(ErrorCode::out_of_range, "input must have length n");
  const auto [begin, end] = support(task, v);
  const auto offset = static_cast<std::size_t>(begin);
  const auto len = static_cast<std::size_t>(end - begin);
  const auto& teacher = task == Task::one ? w.b1 : w.b2;
  const double residual = update(std::span<const double>(teacher).subspan(offset, len),
                                 std::span<double>(w.j).subspan(offset, len), x.subspan(offset, len),
                                 v.config().eta / static_cast<double>(v.n()));
  if (!std::isfinite(residual)) throw Error(ErrorCode::non_finite, "student weights overflowed");
  return residual;
}

double sgd_step(WeightTriple& w, Task task, const ValidatedConfig& v, Rng& rng) {
  return sgd_step(w, task, v, sample_input(task, v, rng));
}

OrderParamState measure_order_params(const WeightTriple& w, const ValidatedConfig& v) {
  check_length(w, v);
  // Blocks: [0, a) task 1 only, [a, b) common, [b, n) task 2 only.
  const std::int64_t a = v.exclusive_block();
  const std::int64_t b = v.task_block();
  const std::int64_t n = v.n();

  struct Sums {
    double jj = 0, b1j = 0, b2j = 0, b1b1 = 0, b2b2 = 0, b1b2 = 0;
  };
  auto sums = [&](std::int64_t lo, std::int64_t hi) {
    Sums s;
    const auto j = block(w.j, lo, hi), b1 = block(w.b1, lo, hi), b2 = block(w.b2, lo, hi);
    s.jj = dot(j, j);
    s.b1j = dot(b1, j);
    s.b2j = dot(b2, j);
    s.b1b1 = dot(b1, b1);
    s.b2b2 = dot(b2, b2);
    s.b1b2 = dot(b1, b2);
    return s;
  };
  const Sums only1 = sums(0, a);
  const Sums common = sums(a, b);
  const Sums only2 = sums(b, n);

  OrderParamState s;
  s.q1 = only1.jj + common.jj;
  s.q2 = common.jj + only2.jj;
  s.q12 = common.jj;
  s.r1_1 = only1.b1j + common.b1j;
  s.r2_1 = common.b1j + only2.b1j;
  s.r1_2 = only1.b2j + common.b2j;
  s.r2_2 = common.b2j + only2.b2j;
  s.r12_1 = common.b1j;
  s.r12_2 = common.b2j;
  s.t1_1 = only1.b1b1 + common.b1b1;
  s.t2_2 = common.b2b2 + only2.b2b2;
  s.t12_1 = common.b1b1;
  s.t12_2 = common.b2b2;
  s.q_prime = common.b1b2;
  return s;
}

void apply_exact_copy(WeightTriple& w, const ValidatedConfig& v) {
  check_length(w, v);
  std::copy_n(w.b1.begin(), v.task_block(), w.j.begin());
}

Schedule schedule_for(const ValidatedConfig& v, double duration) {
  if (!(duration >= 0.0)) throw Error(ErrorCode::out_of_range, "duration must be >= 0");
  Schedule s;
  s.steps_task1 = s.steps_task2 = std::llround(duration * static_cast<double>(v.task_block()));
  s.record_every = std::max<std::int64_t>(1, std::llround(v.task_block() / 10.0));
  return s;
}

namespace {

TrajectoryRecord record(const WeightTriple& w, const ValidatedConfig& v, int phase, std::int64_t step) {
  TrajectoryRecord rec;
  rec.phase = phase;
  rec.step = step;
  rec.t = v.time_of(step);
  rec.order = measure_order_params(w, v);
  rec.eg1 = rec.order.eg1(v.config().sigma1_sq);
  rec.eg2 = rec.order.eg2(v.config().sigma2_sq);
  rec.seed = v.config().seed;
  return rec;
}

void run_phase(WeightTriple& w, const ValidatedConfig& v, Task task, std::int64_t steps,
               std::int64_t every, Rng& rng, Trajectory& out) {
  if (steps <= 0) return;
  const int phase = static_cast<int>(task);
  const auto [begin, end] = support(task, v);
  const auto offset = static_cast<std::size_t>(begin);
  const auto len = static_cast<std::size_t>(end - begin);
  const auto& teacher = task == Task::one ? w.b1 : w.b2;
  const double stddev = std::sqrt(task == Task::one ? v.config().sigma1_sq : v.config().sigma2_sq);
  const double step_size = v.config().eta / static_cast<double>(v.n());

  const auto teacher_block = std::span<const double>(teacher).subspan(offset, len);
  const auto student_block = std::span<double>(w.j).subspan(offset, len);
  std::vector<double> x(len);

  out.push_back(record(w, v, phase, 0));
  for (std::int64_t m = 1; m <= steps; ++m) {
    rng.fill_normal(x, stddev);
    const double residual = update(teacher_block, student_block, x, step_size);
    if (!std::isfinite(residual)) {
      throw Error(ErrorCode::non_finite, "student weights overflowed in phase " + std::to_string(phase) +
                                             " at step " + std::to_string(m));
    }
    if (m % every == 0 || m == steps) out.push_back(record(w, v, phase, m));
  }
}

}  // namespace

Trajectory run_continual(const ValidatedConfig& v, const Schedule& schedule, WeightTriple& w) {
  if (schedule.steps_task1 < 0 || schedule.steps_task2 < 0 || schedule.record_every < 0) {
    throw Error(ErrorCode::out_of_range, "schedule entries must be >= 0");
  }
  const std::int64_t every = schedule.record_every > 0
                                 ? schedule.record_every
                                 : std::max<std::int64_t>(1, std::llround(v.task_block() / 10.0));
  const auto seed = v.config().seed;

  Rng teacher_rng(seed, Stream::teachers);
  Rng student_rng(seed, Stream::student);
  Rng data_rng(seed, Stream::task_data);

  auto teachers = gen_teachers(v, teacher_rng);
  w.b1 = std::move(teachers.b1);
  w.b2 = std::move(teachers.b2);
  w.j = gen_student(v, student_rng);

  Trajectory out;
  run_phase(w, v, Task::one, schedule.steps_task1, every, data_rng, out);
  if (v.config().t1_mode == TaskOneEndpoint::exact_copy) apply_exact_copy(w, v);
  run_phase(w, v, Task::two, schedule.steps_task2, every, data_rng, out);
  return out;
}

Trajectory run_continual(const ValidatedConfig& v, const Schedule& schedule) {
  WeightTriple w;
  return run_continual(v, schedule, w);
}

std::vector<Trajectory> run_replicates(const ValidatedConfig& v, const Schedule& schedule,
                                       int replicates, int threads) {
  if (replicates < 1) throw Error(ErrorCode::out_of_range, "replicate count must be >= 1");
  std::vector<Trajectory> out(static_cast<std::size_t>(replicates));
  std::vector<std::exception_ptr> errors(out.size());
  std::atomic<int> next{0};

  auto worker = [&] {
    for (int i = next++; i < replicates; i = next++) {
      try {
        auto cfg = v.config();
        cfg.seed += static_cast<std::uint64_t>(i);
        out[static_cast<std::size_t>(i)] = run_continual(validate(cfg), schedule);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  };

  int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, replicates);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int k = 0; k < workers; ++k) pool.emplace_back(worker);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

void write_trajectory_header(std::ostream& out) {
  out << "phase,step,t,eg1,eg2,Q1,Q2,Q12,R1_1,R2_1,R1_2,R2_2,R12_1,R12_2,q_prime,seed\n";
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory) {
  using detail::fmt17;
  for (const auto& rec : trajectory) {
    const auto& s = rec.order;
    out << rec.phase << ',' << rec.step << ',' << fmt17(rec.t.value()) << ',' << fmt17(rec.eg1) << ','
        << fmt17(rec.eg2) << ',' << fmt17(s.q1) << ',' << fmt17(s.q2) << ',' << fmt17(s.q12) << ','
        << fmt17(s.r1_1) << ',' << fmt17(s.r2_1) << ',' << fmt17(s.r1_2) << ',' << fmt17(s.r2_2) << ','
        << fmt17(s.r12_1) << ',' << fmt17(s.r12_2) << ',' << fmt17(s.q_prime) << ',' << rec.seed << '\n';
  }
}

void TrajectorySink::add(Trajectory trajectory) {
  std::lock_guard lock(mutex_);
  items_.push_back(std::move(trajectory));
}

std::vector<Trajectory> TrajectorySink::sorted() const {
  std::lock_guard lock(mutex_);
  auto copy = items_;
  std::stable_sort(copy.begin(), copy.end(), [](const Trajectory& a, const Trajectory& b) {
    if (a.empty() || b.empty()) return !a.empty() && b.empty();
    return a.front().seed < b.front().seed;
  });
  return copy;
}

void TrajectorySink::write_csv(std::ostream& out) const {
  write_trajectory_header(out);
  for (const auto& t : sorted()) write_trajectory_csv(out, t);
}

}  // namespace catforget::sim
