#include <doctest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "catforget/error.hpp"
#include "catforget/rng.hpp"
#include "catforget/simulator.hpp"
#include "catforget/theory.hpp"

using namespace catforget;
using sim::Task;

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

ValidatedConfig small(std::int64_t n, double r = 0.8, double q = 0.3) {
  ContinualConfig c;
  c.n = n;
  c.r = r;
  c.q = q;
  return validate(c);
}

sim::WeightTriple triple_for(const ValidatedConfig& cfg, std::uint64_t seed) {
  Rng teachers(seed, Stream::teachers), student(seed, Stream::student);
  auto t = sim::gen_teachers(cfg, teachers);
  return {t.b1, t.b2, sim::gen_student(cfg, student)};
}

}  // namespace

TEST_CASE("rng streams are reproducible and distinct") {
  Rng a(5, Stream::task_data), b(5, Stream::task_data), c(5, Stream::teachers), d(6, Stream::task_data);
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    CHECK(x != c.next_u64());
    CHECK(x != d.next_u64());
  }
  Rng u(1);
  for (int i = 0; i < 10000; ++i) {
    const double v = u.uniform();
    CHECK(v > 0.0);
    CHECK(v < 1.0);
  }
}

TEST_CASE("fill_normal matches repeated normal()") {
  Rng a(3), b(3);
  std::vector<double> xs(7);
  a.normal();
  a.fill_normal(xs, 2.0);
  b.normal();
  for (double x : xs) CHECK(x == 2.0 * b.normal());
}

TEST_CASE("q = 0 teachers are nearly orthogonal") {
  ContinualConfig c;
  c.n = 100000;
  c.q = 0;
  const auto cfg = validate(c);
  int inside = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed, Stream::teachers);
    const auto t = sim::gen_teachers(cfg, rng);
    const double cosine = dot(t.b1, t.b2) / std::sqrt(dot(t.b1, t.b1) * dot(t.b2, t.b2));
    inside += std::abs(cosine) < 4.0 / std::sqrt(100000.0) ? 1 : 0;
  }
  CHECK(inside >= 99);
}

TEST_CASE("q = 1 with equal scales copies the teacher") {
  ContinualConfig c;
  c.n = 500;
  c.q = 1;
  Rng rng(1, Stream::teachers);
  const auto t = sim::gen_teachers(validate(c), rng);
  CHECK(t.b1 == t.b2);
}

TEST_CASE("exact similarity hits the norms and the cosine") {
  ContinualConfig c;
  c.n = 400;
  c.q = 0.3;
  c.sigma_b1 = 1.3;
  c.sigma_b2 = 0.7;
  c.exact_similarity = true;
  const auto cfg = validate(c);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed, Stream::teachers);
    const auto t = sim::gen_teachers(cfg, rng);
    const double n1 = dot(t.b1, t.b1), n2 = dot(t.b2, t.b2);
    CHECK(std::abs(n1 - 1.69) < 1e-12);
    CHECK(std::abs(n2 - 0.49) < 1e-12);
    CHECK(std::abs(dot(t.b1, t.b2) / std::sqrt(n1 * n2) - 0.3) < 1e-12);
  }
}

TEST_CASE("input masks") {
  ContinualConfig c;
  c.n = 10;
  c.r = 0.8;
  const auto cfg = validate(c);
  Rng rng(2);
  const auto x1 = sim::sample_input(Task::one, cfg, rng);
  const auto x2 = sim::sample_input(Task::two, cfg, rng);
  REQUIRE(x1.size() == 10);
  for (int i = 0; i < 8; ++i) CHECK(x1[i] != 0.0);
  CHECK(x1[8] == 0.0);
  CHECK(x1[9] == 0.0);
  CHECK(x2[0] == 0.0);
  CHECK(x2[1] == 0.0);
  for (int i = 2; i < 10; ++i) CHECK(x2[i] != 0.0);

  c.r = 1;
  const auto full = validate(c);
  for (double v : sim::sample_input(Task::one, full, rng)) CHECK(v != 0.0);
  for (double v : sim::sample_input(Task::two, full, rng)) CHECK(v != 0.0);
}

TEST_CASE("input variance over 1e6 draws") {
  ContinualConfig c;
  c.n = 1000;
  c.r = 1;
  c.sigma1_sq = 0.8;
  const auto cfg = validate(c);
  Rng rng(4);
  double ss = 0;
  std::size_t count = 0;
  for (int k = 0; k < 1000; ++k) {
    for (double v : sim::sample_input(Task::one, cfg, rng)) {
      ss += v * v;
      ++count;
    }
  }
  CHECK(count == 1000000);
  CHECK(std::abs(ss / static_cast<double>(count) / 0.8 - 1.0) < 0.005);
}

TEST_CASE("hand-computed SGD step") {
  ContinualConfig c;
  c.n = 2;
  c.r = 1;
  c.eta = 2;
  c.sigma1_sq = 0.5;
  const auto cfg = validate(c);
  sim::WeightTriple w{{1, 0}, {1, 0}, {0, 0}};
  const std::vector<double> x{1, 0};
  CHECK(sim::sgd_step(w, Task::one, cfg, x) == 1.0);
  CHECK(w.j == std::vector<double>{1, 0});
}

TEST_CASE("a student equal to its teacher does not move") {
  const auto cfg = small(200);
  auto w = triple_for(cfg, 1);
  w.j = w.b1;
  const auto before = w.j;
  Rng rng(9);
  for (int i = 0; i < 50; ++i) CHECK(sim::sgd_step(w, Task::one, cfg, rng) == 0.0);
  CHECK(w.j == before);
}

TEST_CASE("weights outside the task support never change") {
  const auto cfg = small(100);
  auto w = triple_for(cfg, 2);
  const auto before = w.j;
  Rng rng(3);
  for (int i = 0; i < 500; ++i) sim::sgd_step(w, Task::one, cfg, rng);
  for (int i = 80; i < 100; ++i) CHECK(w.j[i] == before[i]);
  const auto mid = w.j;
  for (int i = 0; i < 500; ++i) sim::sgd_step(w, Task::two, cfg, rng);
  for (int i = 0; i < 20; ++i) CHECK(w.j[i] == mid[i]);
}

TEST_CASE("order parameters from weights") {
  const auto cfg = small(10);
  sim::WeightTriple w;
  for (int i = 0; i < 10; ++i) {
    w.b1.push_back(i + 1);
    w.b2.push_back(0.5 * i);
    w.j.push_back(i % 3 - 1.0);
  }
  auto masked = [&](const std::vector<double>& a, const std::vector<double>& b, int lo, int hi) {
    double s = 0;
    for (int i = lo; i < hi; ++i) s += a[i] * b[i];
    return s;
  };
  const auto s = sim::measure_order_params(w, cfg);
  CHECK(s.q1 == masked(w.j, w.j, 0, 8));
  CHECK(s.q2 == masked(w.j, w.j, 2, 10));
  CHECK(s.q12 == masked(w.j, w.j, 2, 8));
  CHECK(s.r1_1 == masked(w.b1, w.j, 0, 8));
  CHECK(s.r2_1 == masked(w.b1, w.j, 2, 10));
  CHECK(s.r1_2 == masked(w.b2, w.j, 0, 8));
  CHECK(s.r2_2 == masked(w.b2, w.j, 2, 10));
  CHECK(s.r12_1 == masked(w.b1, w.j, 2, 8));
  CHECK(s.r12_2 == masked(w.b2, w.j, 2, 8));
  CHECK(s.t1_1 == masked(w.b1, w.b1, 0, 8));
  CHECK(s.t2_2 == masked(w.b2, w.b2, 2, 10));
  CHECK(s.t12_1 == masked(w.b1, w.b1, 2, 8));
  CHECK(s.t12_2 == masked(w.b2, w.b2, 2, 8));
  CHECK(s.q_prime == masked(w.b1, w.b2, 2, 8));

  std::fill(w.j.begin(), w.j.end(), 0.0);
  const auto z = sim::measure_order_params(w, cfg);
  CHECK(z.q1 == 0.0);
  CHECK(z.r12_2 == 0.0);
  CHECK(z.t1_1 == s.t1_1);
}

TEST_CASE("exact copy reproduces the phase-2 initial overlap") {
  ContinualConfig c;
  c.n = 3000;
  c.exact_similarity = true;
  const auto cfg = validate(c);
  auto w = triple_for(cfg, 0);
  sim::apply_exact_copy(w, cfg);
  const auto s = sim::measure_order_params(w, cfg);
  // R2^2 = q' plus the overlap on task 2's exclusive block, which is O(1/sqrt(N)).
  double exclusive = 0;
  for (int i = 2400; i < 3000; ++i) exclusive += w.b2[i] * w.j[i];
  CHECK(s.r2_2 == doctest::Approx(s.q_prime + exclusive).epsilon(1e-12));
  CHECK(std::abs(exclusive) < 4.0 / std::sqrt(3000.0));
  // (2r-1) q sB1 sB2
  CHECK(std::abs(s.q_prime - 0.18) < 4.0 / std::sqrt(3000.0));
  for (int i = 0; i < 2400; ++i) CHECK(w.j[i] == w.b1[i]);
}

TEST_CASE("exact errors agree with Monte Carlo test sets") {
  const auto cfg = small(60);
  auto w = triple_for(cfg, 4);
  Rng train(8);
  for (int round = 0; round < 3; ++round) {
    const auto s = sim::measure_order_params(w, cfg);
    for (auto task : {Task::one, Task::two}) {
      const auto& b = task == Task::one ? w.b1 : w.b2;
      Rng test(100 + round, Stream::test_data);
      double sum = 0, sum2 = 0;
      const int m = 100000;
      for (int k = 0; k < m; ++k) {
        const auto x = sim::sample_input(task, cfg, test);
        const double d = dot(b, x) - dot(w.j, x);
        const double e = 0.5 * d * d;
        sum += e;
        sum2 += e * e;
      }
      const double mean = sum / m;
      const double se = std::sqrt((sum2 / m - mean * mean) / (m - 1));
      const double exact = task == Task::one ? s.eg1(0.8) : s.eg2(0.8);
      CHECK(std::abs(mean - exact) < 3 * se);
    }
    for (int k = 0; k < 40; ++k) sim::sgd_step(w, round % 2 ? Task::two : Task::one, cfg, train);
  }
}

TEST_CASE("same seed, identical trajectories") {
  auto cfg = small(300);
  const auto sched = sim::schedule_for(cfg, 2);
  const auto a = sim::run_continual(cfg, sched);
  const auto b = sim::run_continual(cfg, sched);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].eg1 == b[i].eg1);
    CHECK(a[i].eg2 == b[i].eg2);
    CHECK(a[i].order == b[i].order);
  }
  const auto reps = sim::run_replicates(cfg, sched, 3, 2);
  REQUIRE(reps.size() == 3);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(reps[0][i].order == a[i].order);
  CHECK(reps[1][0].seed == 1);
}

TEST_CASE("trajectory records") {
  auto cfg = small(100);
  sim::Schedule s{500, 300, 40};
  const auto t = sim::run_continual(cfg, s);
  std::size_t p1 = 0, p2 = 0;
  for (const auto& rec : t) {
    (rec.phase == 1 ? p1 : p2) += 1;
    CHECK(rec.eg1 == rec.order.eg1(0.8));
    CHECK(rec.eg2 == rec.order.eg2(0.8));
    CHECK(rec.t.value() == doctest::Approx(static_cast<double>(rec.step) / 80.0));
  }
  CHECK(p1 == 14);  // 0, 40, ..., 480, 500
  CHECK(p2 == 9);   // 0, 40, ..., 280, 300
  CHECK(t[p1].step == 0);
  CHECK(t[p1].phase == 2);

  const auto only1 = sim::run_continual(cfg, sim::Schedule{200, 0, 40});
  for (const auto& rec : only1) CHECK(rec.phase == 1);
}

TEST_CASE("task 1 converges at the predicted rate") {
  ContinualConfig c;
  c.n = 1000;
  c.t1_mode = TaskOneEndpoint::trained;
  const auto cfg = validate(c);
  const auto steps = 10 * cfg.task_block();
  const auto t = sim::run_continual(cfg, sim::Schedule{steps, 0, cfg.task_block() / 10});
  const double e0 = t.front().eg1;
  CHECK(t.back().eg1 < 1e-3 * e0);
  // Least-squares slope of log eg1 against t.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& rec : t) {
    const double x = rec.t.value(), y = std::log(rec.eg1);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(t.size());
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double g = cfg.gamma1();
  CHECK(std::abs(slope / (-g * (2 - g)) - 1.0) < 0.1);
}

TEST_CASE("identical tasks are never forgotten") {
  ContinualConfig c;
  c.n = 500;
  c.r = 1;
  c.q = 1;
  const auto cfg = validate(c);
  const auto t = sim::run_continual(cfg, sim::Schedule{0, 4000, 100});
  REQUIRE_FALSE(t.empty());
  for (const auto& rec : t) CHECK(rec.eg1 < 1e-20);
}

TEST_CASE("divergent learning raises NON_FINITE") {
  ContinualConfig c;
  c.n = 4;
  c.r = 1;
  c.sigma2_sq = 2.5;
  c.allow_divergent = true;
  const auto cfg = validate(c);
  try {
    sim::run_continual(cfg, sim::Schedule{0, 10000, 1000});
    FAIL("simulation stayed finite");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::non_finite);
  }
}

TEST_CASE("trajectory CSV") {
  auto cfg = small(50);
  const auto t = sim::run_continual(cfg, sim::Schedule{40, 40, 20});
  std::ostringstream out;
  sim::write_trajectory_header(out);
  sim::write_trajectory_csv(out, t);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "phase,step,t,eg1,eg2,Q1,Q2,Q12,R1_1,R2_1,R1_2,R2_2,R12_1,R12_2,q_prime,seed");
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(std::count(line.begin(), line.end(), ',') == 15);
  }
  CHECK(rows == t.size());

  // 17 significant digits round-trip.
  std::istringstream again(out.str());
  std::getline(again, line);
  std::getline(again, line);
  std::vector<std::string> cells;
  std::stringstream ls(line);
  for (std::string cell; std::getline(ls, cell, ',');) cells.push_back(cell);
  CHECK(std::stod(cells[3]) == t.front().eg1);
}

TEST_CASE("sink orders by seed") {
  auto cfg = small(50);
  sim::TrajectorySink sink;
  for (std::uint64_t s : {3u, 1u, 2u}) {
    ContinualConfig c = cfg.config();
    c.seed = s;
    sink.add(sim::run_continual(validate(c), sim::Schedule{10, 10, 5}));
  }
  const auto sorted = sink.sorted();
  CHECK(sorted[0].front().seed == 1);
  CHECK(sorted[2].front().seed == 3);
}
