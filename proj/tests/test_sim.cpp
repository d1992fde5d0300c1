#include <doctest.h>

#include <cmath>

#include "etc/sim.hpp"
#include "etc/stats.hpp"
#include "test_support.hpp"

using namespace etc;
using etc::testing::paper_plant;
using etc::testing::vec2;

namespace {

SimConfig fast_config() {
  SimConfig cfg;
  cfg.record_stride = 10;
  return cfg;
}

Generator static_gen(double sigma) { return StaticGenerator{sigma}; }

Generator dynamic_gen(double sigma, double theta, double kappa = 0.48) {
  DynamicGenerator dyn;
  dyn.sigma = sigma;
  dyn.theta = theta;
  dyn.lambda = (1.0 - sigma) * kappa;
  return dyn;
}

}  // namespace

TEST_CASE("rk4 step") {
  const auto zero_field = [](const Vec& y) { return Vec(Vec::Zero(y.size())); };
  Vec y(2);
  y << 3.0, -1.0;
  CHECK(rk4_step(zero_field, y, 0.1) == y);

  const auto decay = [](const Vec& y) { return Vec(-y); };
  Vec y1(1);
  y1 << 1.0;
  const double stepped = rk4_step(decay, y1, 0.1)[0];
  CHECK(stepped == doctest::Approx(0.9048375).epsilon(1e-9));
  CHECK(std::abs(stepped - std::exp(-0.1)) < 1e-7);

  // Ideal closed loop from [10, 0]: V decreases over one step.
  const LinearPlant plant = paper_plant();
  const Vec x0 = vec2(10, 0);
  const auto frozen = [&](const Vec& x) { return closed_loop_field_linear(plant, x, Vec::Zero(2)); };
  const Vec x1 = rk4_step(frozen, x0, 1e-3);
  CHECK(lyapunov_value(plant, x1) < lyapunov_value(plant, x0));

  CHECK_THROWS_AS(rk4_step(decay, y1, 0.0), std::invalid_argument);
}

TEST_CASE("locate_event") {
  const auto trigger = [](double t) { return 1.0 - t; };
  const double t = locate_event(trigger, 0.0, 2.0, 1e-10);
  CHECK(std::abs(t - 1.0) <= 1e-10);
  CHECK_THROWS_AS(locate_event([](double) { return -1.0; }, 0.0, 1.0, 1e-10),
                  std::logic_error);
}

TEST_CASE("zero initial state stabilizes immediately") {
  const LoopModel model = loop_model(paper_plant());
  const Trajectory traj = simulate(model, static_gen(0.1), Vec::Zero(2), fast_config());
  CHECK(traj.status == SimStatus::FiniteTimeStabilized);
  CHECK(traj.execution_times == std::vector<double>{0.0});
  CHECK(traj.times == std::vector<double>{0.0});
}

TEST_CASE("static run from the paper initial condition") {
  const LoopModel model = loop_model(paper_plant());
  const Trajectory traj = simulate(model, static_gen(0.001), vec2(10, 0), fast_config());
  CHECK(traj.status == SimStatus::Completed);
  REQUIRE(traj.execution_times.size() > 100);
  const RunStats stats = inter_execution_stats({traj.execution_times});
  // Batch mean is 0.0031 s; a single run sits in the same decade.
  CHECK(stats.mean > 0.001);
  CHECK(stats.mean < 0.01);

  // Static rule: eta stays identically zero, so W == V.
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    CHECK(traj.etas[i] == 0.0);
    CHECK(traj.W_values[i] == traj.V_values[i]);
  }
  // Recorded trigger values never go materially negative.
  for (double trig : traj.trigger_values) CHECK(trig >= -1e-8);
}

TEST_CASE("event localization is self-consistent under refinement") {
  const LoopModel model = loop_model(paper_plant());
  SimConfig coarse = fast_config();
  SimConfig fine = fast_config();
  fine.dt = coarse.dt / 10.0;
  const auto t_coarse = first_execution_time(model, static_gen(0.1), vec2(10, 0), 0.0, coarse);
  const auto t_fine = first_execution_time(model, static_gen(0.1), vec2(10, 0), 0.0, fine);
  REQUIRE(t_coarse.fired);
  REQUIRE(t_fine.fired);
  CHECK(std::abs(t_coarse.time - t_fine.time) <= 1e-8);
}

TEST_CASE("dynamic run invariants") {
  const LoopModel model = loop_model(paper_plant());
  for (double theta : {0.0, 0.1, 1.0}) {
    const Trajectory traj = simulate(model, dynamic_gen(0.001, theta), vec2(10, 0), fast_config());
    CHECK(traj.status == SimStatus::Completed);
    const InvariantSummary inv = summarize_invariants(traj, 0.001, 0.48);
    CHECK(inv.min_eta >= -1e-8 * (1.0 + inv.max_eta));
    CHECK(inv.min_trigger >= -1e-8);
    CHECK(inv.max_w_step_increase <= 1e-6 * inv.w0);
    CHECK(inv.perf_violation <= 1e-6);
    CHECK(inv.max_v_minus_w <= 1e-8);
  }
}

TEST_CASE("execution times are strictly increasing and start at zero") {
  const LoopModel model = loop_model(paper_plant());
  const Trajectory traj = simulate(model, dynamic_gen(0.01, 0.1), vec2(3, -7), fast_config());
  REQUIRE(!traj.execution_times.empty());
  CHECK(traj.execution_times.front() == 0.0);
  for (std::size_t i = 1; i < traj.execution_times.size(); ++i) {
    CHECK(traj.execution_times[i] > traj.execution_times[i - 1]);
  }
}

TEST_CASE("max events guard") {
  const LoopModel model = loop_model(paper_plant());
  SimConfig cfg = fast_config();
  cfg.max_events = 3;
  const Trajectory traj = simulate(model, static_gen(0.001), vec2(10, 0), cfg);
  CHECK(traj.status == SimStatus::MaxEventsExceeded);
}

TEST_CASE("numerical blowup reports the last valid time") {
  LoopModel model;
  model.dim = 1;
  model.field = [](const Vec& x, const Vec&) { return Vec(x.array().square().matrix()); };
  model.lyapunov = [](const Vec& x) { return x[0] * x[0]; };
  model.state_gain = [](const Vec& x) { return x[0] * x[0]; };
  model.error_gain = [](const Vec&, const Vec&) { return 0.0; };
  Vec x0(1);
  x0 << 1.0;
  SimConfig cfg = fast_config();
  cfg.horizon = 5.0;  // finite escape near t = 1
  CHECK_THROWS_AS(simulate(model, static_gen(0.5), x0, cfg), NumericalBlowupError);
}

TEST_CASE("first execution time orderings") {
  const LoopModel model = loop_model(paper_plant());
  const SimConfig cfg = fast_config();
  const auto ts = first_execution_time(model, static_gen(0.01), vec2(10, 0), 0.0, cfg);
  const auto td = first_execution_time(model, dynamic_gen(0.01, 0.0), vec2(10, 0), 0.0, cfg);
  REQUIRE(ts.fired);
  REQUIRE(td.fired);
  CHECK(ts.time <= td.time + 2.0 * cfg.event_tol);

  // No event inside a short horizon is flagged, not an error.
  SimConfig short_cfg = fast_config();
  short_cfg.horizon = 0.05;
  const auto none = first_execution_time(model, dynamic_gen(0.001, 0.1), vec2(10, 0), 0.0, short_cfg);
  CHECK_FALSE(none.fired);
  CHECK(none.time == short_cfg.horizon);

  CHECK_THROWS_AS(first_execution_time(model, static_gen(0.1), Vec::Zero(2), 0.0, cfg),
                  std::invalid_argument);
  CHECK_THROWS_AS(first_execution_time(model, static_gen(0.1), vec2(1, 0), -0.5, cfg),
                  std::invalid_argument);
}

TEST_CASE("performance bound at t = 0") {
  const LoopModel model = loop_model(paper_plant());
  SimConfig cfg = fast_config();
  cfg.horizon = 0.01;
  const Trajectory traj = simulate(model, static_gen(0.1), vec2(10, 0), cfg);
  const PerformanceBound bound = performance_bound_check(traj, 0.1, 0.48);
  CHECK(bound.max_relative_violation <= 1e-6);
  CHECK(bound.max_v_minus_w <= 0.0);
}

TEST_CASE("determinism: identical config gives identical trajectories") {
  const LoopModel model = loop_model(paper_plant());
  SimConfig cfg = fast_config();
  cfg.horizon = 2.0;
  const Trajectory a = simulate(model, dynamic_gen(0.01, 1.0), vec2(10, 0), cfg);
  const Trajectory b = simulate(model, dynamic_gen(0.01, 1.0), vec2(10, 0), cfg);
  REQUIRE(a.times.size() == b.times.size());
  REQUIRE(a.execution_times.size() == b.execution_times.size());
  for (std::size_t i = 0; i < a.times.size(); ++i) {
    CHECK(a.times[i] == b.times[i]);
    CHECK(a.states[i] == b.states[i]);
    CHECK(a.etas[i] == b.etas[i]);
  }
  for (std::size_t i = 0; i < a.execution_times.size(); ++i) {
    CHECK(a.execution_times[i] == b.execution_times[i]);
  }
}

TEST_CASE("halving dt barely moves the execution times") {
  const LoopModel model = loop_model(paper_plant());
  SimConfig cfg = fast_config();
  cfg.horizon = 2.0;
  SimConfig half = cfg;
  half.dt = cfg.dt / 2.0;
  const Trajectory a = simulate(model, static_gen(0.01), vec2(10, 0), cfg);
  const Trajectory b = simulate(model, static_gen(0.01), vec2(10, 0), half);
  REQUIRE(a.execution_times.size() == b.execution_times.size());
  for (std::size_t i = 0; i < a.execution_times.size(); ++i) {
    CHECK(std::abs(a.execution_times[i] - b.execution_times[i]) < 1e-3);
  }
}
