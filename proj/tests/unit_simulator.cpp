#include <cmath>
#include <cstddef>

#include "doctest.h"
#include "sglv/simulate.hpp"
#include "sglv/stats.hpp"
#include "support/test_support.hpp"

using namespace sglv;
using testsupport::code_of;
using testsupport::message_of;

namespace {

ModelParams decoupled_params() {
  // a = 0 turns each species into geometric Brownian motion.
  ModelParams p;
  p.r = {0.2, -0.1};
  p.a = Matrix(2, 2);
  p.sigma = {0.5, 0.3};
  return p;
}

double logistic_exact(double x0, double t) {
  // dx/dt = x (1 - x)
  return 1.0 / (1.0 + (1.0 / x0 - 1.0) * std::exp(-t));
}

}  // namespace

TEST_SUITE("simulator") {
  TEST_CASE("identical configs give identical paths, different seeds differ") {
    const ModelParams p = decoupled_params();
    SimConfig cfg;
    cfg.fine_dt = 0.01;
    cfg.x0 = {1.0, 0.5};
    RngStream r1(99, 4), r2(99, 4), r3(100, 4);
    const FineTrajectory t1 = simulate_log_euler(p, cfg, 2.0, r1);
    const FineTrajectory t2 = simulate_log_euler(p, cfg, 2.0, r2);
    const FineTrajectory t3 = simulate_log_euler(p, cfg, 2.0, r3);
    CHECK(t1.u == t2.u);
    CHECK_FALSE(t1.u == t3.u);
    CHECK(t1.u.rows() == 201);
  }

  TEST_CASE("with a = 0 each step is exactly R dt + sigma sqrt(dt) Z") {
    const ModelParams p = decoupled_params();
    SimConfig cfg;
    cfg.fine_dt = 0.05;
    cfg.x0 = {1.0, 0.5};
    RngStream sim_rng(123, 1);
    const FineTrajectory traj = simulate_log_euler(p, cfg, 1.0, sim_rng);

    // Replay the recursion with an identical stream.
    RngStream replay(123, 1);
    const Vector big_r = p.log_growth();
    const double sq = std::sqrt(cfg.fine_dt);
    Vector u{std::log(1.0), std::log(0.5)};
    for (std::size_t s = 1; s < traj.u.rows(); ++s) {
      for (std::size_t k = 0; k < 2; ++k) {
        u[k] += big_r[k] * cfg.fine_dt + p.sigma[k] * sq * replay.standard_normal();
        CHECK(traj.u(s, k) == doctest::Approx(u[k]).epsilon(1e-14));
      }
    }
  }

  TEST_CASE("terminal log-state moments match geometric Brownian motion") {
    const ModelParams p = decoupled_params();
    SimConfig cfg;
    cfg.fine_dt = 0.01;
    cfg.x0 = {1.0, 1.0};
    const double horizon = 1.0;
    const std::size_t paths = 2000;

    std::vector<double> u_end(paths);
    for (std::size_t i = 0; i < paths; ++i) {
      RngStream rng(2718, i);
      const FineTrajectory traj = simulate_log_euler(p, cfg, horizon, rng);
      u_end[i] = traj.u(traj.u.rows() - 1, 0);
    }
    // For the Euler chain the terminal law is exactly
    // N(u0 + R T, sigma^2 T) when a = 0.
    const double want_mean = (p.r[0] - 0.5 * p.sigma[0] * p.sigma[0]) * horizon;
    const double want_var = p.sigma[0] * p.sigma[0] * horizon;
    const double se_mean = std::sqrt(want_var / paths);
    const double se_var = want_var * std::sqrt(2.0 / (paths - 1.0));
    CHECK(std::abs(mean(u_end) - want_mean) < 4.0 * se_mean);
    CHECK(std::abs(sample_variance(u_end) - want_var) < 4.0 * se_var);
  }

  TEST_CASE("zero-noise Euler converges to the logistic solution") {
    ModelParams p;
    p.r = {1.0};
    p.a = Matrix{{-1.0}};
    p.sigma = {0.0};
    SimConfig cfg;
    cfg.fine_dt = 1e-4;
    cfg.x0 = {0.5};
    RngStream rng(1, 0);
    const FineTrajectory traj = simulate_log_euler(p, cfg, 2.0, rng);
    const double got = std::exp(traj.u(traj.u.rows() - 1, 0));
    CHECK(got == doctest::Approx(logistic_exact(0.5, 2.0)).epsilon(2e-4));
  }

  TEST_CASE("RK4 flow hits the logistic solution to high order") {
    ModelParams p;
    p.r = {1.0};
    p.a = Matrix{{-1.0}};
    p.sigma = {0.0};
    const Vector at3 = deterministic_glv_flow(p, {0.5}, 3.0, 0.01);
    CHECK(std::abs(at3[0] - logistic_exact(0.5, 3.0)) < 1e-9);

    // Fourth-order convergence: halving dt shrinks the error ~16x.
    const double e1 = std::abs(deterministic_glv_flow(p, {0.25}, 2.0, 0.2)[0] -
                               logistic_exact(0.25, 2.0));
    const double e2 = std::abs(deterministic_glv_flow(p, {0.25}, 2.0, 0.1)[0] -
                               logistic_exact(0.25, 2.0));
    CHECK(e1 / e2 > 10.0);
    CHECK(e1 / e2 < 24.0);
  }

  TEST_CASE("RK4 handles a final partial step exactly") {
    ModelParams p;
    p.r = {1.0};
    p.a = Matrix{{-1.0}};
    p.sigma = {0.0};
    // Truncation error at dt = 0.1 is ~1e-8; an unhandled overshoot past the
    // horizon would be off by ~1e-3, so 1e-7 still isolates the partial step.
    const Vector got = deterministic_glv_flow(p, {0.5}, 1.05, 0.1);  // 10.5 steps
    CHECK(got[0] == doctest::Approx(logistic_exact(0.5, 1.05)).epsilon(1e-7));
  }

  TEST_CASE("observations are read off the fine grid without interpolation") {
    const ModelParams p = decoupled_params();
    SimConfig cfg;
    cfg.fine_dt = 0.01;
    cfg.x0 = {1.0, 0.5};
    const Vector times{0.0, 0.1, 0.4, 0.9};

    RngStream r1(55, 2), r2(55, 2);
    const ObservationSeries obs = simulate_observed_at(p, cfg, times, r1);
    const FineTrajectory traj = simulate_log_euler(p, cfg, 0.9, r2);

    REQUIRE(obs.n_obs() == 4);
    for (std::size_t i = 0; i < times.size(); ++i) {
      const auto idx = static_cast<std::size_t>(std::llround(times[i] / cfg.fine_dt));
      for (std::size_t k = 0; k < 2; ++k)
        CHECK(obs.values()(i, k) == doctest::Approx(std::exp(traj.u(idx, k))).epsilon(1e-15));
    }

    RngStream r3(55, 2);
    CHECK(code_of([&] { simulate_observed_at(p, cfg, {0.0, 0.1, 0.105}, r3); }) == "E_RANGE");
  }

  TEST_CASE("schedule sampling draws gaps with the declared frequencies") {
    SamplingSchedule sched;
    sched.gaps = {0.1, 0.3, 0.5};
    sched.probs = {0.7, 0.2, 0.1};
    sched.n_obs = 20001;
    RngStream rng(7, 0);
    const Vector times = sample_schedule(sched, rng);
    REQUIRE(times.size() == 20001);
    CHECK(times[0] == 0.0);

    std::size_t c1 = 0, c3 = 0, c5 = 0;
    for (std::size_t i = 1; i < times.size(); ++i) {
      const double gap = times[i] - times[i - 1];
      CHECK(gap > 0.0);
      if (std::abs(gap - 0.1) < 1e-9) ++c1;
      else if (std::abs(gap - 0.3) < 1e-9) ++c3;
      else if (std::abs(gap - 0.5) < 1e-9) ++c5;
    }
    const double n = 20000.0;
    CHECK(c1 + c3 + c5 == 20000);
    CHECK(std::abs(c1 / n - 0.7) < 4.0 * std::sqrt(0.7 * 0.3 / n));
    CHECK(std::abs(c3 / n - 0.2) < 4.0 * std::sqrt(0.2 * 0.8 / n));
    CHECK(std::abs(c5 / n - 0.1) < 4.0 * std::sqrt(0.1 * 0.9 / n));
  }

  TEST_CASE("schedule and config validation") {
    SamplingSchedule sched;
    sched.gaps = {0.1};
    sched.probs = {1.0};
    sched.n_obs = 1;
    CHECK(code_of([&] { sched.validate(); }) == "E_RANGE");
    sched.n_obs = 10;
    CHECK(code_of([&] { sched.validate(); }) == "NONE");
    sched.probs = {0.5};
    CHECK(code_of([&] { sched.validate(); }) == "E_RANGE");
    sched.probs = {1.0};
    sched.gaps = {-0.1};
    CHECK(code_of([&] { sched.validate(); }) == "E_RANGE");
    sched.gaps = {};
    sched.probs = {};
    CHECK(code_of([&] { sched.validate(); }) == "E_DIM");

    SimConfig cfg;
    cfg.x0 = {1.0};
    cfg.fine_dt = 0.0;
    CHECK(code_of([&] { cfg.validate(); }) == "E_RANGE");
    cfg.fine_dt = 0.01;
    cfg.x0 = {1.0, -1.0};
    CHECK(code_of([&] { cfg.validate(); }) == "E_RANGE");
  }

  TEST_CASE("explosive dynamics raise E_EXPLOSION naming the species") {
    ModelParams p;
    p.r = {5.0, 5.0};
    p.a = Matrix{{1.0, 0.0}, {0.0, 1.0}};  // positive feedback
    p.sigma = {0.1, 0.1};
    SimConfig cfg;
    cfg.fine_dt = 0.01;
    cfg.x0 = {1.0, 1.0};
    RngStream rng(3, 0);
    CHECK(code_of([&] { simulate_log_euler(p, cfg, 50.0, rng); }) == "E_EXPLOSION");
    RngStream rng2(3, 0);
    CHECK(message_of([&] { simulate_log_euler(p, cfg, 50.0, rng2); }).find("species") !=
          std::string::npos);
  }

  TEST_CASE("horizon must sit on the fine grid") {
    const ModelParams p = decoupled_params();
    SimConfig cfg;
    cfg.fine_dt = 0.01;
    cfg.x0 = {1.0, 1.0};
    RngStream rng(1, 0);
    CHECK(code_of([&] { simulate_log_euler(p, cfg, 0.51, rng); }) == "NONE");
    CHECK(code_of([&] { simulate_log_euler(p, cfg, 0.515, rng); }) == "E_RANGE");
  }
}
