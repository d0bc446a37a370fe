#include "sglv/simulate.hpp"

#include <cmath>
#include <string>

#include "sglv/error.hpp"

namespace sglv {

void SamplingSchedule::validate() const {
  if (gaps.empty() || gaps.size() != probs.size())
    throw Error(ErrorCode::kDim, "schedule gaps/probs must be nonempty and matched");
  if (n_obs < 2) throw Error(ErrorCode::kRange, "schedule needs n_obs >= 2");
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0)) throw Error(ErrorCode::kRange, "schedule probabilities must be >= 0");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw Error(ErrorCode::kRange, "schedule probabilities must sum to 1");
  for (double g : gaps)
    if (!(g > 0.0)) throw Error(ErrorCode::kRange, "schedule gaps must be positive");
}

void SimConfig::validate() const {
  if (!(fine_dt > 0.0)) throw Error(ErrorCode::kRange, "fine_dt must be positive");
  if (x0.empty()) throw Error(ErrorCode::kDim, "x0 must be nonempty");
  for (double v : x0)
    if (!(v > 0.0) || !std::isfinite(v))
      throw Error(ErrorCode::kRange, "x0 entries must be positive and finite");
}

Vector sample_schedule(const SamplingSchedule& schedule, RngStream& rng) {
  schedule.validate();
  Vector times(schedule.n_obs);
  times[0] = 0.0;
  for (std::size_t i = 1; i < schedule.n_obs; ++i) {
    const double u = rng.uniform01();
    double cum = 0.0;
    double gap = schedule.gaps.back();
    for (std::size_t j = 0; j < schedule.gaps.size(); ++j) {
      cum += schedule.probs[j];
      if (u <= cum) {
        gap = schedule.gaps[j];
        break;
      }
    }
    times[i] = times[i - 1] + gap;
  }
  return times;
}

namespace {

// One Euler step of the log state; throws on overflow.
void euler_step(const ModelParams& params, const Vector& big_r, double dt, double sqrt_dt,
                Vector& u, Vector& x, RngStream& rng, std::size_t step_index) {
  const std::size_t n = u.size();
  for (std::size_t k = 0; k < n; ++k) x[k] = std::exp(u[k]);
  for (std::size_t k = 0; k < n; ++k) {
    double drift = big_r[k];
    for (std::size_t l = 0; l < n; ++l) drift += params.a(k, l) * x[l];
    u[k] += drift * dt + params.sigma[k] * sqrt_dt * rng.standard_normal();
    if (!std::isfinite(u[k]) || u[k] > 700.0)
      throw Error(ErrorCode::kExplosion,
                  "explosion: species " + std::to_string(k + 1) + " overflowed at fine step " +
                      std::to_string(step_index));
  }
}

}  // namespace

FineTrajectory simulate_log_euler(const ModelParams& params, const SimConfig& config,
                                  double horizon, RngStream& rng) {
  params.validate();
  config.validate();
  if (params.n_species() != config.x0.size())
    throw Error(ErrorCode::kDim, "x0 length must match species count");
  const double steps_real = horizon / config.fine_dt;
  const auto steps = static_cast<std::size_t>(std::llround(steps_real));
  if (!(horizon >= 0.0) || std::abs(steps_real - static_cast<double>(steps)) > 1e-6)
    throw Error(ErrorCode::kRange, "horizon must be a multiple of fine_dt");

  const std::size_t n = params.n_species();
  const Vector big_r = params.log_growth();
  const double sqrt_dt = std::sqrt(config.fine_dt);

  FineTrajectory out;
  out.dt = config.fine_dt;
  out.u = Matrix(steps + 1, n);
  Vector u(n);
  Vector x(n);
  for (std::size_t k = 0; k < n; ++k) {
    u[k] = std::log(config.x0[k]);
    out.u(0, k) = u[k];
  }
  for (std::size_t s = 1; s <= steps; ++s) {
    euler_step(params, big_r, config.fine_dt, sqrt_dt, u, x, rng, s);
    for (std::size_t k = 0; k < n; ++k) out.u(s, k) = u[k];
  }
  return out;
}

ObservationSeries simulate_observed_at(const ModelParams& params, const SimConfig& config,
                                       const Vector& times, RngStream& rng) {
  params.validate();
  config.validate();
  if (params.n_species() != config.x0.size())
    throw Error(ErrorCode::kDim, "x0 length must match species count");
  if (times.size() < 2) throw Error(ErrorCode::kDim, "need at least 2 observation times");

  std::vector<std::size_t> obs_step(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double steps_real = (times[i] - times[0]) / config.fine_dt;
    const auto s = static_cast<std::size_t>(std::llround(steps_real));
    if (std::abs(steps_real - static_cast<double>(s)) > 1e-6)
      throw Error(ErrorCode::kRange,
                  "observation times must sit on the fine grid (offset at index " +
                      std::to_string(i) + ")");
    obs_step[i] = s;
  }

  const std::size_t n = params.n_species();
  const Vector big_r = params.log_growth();
  const double sqrt_dt = std::sqrt(config.fine_dt);

  Matrix values(times.size(), n);
  Vector u(n);
  Vector x(n);
  for (std::size_t k = 0; k < n; ++k) {
    u[k] = std::log(config.x0[k]);
    values(0, k) = config.x0[k];
  }
  std::size_t next_obs = 1;
  for (std::size_t s = 1; s <= obs_step.back() && next_obs < times.size(); ++s) {
    euler_step(params, big_r, config.fine_dt, sqrt_dt, u, x, rng, s);
    if (s == obs_step[next_obs]) {
      for (std::size_t k = 0; k < n; ++k) values(next_obs, k) = std::exp(u[k]);
      ++next_obs;
    }
  }
  return ObservationSeries(times, std::move(values));
}

ObservationSeries simulate_observed(const ModelParams& params, const SimConfig& config,
                                    const SamplingSchedule& schedule, RngStream& rng) {
  const Vector times = sample_schedule(schedule, rng);
  return simulate_observed_at(params, config, times, rng);
}

Vector deterministic_glv_flow(const ModelParams& params, const Vector& x0, double t_end,
                              double dt) {
  params.validate();
  if (x0.size() != params.n_species())
    throw Error(ErrorCode::kDim, "x0 length must match species count");
  if (!(dt > 0.0) || !(t_end >= 0.0))
    throw Error(ErrorCode::kRange, "deterministic_glv_flow needs dt > 0, t_end >= 0");

  const std::size_t n = x0.size();
  auto velocity = [&](const Vector& x, Vector& dx) {
    for (std::size_t k = 0; k < n; ++k) {
      double rate = params.r[k];
      for (std::size_t l = 0; l < n; ++l) rate += params.a(k, l) * x[l];
      dx[k] = x[k] * rate;
    }
  };

  Vector x = x0;
  Vector k1(n), k2(n), k3(n), k4(n), tmp(n);
  double t = 0.0;
  while (t < t_end - 1e-12) {
    const double h = std::min(dt, t_end - t);
    velocity(x, k1);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
    velocity(tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
    velocity(tmp, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + h * k3[i];
    velocity(tmp, k4);
    for (std::size_t i = 0; i < n; ++i)
      x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    t += h;
    for (std::size_t i = 0; i < n; ++i)
      if (!(x[i] > 0.0) || !std::isfinite(x[i]))
        throw Error(ErrorCode::kExplosion,
                    "deterministic flow left the positive orthant (species " +
                        std::to_string(i + 1) + ")");
  }
  return x;
}

}  // namespace sglv
