#pragma once

#include <cstdint>

#include "sglv/matrix.hpp"
#include "sglv/model.hpp"
#include "sglv/rng.hpp"

namespace sglv {

// Distribution of observation gaps: i.i.d. draws from `gaps` with
// probabilities `probs`, n_obs observations starting at t = 0.
struct SamplingSchedule {
  Vector gaps;
  Vector probs;
  std::size_t n_obs = 0;

  void validate() const;  // probs >= 0 summing to 1 within 1e-12, gaps > 0
};

struct SimConfig {
  double fine_dt = 0.01;
  Vector x0;
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;

  void validate() const;
};

// Fine Euler grid of the log state: u.rows() = steps + 1, u(0, :) = log x0.
struct FineTrajectory {
  double dt = 0.0;
  Matrix u;
};

Vector sample_schedule(const SamplingSchedule& schedule, RngStream& rng);

// Log-space Euler scheme du = (R + A e^u) dt + sigma dB on the fine grid.
// Throws Error(kExplosion) if the state overflows.
FineTrajectory simulate_log_euler(const ModelParams& params, const SimConfig& config,
                                  double horizon, RngStream& rng);

// Draws a schedule, simulates the fine grid to its last time, and reads the
// state off at the scheduled times (exact fine-grid indices, never
// interpolated).
ObservationSeries simulate_observed(const ModelParams& params, const SimConfig& config,
                                    const SamplingSchedule& schedule, RngStream& rng);

// Same, at caller-fixed observation times (each must sit on the fine grid).
ObservationSeries simulate_observed_at(const ModelParams& params, const SimConfig& config,
                                       const Vector& times, RngStream& rng);

// Classical deterministic GLV flow dx/dt = x * (r + A x), integrated by RK4.
// Throws Error(kExplosion) if the state leaves the positive orthant.
Vector deterministic_glv_flow(const ModelParams& params, const Vector& x0, double t_end,
                              double dt);

}  // namespace sglv
