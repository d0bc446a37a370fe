#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sglv/matrix.hpp"
#include "sglv/model.hpp"
#include "sglv/rng.hpp"
#include "sglv/simulate.hpp"

namespace sglv {

// Simulation-study presets.
ModelParams case1_params();  // sigma = 0.1
ModelParams case2_params();  // sigma = 1
Vector case_x0();
SamplingSchedule paper_schedule(std::size_t n_obs);  // gaps {0.1,0.3,0.5} w.p. {0.7,0.2,0.1}

struct McConfig {
  std::string label = "case1";
  ModelParams params;
  Vector x0;
  SamplingSchedule schedule;            // n_obs field is overridden per entry below
  std::vector<std::size_t> n_obs_list;
  std::size_t replicates = 200;
  std::uint64_t seed = 0;
  double fine_dt = 0.01;
  std::size_t jobs = 1;
};

McConfig default_mc_config(int case_id);

// Per-n Monte Carlo mean squared errors against the generating truth.
struct McBlock {
  std::size_t n_obs = 0;
  Matrix a_mse_sglv, a_se_sglv;
  Matrix a_mse_glv, a_se_glv;
  Vector r_mse_sglv, r_se_sglv;
  Vector r_mse_glv, r_se_glv;
  Vector s2_mse_sglv, s2_se_sglv;  // diffusion is SGLV-only
  std::size_t replicates_used = 0;
  std::size_t failures = 0;
};

struct McResult {
  std::string label;
  std::uint64_t seed = 0;
  std::size_t replicates = 0;
  std::vector<McBlock> blocks;
};

// Replicate r of block b consumes RNG stream (seed, b * replicates + r):
// schedule redraw, then the fine-grid path. Failed replicates (explosion or
// fit error) are excluded and counted, never retried.
McResult run_mc_study(const McConfig& config);

struct MspePoint {
  std::size_t k = 0;
  std::size_t n_splits = 0;
  double sglv_mean = 0.0, sglv_se = 0.0;
  double glv_mean = 0.0, glv_se = 0.0;
  std::size_t dropped_splits = 0;
};

struct MspeResult {
  std::vector<MspePoint> points;
};

// Randomly holds out ceil(n/k) one-step transitions per split (their target
// points are predicted from the actually observed previous point); both
// models are fit on the remaining transitions. MSPE per split is the squared
// log-scale error summed across species, averaged over held-out points.
// Split index sets are pre-drawn from rng, so jobs > 1 cannot change output.
MspeResult run_crossval(const ObservationSeries& series, std::size_t k,
                        std::size_t n_splits, RngStream& rng, std::size_t jobs = 1);

std::string mc_result_to_csv_text(const McResult& result);
std::string mc_result_to_json_text(const McResult& result);
std::string mspe_result_to_csv_text(const MspeResult& result);
std::string mspe_result_to_json_text(const MspeResult& result);

}  // namespace sglv
