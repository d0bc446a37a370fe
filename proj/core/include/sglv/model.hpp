#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "sglv/matrix.hpp"

namespace sglv {

// Full parameter set of the stochastic generalized Lotka-Volterra model
//   dx_k = x_k (r_k + sum_l a_kl x_l) dt + sigma_k x_k dB_k.
struct ModelParams {
  Vector r;      // intrinsic growth rates, 1/time
  Matrix a;      // interaction coefficients a_kl, 1/(time * abundance)
  Vector sigma;  // diffusion scales sigma_k, 1/sqrt(time)

  std::size_t n_species() const { return r.size(); }

  // Ito-corrected log-space growth rates R_k = r_k - sigma_k^2 / 2.
  Vector log_growth() const;

  // Throws Error(kDim)/Error(kRange) when shapes disagree or entries are
  // non-finite or sigma is negative.
  void validate() const;
};

// Strictly positive abundances observed at strictly increasing times.
class ObservationSeries {
 public:
  ObservationSeries() = default;
  // Validates monotone times and positive values; derives log_values.
  ObservationSeries(Vector times, Matrix values);

  std::size_t n_obs() const { return times_.size(); }
  std::size_t n_species() const { return values_.cols(); }

  const Vector& times() const { return times_; }
  const Matrix& values() const { return values_; }
  const Matrix& log_values() const { return log_values_; }

  double gap(std::size_t i) const { return times_[i + 1] - times_[i]; }
  double total_time() const { return times_.back() - times_.front(); }

 private:
  Vector times_;
  Matrix values_;      // n_obs x N, x_k(t_i)
  Matrix log_values_;  // n_obs x N, u_k(t_i) = log x_k(t_i)
};

// JSON document {"r": [...], "A": [[...], ...], "sigma": [...]}.
ModelParams params_from_json_text(const std::string& text);
std::string params_to_json_text(const ModelParams& params);
ModelParams load_params_json(const std::string& path);
void save_params_json(const ModelParams& params, const std::string& path);

// Trajectory CSV: header `time,x_1,...,x_N`, 17 significant digits.
ObservationSeries load_series_csv(const std::string& path);
void save_series_csv(const ObservationSeries& series, const std::string& path);

// Shortest decimal round-trip formatting used by every CSV writer.
std::string format_full(double v);

}  // namespace sglv
