#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "sglv/matrix.hpp"
#include "sglv/model.hpp"
#include "sglv/rng.hpp"

namespace sglv {

// The per-species drift regressions operate on transitions
//   du_k(i) = [theta_k . g(i)] dt(i) + noise,   g(i) = (1, x_1(t_i), ..., x_N(t_i)).
// Exposed so resampling schemes (cross-validation) can fit on a subset.
struct TransitionData {
  Vector dt;  // gap of each transition
  Matrix g;   // n_t x (N+1) regressors at the left endpoint
  Matrix du;  // n_t x N log increments

  std::size_t n_transitions() const { return dt.size(); }
  std::size_t n_species() const { return du.cols(); }
};

TransitionData transitions_of(const ObservationSeries& series);

struct SglvFit {
  Vector r_hat;        // r_hat_k = R_hat_k + sigma2_hat_k / 2, by construction
  Matrix a_hat;        // N x N
  Vector sigma2_hat;   // >= 0
  Vector R_hat;
  double loglik = 0.0;
  std::vector<Matrix> fisher;  // per-species (N+1) x (N+1); identical by construction
  std::size_t n_obs = 0;
  double total_time = 0.0;
};

struct GlvFit {
  Vector r_hat;
  Matrix a_hat;
  double residual_ss = 0.0;
};

struct ConfidenceIntervals {
  double level = 0.95;
  Matrix lower;  // N x (N+1): column 0 = r_k, column l = a_kl
  Matrix upper;
  std::vector<std::vector<bool>> significant;  // interval excludes 0
  std::vector<bool> available;                 // false when information is singular
};

// Approximate maximum likelihood: per species, the weighted least-squares
// drift solution minimizing sum_i (du - theta.g dt)^2 / dt, with
// sigma2_hat_k = (n-1)^{-1} sum_i residual^2 / dt.
// Throws Error(kCollinear) naming degenerate design columns.
SglvFit fit_sglv_amle(const ObservationSeries& series);
SglvFit fit_sglv_amle(const TransitionData& data);

// The closed-form normal-equation matrices; row k of the drift solution
// satisfies L . a_k^T = -M_k^T.
std::pair<Matrix, Matrix> closed_form_lm(const ObservationSeries& series);

// I_k = T^{-1} sum_i dt(i) g(i) g(i)^T, identical across species.
std::vector<Matrix> fisher_information(const ObservationSeries& series, const SglvFit& fit);

// Wald intervals a_kl +- z * sigma_hat_k * sqrt(diag(I_k^{-1})_l / T).
ConfidenceIntervals confidence_intervals(const SglvFit& fit, double level = 0.95);

// Deterministic-GLV baseline: ordinary least squares on the log Euler
// increments, minimizing sum_i (du - (r + A x) dt)^2 per species.
GlvFit fit_glv_ls(const ObservationSeries& series);
GlvFit fit_glv_ls(const TransitionData& data);

// Euler conditional mean in log space over one gap.
Vector predict_one_step(const SglvFit& fit, const Vector& u_prev, double dt);
Vector predict_one_step(const GlvFit& fit, const Vector& u_prev, double dt);

// Approximate log-likelihood at arbitrary (theta, sigma2); the drift uses
// R_k = params.r_k - sigma2_k / 2 (params.sigma is ignored here: sigma2 is
// the likelihood's diffusion block).
double approx_loglik(const ModelParams& params, const Vector& sigma2,
                     const ObservationSeries& series);

struct BootstrapResult {
  ConfidenceIntervals intervals;
  std::size_t dropped = 0;  // bootstrap replicates whose refit failed
};

// Residual bootstrap of the GLV regression with percentile intervals.
BootstrapResult bootstrap_ci_glv(const ObservationSeries& series, const GlvFit& fit,
                                 std::size_t n_boot, double level, RngStream& rng);

std::string sglv_fit_to_json_text(const SglvFit& fit);
std::string glv_fit_to_json_text(const GlvFit& fit);
std::string intervals_to_json_text(const ConfidenceIntervals& ci);
// Adjacency list {from, to, weight, sign} of interaction entries whose CI
// excludes zero.
std::string network_to_json_text(const Matrix& a_hat, const ConfidenceIntervals& ci);

}  // namespace sglv
