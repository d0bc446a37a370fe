#include "sglv/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <json.hpp>

#include "sglv/error.hpp"
#include "sglv/linalg.hpp"
#include "sglv/stats.hpp"

namespace sglv {
namespace {

using nlohmann::json;

// Column labels of the drift design, used in collinearity diagnostics.
std::string design_column_name(std::size_t j) {
  return j == 0 ? std::string("intercept") : "x_" + std::to_string(j);
}

// Modified Gram-Schmidt rank scan: returns the columns that add (almost) no
// new direction, i.e. the culprits of a singular normal matrix.
std::vector<std::size_t> dependent_columns(const Matrix& g) {
  const std::size_t rows = g.rows();
  const std::size_t cols = g.cols();
  std::vector<Vector> basis;
  std::vector<std::size_t> dependent;
  for (std::size_t j = 0; j < cols; ++j) {
    Vector v(rows);
    double norm0 = 0.0;
    for (std::size_t i = 0; i < rows; ++i) {
      v[i] = g(i, j);
      norm0 += v[i] * v[i];
    }
    norm0 = std::sqrt(norm0);
    for (const Vector& b : basis) {
      double dot = 0.0;
      for (std::size_t i = 0; i < rows; ++i) dot += v[i] * b[i];
      for (std::size_t i = 0; i < rows; ++i) v[i] -= dot * b[i];
    }
    double norm = 0.0;
    for (std::size_t i = 0; i < rows; ++i) norm += v[i] * v[i];
    norm = std::sqrt(norm);
    if (norm <= 1e-10 * std::max(norm0, 1.0)) {
      dependent.push_back(j);
    } else {
      for (std::size_t i = 0; i < rows; ++i) v[i] /= norm;
      basis.push_back(std::move(v));
    }
  }
  return dependent;
}

[[noreturn]] void throw_collinear(const TransitionData& data) {
  const std::vector<std::size_t> cols = dependent_columns(data.g);
  std::string names;
  for (std::size_t j : cols) {
    if (!names.empty()) names += ", ";
    names += design_column_name(j);
  }
  if (names.empty()) names = "unidentified";
  throw Error(ErrorCode::kCollinear, "collinear drift design (columns: " + names + ")");
}

// Weighted normal matrix sum_i w(i) g(i) g(i)^T and rhs sum_i w(i)^p g(i) du(i).
Matrix weighted_gram(const TransitionData& data, const Vector& w) {
  const std::size_t p = data.g.cols();
  Matrix gram(p, p);
  for (std::size_t i = 0; i < data.n_transitions(); ++i)
    for (std::size_t a = 0; a < p; ++a) {
      const double wa = w[i] * data.g(i, a);
      for (std::size_t b = a; b < p; ++b) gram(a, b) += wa * data.g(i, b);
    }
  for (std::size_t a = 0; a < p; ++a)
    for (std::size_t b = 0; b < a; ++b) gram(a, b) = gram(b, a);
  return gram;
}

Matrix weighted_rhs(const TransitionData& data, const Vector& w) {
  const std::size_t p = data.g.cols();
  const std::size_t n_species = data.du.cols();
  Matrix rhs(p, n_species);
  for (std::size_t i = 0; i < data.n_transitions(); ++i)
    for (std::size_t a = 0; a < p; ++a) {
      const double wa = w[i] * data.g(i, a);
      for (std::size_t k = 0; k < n_species; ++k) rhs(a, k) += wa * data.du(i, k);
    }
  return rhs;
}

void require_enough_rows(const TransitionData& data) {
  const std::size_t p = data.g.cols();
  if (data.n_transitions() < p + 1)
    throw Error(ErrorCode::kDim,
                "series too short: need at least N + 3 observations for the drift regression");
}

// Forms and solves the weighted normal equations in extended precision.
// Forming sum_i w_i g_i g_i^T squares the design's condition number, so a
// double-precision pipeline costs about kappa(G)^2 * 1e-16 in the recovered
// coefficients; 80-bit accumulation keeps exact-recovery fixtures at the
// 1e-12 level. Weights: gram gets w_gram, the right-hand side gets w_rhs.
Matrix solve_weighted_normal(const TransitionData& data, const Vector& w_gram,
                             const Vector& w_rhs) {
  const std::size_t p = data.g.cols();
  const std::size_t m = data.du.cols();
  std::vector<long double> gram(p * p, 0.0L);
  std::vector<long double> rhs(p * m, 0.0L);
  for (std::size_t i = 0; i < data.n_transitions(); ++i)
    for (std::size_t a = 0; a < p; ++a) {
      const long double ga = data.g(i, a);
      const long double wg = static_cast<long double>(w_gram[i]) * ga;
      const long double wr = static_cast<long double>(w_rhs[i]) * ga;
      for (std::size_t b = a; b < p; ++b) gram[a * p + b] += wg * data.g(i, b);
      for (std::size_t k = 0; k < m; ++k) rhs[a * m + k] += wr * data.du(i, k);
    }
  for (std::size_t a = 0; a < p; ++a)
    for (std::size_t b = 0; b < a; ++b) gram[a * p + b] = gram[b * p + a];

  // Partial-pivot elimination with the same relative tolerance as the shared
  // double-precision solver, so collinear designs are flagged identically.
  long double scale = 1.0L;
  for (const long double v : gram) scale = std::max(scale, v < 0 ? -v : v);
  const long double tol = 1e-13L * scale;
  for (std::size_t col = 0; col < p; ++col) {
    std::size_t pivot = col;
    long double best = std::abs(gram[col * p + col]);
    for (std::size_t i = col + 1; i < p; ++i) {
      const long double v = std::abs(gram[i * p + col]);
      if (v > best) {
        best = v;
        pivot = i;
      }
    }
    if (best <= tol)
      throw Error(ErrorCode::kSingular,
                  "matrix singular to tolerance at pivot column " + std::to_string(col));
    if (pivot != col)
      for (std::size_t j = 0; j < p; ++j) std::swap(gram[col * p + j], gram[pivot * p + j]);
    if (pivot != col)
      for (std::size_t j = 0; j < m; ++j) std::swap(rhs[col * m + j], rhs[pivot * m + j]);
    const long double inv = 1.0L / gram[col * p + col];
    for (std::size_t i = col + 1; i < p; ++i) {
      const long double f = gram[i * p + col] * inv;
      if (f == 0.0L) continue;
      gram[i * p + col] = 0.0L;
      for (std::size_t j = col + 1; j < p; ++j) gram[i * p + j] -= f * gram[col * p + j];
      for (std::size_t j = 0; j < m; ++j) rhs[i * m + j] -= f * rhs[col * m + j];
    }
  }
  std::vector<long double> sol(p * m);
  for (std::size_t col = p; col-- > 0;) {
    const long double inv = 1.0L / gram[col * p + col];
    for (std::size_t j = 0; j < m; ++j) {
      long double acc = rhs[col * m + j];
      for (std::size_t k = col + 1; k < p; ++k) acc -= gram[col * p + k] * sol[k * m + j];
      sol[col * m + j] = acc * inv;
    }
  }
  Matrix theta(p, m);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < m; ++j) theta(i, j) = static_cast<double>(sol[i * m + j]);
  return theta;
}

// Solves a symmetric normal-matrix system with Jacobi equilibration plus one
// step of iterative refinement. The drift design mixes an O(1) intercept with
// abundance columns that can sit orders of magnitude lower, so a raw LU solve
// can lose several digits to scaling alone.
Matrix solve_equilibrated(const Matrix& a, const Matrix& rhs) {
  const std::size_t p = a.rows();
  const std::size_t m = rhs.cols();
  Vector d(p, 1.0);
  for (std::size_t j = 0; j < p; ++j)
    if (a(j, j) > 0.0) d[j] = 1.0 / std::sqrt(a(j, j));

  Matrix as(p, p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j) as(i, j) = a(i, j) * d[i] * d[j];
  Matrix rs(p, m);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t k = 0; k < m; ++k) rs(i, k) = rhs(i, k) * d[i];

  Matrix y = solve_linear(as, rs);
  Matrix resid(p, m);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t k = 0; k < m; ++k) {
      double acc = rs(i, k);
      for (std::size_t j = 0; j < p; ++j) acc -= as(i, j) * y(j, k);
      resid(i, k) = acc;
    }
  const Matrix corr = solve_linear(as, resid);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t k = 0; k < m; ++k) y(i, k) = (y(i, k) + corr(i, k)) * d[i];
  return y;
}

}  // namespace

TransitionData transitions_of(const ObservationSeries& series) {
  const std::size_t n = series.n_obs();
  const std::size_t n_species = series.n_species();
  TransitionData data;
  data.dt = Vector(n - 1);
  data.g = Matrix(n - 1, n_species + 1);
  data.du = Matrix(n - 1, n_species);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    data.dt[i] = series.gap(i);
    data.g(i, 0) = 1.0;
    for (std::size_t k = 0; k < n_species; ++k) {
      data.g(i, k + 1) = series.values()(i, k);
      data.du(i, k) = series.log_values()(i + 1, k) - series.log_values()(i, k);
    }
  }
  return data;
}

SglvFit fit_sglv_amle(const TransitionData& data) {
  require_enough_rows(data);
  const std::size_t n_t = data.n_transitions();
  const std::size_t n_species = data.n_species();
  const std::size_t p = n_species + 1;

  // Normal equations of min sum (du - theta.g dt)^2 / dt:
  //   (sum dt g g^T) theta = sum g du.
  const Vector ones(n_t, 1.0);
  Matrix theta;
  try {
    theta = solve_weighted_normal(data, data.dt, ones);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kSingular) throw;
    throw_collinear(data);
  }

  SglvFit fit;
  fit.n_obs = n_t + 1;
  fit.total_time = 0.0;
  for (double dt : data.dt) fit.total_time += dt;

  fit.R_hat = Vector(n_species);
  fit.a_hat = Matrix(n_species, n_species);
  fit.sigma2_hat = Vector(n_species, 0.0);
  for (std::size_t k = 0; k < n_species; ++k) {
    fit.R_hat[k] = theta(0, k);
    for (std::size_t l = 0; l < n_species; ++l) fit.a_hat(k, l) = theta(l + 1, k);
  }
  for (std::size_t i = 0; i < n_t; ++i) {
    for (std::size_t k = 0; k < n_species; ++k) {
      double drift = 0.0;
      for (std::size_t a = 0; a < p; ++a) drift += theta(a, k) * data.g(i, a);
      const double resid = data.du(i, k) - drift * data.dt[i];
      fit.sigma2_hat[k] += resid * resid / data.dt[i];
    }
  }
  fit.loglik = 0.0;
  fit.r_hat = Vector(n_species);
  for (std::size_t k = 0; k < n_species; ++k) {
    fit.sigma2_hat[k] /= static_cast<double>(n_t);
    fit.r_hat[k] = fit.R_hat[k] + 0.5 * fit.sigma2_hat[k];
    // At the maximizer the residual sum telescopes to (n-1) per species.
    fit.loglik -= static_cast<double>(n_t) * (std::log(fit.sigma2_hat[k]) + 1.0);
  }

  Matrix info = weighted_gram(data, data.dt);
  const double inv_t = 1.0 / fit.total_time;
  for (std::size_t a = 0; a < p; ++a)
    for (std::size_t b = 0; b < p; ++b) info(a, b) *= inv_t;
  fit.fisher.assign(n_species, info);
  return fit;
}

SglvFit fit_sglv_amle(const ObservationSeries& series) {
  return fit_sglv_amle(transitions_of(series));
}

std::pair<Matrix, Matrix> closed_form_lm(const ObservationSeries& series) {
  const TransitionData data = transitions_of(series);
  const std::size_t n_t = data.n_transitions();
  const std::size_t n_species = data.n_species();

  double total = 0.0;
  for (double dt : data.dt) total += dt;

  // s1[l] = sum_i x_l dt ; s2[l][s] = sum_i x_l x_s dt ;
  // du_total[k] = u_k(t_n) - u_k(t_1) ; cross[k][p] = sum_i du_k x_p.
  Vector s1(n_species, 0.0);
  Matrix s2(n_species, n_species);
  Vector du_total(n_species, 0.0);
  Matrix cross(n_species, n_species);
  for (std::size_t i = 0; i < n_t; ++i) {
    for (std::size_t l = 0; l < n_species; ++l) {
      const double xl = data.g(i, l + 1);
      s1[l] += xl * data.dt[i];
      for (std::size_t s = l; s < n_species; ++s)
        s2(l, s) += xl * data.g(i, s + 1) * data.dt[i];
    }
    for (std::size_t k = 0; k < n_species; ++k) {
      du_total[k] += data.du(i, k);
      for (std::size_t q = 0; q < n_species; ++q)
        cross(k, q) += data.du(i, k) * data.g(i, q + 1);
    }
  }
  for (std::size_t l = 0; l < n_species; ++l)
    for (std::size_t s = 0; s < l; ++s) s2(l, s) = s2(s, l);

  Matrix l_mat(n_species, n_species);
  Matrix m_mat(n_species, n_species);
  for (std::size_t l = 0; l < n_species; ++l)
    for (std::size_t s = 0; s < n_species; ++s)
      l_mat(l, s) = total * s2(l, s) - s1[l] * s1[s];
  for (std::size_t k = 0; k < n_species; ++k)
    for (std::size_t q = 0; q < n_species; ++q)
      m_mat(k, q) = du_total[k] * s1[q] - total * cross(k, q);
  return {l_mat, m_mat};
}

std::vector<Matrix> fisher_information(const ObservationSeries& series, const SglvFit& fit) {
  if (fit.sigma2_hat.size() != series.n_species())
    throw Error(ErrorCode::kDim, "fit/series species mismatch");
  const TransitionData data = transitions_of(series);
  Matrix info = weighted_gram(data, data.dt);
  double total = 0.0;
  for (double dt : data.dt) total += dt;
  for (std::size_t a = 0; a < info.rows(); ++a)
    for (std::size_t b = 0; b < info.cols(); ++b) info(a, b) /= total;
  return std::vector<Matrix>(series.n_species(), info);
}

ConfidenceIntervals confidence_intervals(const SglvFit& fit, double level) {
  if (!(level > 0.0 && level < 1.0))
    throw Error(ErrorCode::kRange, "confidence level must lie in (0, 1)");
  const std::size_t n_species = fit.r_hat.size();
  const std::size_t p = n_species + 1;
  const double z = normal_quantile(0.5 + level / 2.0);

  ConfidenceIntervals ci;
  ci.level = level;
  ci.lower = Matrix(n_species, p);
  ci.upper = Matrix(n_species, p);
  ci.significant.assign(n_species, std::vector<bool>(p, false));
  ci.available.assign(n_species, true);

  // I_k is shared across species; invert once.
  Vector diag_inv(p, 0.0);
  bool singular = false;
  try {
    const Matrix inv = solve_equilibrated(fit.fisher.front(), identity(p));
    for (std::size_t a = 0; a < p; ++a) diag_inv[a] = inv(a, a);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kSingular) throw;
    singular = true;
  }

  for (std::size_t k = 0; k < n_species; ++k) {
    if (singular) {
      ci.available[k] = false;
      for (std::size_t col = 0; col < p; ++col) {
        const double point = col == 0 ? fit.r_hat[k] : fit.a_hat(k, col - 1);
        ci.lower(k, col) = point;
        ci.upper(k, col) = point;
      }
      continue;
    }
    const double sigma_hat = std::sqrt(fit.sigma2_hat[k]);
    for (std::size_t col = 0; col < p; ++col) {
      const double point = col == 0 ? fit.r_hat[k] : fit.a_hat(k, col - 1);
      const double half_width =
          z * sigma_hat * std::sqrt(diag_inv[col] / fit.total_time);
      ci.lower(k, col) = point - half_width;
      ci.upper(k, col) = point + half_width;
      ci.significant[k][col] = ci.lower(k, col) > 0.0 || ci.upper(k, col) < 0.0;
    }
  }
  return ci;
}

GlvFit fit_glv_ls(const TransitionData& data) {
  require_enough_rows(data);
  const std::size_t n_t = data.n_transitions();
  const std::size_t n_species = data.n_species();
  const std::size_t p = n_species + 1;

  // Ordinary least squares of du on g dt: (sum dt^2 g g^T) theta = sum dt g du.
  Vector dt2(n_t);
  for (std::size_t i = 0; i < n_t; ++i) dt2[i] = data.dt[i] * data.dt[i];

  Matrix theta;
  try {
    theta = solve_weighted_normal(data, dt2, data.dt);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kSingular) throw;
    throw_collinear(data);
  }

  GlvFit fit;
  fit.r_hat = Vector(n_species);
  fit.a_hat = Matrix(n_species, n_species);
  for (std::size_t k = 0; k < n_species; ++k) {
    fit.r_hat[k] = theta(0, k);
    for (std::size_t l = 0; l < n_species; ++l) fit.a_hat(k, l) = theta(l + 1, k);
  }
  fit.residual_ss = 0.0;
  for (std::size_t i = 0; i < n_t; ++i)
    for (std::size_t k = 0; k < n_species; ++k) {
      double drift = 0.0;
      for (std::size_t a = 0; a < p; ++a) drift += theta(a, k) * data.g(i, a);
      const double resid = data.du(i, k) - drift * data.dt[i];
      fit.residual_ss += resid * resid;
    }
  return fit;
}

GlvFit fit_glv_ls(const ObservationSeries& series) {
  return fit_glv_ls(transitions_of(series));
}

namespace {

Vector euler_mean_step(const Vector& growth, const Matrix& a, const Vector& u_prev,
                       double dt) {
  const std::size_t n = growth.size();
  if (u_prev.size() != n) throw Error(ErrorCode::kDim, "u_prev length mismatch");
  if (!(dt > 0.0)) throw Error(ErrorCode::kRange, "prediction gap must be positive");
  Vector x(n);
  for (std::size_t l = 0; l < n; ++l) x[l] = std::exp(u_prev[l]);
  Vector u_hat(n);
  for (std::size_t k = 0; k < n; ++k) {
    double drift = growth[k];
    for (std::size_t l = 0; l < n; ++l) drift += a(k, l) * x[l];
    u_hat[k] = u_prev[k] + drift * dt;
  }
  return u_hat;
}

}  // namespace

Vector predict_one_step(const SglvFit& fit, const Vector& u_prev, double dt) {
  return euler_mean_step(fit.R_hat, fit.a_hat, u_prev, dt);
}

Vector predict_one_step(const GlvFit& fit, const Vector& u_prev, double dt) {
  return euler_mean_step(fit.r_hat, fit.a_hat, u_prev, dt);
}

double approx_loglik(const ModelParams& params, const Vector& sigma2,
                     const ObservationSeries& series) {
  params.validate();
  const std::size_t n_species = series.n_species();
  if (params.n_species() != n_species || sigma2.size() != n_species)
    throw Error(ErrorCode::kDim, "approx_loglik dimension mismatch");
  for (double s2 : sigma2)
    if (!(s2 > 0.0)) throw Error(ErrorCode::kRange, "sigma2 must be positive");

  const TransitionData data = transitions_of(series);
  const std::size_t n_t = data.n_transitions();
  double loglik = 0.0;
  for (std::size_t k = 0; k < n_species; ++k) {
    const double big_r = params.r[k] - 0.5 * sigma2[k];
    double quad = 0.0;
    for (std::size_t i = 0; i < n_t; ++i) {
      double drift = big_r;
      for (std::size_t l = 0; l < n_species; ++l)
        drift += params.a(k, l) * data.g(i, l + 1);
      const double resid = data.du(i, k) - drift * data.dt[i];
      quad += resid * resid / data.dt[i];
    }
    loglik -= static_cast<double>(n_t) * std::log(sigma2[k]) + quad / sigma2[k];
  }
  return loglik;
}

BootstrapResult bootstrap_ci_glv(const ObservationSeries& series, const GlvFit& fit,
                                 std::size_t n_boot, double level, RngStream& rng) {
  if (n_boot < 100)
    throw Error(ErrorCode::kRange, "bootstrap needs at least 100 replicates");
  if (!(level > 0.0 && level < 1.0))
    throw Error(ErrorCode::kRange, "confidence level must lie in (0, 1)");

  const TransitionData data = transitions_of(series);
  const std::size_t n_t = data.n_transitions();
  const std::size_t n_species = data.n_species();
  const std::size_t p = n_species + 1;
  if (fit.r_hat.size() != n_species)
    throw Error(ErrorCode::kDim, "fit/series species mismatch");

  // Fitted increments and residuals of the increment regression.
  Matrix fitted(n_t, n_species);
  Matrix resid(n_t, n_species);
  for (std::size_t i = 0; i < n_t; ++i)
    for (std::size_t k = 0; k < n_species; ++k) {
      double drift = fit.r_hat[k];
      for (std::size_t l = 0; l < n_species; ++l) drift += fit.a_hat(k, l) * data.g(i, l + 1);
      fitted(i, k) = drift * data.dt[i];
      resid(i, k) = data.du(i, k) - fitted(i, k);
    }

  Vector dt2(n_t);
  for (std::size_t i = 0; i < n_t; ++i) dt2[i] = data.dt[i] * data.dt[i];
  const Matrix gram = weighted_gram(data, dt2);

  // samples[k][col] holds the bootstrap draws of that entry.
  std::vector<std::vector<Vector>> samples(
      n_species, std::vector<Vector>(p));
  std::size_t dropped = 0;
  Matrix du_star(n_t, n_species);
  for (std::size_t b = 0; b < n_boot; ++b) {
    for (std::size_t k = 0; k < n_species; ++k)
      for (std::size_t i = 0; i < n_t; ++i)
        du_star(i, k) = fitted(i, k) + resid(rng.uniform_index(n_t), k);
    TransitionData star = data;
    star.du = du_star;
    const Matrix rhs = weighted_rhs(star, star.dt);
    try {
      const Matrix theta = solve_equilibrated(gram, rhs);
      for (std::size_t k = 0; k < n_species; ++k)
        for (std::size_t col = 0; col < p; ++col)
          samples[k][col].push_back(theta(col, k));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kSingular) throw;
      ++dropped;
    }
  }
  if (samples[0][0].empty())
    throw Error(ErrorCode::kSolver, "all bootstrap refits failed");

  auto quantile = [](Vector v, double q) {
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto i0 = static_cast<std::size_t>(pos);
    const std::size_t i1 = std::min(i0 + 1, v.size() - 1);
    const double frac = pos - static_cast<double>(i0);
    return v[i0] * (1.0 - frac) + v[i1] * frac;
  };

  BootstrapResult result;
  result.dropped = dropped;
  ConfidenceIntervals& ci = result.intervals;
  ci.level = level;
  ci.lower = Matrix(n_species, p);
  ci.upper = Matrix(n_species, p);
  ci.significant.assign(n_species, std::vector<bool>(p, false));
  ci.available.assign(n_species, true);
  const double alpha = (1.0 - level) / 2.0;
  for (std::size_t k = 0; k < n_species; ++k)
    for (std::size_t col = 0; col < p; ++col) {
      ci.lower(k, col) = quantile(samples[k][col], alpha);
      ci.upper(k, col) = quantile(samples[k][col], 1.0 - alpha);
      ci.significant[k][col] = ci.lower(k, col) > 0.0 || ci.upper(k, col) < 0.0;
    }
  return result;
}

std::string sglv_fit_to_json_text(const SglvFit& fit) {
  json doc;
  doc["r_hat"] = fit.r_hat;
  doc["R_hat"] = fit.R_hat;
  doc["sigma2_hat"] = fit.sigma2_hat;
  json rows = json::array();
  for (std::size_t k = 0; k < fit.a_hat.rows(); ++k) rows.push_back(fit.a_hat.row(k));
  doc["a_hat"] = rows;
  doc["loglik"] = fit.loglik;
  doc["n_obs"] = fit.n_obs;
  doc["total_time"] = fit.total_time;
  return doc.dump(2);
}

std::string glv_fit_to_json_text(const GlvFit& fit) {
  json doc;
  doc["r_hat"] = fit.r_hat;
  json rows = json::array();
  for (std::size_t k = 0; k < fit.a_hat.rows(); ++k) rows.push_back(fit.a_hat.row(k));
  doc["a_hat"] = rows;
  doc["residual_ss"] = fit.residual_ss;
  return doc.dump(2);
}

std::string intervals_to_json_text(const ConfidenceIntervals& ci) {
  json doc;
  doc["level"] = ci.level;
  json lower = json::array();
  json upper = json::array();
  json sig = json::array();
  for (std::size_t k = 0; k < ci.lower.rows(); ++k) {
    lower.push_back(ci.lower.row(k));
    upper.push_back(ci.upper.row(k));
    json row = json::array();
    for (bool s : ci.significant[k]) row.push_back(s);
    sig.push_back(row);
  }
  doc["lower"] = lower;
  doc["upper"] = upper;
  doc["significant"] = sig;
  json avail = json::array();
  for (bool a : ci.available) avail.push_back(a);
  doc["available"] = avail;
  doc["columns"] = "column 0 is r_k; column l >= 1 is a_kl";
  return doc.dump(2);
}

std::string network_to_json_text(const Matrix& a_hat, const ConfidenceIntervals& ci) {
  if (ci.lower.rows() != a_hat.rows() || ci.lower.cols() != a_hat.cols() + 1)
    throw Error(ErrorCode::kDim, "intervals do not match the interaction matrix");
  json edges = json::array();
  for (std::size_t k = 0; k < a_hat.rows(); ++k) {
    if (!ci.available[k]) continue;
    for (std::size_t l = 0; l < a_hat.cols(); ++l) {
      if (!ci.significant[k][l + 1]) continue;
      const double w = a_hat(k, l);
      edges.push_back({{"from", "x_" + std::to_string(l + 1)},
                       {"to", "x_" + std::to_string(k + 1)},
                       {"weight", w},
                       {"sign", w >= 0.0 ? "+" : "-"}});
    }
  }
  json doc;
  doc["edges"] = edges;
  return doc.dump(2);
}

}  // namespace sglv
