#include "sglv/assumptions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "sglv/error.hpp"
#include "sglv/linalg.hpp"
#include "sglv/simplex.hpp"

namespace sglv {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

A1Report check_a1(const ModelParams& params, const Vector& x0, double tolerance) {
  params.validate();
  if (x0.size() != params.n_species())
    throw Error(ErrorCode::kDim, "x0 length must match species count");

  A1Report report;
  report.x0_positive = std::all_of(x0.begin(), x0.end(), [](double v) { return v > 0.0; });
  report.sigma_positive =
      std::all_of(params.sigma.begin(), params.sigma.end(), [](double v) { return v > 0.0; });
  const Vector lg = params.log_growth();
  report.log_growth_positive =
      std::all_of(lg.begin(), lg.end(), [](double v) { return v > 0.0; });
  report.sym_max_eig = sym_max_eig(symmetric_part(params.a));
  report.pass = report.x0_positive && report.sigma_positive &&
                report.log_growth_positive && report.sym_max_eig <= tolerance;
  return report;
}

A2Report check_a2(const Matrix& a) {
  const std::size_t n = a.rows();
  if (a.cols() != n) throw Error(ErrorCode::kDim, "check_a2 needs a square matrix");

  // Row condition multiplied by (phi + 1) > 0:
  //   phi (a_kk + P_k) < -(a_kk + Q_k).
  double lo = 4.0;   // feasible phi in [lo, hi)
  double hi = kInf;
  bool impossible = false;
  for (std::size_t k = 0; k < n; ++k) {
    double p = 0.0;
    double q = 0.0;
    for (std::size_t l = 0; l < n; ++l) {
      p += std::max(a(k, l), 0.0);
      q += std::max(a(l, k), 0.0);
    }
    const double alpha = a(k, k) + p;
    const double beta = -(a(k, k) + q);
    if (alpha > 0.0) {
      hi = std::min(hi, beta / alpha);
    } else if (alpha < 0.0) {
      const double bound = beta / alpha;  // phi > bound (open)
      if (bound >= lo) lo = std::nextafter(bound, kInf);
    } else if (beta <= 0.0) {
      impossible = true;
    }
  }

  A2Report report;
  if (!impossible && lo < hi) {
    report.pass = true;
    report.phi_interval = std::make_pair(lo, hi);
  }
  return report;
}

A3Report check_a3(const ModelParams& params) {
  params.validate();
  A3Report report;
  Vector rhs = params.log_growth();
  for (double& v : rhs) v = -v;
  try {
    const Vector x_tilde = solve_linear(params.a, rhs);
    report.x_tilde = x_tilde;
    report.pass = std::all_of(x_tilde.begin(), x_tilde.end(), [](double v) { return v > 0.0; });
    report.status = "ok";
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kSingular) throw;
    report.pass = false;
    report.status = "equilibrium undefined";
  }
  return report;
}

Matrix a4_constraint_rows(const ModelParams& params, const Vector& x_tilde) {
  params.validate();
  const std::size_t n = params.n_species();
  if (x_tilde.size() != n)
    throw Error(ErrorCode::kDim, "x_tilde length must match species count");

  Matrix rows(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    double own = 2.0 * params.a(k, k);
    for (std::size_t l = 0; l < n; ++l)
      if (l != k) own += std::abs(params.a(k, l));
    const double xk2 = x_tilde[k] * x_tilde[k];
    for (std::size_t j = 0; j < n; ++j) {
      const double sigma_term = params.sigma[j] * params.sigma[j] * x_tilde[j];
      const double interaction = (j == k) ? own : std::abs(params.a(j, k));
      rows(k, j) = sigma_term + xk2 * interaction;
    }
  }
  return rows;
}

A4Report check_a4(const ModelParams& params, const Vector& x_tilde) {
  const Matrix rows = a4_constraint_rows(params, x_tilde);
  const LpResult lp = lp_feasible(rows);

  A4Report report;
  report.status = "ok";
  report.margin = lp.margin;
  if (!lp.feasible) return report;

  // Never hand out a witness the constraints do not certify.
  double worst = -kInf;
  for (std::size_t k = 0; k < rows.rows(); ++k) {
    double slack = 0.0;
    for (std::size_t j = 0; j < rows.cols(); ++j) slack += rows(k, j) * lp.witness[j];
    worst = std::max(worst, slack);
  }
  if (!(worst < 0.0) || worst > lp.margin + 1e-9)
    throw Error(ErrorCode::kSolver, "A4 witness failed direct substitution");

  report.pass = true;
  report.c_witness = lp.witness;
  report.margin = worst;
  return report;
}

AssumptionReport check_all(const ModelParams& params, const Vector& x0) {
  AssumptionReport report;
  report.a1 = check_a1(params, x0);
  report.a2 = check_a2(params.a);
  report.a3 = check_a3(params);
  if (report.a3.pass) {
    report.a4 = check_a4(params, *report.a3.x_tilde);
  } else {
    report.a4.status = "not evaluated";
  }
  return report;
}

std::string report_to_json_text(const AssumptionReport& report) {
  nlohmann::json doc;
  doc["a1"] = {{"pass", report.a1.pass},
               {"sym_max_eig", report.a1.sym_max_eig},
               {"x0_positive", report.a1.x0_positive},
               {"sigma_positive", report.a1.sigma_positive},
               {"log_growth_positive", report.a1.log_growth_positive}};
  doc["a2"] = {{"pass", report.a2.pass}};
  if (report.a2.phi_interval) {
    const auto& [lo, hi] = *report.a2.phi_interval;
    doc["a2"]["phi_interval"] = {lo, std::isinf(hi) ? nlohmann::json() : nlohmann::json(hi)};
  } else {
    doc["a2"]["phi_interval"] = nullptr;
  }
  doc["a3"] = {{"pass", report.a3.pass}, {"status", report.a3.status}};
  if (report.a3.x_tilde) doc["a3"]["x_tilde"] = *report.a3.x_tilde;
  doc["a4"] = {{"pass", report.a4.pass}, {"status", report.a4.status}};
  if (report.a4.c_witness) doc["a4"]["c_witness"] = *report.a4.c_witness;
  if (report.a4.margin) doc["a4"]["margin"] = *report.a4.margin;
  doc["all_pass"] = report.all_pass();
  return doc.dump(2) + "\n";
}

}  // namespace sglv
