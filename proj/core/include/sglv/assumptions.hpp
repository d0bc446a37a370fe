#pragma once

#include <optional>
#include <string>
#include <utility>

#include "sglv/matrix.hpp"
#include "sglv/model.hpp"

namespace sglv {

// A1: positive start, positive noise, positive log-growth, and A non-positive
// definite (largest eigenvalue of the symmetric part <= tolerance).
struct A1Report {
  bool pass = false;
  double sym_max_eig = 0.0;
  bool x0_positive = false;
  bool sigma_positive = false;
  bool log_growth_positive = false;
};

// A2: existence of phi >= 4 with a_kk + phi P_k/(phi+1) + Q_k/(phi+1) < 0
// for every k, where P_k/Q_k sum the positive parts of row/column k.
// The feasible phi set is the half-open interval [lo, hi); hi may be +inf.
struct A2Report {
  bool pass = false;
  std::optional<std::pair<double, double>> phi_interval;
};

// A3: the equilibrium x~ = -A^{-1}(r - sigma^2/2) is componentwise positive.
struct A3Report {
  bool pass = false;
  std::optional<Vector> x_tilde;
  std::string status;  // "ok" or "equilibrium undefined" for singular A
};

// A4: existence of positive c with, for every k,
//   sum_i c_i sigma_i^2 x~_i + [2 c_k a_kk + sum_{l != k}(c_k|a_kl| + c_l|a_lk|)] x~_k^2 < 0.
struct A4Report {
  bool pass = false;
  std::optional<Vector> c_witness;
  std::optional<double> margin;  // most-violated slack at the witness (< 0 iff pass)
  std::string status;            // "ok" or "not evaluated"
};

struct AssumptionReport {
  A1Report a1;
  A2Report a2;
  A3Report a3;
  A4Report a4;
  bool all_pass() const { return a1.pass && a2.pass && a3.pass && a4.pass; }
};

A1Report check_a1(const ModelParams& params, const Vector& x0, double tolerance = 1e-10);
A2Report check_a2(const Matrix& a);
A3Report check_a3(const ModelParams& params);
A4Report check_a4(const ModelParams& params, const Vector& x_tilde);

// Runs A1..A4 in order; A4 is reported "not evaluated" when A3 fails.
AssumptionReport check_all(const ModelParams& params, const Vector& x0);

// Constraint rows of the A4 feasibility system (row_k . c < 0), exposed for
// direct-substitution verification.
Matrix a4_constraint_rows(const ModelParams& params, const Vector& x_tilde);

std::string report_to_json_text(const AssumptionReport& report);

}  // namespace sglv
