#pragma once

#include "sglv/matrix.hpp"

namespace sglv {

struct LpResult {
  bool feasible = false;  // true iff the strict system row_k . c < 0 has a witness
  Vector witness;         // argmin c (normalized: sum = 1, c_i >= epsilon)
  double margin = 0.0;    // optimal max-slack t* = max_k row_k . c at the witness
};

// Feasibility of { c : row_k . c < 0 for all k, sum c = 1, c >= epsilon }.
// Solved as min t s.t. row_k . c <= t, sum c = 1, c >= epsilon by a dense
// two-phase simplex (Bland's rule); feasible iff t* < 0.
// Throws Error(kSolver) if the tableau cannot be solved cleanly.
LpResult lp_feasible(const Matrix& constraint_matrix, double epsilon = 1e-8);

}  // namespace sglv
