#pragma once

#include "sglv/matrix.hpp"

namespace sglv {

// Solves m X = rhs by LU with partial pivoting. Throws Error(kSingular)
// naming the failing pivot column when the matrix is singular to tolerance.
Matrix solve_linear(const Matrix& m, const Matrix& rhs);
Vector solve_linear(const Matrix& m, const Vector& rhs);

// Largest eigenvalue of a symmetric matrix by cyclic Jacobi rotations;
// sweeps until the off-diagonal Frobenius norm drops below 1e-12 * scale.
// Throws Error(kRange) if the input is not symmetric within 1e-12 * scale.
double sym_max_eig(const Matrix& m);

}  // namespace sglv
