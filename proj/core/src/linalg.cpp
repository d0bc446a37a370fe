#include "sglv/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sglv {
namespace {

double max_abs(const Matrix& m) {
  double best = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) best = std::max(best, std::abs(m(i, j)));
  return best;
}

}  // namespace

Matrix solve_linear(const Matrix& m, const Matrix& rhs) {
  const std::size_t n = m.rows();
  if (m.cols() != n) throw Error(ErrorCode::kDim, "solve_linear needs a square matrix");
  if (rhs.rows() != n) throw Error(ErrorCode::kDim, "solve_linear rhs row mismatch");

  Matrix a = m;
  Matrix x = rhs;
  const double scale = std::max(max_abs(a), 1.0);
  const double tol = 1e-13 * scale;

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    double best = std::abs(a(col, col));
    for (std::size_t i = col + 1; i < n; ++i) {
      const double v = std::abs(a(i, col));
      if (v > best) {
        best = v;
        pivot = i;
      }
    }
    if (best <= tol)
      throw Error(ErrorCode::kSingular,
                  "matrix singular to tolerance at pivot column " + std::to_string(col));
    if (pivot != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(col, j), a(pivot, j));
      for (std::size_t j = 0; j < x.cols(); ++j) std::swap(x(col, j), x(pivot, j));
    }
    const double inv = 1.0 / a(col, col);
    for (std::size_t i = col + 1; i < n; ++i) {
      const double f = a(i, col) * inv;
      if (f == 0.0) continue;
      a(i, col) = 0.0;
      for (std::size_t j = col + 1; j < n; ++j) a(i, j) -= f * a(col, j);
      for (std::size_t j = 0; j < x.cols(); ++j) x(i, j) -= f * x(col, j);
    }
  }

  for (std::size_t col = n; col-- > 0;) {
    const double inv = 1.0 / a(col, col);
    for (std::size_t j = 0; j < x.cols(); ++j) {
      double acc = x(col, j);
      for (std::size_t k = col + 1; k < n; ++k) acc -= a(col, k) * x(k, j);
      x(col, j) = acc * inv;
    }
  }
  return x;
}

Vector solve_linear(const Matrix& m, const Vector& rhs) {
  Matrix b(rhs.size(), 1);
  for (std::size_t i = 0; i < rhs.size(); ++i) b(i, 0) = rhs[i];
  const Matrix x = solve_linear(m, b);
  Vector out(rhs.size());
  for (std::size_t i = 0; i < rhs.size(); ++i) out[i] = x(i, 0);
  return out;
}

double sym_max_eig(const Matrix& m) {
  const std::size_t n = m.rows();
  if (m.cols() != n) throw Error(ErrorCode::kDim, "sym_max_eig needs a square matrix");
  const double scale = std::max(max_abs(m), 1.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(m(i, j) - m(j, i)) > 1e-12 * scale)
        throw Error(ErrorCode::kRange, "sym_max_eig input is not symmetric");

  Matrix a = m;
  auto off_norm = [&]() {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) acc += 2.0 * a(i, j) * a(i, j);
    return std::sqrt(acc);
  };

  const int max_sweeps = 100;
  for (int sweep = 0; sweep < max_sweeps && off_norm() >= 1e-12 * scale; ++sweep) {
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }

  double best = a(0, 0);
  for (std::size_t i = 1; i < n; ++i) best = std::max(best, a(i, i));
  return best;
}

}  // namespace sglv
