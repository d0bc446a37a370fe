#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "doctest.h"
#include "sglv/linalg.hpp"
#include "sglv/rng.hpp"
#include "sglv/simplex.hpp"
#include "sglv/stats.hpp"
#include "support/test_support.hpp"

using namespace sglv;
using testsupport::code_of;
using testsupport::message_of;

namespace {

// Independent normal CDF via erfc; exact to double precision for the
// quantile round-trip oracle.
double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Bisection inverse of normal_cdf, the oracle normal_quantile is checked
// against.
double quantile_by_bisection(double p) {
  double lo = -40.0, hi = 40.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (normal_cdf(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

Matrix random_matrix(RngStream& rng, std::size_t n, double lo, double hi) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = lo + (hi - lo) * rng.uniform01();
  return m;
}

}  // namespace

TEST_SUITE("numerics/rng") {
  TEST_CASE("a stream is a pure function of (seed, stream_id)") {
    RngStream a(123, 7), b(123, 7);
    for (int i = 0; i < 200; ++i) CHECK(a.next_u64() == b.next_u64());

    RngStream c(123, 8), d(124, 7), base(123, 7);
    bool all_same_c = true, all_same_d = true;
    for (int i = 0; i < 64; ++i) {
      const std::uint64_t v = base.next_u64();
      all_same_c = all_same_c && (c.next_u64() == v);
      all_same_d = all_same_d && (d.next_u64() == v);
    }
    CHECK_FALSE(all_same_c);
    CHECK_FALSE(all_same_d);
  }

  TEST_CASE("parallel streams do not overlap") {
    std::set<std::uint64_t> seen;
    const std::size_t per_stream = 4096;
    for (std::uint64_t s : {0ull, 1ull, 2ull, 99ull}) {
      RngStream rng(2024, s);
      for (std::size_t i = 0; i < per_stream; ++i) seen.insert(rng.next_u64());
    }
    CHECK(seen.size() == 4 * per_stream);
  }

  TEST_CASE("stream id is capped at 2^24") {
    CHECK(code_of([] { RngStream rng(1, std::uint64_t{1} << 24); }) == "E_RANGE");
    CHECK(code_of([] { RngStream rng(1, (std::uint64_t{1} << 24) - 1); }) == "NONE");
  }

  TEST_CASE("uniform01 lands in (0, 1] with the right first two moments") {
    RngStream rng(5, 0);
    const std::size_t n = 100000;
    double lo = 2.0, hi = -1.0, sum = 0.0, sumsq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double u = rng.uniform01();
      lo = std::min(lo, u);
      hi = std::max(hi, u);
      sum += u;
      sumsq += u * u;
    }
    CHECK(lo > 0.0);
    CHECK(hi <= 1.0);
    const double m = sum / n;
    const double v = sumsq / n - m * m;
    CHECK(std::abs(m - 0.5) < 4.0 / std::sqrt(12.0 * n));
    CHECK(std::abs(v - 1.0 / 12.0) < 0.002);
  }

  TEST_CASE("standard_normal has N(0,1) moments and no serial correlation") {
    RngStream rng(7, 3);
    const std::size_t n = 200000;
    std::vector<double> z(n);
    rng.fill_standard_normals(z.data(), n);

    double sum = 0.0, sumsq = 0.0, sumcube = 0.0, lag1 = 0.0, below0 = 0.0, below1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      sum += z[i];
      sumsq += z[i] * z[i];
      sumcube += z[i] * z[i] * z[i];
      if (i + 1 < n) lag1 += z[i] * z[i + 1];
      if (z[i] < 0.0) below0 += 1.0;
      if (z[i] < 1.0) below1 += 1.0;
    }
    const double root_n = std::sqrt(static_cast<double>(n));
    CHECK(std::abs(sum / n) < 4.0 / root_n);
    CHECK(std::abs(sumsq / n - 1.0) < 4.0 * std::sqrt(2.0) / root_n);
    CHECK(std::abs(sumcube / n) < 4.0 * std::sqrt(15.0) / root_n);
    CHECK(std::abs(lag1 / (n - 1)) < 4.0 / root_n);
    CHECK(std::abs(below0 / n - 0.5) < 4.0 * 0.5 / root_n);
    CHECK(std::abs(below1 / n - normal_cdf(1.0)) < 4.0 * 0.5 / root_n);
  }

  TEST_CASE("standard_normals free function matches the member fill") {
    RngStream a(11, 2), b(11, 2);
    const std::vector<double> via_free = standard_normals(a, 33);
    std::vector<double> via_fill(33);
    b.fill_standard_normals(via_fill.data(), 33);
    CHECK(via_free == via_fill);
  }

  TEST_CASE("uniform_index is unbiased across its range") {
    RngStream rng(9, 0);
    const std::uint64_t bound = 7;
    const std::size_t n = 70000;
    std::vector<std::size_t> hits(bound, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const std::uint64_t v = rng.uniform_index(bound);
      REQUIRE(v < bound);
      ++hits[v];
    }
    const double expect = static_cast<double>(n) / bound;
    const double tol = 4.0 * std::sqrt(expect);
    for (std::size_t v = 0; v < bound; ++v)
      CHECK(std::abs(static_cast<double>(hits[v]) - expect) < tol);

    CHECK(rng.uniform_index(1) == 0);
    CHECK(code_of([&] { rng.uniform_index(0); }) == "E_RANGE");
  }
}

TEST_SUITE("numerics/stats") {
  TEST_CASE("normal_quantile matches a bisection inverse of erfc") {
    for (double p : {1e-9, 1e-6, 1e-3, 0.02425, 0.1, 0.3, 0.5, 0.7, 0.9, 0.975, 0.999,
                     1.0 - 1e-6, 1.0 - 1e-9}) {
      const double q = normal_quantile(p);
      const double oracle = quantile_by_bisection(p);
      CHECK(std::abs(q - oracle) <= 1e-8 * std::max(1.0, std::abs(oracle)));
      CHECK(std::abs(normal_cdf(q) - p) <= 1e-9);
    }
    CHECK(normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-9));
  }

  TEST_CASE("normal_quantile rejects p outside (0, 1)") {
    for (double p : {0.0, 1.0, -0.25, 1.5}) {
      CHECK(code_of([&] { normal_quantile(p); }) == "E_RANGE");
    }
  }

  TEST_CASE("mean and sample variance on a hand example") {
    const std::vector<double> xs{1.0, 2.0, 3.0, 4.0};
    CHECK(mean(xs) == doctest::Approx(2.5));
    CHECK(sample_variance(xs) == doctest::Approx(5.0 / 3.0));
  }
}

TEST_SUITE("numerics/linalg") {
  TEST_CASE("solve_linear on a hand-checkable system") {
    const Matrix m{{2.0, 1.0}, {1.0, 3.0}};
    const Vector x = solve_linear(m, Vector{1.0, -2.0});
    CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(x[1] == doctest::Approx(-1.0).epsilon(1e-14));
  }

  TEST_CASE("solve_linear agrees with a Gauss-Jordan oracle on random systems") {
    RngStream rng(31, 0);
    for (int trial = 0; trial < 20; ++trial) {
      const std::size_t n = 1 + rng.uniform_index(8);
      Matrix m = random_matrix(rng, n, -2.0, 2.0);
      for (std::size_t i = 0; i < n; ++i) m(i, i) += (m(i, i) < 0 ? -2.0 : 2.0);
      Vector b(n);
      for (double& v : b) v = -1.0 + 2.0 * rng.uniform01();

      const Vector x = solve_linear(m, b);
      const Vector oracle = testsupport::gauss_jordan_solve(m, b);
      const Vector back = matvec(m, x);
      for (std::size_t i = 0; i < n; ++i) {
        CHECK(std::abs(x[i] - oracle[i]) < 1e-9 * std::max(1.0, std::abs(oracle[i])));
        CHECK(std::abs(back[i] - b[i]) < 1e-9);
      }
    }
  }

  TEST_CASE("solve_linear handles matrix right-hand sides columnwise") {
    RngStream rng(32, 0);
    Matrix m = random_matrix(rng, 4, -1.0, 1.0);
    for (std::size_t i = 0; i < 4; ++i) m(i, i) += 3.0;
    Matrix rhs(4, 3);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 3; ++j) rhs(i, j) = rng.uniform01();

    const Matrix x = solve_linear(m, rhs);
    REQUIRE(x.rows() == 4);
    REQUIRE(x.cols() == 3);
    for (std::size_t j = 0; j < 3; ++j) {
      Vector col(4);
      for (std::size_t i = 0; i < 4; ++i) col[i] = rhs(i, j);
      const Vector xj = solve_linear(m, col);
      for (std::size_t i = 0; i < 4; ++i) CHECK(x(i, j) == doctest::Approx(xj[i]).epsilon(1e-13));
    }
  }

  TEST_CASE("singular systems raise E_SINGULAR naming the pivot") {
    const Matrix zero(3, 3);
    CHECK(code_of([&] { solve_linear(zero, Vector{1.0, 1.0, 1.0}); }) == "E_SINGULAR");
    const std::string msg = message_of([&] { solve_linear(zero, Vector{1.0, 1.0, 1.0}); });
    CHECK(msg.find("pivot") != std::string::npos);

    const Matrix dup{{1.0, 2.0}, {2.0, 4.0}};
    CHECK(code_of([&] { solve_linear(dup, Vector{1.0, 2.0}); }) == "E_SINGULAR");
  }

  TEST_CASE("sym_max_eig on analytic cases") {
    CHECK(sym_max_eig(Matrix{{2.0, 1.0}, {1.0, 2.0}}) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(sym_max_eig(Matrix{{0.0, 1.0}, {1.0, 0.0}}) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sym_max_eig(Matrix{{-4.0}}) == doctest::Approx(-4.0));
    CHECK(sym_max_eig(Matrix{{3.0, 0.0, 0.0}, {0.0, -1.0, 0.0}, {0.0, 0.0, 2.0}}) ==
          doctest::Approx(3.0));
  }

  TEST_CASE("sym_max_eig recovers a planted spectrum") {
    RngStream rng(33, 0);
    for (int trial = 0; trial < 20; ++trial) {
      const std::size_t n = 2 + rng.uniform_index(9);

      // Random orthonormal basis by Gram-Schmidt of a random matrix.
      Matrix q = random_matrix(rng, n, -1.0, 1.0);
      for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t prev = 0; prev < k; ++prev) {
          double dot = 0.0;
          for (std::size_t i = 0; i < n; ++i) dot += q(i, k) * q(i, prev);
          for (std::size_t i = 0; i < n; ++i) q(i, k) -= dot * q(i, prev);
        }
        double norm = 0.0;
        for (std::size_t i = 0; i < n; ++i) norm += q(i, k) * q(i, k);
        norm = std::sqrt(norm);
        REQUIRE(norm > 1e-8);
        for (std::size_t i = 0; i < n; ++i) q(i, k) /= norm;
      }

      Vector lam(n);
      double top = -1e300;
      for (double& l : lam) {
        l = -3.0 + 6.0 * rng.uniform01();
        top = std::max(top, l);
      }

      // s = Q diag(lam) Q^T has exactly the planted eigenvalues.
      Matrix s(n, n);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          double acc = 0.0;
          for (std::size_t k = 0; k < n; ++k) acc += q(i, k) * lam[k] * q(j, k);
          s(i, j) = acc;
        }
      s = symmetric_part(s);  // scrub rounding asymmetry

      CHECK(sym_max_eig(s) == doctest::Approx(top).epsilon(1e-8));
    }
  }

  TEST_CASE("sym_max_eig rejects asymmetric input") {
    CHECK(code_of([] { sym_max_eig(Matrix{{1.0, 2.0}, {0.0, 1.0}}); }) == "E_RANGE");
    CHECK(code_of([] { sym_max_eig(Matrix(2, 3)); }) == "E_DIM");
  }
}

TEST_SUITE("numerics/simplex") {
  // Oracle: exhaustive simplex grid; only trusted away from the feasibility
  // boundary, hence the deadband.
  static double grid_min_max_slack(const Matrix& rows, double step) {
    const std::size_t n = rows.cols();
    double best = 1e300;
    std::vector<double> c(n, 0.0);
    const auto eval = [&](const std::vector<double>& point) {
      double worst = -1e300;
      for (std::size_t r = 0; r < rows.rows(); ++r) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += rows(r, j) * point[j];
        worst = std::max(worst, s);
      }
      best = std::min(best, worst);
    };
    REQUIRE(n <= 3);
    if (n == 2) {
      for (double a = step; a < 1.0; a += step) eval({a, 1.0 - a});
    } else {
      for (double a = step; a < 1.0; a += step)
        for (double b = step; a + b < 1.0; b += step) eval({a, b, 1.0 - a - b});
    }
    return best;
  }

  TEST_CASE("clearly feasible and clearly infeasible systems") {
    const LpResult good = lp_feasible(Matrix{{-1.0, 0.0}, {0.0, -1.0}});
    CHECK(good.feasible);
    CHECK(good.margin < 0.0);
    CHECK(good.witness.size() == 2);

    const LpResult bad = lp_feasible(Matrix{{1.0, 0.0}, {0.0, 1.0}});
    CHECK_FALSE(bad.feasible);
    CHECK(bad.margin > 0.0);

    const LpResult onerow = lp_feasible(Matrix{{1.0, -1.0}});
    CHECK(onerow.feasible);
  }

  TEST_CASE("the witness satisfies the normalized constraints") {
    RngStream rng(41, 0);
    for (int trial = 0; trial < 30; ++trial) {
      Matrix rows(3, 3);
      for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) rows(i, j) = -1.0 + 2.0 * rng.uniform01();
      const LpResult res = lp_feasible(rows);

      double total = 0.0;
      double worst = -1e300;
      REQUIRE(res.witness.size() == 3);
      for (double c : res.witness) {
        CHECK(c >= 1e-8 - 1e-12);
        total += c;
      }
      CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
      for (std::size_t r = 0; r < 3; ++r) {
        double s = 0.0;
        for (std::size_t j = 0; j < 3; ++j) s += rows(r, j) * res.witness[j];
        worst = std::max(worst, s);
      }
      CHECK(worst == doctest::Approx(res.margin).epsilon(1e-7));
      CHECK(res.feasible == (res.margin < 0.0));
    }
  }

  TEST_CASE("decisions are consistent with a grid-search oracle") {
    // The grid undersamples the simplex, so only one-sided statements are
    // sound: the LP optimum can never be worse than any grid point, and a
    // feasible grid point forces a feasible LP.
    RngStream rng(42, 0);
    int feasible_confirmed = 0;
    int infeasible_seen = 0;
    for (int trial = 0; trial < 40; ++trial) {
      Matrix rows(3, 3);
      for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) rows(i, j) = -1.0 + 2.0 * rng.uniform01();
      const double oracle = grid_min_max_slack(rows, 0.02);
      const LpResult res = lp_feasible(rows);
      CHECK(res.margin <= oracle + 1e-9);
      if (oracle < -1e-9) {
        CHECK(res.feasible);
        ++feasible_confirmed;
      }
      if (!res.feasible) {
        CHECK(oracle >= -1e-9);
        ++infeasible_seen;
      }
    }
    CHECK(feasible_confirmed >= 10);
    CHECK(infeasible_seen >= 5);
  }

  TEST_CASE("the positivity floor epsilon is honored") {
    // Needs c_2 < 1e-9; reachable only when the floor drops below that.
    const Matrix rows{{-1.0, 1e9}};
    CHECK_FALSE(lp_feasible(rows, 1e-8).feasible);
    CHECK(lp_feasible(rows, 1e-10).feasible);
  }
}
