#pragma once

// Exact phase-1 simplex for the feasibility system A x = b, x >= 0 over the
// rationals, with Bland's rule so it always terminates. Returns either a
// solution or a Farkas vector y with y^T A <= 0 and y^T b > 0.

#include <cstddef>
#include <optional>
#include <vector>

#include "eprb/error.hpp"
#include "eprb/rational.hpp"

namespace eprb::lp {

using Matrix = std::vector<std::vector<Rational>>;

struct Outcome {
  bool feasible = false;
  std::vector<Rational> solution;  // size = columns of A when feasible
  std::vector<Rational> farkas;    // size = rows of A when infeasible
};

inline bool verify_solution(const Matrix& A, const std::vector<Rational>& b, const std::vector<Rational>& x) {
  for (const auto& v : x) {
    if (v < 0) return false;
  }
  for (std::size_t i = 0; i < A.size(); ++i) {
    Rational lhs = 0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (A[i][j] != 0) lhs += A[i][j] * x[j];
    }
    if (lhs != b[i]) return false;
  }
  return true;
}

inline bool verify_farkas(const Matrix& A, const std::vector<Rational>& b, const std::vector<Rational>& y) {
  if (A.empty() || y.size() != A.size()) return false;
  Rational yb = 0;
  for (std::size_t i = 0; i < b.size(); ++i) yb += y[i] * b[i];
  if (yb <= 0) return false;
  for (std::size_t j = 0; j < A.front().size(); ++j) {
    Rational s = 0;
    for (std::size_t i = 0; i < A.size(); ++i) {
      if (A[i][j] != 0) s += y[i] * A[i][j];
    }
    if (s > 0) return false;
  }
  return true;
}

inline Outcome solve_feasibility(const Matrix& A, const std::vector<Rational>& b) {
  const std::size_t m = A.size();
  if (m == 0 || b.size() != m) fail(ErrorKind::InvalidValue, "LP needs matching nonempty A and b");
  const std::size_t n = A.front().size();
  for (const auto& row : A) {
    if (row.size() != n) fail(ErrorKind::InvalidValue, "LP rows must have equal length");
  }

  // Tableau [A | I | b] with rows sign-normalised so that b >= 0; the
  // artificial block starts as the basis and ends up holding B^-1.
  const std::size_t width = n + m + 1;
  Matrix T(m, std::vector<Rational>(width, Rational(0)));
  std::vector<int> sign(m, 1);
  for (std::size_t i = 0; i < m; ++i) {
    sign[i] = b[i] < 0 ? -1 : 1;
    for (std::size_t j = 0; j < n; ++j) T[i][j] = sign[i] * A[i][j];
    T[i][n + i] = 1;
    T[i][n + m] = sign[i] * b[i];
  }
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) basis[i] = n + i;

  // Reduced costs of "minimise the sum of artificials".
  std::vector<Rational> cost(width, Rational(0));
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < m; ++i) cost[j] -= T[i][j];
  }
  for (std::size_t i = 0; i < m; ++i) cost[n + m] -= T[i][n + m];

  while (true) {
    std::size_t enter = width;
    for (std::size_t j = 0; j < n + m; ++j) {
      if (cost[j] < 0) {
        enter = j;
        break;
      }
    }
    if (enter == width) break;

    std::size_t leave = m;
    Rational best;
    for (std::size_t i = 0; i < m; ++i) {
      if (T[i][enter] <= 0) continue;
      Rational ratio = T[i][n + m] / T[i][enter];
      if (leave == m || ratio < best || (ratio == best && basis[i] < basis[leave])) {
        leave = i;
        best = ratio;
      }
    }
    if (leave == m) fail(ErrorKind::Internal, "phase-1 LP reported unbounded");

    const Rational pivot = T[leave][enter];
    for (auto& v : T[leave]) v /= pivot;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == leave || T[i][enter] == 0) continue;
      const Rational f = T[i][enter];
      for (std::size_t j = 0; j < width; ++j) {
        if (T[leave][j] != 0) T[i][j] -= f * T[leave][j];
      }
    }
    if (cost[enter] != 0) {
      const Rational f = cost[enter];
      for (std::size_t j = 0; j < width; ++j) {
        if (T[leave][j] != 0) cost[j] -= f * T[leave][j];
      }
    }
    basis[leave] = enter;
  }

  Outcome out;
  // cost[n+m] holds minus the phase-1 objective.
  if (cost[n + m] == 0) {
    out.feasible = true;
    out.solution.assign(n, Rational(0));
    for (std::size_t i = 0; i < m; ++i) {
      if (basis[i] < n) out.solution[basis[i]] = T[i][n + m];
    }
    return out;
  }
  // y^T = c_B^T B^-1 for the normalised rows; undo the sign flips.
  out.farkas.assign(m, Rational(0));
  for (std::size_t i = 0; i < m; ++i) {
    if (basis[i] < n) continue;  // only artificials carry cost 1
    for (std::size_t k = 0; k < m; ++k) out.farkas[k] += T[i][n + k];
  }
  for (std::size_t k = 0; k < m; ++k) out.farkas[k] *= sign[k];
  return out;
}

}  // namespace eprb::lp
