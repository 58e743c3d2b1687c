#pragma once

#include "wifimec/types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace wifimec {

struct Assignment {
  std::vector<int> column_of_row;  // row i is assigned column column_of_row[i]
  double cost = 0;                 // sum over the original entries; +inf if any used entry is infeasible
  bool uses_infeasible = false;
};

/// Surrogate used in place of non-finite entries: 1e6 times the largest
/// finite entry (1e6 when there is none).
template <typename Derived>
typename Derived::Scalar infeasible_surrogate(const Eigen::MatrixBase<Derived>& cost) {
  using Scalar = typename Derived::Scalar;
  Scalar largest = 0;
  for (Eigen::Index i = 0; i < cost.rows(); ++i)
    for (Eigen::Index j = 0; j < cost.cols(); ++j)
      if (std::isfinite(cost(i, j))) largest = std::max(largest, cost(i, j));
  return largest > 0 ? Scalar(1e6) * largest : Scalar(1e6);
}

/// Minimum-cost perfect assignment on a square matrix of nonnegative costs,
/// O(n^3) shortest augmenting paths with dual potentials. Non-finite entries
/// are infeasible and replaced by infeasible_surrogate().
template <typename Derived>
Assignment hungarian(const Eigen::MatrixBase<Derived>& cost_in) {
  using Scalar = typename Derived::Scalar;
  if (cost_in.rows() != cost_in.cols()) throw std::invalid_argument("hungarian: cost matrix must be square");
  const int n = static_cast<int>(cost_in.rows());
  Assignment out;
  if (n == 0) return out;

  MatrixX<Scalar> cost = cost_in;
  const Scalar surrogate = infeasible_surrogate(cost);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (!std::isfinite(cost(i, j))) cost(i, j) = surrogate;

  const Scalar inf = std::numeric_limits<Scalar>::infinity();
  // 1-based; row_of_col[0] is the virtual row being inserted.
  std::vector<Scalar> u(n + 1, 0), v(n + 1, 0);
  std::vector<int> row_of_col(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    row_of_col[0] = i;
    int j0 = 0;
    std::vector<Scalar> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = row_of_col[j0];
      Scalar delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const Scalar cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[row_of_col[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (row_of_col[j0] != 0);
    do {
      const int j1 = way[j0];
      row_of_col[j0] = row_of_col[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  out.column_of_row.assign(n, -1);
  for (int j = 1; j <= n; ++j) out.column_of_row[row_of_col[j] - 1] = j - 1;
  for (int i = 0; i < n; ++i) {
    const Scalar c = cost_in(i, out.column_of_row[i]);
    if (!std::isfinite(c)) out.uses_infeasible = true;
    out.cost += static_cast<double>(c);
  }
  if (out.uses_infeasible) out.cost = std::numeric_limits<double>::infinity();
  return out;
}

}  // namespace wifimec
