#pragma once

// Subsequence dynamic time warping over column-feature matrices.
//
// Indices exposed in WarpPath and by best_end() are 1-based: row n of the
// query and column m of the reference, matching the usual (n, m) notation
// for accumulated cost matrices. Eigen storage underneath is 0-based.

#include "warpq/error.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace warpq {

/// One admissible move: (n, m) is reached from (n - rows, m - cols).
struct Step {
  int rows = 1;
  int cols = 1;
  double mul = 1.0;
  double add = 0.0;
};

struct StepSet {
  std::vector<Step> steps;

  /// {(1,1), (3,2), (1,3)} with neutral weights.
  static StepSet standard() { return StepSet{{{1, 1}, {3, 2}, {1, 3}}}; }

  void validate() const {
    if (steps.empty()) throw Error(ErrorKind::kInvalidArgument, "step set is empty");
    for (const auto& s : steps) {
      if (s.rows < 0 || s.cols < 0 || (s.rows == 0 && s.cols == 0))
        throw Error(ErrorKind::kInvalidArgument, "step deltas must be non-negative and non-zero");
      if (!(s.mul > 0.0) || !(s.add >= 0.0))
        throw Error(ErrorKind::kInvalidArgument, "step weights: mul > 0, add >= 0 required");
    }
  }
};

template <typename Scalar>
struct CostMatrix {
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> D;

  Eigen::Index rows() const { return D.rows(); }
  Eigen::Index cols() const { return D.cols(); }
};

struct WarpPath {
  std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;  // forward order, 1-based
  Eigen::Index a_star = 0;
  Eigen::Index b_star = 0;
};

template <typename Scalar>
struct SdtwResult {
  Scalar cost;
  WarpPath path;
};

/// Pairwise Euclidean distances between the columns of X (K x N) and
/// Y (K x M). Returns N x M.
template <typename DerivedX, typename DerivedY>
Eigen::Matrix<typename DerivedX::Scalar, Eigen::Dynamic, Eigen::Dynamic> local_cost(
    const Eigen::MatrixBase<DerivedX>& X, const Eigen::MatrixBase<DerivedY>& Y) {
  using Scalar = typename DerivedX::Scalar;
  if (X.rows() != Y.rows())
    throw Error(ErrorKind::kDimensionMismatch,
                "local_cost: feature dimension mismatch (" + std::to_string(X.rows()) + " vs " +
                    std::to_string(Y.rows()) + ")");
  // Direct differences rather than the |x|^2 + |y|^2 - 2xy expansion so that
  // identical columns give exactly zero.
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> C(X.cols(), Y.cols());
  for (Eigen::Index m = 0; m < Y.cols(); ++m)
    for (Eigen::Index n = 0; n < X.cols(); ++n) C(n, m) = (X.col(n) - Y.col(m)).norm();
  return C;
}

namespace detail {

// Best predecessor value for cell (n, m) and the index of the first step
// attaining it. Shared by accumulate() and backtrack() so that both evaluate
// the recurrence with identical floating-point operations.
template <typename Scalar>
std::pair<Scalar, int> best_predecessor(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& D, const StepSet& steps,
    Eigen::Index n, Eigen::Index m) {
  Scalar best = std::numeric_limits<Scalar>::infinity();
  int best_step = -1;
  for (std::size_t s = 0; s < steps.steps.size(); ++s) {
    const Step& step = steps.steps[s];
    const Eigen::Index pn = n - step.rows;
    const Eigen::Index pm = m - step.cols;
    if (pn < 0 || pm < 0) continue;
    const Scalar value = static_cast<Scalar>(step.mul) * D(pn, pm) + static_cast<Scalar>(step.add);
    if (value < best) {
      best = value;
      best_step = static_cast<int>(s);
    }
  }
  return {best, best_step};
}

}  // namespace detail

/// Accumulated cost with a free start anywhere in the first row.
/// Cells without an in-range finite predecessor are +infinity.
template <typename Derived>
CostMatrix<typename Derived::Scalar> accumulate(const Eigen::MatrixBase<Derived>& C,
                                                const StepSet& steps = StepSet::standard()) {
  using Scalar = typename Derived::Scalar;
  steps.validate();
  if (C.rows() < 1 || C.cols() < 1)
    throw Error(ErrorKind::kInvalidArgument, "accumulate: empty cost matrix");
  CostMatrix<Scalar> out;
  out.D.resize(C.rows(), C.cols());
  out.D.row(0) = C.row(0);
  for (Eigen::Index n = 1; n < C.rows(); ++n)
    for (Eigen::Index m = 0; m < C.cols(); ++m)
      out.D(n, m) = detail::best_predecessor(out.D, steps, n, m).first + C(n, m);
  return out;
}

/// 1-based column of the smallest finite entry in the last row (first wins
/// on ties). Throws kNoAlignment if the whole row is unreachable.
template <typename Scalar>
Eigen::Index best_end(const CostMatrix<Scalar>& cost) {
  const auto last = cost.D.row(cost.D.rows() - 1);
  Eigen::Index best = -1;
  for (Eigen::Index m = 0; m < last.size(); ++m)
    if (last(m) < std::numeric_limits<Scalar>::infinity() && (best < 0 || last(m) < last(best)))
      best = m;
  if (best < 0) throw Error(ErrorKind::kNoAlignment, "no valid subsequence alignment");
  return best + 1;
}

/// Walks back from (N, b_star) to the first row, choosing at every cell the
/// first listed step whose predecessor attains the recurrence minimum.
template <typename DerivedC, typename Scalar>
WarpPath backtrack(const Eigen::MatrixBase<DerivedC>& C, const CostMatrix<Scalar>& cost,
                   const StepSet& steps, Eigen::Index b_star) {
  const auto& D = cost.D;
  if (b_star < 1 || b_star > D.cols())
    throw Error(ErrorKind::kInvalidArgument, "backtrack: b_star out of range");
  Eigen::Index n = D.rows() - 1;
  Eigen::Index m = b_star - 1;
  if (!(D(n, m) < std::numeric_limits<Scalar>::infinity()))
    throw Error(ErrorKind::kInvalidArgument, "backtrack: end cell is unreachable");

  WarpPath path;
  path.b_star = b_star;
  path.pairs.emplace_back(n + 1, m + 1);
  while (n > 0) {
    const auto [best, s] = detail::best_predecessor(D, steps, n, m);
    if (s < 0 || best + C(n, m) != D(n, m))
      throw Error(ErrorKind::kInternal, "backtrack: cost matrix inconsistent with recurrence at (" +
                                            std::to_string(n + 1) + ", " + std::to_string(m + 1) +
                                            ")");
    n -= steps.steps[s].rows;
    m -= steps.steps[s].cols;
    path.pairs.emplace_back(n + 1, m + 1);
  }
  std::reverse(path.pairs.begin(), path.pairs.end());
  path.a_star = path.pairs.front().second;
  return path;
}

/// SDTW from a precomputed local cost matrix.
template <typename Derived>
SdtwResult<typename Derived::Scalar> sdtw_from_cost(const Eigen::MatrixBase<Derived>& C,
                                                    const StepSet& steps = StepSet::standard()) {
  const auto cost = accumulate(C, steps);
  const Eigen::Index b = best_end(cost);
  return {cost.D(cost.D.rows() - 1, b - 1), backtrack(C, cost, steps, b)};
}

/// Best-matching subsequence of Y (K x M) for the query X (K x N).
/// Cost is D[N, b*].
template <typename DerivedX, typename DerivedY>
SdtwResult<typename DerivedX::Scalar> sdtw(const Eigen::MatrixBase<DerivedX>& X,
                                           const Eigen::MatrixBase<DerivedY>& Y,
                                           const StepSet& steps = StepSet::standard()) {
  return sdtw_from_cost(local_cost(X, Y), steps);
}

}  // namespace warpq
