#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace ccr {

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

template <typename Scalar>
struct LpSolution {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  LpStatus status = LpStatus::kIterationLimit;
  Vector x;
  Scalar objective = Scalar(0);
  /// Basic variable per surviving row, ascending row order.
  std::vector<Eigen::Index> basis;
  /// Phase-one residual (sum of artificials) at the end of phase one.
  Scalar infeasibility = Scalar(0);
  int iterations = 0;
};

struct SimplexOptions {
  double pivot_tolerance = 1e-11;
  double cost_tolerance = 1e-11;
  double feasibility_tolerance = 1e-9;
  int max_iterations = 0;  // 0: 50 * (rows + columns) + 1000
};

/// Dense two-phase primal simplex on a full tableau with Bland's rule.
///
///   minimize c'x  subject to  A x = b,  x >= 0
///
/// Rows need not be linearly independent; redundant rows are detected after
/// phase one and dropped. Bland's rule (smallest entering index, smallest
/// leaving basic index among ratio ties) guarantees termination and makes the
/// pivot path, and therefore the reported vertex, deterministic.
template <typename Scalar>
class DenseSimplex {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  DenseSimplex(const Matrix& A, const Vector& b, const Vector& c, SimplexOptions options = {})
      : rows_(A.rows()), cols_(A.cols()), c_(c), options_(options) {
    eigen_assert(b.size() == rows_ && c.size() == cols_);
    // Columns: [structural | artificial | rhs]; last row holds reduced costs.
    tableau_ = Matrix::Zero(rows_ + 1, cols_ + rows_ + 1);
    for (Eigen::Index i = 0; i < rows_; ++i) {
      const Scalar sign = b[i] < Scalar(0) ? Scalar(-1) : Scalar(1);
      tableau_.row(i).head(cols_) = sign * A.row(i);
      tableau_(i, cols_ + i) = Scalar(1);
      tableau_(i, rhs_col()) = sign * b[i];
    }
    basis_.resize(static_cast<std::size_t>(rows_));
    for (Eigen::Index i = 0; i < rows_; ++i) basis_[static_cast<std::size_t>(i)] = cols_ + i;
    active_.assign(static_cast<std::size_t>(rows_), true);
    cost_scale_ = std::max(Scalar(1), c_.size() ? c_.cwiseAbs().maxCoeff() : Scalar(1));
    rhs_scale_ = std::max(Scalar(1), b.size() ? b.cwiseAbs().maxCoeff() : Scalar(1));
  }

  LpSolution<Scalar> solve() {
    LpSolution<Scalar> out;
    const int limit = options_.max_iterations > 0
                          ? options_.max_iterations
                          : static_cast<int>(50 * (rows_ + cols_) + 1000);

    // Phase one: minimize the sum of artificials.
    tableau_.row(rows_).setZero();
    for (Eigen::Index i = 0; i < rows_; ++i) {
      tableau_.row(rows_).head(cols_) -= tableau_.row(i).head(cols_);
      tableau_(rows_, rhs_col()) -= tableau_(i, rhs_col());
    }
    LpStatus st = iterate(cols_, limit, out.iterations, rhs_scale_);
    if (st == LpStatus::kIterationLimit) {
      out.status = st;
      return out;
    }
    out.infeasibility = -tableau_(rows_, rhs_col());
    if (out.infeasibility > Scalar(options_.feasibility_tolerance) * rhs_scale_) {
      out.status = LpStatus::kInfeasible;
      return out;
    }
    drive_out_artificials();

    // Phase two: original costs, artificials barred from entering.
    tableau_.row(rows_).setZero();
    tableau_.row(rows_).head(cols_) = c_.transpose();
    for (Eigen::Index i = 0; i < rows_; ++i) {
      if (!active(i)) continue;
      const Eigen::Index bv = basis_[static_cast<std::size_t>(i)];
      if (bv < cols_ && c_[bv] != Scalar(0)) tableau_.row(rows_) -= c_[bv] * tableau_.row(i);
    }
    st = iterate(cols_, limit, out.iterations, cost_scale_);
    out.status = st;
    if (st != LpStatus::kOptimal) return out;

    out.x = Vector::Zero(cols_);
    for (Eigen::Index i = 0; i < rows_; ++i) {
      if (!active(i)) continue;
      const Eigen::Index bv = basis_[static_cast<std::size_t>(i)];
      out.basis.push_back(bv);
      if (bv < cols_) out.x[bv] = tableau_(i, rhs_col());
    }
    out.objective = c_.dot(out.x);
    return out;
  }

 private:
  Eigen::Index rhs_col() const { return cols_ + rows_; }
  bool active(Eigen::Index i) const { return active_[static_cast<std::size_t>(i)]; }

  // Runs Bland pivots over entering candidates [0, max_enter).
  LpStatus iterate(Eigen::Index max_enter, int limit, int& iterations, Scalar scale) {
    const Scalar cost_tol = Scalar(options_.cost_tolerance) * scale;
    const Scalar piv_tol = Scalar(options_.pivot_tolerance);
    while (true) {
      Eigen::Index enter = -1;
      for (Eigen::Index j = 0; j < max_enter; ++j) {
        if (tableau_(rows_, j) < -cost_tol) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return LpStatus::kOptimal;
      if (iterations >= limit) return LpStatus::kIterationLimit;

      Eigen::Index leave = -1;
      Scalar best = std::numeric_limits<Scalar>::infinity();
      for (Eigen::Index i = 0; i < rows_; ++i) {
        if (!active(i)) continue;
        const Scalar a = tableau_(i, enter);
        if (a <= piv_tol) continue;
        const Scalar ratio = tableau_(i, rhs_col()) / a;
        if (leave < 0 || ratio < best ||
            (ratio == best && basis_[static_cast<std::size_t>(i)] <
                                  basis_[static_cast<std::size_t>(leave)])) {
          best = ratio;
          leave = i;
        }
      }
      if (leave < 0) return LpStatus::kUnbounded;
      pivot(leave, enter);
      ++iterations;
    }
  }

  void pivot(Eigen::Index r, Eigen::Index q) {
    tableau_.row(r) /= tableau_(r, q);
    tableau_(r, q) = Scalar(1);
    for (Eigen::Index i = 0; i <= rows_; ++i) {
      if (i == r || (i < rows_ && !active(i))) continue;
      const Scalar f = tableau_(i, q);
      if (f != Scalar(0)) {
        tableau_.row(i) -= f * tableau_.row(r);
        tableau_(i, q) = Scalar(0);
      }
    }
    basis_[static_cast<std::size_t>(r)] = q;
    // Clean tiny negative right-hand sides produced by cancellation.
    for (Eigen::Index i = 0; i < rows_; ++i) {
      if (active(i) && tableau_(i, rhs_col()) < Scalar(0) &&
          tableau_(i, rhs_col()) > -Scalar(options_.feasibility_tolerance) * rhs_scale_) {
        tableau_(i, rhs_col()) = Scalar(0);
      }
    }
  }

  void drive_out_artificials() {
    const Scalar piv_tol = Scalar(options_.pivot_tolerance) * Scalar(1e3);
    for (Eigen::Index i = 0; i < rows_; ++i) {
      if (basis_[static_cast<std::size_t>(i)] < cols_) continue;
      Eigen::Index q = -1;
      for (Eigen::Index j = 0; j < cols_; ++j) {
        if (std::abs(tableau_(i, j)) > piv_tol) {
          q = j;
          break;
        }
      }
      if (q >= 0) {
        tableau_(i, rhs_col()) = Scalar(0);  // artificial sits at level <= phase-one residual
        pivot(i, q);
      } else {
        active_[static_cast<std::size_t>(i)] = false;  // redundant row
      }
    }
  }

  Eigen::Index rows_;
  Eigen::Index cols_;
  Vector c_;
  SimplexOptions options_;
  Matrix tableau_;
  std::vector<Eigen::Index> basis_;
  std::vector<bool> active_;
  Scalar cost_scale_;
  Scalar rhs_scale_;
};

}  // namespace ccr
