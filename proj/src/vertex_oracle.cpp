// Brute-force vertex enumeration used to cross-check the simplex solver.
// Shares no code with the LP path: the constraint system is rebuilt here
// with every marginal row, and rank is decided by Eigen's LU.

#include <Eigen/LU>
#include <algorithm>
#include <cmath>

#include "ccr/errors.hpp"
#include "ccr/prior_engine.hpp"

namespace ccr {

namespace {

double binomial(std::size_t n, std::size_t k) {
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

bool lex_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return a[i] < b[i];
  }
  return false;
}

std::vector<Coupling> dedupe_sorted(std::vector<Eigen::VectorXd> points, const JointIndex& index) {
  std::vector<Eigen::VectorXd> kept;
  for (auto& p : points) {
    const bool dup = std::any_of(kept.begin(), kept.end(), [&](const Eigen::VectorXd& q) {
      return (p - q).cwiseAbs().maxCoeff() <= kVertexMergeTolerance;
    });
    if (!dup) kept.push_back(std::move(p));
  }
  std::sort(kept.begin(), kept.end(), lex_less);
  std::vector<Coupling> out;
  out.reserve(kept.size());
  for (auto& p : kept) out.emplace_back(index, std::move(p));
  return out;
}

}  // namespace

std::vector<Coupling> enumerate_vertices_oracle(const PriorSet& prior_set, std::size_t basis_cap) {
  const JointIndex& index = prior_set.index();

  if (const auto* s = std::get_if<PriorSet::Singleton>(&prior_set.encoding())) {
    return {s->coupling};
  }
  if (const auto* h = std::get_if<PriorSet::Hull>(&prior_set.encoding())) {
    // Keep listed couplings that are not convex combinations of the others.
    std::vector<Eigen::VectorXd> pts;
    for (const auto& c : h->couplings) pts.push_back(c.mass());
    auto unique = dedupe_sorted(pts, index);
    if (unique.size() == 1) return unique;
    std::vector<Coupling> extreme;
    for (std::size_t i = 0; i < unique.size(); ++i) {
      std::vector<Coupling> others;
      for (std::size_t j = 0; j < unique.size(); ++j) {
        if (j != i) others.push_back(unique[j]);
      }
      if (!is_member(unique[i], PriorSet::hull(prior_set.mu(), others), kVertexMergeTolerance)) {
        extreme.push_back(unique[i]);
      }
    }
    return extreme;
  }

  std::vector<LinearConstraint> user;
  if (const auto* poly = std::get_if<PriorSet::Polytope>(&prior_set.encoding())) {
    user = poly->constraints;
  }

  const auto n = static_cast<Eigen::Index>(index.size());
  const auto k = static_cast<Eigen::Index>(index.states_per_class());
  const auto m = static_cast<Eigen::Index>(index.num_classes());
  Eigen::Index slacks = 0;
  for (const auto& c : user) slacks += c.sense == Sense::kEqual ? 0 : 1;
  const Eigen::Index cols = n + slacks;

  if (!((m == 2 && k <= 4) || cols <= 64)) {
    throw ResourceError("vertex enumeration dimension " + std::to_string(cols) + " above cap",
                        static_cast<std::size_t>(cols));
  }

  // Full system: every (class, state) marginal row plus user rows.
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m * k + static_cast<Eigen::Index>(user.size()), cols);
  Eigen::VectorXd b(A.rows());
  for (Eigen::Index p = 0; p < m; ++p) {
    for (Eigen::Index s = 0; s < k; ++s) {
      const Eigen::Index row = p * k + s;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (static_cast<Eigen::Index>(index.state_of(static_cast<std::size_t>(j),
                                                     static_cast<std::size_t>(p))) == s) {
          A(row, j) = 1.0;
        }
      }
      b[row] = prior_set.mu()[s];
    }
  }
  Eigen::Index slack = n;
  for (std::size_t i = 0; i < user.size(); ++i) {
    const Eigen::Index row = m * k + static_cast<Eigen::Index>(i);
    A.row(row).head(n) = user[i].coeffs.transpose();
    if (user[i].sense == Sense::kLessEqual) A(row, slack++) = 1.0;
    if (user[i].sense == Sense::kGreaterEqual) A(row, slack++) = -1.0;
    b[row] = user[i].rhs;
  }

  // Greedy selection of linearly independent rows.
  std::vector<Eigen::Index> rows;
  Eigen::MatrixXd picked(0, cols);
  for (Eigen::Index r = 0; r < A.rows(); ++r) {
    Eigen::MatrixXd trial(picked.rows() + 1, cols);
    trial << picked, A.row(r);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(trial);
    if (lu.rank() == trial.rows()) {
      picked = std::move(trial);
      rows.push_back(r);
    }
  }
  const auto rank = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd Ar(rank, cols);
  Eigen::VectorXd br(rank);
  for (Eigen::Index i = 0; i < rank; ++i) {
    Ar.row(i) = A.row(rows[static_cast<std::size_t>(i)]);
    br[i] = b[rows[static_cast<std::size_t>(i)]];
  }
  const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());

  const double bases = binomial(static_cast<std::size_t>(cols), static_cast<std::size_t>(rank));
  if (bases > static_cast<double>(basis_cap)) {
    throw ResourceError("vertex enumeration would visit " + std::to_string(bases) +
                            " bases, above the cap",
                        static_cast<std::size_t>(bases));
  }

  std::vector<Eigen::VectorXd> vertices;
  std::vector<Eigen::Index> combo(static_cast<std::size_t>(rank));
  for (Eigen::Index i = 0; i < rank; ++i) combo[static_cast<std::size_t>(i)] = i;
  Eigen::MatrixXd B(rank, rank);
  while (true) {
    for (Eigen::Index i = 0; i < rank; ++i) B.col(i) = Ar.col(combo[static_cast<std::size_t>(i)]);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(B);
    if (lu.isInvertible()) {
      const Eigen::VectorXd xb = lu.solve(br);
      if (xb.minCoeff() >= -kFeasibilityTolerance && (B * xb - br).cwiseAbs().maxCoeff() <= 1e-9 * scale) {
        Eigen::VectorXd x = Eigen::VectorXd::Zero(cols);
        for (Eigen::Index i = 0; i < rank; ++i) x[combo[static_cast<std::size_t>(i)]] = xb[i];
        // The full system (including rows dropped as dependent) must hold.
        if ((A * x - b).cwiseAbs().maxCoeff() <= 1e-9 * scale) {
          vertices.push_back(x.head(n).cwiseMax(0.0));
        }
      }
    }
    // Next combination in lexicographic order.
    Eigen::Index i = rank - 1;
    while (i >= 0 && combo[static_cast<std::size_t>(i)] == cols - rank + i) --i;
    if (i < 0) break;
    ++combo[static_cast<std::size_t>(i)];
    for (Eigen::Index j = i + 1; j < rank; ++j) {
      combo[static_cast<std::size_t>(j)] = combo[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
  return dedupe_sorted(std::move(vertices), index);
}

}  // namespace ccr
