#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ccr/core_model.hpp"

namespace ccr {

inline constexpr double kFeasibilityTolerance = 1e-9;
inline constexpr double kVertexMergeTolerance = 1e-8;

/// Product state space with one copy of the K objective states per class.
/// Joint states are linearized lexicographically, last class fastest.
class JointIndex {
 public:
  JointIndex(std::vector<std::string> classes, std::size_t states_per_class);

  const std::vector<std::string>& classes() const noexcept { return classes_; }
  std::size_t num_classes() const noexcept { return classes_.size(); }
  std::size_t states_per_class() const noexcept { return k_; }
  std::size_t size() const noexcept { return size_; }

  std::size_t class_position(std::string_view class_id) const;
  std::vector<std::size_t> decode(std::size_t linear) const;
  std::size_t encode(std::span<const std::size_t> states) const;
  /// State of class `position` in joint state `linear`.
  std::size_t state_of(std::size_t linear, std::size_t position) const;

  bool operator==(const JointIndex&) const = default;

 private:
  std::vector<std::string> classes_;
  std::size_t k_;
  std::size_t size_;
  std::vector<std::size_t> stride_;
};

/// Joint probability table on a JointIndex.
class Coupling {
 public:
  /// Masses above -1e-9 are clamped to zero and the table is renormalized when
  /// its total is within 1e-9 of one; anything further off is rejected.
  Coupling(JointIndex index, Eigen::VectorXd mass);

  const JointIndex& index() const noexcept { return index_; }
  const Eigen::VectorXd& mass() const noexcept { return mass_; }
  Eigen::VectorXd marginal(std::size_t position) const;
  /// Largest deviation of any one-class marginal from `mu`.
  double marginal_error(const Eigen::VectorXd& mu) const;

 private:
  JointIndex index_;
  Eigen::VectorXd mass_;
};

enum class Sense { kLessEqual, kEqual, kGreaterEqual };

/// sum_j coeffs[j] * mass[j] (sense) rhs over joint states.
struct LinearConstraint {
  Eigen::VectorXd coeffs;
  Sense sense = Sense::kLessEqual;
  double rhs = 0.0;
};

/// Convex set of marginal-valid couplings in one of four encodings.
class PriorSet {
 public:
  struct Singleton {
    Coupling coupling;
  };
  struct Frechet {};
  struct Polytope {
    std::vector<LinearConstraint> constraints;
  };
  struct Hull {
    std::vector<Coupling> couplings;
  };
  using Encoding = std::variant<Singleton, Frechet, Polytope, Hull>;

  static PriorSet singleton(const Eigen::VectorXd& mu, Coupling coupling);
  static PriorSet frechet(JointIndex index, Eigen::VectorXd mu);
  /// Throws InfeasibleError (with an irreducible constraint subset) when empty.
  static PriorSet polytope(JointIndex index, Eigen::VectorXd mu,
                           std::vector<LinearConstraint> constraints);
  static PriorSet hull(const Eigen::VectorXd& mu, std::vector<Coupling> couplings);

  const JointIndex& index() const noexcept { return index_; }
  const Eigen::VectorXd& mu() const noexcept { return mu_; }
  const Encoding& encoding() const noexcept { return encoding_; }
  std::string kind() const;

 private:
  PriorSet(JointIndex index, Eigen::VectorXd mu, Encoding encoding);

  JointIndex index_;
  Eigen::VectorXd mu_;
  Encoding encoding_;
};

/// Utility value per joint state.
struct UtilityAct {
  JointIndex index;
  Eigen::VectorXd value;
};

struct MinResult {
  double value = 0.0;
  Coupling argmin;
};

/// Minimum of the expectation of `f` over the prior set, with a minimizing
/// coupling. Frechet and Polytope sets are solved as LPs by DenseSimplex.
MinResult min_over_prior_set(const UtilityAct& f, const PriorSet& prior_set);

/// Couplings with marginals mu whose mass on joint state `cell` lies in
/// [lo, hi].
PriorSet cell_mass_interval(JointIndex index, Eigen::VectorXd mu, std::size_t cell, double lo,
                            double hi);

bool is_member(const Coupling& pi, const PriorSet& prior_set, double tol = kFeasibilityTolerance);

/// Perfectly synchronized coupling: mass mu(w) on (w, ..., w).
Coupling diagonal_pushforward(const StateSpace& space, const JointIndex& index);
/// Independent coupling: mass prod_j mu(w_j).
Coupling product_measure(const StateSpace& space, const JointIndex& index);

inline constexpr std::size_t kVertexBasisCap = 5'000'000;

/// All vertices of the prior set by exhaustive basis enumeration of the
/// standard-form constraint system (independent of DenseSimplex). Vertices
/// closer than 1e-8 are merged; output is sorted lexicographically.
std::vector<Coupling> enumerate_vertices_oracle(const PriorSet& prior_set,
                                                std::size_t basis_cap = kVertexBasisCap);

}  // namespace ccr
