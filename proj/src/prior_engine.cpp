#include "ccr/prior_engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ccr/errors.hpp"
#include "ccr/simplex.hpp"

namespace ccr {

// -------------------------------------------------------------- JointIndex

JointIndex::JointIndex(std::vector<std::string> classes, std::size_t states_per_class)
    : classes_(std::move(classes)), k_(states_per_class), size_(1) {
  if (classes_.empty()) throw DomainError("a joint index needs at least one class");
  if (k_ == 0) throw DomainError("a joint index needs at least one state per class");
  for (std::size_t i = 0; i < classes_.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (classes_[i] == classes_[j]) throw DomainError("duplicate class '" + classes_[i] + "'");
    }
  }
  stride_.assign(classes_.size(), 1);
  for (std::size_t p = classes_.size(); p-- > 0;) {
    stride_[p] = size_;
    if (size_ > (std::size_t{1} << 40) / k_) throw DomainError("joint index too large");
    size_ *= k_;
  }
}

std::size_t JointIndex::class_position(std::string_view class_id) const {
  auto it = std::find(classes_.begin(), classes_.end(), class_id);
  if (it == classes_.end()) throw DomainError("unknown class '" + std::string(class_id) + "'");
  return static_cast<std::size_t>(it - classes_.begin());
}

std::vector<std::size_t> JointIndex::decode(std::size_t linear) const {
  std::vector<std::size_t> s(classes_.size());
  for (std::size_t p = 0; p < classes_.size(); ++p) s[p] = (linear / stride_[p]) % k_;
  return s;
}

std::size_t JointIndex::encode(std::span<const std::size_t> states) const {
  if (states.size() != classes_.size()) throw DomainError("joint state arity mismatch");
  std::size_t linear = 0;
  for (std::size_t p = 0; p < states.size(); ++p) {
    if (states[p] >= k_) throw DomainError("joint state component out of range");
    linear += states[p] * stride_[p];
  }
  return linear;
}

std::size_t JointIndex::state_of(std::size_t linear, std::size_t position) const {
  return (linear / stride_[position]) % k_;
}

// ---------------------------------------------------------------- Coupling

Coupling::Coupling(JointIndex index, Eigen::VectorXd mass)
    : index_(std::move(index)), mass_(std::move(mass)) {
  if (static_cast<std::size_t>(mass_.size()) != index_.size()) {
    throw DomainError("coupling has " + std::to_string(mass_.size()) + " masses for " +
                      std::to_string(index_.size()) + " joint states");
  }
  if (!mass_.allFinite()) throw DomainError("coupling masses must be finite");
  if (mass_.minCoeff() < -kFeasibilityTolerance) {
    throw DomainError("coupling has a negative mass");
  }
  mass_ = mass_.cwiseMax(0.0);
  const double total = mass_.sum();
  if (std::abs(total - 1.0) > kFeasibilityTolerance) {
    throw DomainError("coupling masses do not sum to 1");
  }
  if (total != 1.0) mass_ /= total;
}

Eigen::VectorXd Coupling::marginal(std::size_t position) const {
  Eigen::VectorXd m = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(index_.states_per_class()));
  for (std::size_t j = 0; j < index_.size(); ++j) {
    m[static_cast<Eigen::Index>(index_.state_of(j, position))] += mass_[static_cast<Eigen::Index>(j)];
  }
  return m;
}

double Coupling::marginal_error(const Eigen::VectorXd& mu) const {
  if (static_cast<std::size_t>(mu.size()) != index_.states_per_class()) {
    throw DomainError("marginal has the wrong number of states");
  }
  double err = 0.0;
  for (std::size_t p = 0; p < index_.num_classes(); ++p) {
    err = std::max(err, (marginal(p) - mu).cwiseAbs().maxCoeff());
  }
  return err;
}

// ------------------------------------------------------------ LP assembly

namespace {

struct StandardForm {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  std::size_t masses = 0;
};

// Marginal rows for every state of the first class and all but the last
// state of the others (the rest are implied by total mass), then user rows
// with one slack column per inequality.
StandardForm assemble(const JointIndex& index, const Eigen::VectorXd& mu,
                      const std::vector<LinearConstraint>& user) {
  const std::size_t n = index.size();
  const std::size_t k = index.states_per_class();
  const std::size_t m = index.num_classes();
  std::size_t slacks = 0;
  for (const auto& c : user) slacks += c.sense == Sense::kEqual ? 0 : 1;
  const std::size_t marginal_rows = k + (m - 1) * (k - 1);

  StandardForm sf;
  sf.masses = n;
  sf.A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(marginal_rows + user.size()),
                               static_cast<Eigen::Index>(n + slacks));
  sf.b = Eigen::VectorXd::Zero(sf.A.rows());

  Eigen::Index row = 0;
  for (std::size_t p = 0; p < m; ++p) {
    const std::size_t kept = p == 0 ? k : k - 1;
    for (std::size_t s = 0; s < kept; ++s, ++row) {
      for (std::size_t j = 0; j < n; ++j) {
        if (index.state_of(j, p) == s) sf.A(row, static_cast<Eigen::Index>(j)) = 1.0;
      }
      sf.b[row] = mu[static_cast<Eigen::Index>(s)];
    }
  }
  Eigen::Index slack = static_cast<Eigen::Index>(n);
  for (const auto& c : user) {
    sf.A.row(row).head(static_cast<Eigen::Index>(n)) = c.coeffs.transpose();
    if (c.sense == Sense::kLessEqual) sf.A(row, slack++) = 1.0;
    if (c.sense == Sense::kGreaterEqual) sf.A(row, slack++) = -1.0;
    sf.b[row] = c.rhs;
    ++row;
  }
  return sf;
}

LpSolution<double> solve_lp(const StandardForm& sf, const Eigen::VectorXd& mass_cost) {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(sf.A.cols());
  c.head(static_cast<Eigen::Index>(sf.masses)) = mass_cost;
  return DenseSimplex<double>(sf.A, sf.b, c).solve();
}

bool feasible(const JointIndex& index, const Eigen::VectorXd& mu,
              const std::vector<LinearConstraint>& user) {
  const StandardForm sf = assemble(index, mu, user);
  const auto sol = solve_lp(sf, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(sf.masses)));
  if (sol.status == LpStatus::kIterationLimit) {
    throw SolverError("feasibility check hit the iteration limit", sol.iterations);
  }
  return sol.status == LpStatus::kOptimal;
}

// Deletion filter: drop each user row in turn, keeping it out whenever the
// remaining system stays infeasible.
std::vector<std::size_t> irreducible_subset(const JointIndex& index, const Eigen::VectorXd& mu,
                                            const std::vector<LinearConstraint>& user) {
  std::vector<std::size_t> keep(user.size());
  std::iota(keep.begin(), keep.end(), 0);
  for (std::size_t pos = 0; pos < keep.size();) {
    std::vector<LinearConstraint> trial;
    for (std::size_t i = 0; i < keep.size(); ++i) {
      if (i != pos) trial.push_back(user[keep[i]]);
    }
    if (!feasible(index, mu, trial)) {
      keep.erase(keep.begin() + static_cast<std::ptrdiff_t>(pos));
    } else {
      ++pos;
    }
  }
  return keep;
}

void check_marginal_valid(const Coupling& c, const Eigen::VectorXd& mu, const char* what) {
  if (static_cast<std::size_t>(mu.size()) != c.index().states_per_class()) {
    throw DomainError(std::string(what) + " coupling index does not match mu");
  }
  if (c.marginal_error(mu) > kFeasibilityTolerance) {
    throw DomainError(std::string(what) + " coupling marginals disagree with mu");
  }
}

}  // namespace

// ---------------------------------------------------------------- PriorSet

PriorSet::PriorSet(JointIndex index, Eigen::VectorXd mu, Encoding encoding)
    : index_(std::move(index)), mu_(std::move(mu)), encoding_(std::move(encoding)) {
  if (static_cast<std::size_t>(mu_.size()) != index_.states_per_class()) {
    throw DomainError("mu does not match the joint index");
  }
  if (std::abs(mu_.sum() - 1.0) > kProbabilitySumTolerance || mu_.minCoeff() < 0.0) {
    throw DomainError("mu sum is not 1");
  }
}

PriorSet PriorSet::singleton(const Eigen::VectorXd& mu, Coupling coupling) {
  check_marginal_valid(coupling, mu, "singleton");
  JointIndex index = coupling.index();
  return PriorSet(std::move(index), mu, Singleton{std::move(coupling)});
}

PriorSet PriorSet::frechet(JointIndex index, Eigen::VectorXd mu) {
  return PriorSet(std::move(index), std::move(mu), Frechet{});
}

PriorSet PriorSet::polytope(JointIndex index, Eigen::VectorXd mu,
                            std::vector<LinearConstraint> constraints) {
  for (std::size_t i = 0; i < constraints.size(); ++i) {
    const auto& c = constraints[i];
    if (static_cast<std::size_t>(c.coeffs.size()) != index.size() || !c.coeffs.allFinite() ||
        !std::isfinite(c.rhs)) {
      throw DomainError("constraint " + std::to_string(i) + " is malformed");
    }
  }
  PriorSet set(index, mu, Polytope{constraints});
  if (!feasible(set.index_, set.mu_, constraints)) {
    auto iis = irreducible_subset(set.index_, set.mu_, constraints);
    std::string msg = "prior set polytope is infeasible; irreducible constraint subset {";
    for (std::size_t i = 0; i < iis.size(); ++i) msg += (i ? "," : "") + std::to_string(iis[i]);
    throw InfeasibleError(msg + "}", std::move(iis));
  }
  return set;
}

PriorSet PriorSet::hull(const Eigen::VectorXd& mu, std::vector<Coupling> couplings) {
  if (couplings.empty()) throw DomainError("hull prior set needs at least one coupling");
  for (const auto& c : couplings) {
    if (!(c.index() == couplings.front().index())) {
      throw DomainError("hull couplings must share one joint index");
    }
    check_marginal_valid(c, mu, "hull");
  }
  JointIndex index = couplings.front().index();
  return PriorSet(std::move(index), mu, Hull{std::move(couplings)});
}

std::string PriorSet::kind() const {
  switch (encoding_.index()) {
    case 0:
      return "singleton";
    case 1:
      return "frechet";
    case 2:
      return "polytope";
    default:
      return "hull";
  }
}

// ------------------------------------------------------------- operations

MinResult min_over_prior_set(const UtilityAct& f, const PriorSet& prior_set) {
  if (!(f.index == prior_set.index())) throw DomainError("utility act and prior set index mismatch");
  if (static_cast<std::size_t>(f.value.size()) != f.index.size() || !f.value.allFinite()) {
    throw DomainError("utility act must have one finite value per joint state");
  }

  if (const auto* s = std::get_if<PriorSet::Singleton>(&prior_set.encoding())) {
    return MinResult{f.value.dot(s->coupling.mass()), s->coupling};
  }
  if (const auto* h = std::get_if<PriorSet::Hull>(&prior_set.encoding())) {
    std::size_t best = 0;
    double best_value = f.value.dot(h->couplings[0].mass());
    for (std::size_t i = 1; i < h->couplings.size(); ++i) {
      const double v = f.value.dot(h->couplings[i].mass());
      if (v < best_value) {
        best_value = v;
        best = i;
      }
    }
    return MinResult{best_value, h->couplings[best]};
  }

  static const std::vector<LinearConstraint> kNone;
  const auto* poly = std::get_if<PriorSet::Polytope>(&prior_set.encoding());
  const auto& user = poly ? poly->constraints : kNone;
  const StandardForm sf = assemble(prior_set.index(), prior_set.mu(), user);
  const auto sol = solve_lp(sf, f.value);
  switch (sol.status) {
    case LpStatus::kOptimal:
      break;
    case LpStatus::kInfeasible: {
      auto iis = irreducible_subset(prior_set.index(), prior_set.mu(), user);
      throw InfeasibleError("prior set is infeasible", std::move(iis));
    }
    case LpStatus::kUnbounded:
      throw SolverError("LP reported an unbounded direction on a bounded polytope", sol.iterations);
    case LpStatus::kIterationLimit:
      throw SolverError("LP did not converge after " + std::to_string(sol.iterations) +
                            " iterations",
                        sol.iterations);
  }
  Coupling argmin(prior_set.index(), sol.x.head(static_cast<Eigen::Index>(sf.masses)));
  return MinResult{f.value.dot(argmin.mass()), std::move(argmin)};
}

bool is_member(const Coupling& pi, const PriorSet& prior_set, double tol) {
  if (!(pi.index() == prior_set.index())) throw DomainError("coupling and prior set index mismatch");
  const Eigen::VectorXd& x = pi.mass();

  if (const auto* s = std::get_if<PriorSet::Singleton>(&prior_set.encoding())) {
    return (x - s->coupling.mass()).cwiseAbs().maxCoeff() <= tol;
  }
  if (const auto* h = std::get_if<PriorSet::Hull>(&prior_set.encoding())) {
    // min sum(r+ + r-)  s.t.  sum_i w_i pi_i + r+ - r- = x,  sum_i w_i = 1.
    const auto n = x.size();
    const auto N = static_cast<Eigen::Index>(h->couplings.size());
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n + 1, N + 2 * n);
    Eigen::VectorXd b(n + 1);
    for (Eigen::Index i = 0; i < N; ++i) {
      A.col(i).head(n) = h->couplings[static_cast<std::size_t>(i)].mass();
      A(n, i) = 1.0;
    }
    A.block(0, N, n, n).setIdentity();
    A.block(0, N + n, n, n) = -Eigen::MatrixXd::Identity(n, n);
    b << x, 1.0;
    Eigen::VectorXd c = Eigen::VectorXd::Zero(N + 2 * n);
    c.tail(2 * n).setOnes();
    const auto sol = DenseSimplex<double>(A, b, c).solve();
    if (sol.status != LpStatus::kOptimal) {
      throw SolverError("hull membership LP failed", sol.iterations);
    }
    return sol.objective <= tol;
  }

  if (x.minCoeff() < -tol || std::abs(x.sum() - 1.0) > tol) return false;
  if (pi.marginal_error(prior_set.mu()) > tol) return false;
  if (const auto* poly = std::get_if<PriorSet::Polytope>(&prior_set.encoding())) {
    for (const auto& c : poly->constraints) {
      const double lhs = c.coeffs.dot(x);
      switch (c.sense) {
        case Sense::kLessEqual:
          if (lhs > c.rhs + tol) return false;
          break;
        case Sense::kGreaterEqual:
          if (lhs < c.rhs - tol) return false;
          break;
        case Sense::kEqual:
          if (std::abs(lhs - c.rhs) > tol) return false;
          break;
      }
    }
  }
  return true;
}

Coupling diagonal_pushforward(const StateSpace& space, const JointIndex& index) {
  if (space.size() != index.states_per_class()) {
    throw DomainError("state space and joint index disagree on the number of states");
  }
  Eigen::VectorXd mass = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(index.size()));
  std::vector<std::size_t> s(index.num_classes());
  for (std::size_t w = 0; w < space.size(); ++w) {
    std::fill(s.begin(), s.end(), w);
    mass[static_cast<Eigen::Index>(index.encode(s))] = space.mu()[static_cast<Eigen::Index>(w)];
  }
  return Coupling(index, std::move(mass));
}

Coupling product_measure(const StateSpace& space, const JointIndex& index) {
  if (space.size() != index.states_per_class()) {
    throw DomainError("state space and joint index disagree on the number of states");
  }
  Eigen::VectorXd mass(static_cast<Eigen::Index>(index.size()));
  for (std::size_t j = 0; j < index.size(); ++j) {
    double m = 1.0;
    for (std::size_t p = 0; p < index.num_classes(); ++p) {
      m *= space.mu()[static_cast<Eigen::Index>(index.state_of(j, p))];
    }
    mass[static_cast<Eigen::Index>(j)] = m;
  }
  return Coupling(index, std::move(mass));
}

PriorSet cell_mass_interval(JointIndex index, Eigen::VectorXd mu, std::size_t cell, double lo,
                            double hi) {
  if (cell >= index.size()) throw DomainError("joint state out of range");
  if (!(lo <= hi)) throw DomainError("empty mass interval");
  Eigen::VectorXd e = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(index.size()));
  e[static_cast<Eigen::Index>(cell)] = 1.0;
  std::vector<LinearConstraint> rows{{e, Sense::kGreaterEqual, lo}, {e, Sense::kLessEqual, hi}};
  return PriorSet::polytope(std::move(index), std::move(mu), std::move(rows));
}

}  // namespace ccr
