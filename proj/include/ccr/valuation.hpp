#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "ccr/core_model.hpp"
#include "ccr/prior_engine.hpp"
#include "ccr/utility.hpp"

namespace ccr {

inline constexpr double kIndifferenceBand = 1e-9;

/// A rich correlation-concern model: objective states, classified actions,
/// a utility index and a prior set on the product of per-class state copies.
class CcrModel {
 public:
  CcrModel(StateSpace space, ActionTable actions, UtilityIndex u, PriorSet prior_set);

  const StateSpace& space() const noexcept { return space_; }
  const ActionTable& actions() const noexcept { return actions_; }
  const UtilityIndex& utility() const noexcept { return u_; }
  const PriorSet& prior_set() const noexcept { return prior_set_; }
  const JointIndex& index() const noexcept { return prior_set_.index(); }

  /// Class coordinate used to evaluate an action; constants use coordinate 0.
  std::size_t coordinate_of(std::string_view action_id) const;

  CcrModel with_prior_set(PriorSet prior_set) const;
  CcrModel with_utility(UtilityIndex u) const;

 private:
  StateSpace space_;
  ActionTable actions_;
  UtilityIndex u_;
  PriorSet prior_set_;
};

/// Expected utility of `p` at each joint state, where each action reads the
/// state of its own class coordinate.
UtilityAct lift(const Lottery& p, const CcrModel& model);

struct Valuation {
  double value = 0.0;
  /// A minimizing coupling (one of possibly many).
  Coupling minimizer;
};

Valuation value(const Lottery& p, const CcrModel& model);

enum class Preference { kStrictlyFirst, kStrictlySecond, kIndifferent };

Preference compare_values(double vp, double vq, double band = kIndifferenceBand);
Preference prefer(const Lottery& p, const Lottery& q, const CcrModel& model,
                  double band = kIndifferenceBand);

double certainty_equivalent(const Lottery& p, const CcrModel& model);

/// Statewise payoff of a profile under the objective state space.
Eigen::VectorXd statewise_payoff(const Profile& profile, const ActionTable& actions);

/// First pair (in menu order) of profiles with identical statewise payoffs
/// that the model nevertheless ranks strictly.
std::optional<std::pair<Profile, Profile>> misperception_witness(const CcrModel& model,
                                                                 const std::vector<Profile>& menu,
                                                                 double band = kIndifferenceBand);

/// Subjective expected utility of `p` under the objective measure, with all
/// actions read at the same state.
double seu_value(const Lottery& p, const CcrModel& model);

}  // namespace ccr
