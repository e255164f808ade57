#pragma once

#include <Eigen/Dense>
#include <compare>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ccr {

inline constexpr double kProbabilitySumTolerance = 1e-12;

/// Finite state space with its objective marginal measure.
class StateSpace {
 public:
  StateSpace(std::vector<std::string> labels, Eigen::VectorXd mu);

  std::size_t size() const noexcept { return labels_.size(); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const Eigen::VectorXd& mu() const noexcept { return mu_; }
  std::size_t index_of(std::string_view label) const;

 private:
  std::vector<std::string> labels_;
  Eigen::VectorXd mu_;
};

struct Action {
  std::string id;
  Eigen::VectorXd payoffs;
  std::string class_id;
};

/// Constant actions are addressed by the reserved id "#<value>", where the
/// value is written in shortest round-trip form. They need not be declared.
std::string constant_action_id(double value);
std::optional<double> parse_constant_action_id(std::string_view id);

/// Declared actions of a scenario plus the implicit constant actions.
class ActionTable {
 public:
  ActionTable(std::size_t num_states, std::vector<Action> actions);

  std::size_t num_states() const noexcept { return num_states_; }
  const std::vector<Action>& declared() const noexcept { return actions_; }

  bool contains(std::string_view id) const;
  /// Payoff vector of a declared or constant action.
  Eigen::VectorXd payoffs(std::string_view id) const;
  /// Class of a declared action; constants belong to no class.
  std::optional<std::string> class_of(std::string_view id) const;
  /// Distinct attained payoffs, ascending, deduplicated with exact equality.
  std::vector<double> range(std::string_view id) const;

 private:
  const Action* find(std::string_view id) const;

  std::size_t num_states_;
  std::vector<Action> actions_;
  std::map<std::string, std::size_t, std::less<>> by_id_;
};

/// Multiset of actions held jointly, kept as (id, multiplicity) sorted by id.
class Profile {
 public:
  using Entry = std::pair<std::string, int>;

  Profile(std::initializer_list<std::string> ids);
  explicit Profile(std::vector<std::string> ids);

  const std::vector<Entry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept;
  bool is_single() const noexcept { return size() == 1; }
  /// Ids expanded by multiplicity, in canonical order.
  std::vector<std::string> expanded() const;
  std::string to_string() const;

  auto operator<=>(const Profile&) const = default;
  bool operator==(const Profile&) const = default;

 private:
  std::vector<Entry> entries_;
};

/// Finite-support distribution over profiles. Support is merged and sorted by
/// profile; masses are strictly positive and sum to one.
class Lottery {
 public:
  using Atom = std::pair<Profile, double>;

  explicit Lottery(std::vector<Atom> support);
  static Lottery degenerate(Profile profile);

  const std::vector<Atom>& support() const noexcept { return support_; }
  /// True for members of the lotteries-over-actions subset (singleton profiles).
  bool over_actions() const noexcept;
  double mass_of(const Profile& profile) const;
  /// Every action id appearing in the support, sorted and unique.
  std::vector<std::string> action_ids() const;
  std::string to_string() const;

  bool operator==(const Lottery&) const = default;

 private:
  std::vector<Atom> support_;
};

Lottery mix(const Lottery& p, const Lottery& q, double alpha);

/// One outcome per action id (a plausible realization).
using OutcomeVector = std::map<std::string, double, std::less<>>;

inline constexpr std::size_t kDefaultRealizationCap = 1'000'000;

/// Cartesian product of the ranges of every action used by `p` or `q`.
class PlausibleRealizations {
 public:
  PlausibleRealizations(const Lottery& p, const Lottery& q, const ActionTable& actions,
                        std::size_t cap = kDefaultRealizationCap);

  std::size_t count() const noexcept { return count_; }
  const std::vector<std::string>& actions() const noexcept { return ids_; }
  const std::vector<std::vector<double>>& ranges() const noexcept { return ranges_; }

  /// Visits every realization in odometer order (last action fastest).
  /// Stops early when the visitor returns false.
  void for_each(const std::function<bool(const OutcomeVector&)>& visit) const;
  std::vector<OutcomeVector> collect() const;

 private:
  std::vector<std::string> ids_;
  std::vector<std::vector<double>> ranges_;
  std::size_t count_ = 1;
};

/// Enumerates the realization stream of `p` and `q`.
std::vector<OutcomeVector> plausible_realizations(const Lottery& p, const Lottery& q,
                                                  const ActionTable& actions,
                                                  std::size_t cap = kDefaultRealizationCap);

/// Replaces each profile by the constant paying the sum of its realized
/// components; masses merge when sums coincide exactly.
Lottery induced_lottery(const Lottery& p, const OutcomeVector& x);

/// Sum of a profile's outcomes, where `outcome(id)` supplies each action's
/// outcome. Summation runs in canonical order with multiplicities expanded.
template <typename OutcomeFn>
double profile_sum(const Profile& profile, OutcomeFn&& outcome) {
  double total = 0.0;
  for (const auto& [id, count] : profile.entries()) {
    const double v = outcome(id);
    for (int i = 0; i < count; ++i) total += v;
  }
  return total;
}

}  // namespace ccr
