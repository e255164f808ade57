#pragma once

#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ccr/core_model.hpp"
#include "ccr/valuation.hpp"

namespace ccr {

enum class Verdict { kHoldsOnMenu, kViolated };

/// Lotteries that violate an axiom's implication. `preferred` is the lottery
/// the axiom requires to be (weakly or strictly) better than `other`.
struct Witness {
  std::vector<std::pair<std::string, Lottery>> inputs;
  std::optional<double> alpha;
  Lottery preferred;
  Lottery other;
  double preferred_value = 0.0;
  double other_value = 0.0;
  bool strict = false;

  double gap() const { return preferred_value - other_value; }
};

struct AxiomReport {
  std::string axiom;
  Verdict verdict = Verdict::kHoldsOnMenu;
  std::optional<Witness> witness;
  /// Smallest conclusion gap V(preferred) - V(other) over implications whose
  /// premise held; +inf when no premise held.
  double margin = std::numeric_limits<double>::infinity();
  std::size_t cases = 0;
  std::size_t premises_met = 0;

  bool holds() const { return verdict == Verdict::kHoldsOnMenu; }
};

struct AxiomTolerances {
  /// Strict premises must clear this utility margin.
  double strict_premise = 1e-6;
  /// Weak conclusions may undershoot by this much.
  double conclusion = 1e-9;
  /// Indifference band for weak premises and strict conclusions.
  double band = kIndifferenceBand;
};

inline const std::vector<double> kDefaultAlphas{0.1, 0.25, 0.5, 0.75, 0.9};

/// The preference under test: a model supplying actions, states and the
/// utility index, plus the valuation whose implications are checked. The
/// default valuation is the model's own CCR value. Values are memoized.
class AxiomSubject {
 public:
  using ValueFn = std::function<double(const Lottery&)>;

  explicit AxiomSubject(const CcrModel& model);
  AxiomSubject(const CcrModel& model, ValueFn value);

  const CcrModel& model() const noexcept { return *model_; }
  double value(const Lottery& p) const;
  /// Same as value() but bypasses the memo.
  double evaluate(const Lottery& p) const { return value_(p); }
  /// Expected utility of a lottery over constant outcomes or, more generally,
  /// of `p` with every action read at objective state `w`.
  double state_utility(const Lottery& p, std::size_t w) const;

 private:
  const CcrModel* model_;
  ValueFn value_;
  mutable std::map<std::string, double> cache_;
};

AxiomReport check_weak_monotonicity(const AxiomSubject& subject, const std::vector<Lottery>& menu,
                                    const AxiomTolerances& tol = {},
                                    std::size_t cap = kDefaultRealizationCap);

AxiomReport check_simple_monotonicity(const AxiomSubject& subject,
                                      const std::vector<std::pair<std::string, std::string>>& action_pairs,
                                      const AxiomTolerances& tol = {});

AxiomReport check_nui(const AxiomSubject& subject, const std::vector<Lottery>& menu,
                      const std::vector<double>& alphas, const std::vector<Lottery>& r_menu,
                      const AxiomTolerances& tol = {});

AxiomReport check_independence(const AxiomSubject& subject, const std::vector<Lottery>& menu,
                               const std::vector<double>& alphas, const AxiomTolerances& tol = {});

/// Every ordered pair (p, q) of the menu with p over actions.
AxiomReport check_complexity_aversion(const AxiomSubject& subject, const std::vector<Lottery>& menu,
                                      const AxiomTolerances& tol = {});
/// Explicit (p, q) pairs, p over actions.
AxiomReport check_complexity_aversion(const AxiomSubject& subject,
                                      const std::vector<std::pair<Lottery, Lottery>>& pairs,
                                      const AxiomTolerances& tol = {});

/// Each bet pair (b1, b2) is checked alone and, with every weight in
/// `alphas`, mixed with every other pair (consecutive pairs only when more
/// than 16 pairs are given). Requires a utility index concave on the payoff
/// hull of the bets.
AxiomReport check_default_to_independence(
    const AxiomSubject& subject, const std::vector<std::pair<std::string, std::string>>& bet_pairs,
    const std::vector<double>& alphas = kDefaultAlphas, const AxiomTolerances& tol = {});

/// Understanding of an explicit set of actions.
AxiomReport check_understanding(const AxiomSubject& subject, const std::vector<std::string>& actions,
                                const std::vector<Lottery>& menu, const AxiomTolerances& tol = {},
                                std::size_t cap = kDefaultRealizationCap);
/// Understanding of every declared action of one class.
AxiomReport check_understanding(const AxiomSubject& subject, const std::string& class_id,
                                const std::vector<Lottery>& menu, const AxiomTolerances& tol = {},
                                std::size_t cap = kDefaultRealizationCap);

/// Recomputes the two values in a violated report's witness and confirms the
/// reported gap within `tol` and that the implication still fails.
bool reverify(const AxiomReport& report, const AxiomSubject& subject, double tol = 1e-9,
              const AxiomTolerances& tolerances = {});

}  // namespace ccr
