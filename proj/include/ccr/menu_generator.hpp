#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "ccr/core_model.hpp"
#include "ccr/utility.hpp"
#include "ccr/valuation.hpp"

namespace ccr {

/// 64-bit Mersenne twister with hand-rolled draws so sequences are identical
/// across standard libraries.
class Rng {
 public:
  static constexpr const char* kName = "mt19937_64";

  explicit Rng(std::uint64_t seed) : engine_(seed), seed_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t bits() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform on {0, ..., n - 1}.
  std::size_t index(std::size_t n);
  /// Uniform integer on [lo, hi].
  long integer(long lo, long hi) { return lo + static_cast<long>(index(static_cast<std::size_t>(hi - lo + 1))); }

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
};

struct LotteryShape {
  std::size_t max_support = 3;
  std::size_t max_profile_size = 2;
  /// Restrict to single-action profiles.
  bool over_actions = false;
};

/// Random lottery over profiles drawn from `ids`. Masses are normalized
/// random weights.
Lottery random_lottery(Rng& rng, const std::vector<std::string>& ids, const LotteryShape& shape = {});
std::vector<Lottery> random_menu(Rng& rng, const std::vector<std::string>& ids, std::size_t n,
                                 const LotteryShape& shape = {});

enum class PriorKind { kFrechet, kPolytope, kSingleton, kHull };

struct ModelShape {
  std::size_t states = 2;
  std::size_t classes = 2;
  std::size_t actions_per_class = 2;
  /// Payoffs are integers in [-payoff_bound, payoff_bound].
  long payoff_bound = 5;
  PriorKind prior = PriorKind::kFrechet;
};

/// Random scenario: uniform-ish marginal, integer payoffs, classes "C1".."Cm"
/// with actions "C1a1", ... The polytope variant adds up to two random rows
/// that the product measure satisfies.
CcrModel random_model(Rng& rng, const UtilityIndex& u, const ModelShape& shape = {});

/// Declared action ids of a model.
std::vector<std::string> action_ids(const CcrModel& model);

/// Exhaustive two-state, two-class bet family over a payoff grid. Class "C1"
/// holds the bets a = (g_i, g_j), i != j, and the statewise sums of every
/// (a, b) pair; class "C2" holds the bets b.
struct BetFamily {
  StateSpace space;
  ActionTable actions;
  /// (a, b) with a in C1 and b in C2.
  std::vector<std::pair<std::string, std::string>> bet_pairs;
  /// (δ⟨a+b⟩, δ⟨a,b⟩) for every bet pair.
  std::vector<std::pair<Lottery, Lottery>> complexity_pairs;
};

BetFamily two_value_bet_family(const Eigen::VectorXd& mu, const std::vector<double>& grid);

/// Joint index of the bet family.
JointIndex bet_family_index();

}  // namespace ccr
