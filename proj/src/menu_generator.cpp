#include "ccr/menu_generator.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <map>

#include "ccr/errors.hpp"

namespace ccr {

std::size_t Rng::index(std::size_t n) {
  if (n == 0) throw DomainError("empty range");
  const std::uint64_t m = n;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % m;
  std::uint64_t v;
  do {
    v = engine_();
  } while (v >= limit);
  return static_cast<std::size_t>(v % m);
}

namespace {

std::vector<double> random_weights(Rng& rng, std::size_t n) {
  std::vector<double> w(n);
  double total = 0.0;
  for (auto& x : w) {
    x = 0.05 + rng.uniform();
    total += x;
  }
  for (auto& x : w) x /= total;
  return w;
}

// Multi-marginal north-west corner rule under random state orderings.
Coupling random_vertex_coupling(Rng& rng, const JointIndex& index, const Eigen::VectorXd& mu) {
  const std::size_t m = index.num_classes();
  const std::size_t k = index.states_per_class();
  std::vector<std::vector<std::size_t>> order(m);
  std::vector<std::vector<double>> left(m, std::vector<double>(mu.data(), mu.data() + k));
  for (auto& o : order) {
    o.resize(k);
    for (std::size_t s = 0; s < k; ++s) o[s] = s;
    for (std::size_t s = k; s > 1; --s) std::swap(o[s - 1], o[rng.index(s)]);
  }
  Eigen::VectorXd mass = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(index.size()));
  std::vector<std::size_t> pos(m, 0);
  while (true) {
    double take = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> states(m);
    for (std::size_t c = 0; c < m; ++c) {
      states[c] = order[c][pos[c]];
      take = std::min(take, left[c][states[c]]);
    }
    mass[static_cast<Eigen::Index>(index.encode(states))] += take;
    bool done = false;
    for (std::size_t c = 0; c < m; ++c) {
      left[c][states[c]] -= take;
      if (left[c][states[c]] <= 1e-15) {
        if (++pos[c] == k) done = true;
      }
    }
    if (done) break;
  }
  return Coupling(index, std::move(mass));
}

std::string fmt_num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

}  // namespace

Lottery random_lottery(Rng& rng, const std::vector<std::string>& ids, const LotteryShape& shape) {
  if (ids.empty()) throw DomainError("no actions to draw from");
  std::map<Profile, double> atoms;
  const std::size_t n = 1 + rng.index(shape.max_support);
  const auto w = random_weights(rng, n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t size = shape.over_actions ? 1 : 1 + rng.index(shape.max_profile_size);
    std::vector<std::string> picks;
    for (std::size_t j = 0; j < size; ++j) picks.push_back(ids[rng.index(ids.size())]);
    atoms[Profile(std::move(picks))] += w[i];
  }
  return Lottery(std::vector<Lottery::Atom>(atoms.begin(), atoms.end()));
}

std::vector<Lottery> random_menu(Rng& rng, const std::vector<std::string>& ids, std::size_t n,
                                 const LotteryShape& shape) {
  std::vector<Lottery> menu;
  menu.reserve(n);
  for (std::size_t i = 0; i < n; ++i) menu.push_back(random_lottery(rng, ids, shape));
  return menu;
}

CcrModel random_model(Rng& rng, const UtilityIndex& u, const ModelShape& shape) {
  const std::size_t k = shape.states;
  std::vector<std::string> labels;
  for (std::size_t s = 0; s < k; ++s) labels.push_back("w" + std::to_string(s + 1));
  const auto w = random_weights(rng, k);
  Eigen::VectorXd mu = Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(k));
  StateSpace space(labels, mu);

  std::vector<std::string> classes;
  std::vector<Action> actions;
  for (std::size_t c = 0; c < shape.classes; ++c) {
    classes.push_back("C" + std::to_string(c + 1));
    for (std::size_t a = 0; a < shape.actions_per_class; ++a) {
      Eigen::VectorXd pay(static_cast<Eigen::Index>(k));
      for (auto& x : pay) x = static_cast<double>(rng.integer(-shape.payoff_bound, shape.payoff_bound));
      actions.push_back(Action{classes.back() + "a" + std::to_string(a + 1), pay, classes.back()});
    }
  }
  JointIndex index(classes, k);
  ActionTable table(k, std::move(actions));

  auto prior = [&]() -> PriorSet {
    switch (shape.prior) {
      case PriorKind::kFrechet:
        return PriorSet::frechet(index, mu);
      case PriorKind::kSingleton:
        return PriorSet::singleton(mu, random_vertex_coupling(rng, index, mu));
      case PriorKind::kHull: {
        std::vector<Coupling> list;
        const std::size_t n = 2 + rng.index(3);
        for (std::size_t i = 0; i < n; ++i) list.push_back(random_vertex_coupling(rng, index, mu));
        return PriorSet::hull(mu, std::move(list));
      }
      case PriorKind::kPolytope: {
        const Coupling prod = product_measure(space, index);
        std::vector<LinearConstraint> rows;
        const std::size_t n = rng.index(3);
        for (std::size_t i = 0; i < n; ++i) {
          Eigen::VectorXd coeffs(static_cast<Eigen::Index>(index.size()));
          for (auto& x : coeffs) x = static_cast<double>(rng.integer(-1, 1));
          const double at = coeffs.dot(prod.mass());
          const double slack = 0.1 * rng.uniform();
          if (rng.index(2) == 0) {
            rows.push_back({coeffs, Sense::kLessEqual, at + slack});
          } else {
            rows.push_back({coeffs, Sense::kGreaterEqual, at - slack});
          }
        }
        return PriorSet::polytope(index, mu, std::move(rows));
      }
    }
    throw DomainError("unknown prior kind");
  };
  PriorSet set = prior();
  return CcrModel(std::move(space), std::move(table), u, std::move(set));
}

std::vector<std::string> action_ids(const CcrModel& model) {
  std::vector<std::string> ids;
  for (const auto& a : model.actions().declared()) ids.push_back(a.id);
  return ids;
}

JointIndex bet_family_index() { return JointIndex({"C1", "C2"}, 2); }

BetFamily two_value_bet_family(const Eigen::VectorXd& mu, const std::vector<double>& grid) {
  if (mu.size() != 2) throw DomainError("bet family needs two states");
  std::vector<Action> actions;
  std::vector<std::pair<std::string, Eigen::Vector2d>> as;
  std::vector<std::pair<std::string, Eigen::Vector2d>> bs;
  for (double x : grid) {
    for (double y : grid) {
      if (x == y) continue;
      const std::string tag = "(" + fmt_num(x) + "," + fmt_num(y) + ")";
      as.emplace_back("a" + tag, Eigen::Vector2d(x, y));
      bs.emplace_back("b" + tag, Eigen::Vector2d(x, y));
    }
  }
  for (const auto& [id, pay] : as) actions.push_back(Action{id, pay, "C1"});
  for (const auto& [id, pay] : bs) actions.push_back(Action{id, pay, "C2"});

  BetFamily fam{StateSpace({"w1", "w2"}, mu), ActionTable(2, {}), {}, {}};
  std::map<std::string, bool> sums;
  for (const auto& [a, pa] : as) {
    for (const auto& [b, pb] : bs) {
      const Eigen::Vector2d s = pa + pb;
      const std::string id = "s(" + fmt_num(s[0]) + "," + fmt_num(s[1]) + ")";
      if (!sums.count(id)) {
        sums[id] = true;
        actions.push_back(Action{id, s, "C1"});
      }
      fam.bet_pairs.emplace_back(a, b);
      fam.complexity_pairs.emplace_back(Lottery::degenerate(Profile{id}), Lottery::degenerate(Profile{a, b}));
    }
  }
  fam.actions = ActionTable(2, std::move(actions));
  return fam;
}

}  // namespace ccr
