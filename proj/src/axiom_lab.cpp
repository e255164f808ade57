#include "ccr/axiom_lab.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "ccr/errors.hpp"

namespace ccr {

namespace {

std::string memo_key(const Lottery& p) {
  std::string key;
  char buf[32];
  for (const auto& [profile, mass] : p.support()) {
    key += profile.to_string();
    std::snprintf(buf, sizeof buf, ":%.17g;", mass);
    key += buf;
  }
  return key;
}

double eu_at(const Lottery& p, const OutcomeVector& x, const UtilityIndex& u) {
  double total = 0.0;
  for (const auto& [profile, mass] : p.support()) {
    total += mass * u(profile_sum(profile, [&](const std::string& id) { return x.find(id)->second; }));
  }
  return total;
}

using Inputs = std::vector<std::pair<std::string, Lottery>>;

// Evaluates one implication whose premise held. Returns true on violation.
bool judge(AxiomReport& r, const AxiomSubject& s, const AxiomTolerances& tol, const Lottery& preferred,
           const Lottery& other, bool strict, Inputs inputs, std::optional<double> alpha = std::nullopt) {
  ++r.premises_met;
  const double vp = s.value(preferred);
  const double vo = s.value(other);
  const double gap = vp - vo;
  r.margin = std::min(r.margin, gap);
  const bool violated = strict ? !(gap > tol.band) : gap < -tol.conclusion;
  if (violated) {
    r.verdict = Verdict::kViolated;
    r.witness = Witness{std::move(inputs), alpha, preferred, other, vp, vo, strict};
  }
  return violated;
}

}  // namespace

AxiomSubject::AxiomSubject(const CcrModel& model)
    : model_(&model), value_([m = &model](const Lottery& p) { return ccr::value(p, *m).value; }) {}

AxiomSubject::AxiomSubject(const CcrModel& model, ValueFn value)
    : model_(&model), value_(std::move(value)) {}

double AxiomSubject::value(const Lottery& p) const {
  const std::string key = memo_key(p);
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  const double v = value_(p);
  cache_.emplace(key, v);
  return v;
}

double AxiomSubject::state_utility(const Lottery& p, std::size_t w) const {
  double total = 0.0;
  for (const auto& [profile, mass] : p.support()) {
    const Eigen::VectorXd pay = statewise_payoff(profile, model_->actions());
    total += mass * model_->utility()(pay[static_cast<Eigen::Index>(w)]);
  }
  return total;
}

AxiomReport check_weak_monotonicity(const AxiomSubject& subject, const std::vector<Lottery>& menu,
                                    const AxiomTolerances& tol, std::size_t cap) {
  AxiomReport r;
  r.axiom = "weak_monotonicity";
  const auto& u = subject.model().utility();
  for (std::size_t i = 0; i < menu.size(); ++i) {
    for (std::size_t j = 0; j < menu.size(); ++j) {
      if (i == j) continue;
      const Lottery& p = menu[i];
      const Lottery& q = menu[j];
      ++r.cases;
      PlausibleRealizations stream(p, q, subject.model().actions(), cap);
      double worst = std::numeric_limits<double>::infinity();
      stream.for_each([&](const OutcomeVector& x) {
        worst = std::min(worst, eu_at(p, x, u) - eu_at(q, x, u));
        return worst >= -tol.band;
      });
      if (worst < -tol.band) continue;
      const bool strict = worst >= tol.strict_premise;
      if (judge(r, subject, tol, p, q, strict, {{"p", p}, {"q", q}})) return r;
    }
  }
  return r;
}

AxiomReport check_simple_monotonicity(const AxiomSubject& subject,
                                      const std::vector<std::pair<std::string, std::string>>& action_pairs,
                                      const AxiomTolerances& tol) {
  AxiomReport r;
  r.axiom = "simple_monotonicity";
  const auto& model = subject.model();
  for (const auto& [a, b] : action_pairs) {
    ++r.cases;
    const Eigen::VectorXd pa = model.actions().payoffs(a);
    const Eigen::VectorXd pb = model.actions().payoffs(b);
    for (int flip = 0; flip < 2; ++flip) {
      const auto& hi_id = flip ? b : a;
      const auto& lo_id = flip ? a : b;
      const Eigen::VectorXd& hi = flip ? pb : pa;
      const Eigen::VectorXd& lo = flip ? pa : pb;
      double worst = std::numeric_limits<double>::infinity();
      for (Eigen::Index w = 0; w < hi.size(); ++w) {
        worst = std::min(worst, model.utility()(hi[w]) - model.utility()(lo[w]));
      }
      if (worst < -tol.band) continue;
      const Lottery ph = Lottery::degenerate(Profile{hi_id});
      const Lottery pl = Lottery::degenerate(Profile{lo_id});
      if (judge(r, subject, tol, ph, pl, worst >= tol.strict_premise, {{"a", ph}, {"b", pl}})) return r;
      break;
    }
  }
  return r;
}

AxiomReport check_nui(const AxiomSubject& subject, const std::vector<Lottery>& menu,
                      const std::vector<double>& alphas, const std::vector<Lottery>& r_menu,
                      const AxiomTolerances& tol) {
  AxiomReport r;
  r.axiom = "nui";
  for (const auto& p : menu) {
    for (const auto& q : menu) {
      if (p == q || !q.over_actions()) continue;
      ++r.cases;
      if (subject.value(p) < subject.value(q) - tol.band) continue;
      for (const auto& mixer : r_menu) {
        for (double a : alphas) {
          if (judge(r, subject, tol, mix(p, mixer, a), mix(q, mixer, a), false,
                    {{"p", p}, {"q", q}, {"r", mixer}}, a)) {
            return r;
          }
        }
      }
    }
  }
  return r;
}

AxiomReport check_independence(const AxiomSubject& subject, const std::vector<Lottery>& menu,
                               const std::vector<double>& alphas, const AxiomTolerances& tol) {
  AxiomReport r;
  r.axiom = "independence";
  for (const auto& p : menu) {
    for (const auto& q : menu) {
      if (p == q) continue;
      ++r.cases;
      if (subject.value(p) < subject.value(q) - tol.band) continue;
      for (const auto& mixer : menu) {
        for (double a : alphas) {
          if (judge(r, subject, tol, mix(p, mixer, a), mix(q, mixer, a), false,
                    {{"p", p}, {"q", q}, {"r", mixer}}, a)) {
            return r;
          }
        }
      }
    }
  }
  return r;
}

AxiomReport check_complexity_aversion(const AxiomSubject& subject,
                                      const std::vector<std::pair<Lottery, Lottery>>& pairs,
                                      const AxiomTolerances& tol) {
  AxiomReport r;
  r.axiom = "complexity_aversion";
  const std::size_t k = subject.model().space().size();
  for (const auto& [p, q] : pairs) {
    if (!p.over_actions()) throw DomainError("complexity aversion needs p over single actions");
    ++r.cases;
    bool premise = true;
    for (std::size_t w = 0; w < k && premise; ++w) {
      premise = subject.state_utility(p, w) >= subject.state_utility(q, w) - tol.band;
    }
    if (!premise) continue;
    if (judge(r, subject, tol, p, q, false, {{"p", p}, {"q", q}})) return r;
  }
  return r;
}

AxiomReport check_complexity_aversion(const AxiomSubject& subject, const std::vector<Lottery>& menu,
                                      const AxiomTolerances& tol) {
  std::vector<std::pair<Lottery, Lottery>> pairs;
  for (const auto& p : menu) {
    if (!p.over_actions()) continue;
    for (const auto& q : menu) {
      if (!(p == q)) pairs.emplace_back(p, q);
    }
  }
  return check_complexity_aversion(subject, pairs, tol);
}

namespace {

struct Bet {
  double lo;
  double hi;
  std::string cls;
};

Bet bet_of(const ActionTable& actions, const std::string& id) {
  auto cls = actions.class_of(id);
  if (!actions.contains(id) || !cls) throw DomainError("bet '" + id + "' is not a declared action");
  const auto range = actions.range(id);
  if (range.size() != 2) throw DomainError("bet '" + id + "' does not take exactly two values");
  return Bet{range[0], range[1], *cls};
}

Lottery product_lottery(const Bet& b1, double p1, const Bet& b2, double p2) {
  std::vector<Lottery::Atom> atoms;
  auto add = [&](double x, double m) {
    if (m > 0.0) atoms.emplace_back(Profile{constant_action_id(x)}, m);
  };
  add(b1.hi + b2.hi, p1 * p2);
  add(b1.hi + b2.lo, p1 * (1.0 - p2));
  add(b1.lo + b2.hi, (1.0 - p1) * p2);
  add(b1.lo + b2.lo, (1.0 - p1) * (1.0 - p2));
  return Lottery(std::move(atoms));
}

}  // namespace

AxiomReport check_default_to_independence(
    const AxiomSubject& subject, const std::vector<std::pair<std::string, std::string>>& bet_pairs,
    const std::vector<double>& alphas, const AxiomTolerances& tol) {
  AxiomReport r;
  r.axiom = "default_to_independence";
  const auto& model = subject.model();
  const auto& u = model.utility();

  std::vector<std::pair<Bet, Bet>> bets;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& [a, b] : bet_pairs) {
    Bet x = bet_of(model.actions(), a);
    Bet y = bet_of(model.actions(), b);
    if (x.cls == y.cls) throw DomainError("bets '" + a + "' and '" + b + "' share a class");
    lo = std::min({lo, x.lo, y.lo, x.lo + y.lo});
    hi = std::max({hi, x.hi, y.hi, x.hi + y.hi});
    bets.emplace_back(x, y);
  }
  if (bets.empty()) return r;
  if (!is_concave_on(u, lo, hi)) throw DomainError("utility index is not concave on the payoff hull");

  auto prob = [&](const std::string& id, const Bet& bet) {
    const double v = subject.value(Lottery::degenerate(Profile{id}));
    return std::clamp((v - u(bet.lo)) / (u(bet.hi) - u(bet.lo)), 0.0, 1.0);
  };

  std::vector<Lottery> products;
  std::vector<Lottery> joints;
  for (std::size_t i = 0; i < bets.size(); ++i) {
    const auto& [a, b] = bet_pairs[i];
    products.push_back(product_lottery(bets[i].first, prob(a, bets[i].first), bets[i].second,
                                       prob(b, bets[i].second)));
    joints.push_back(Lottery::degenerate(Profile{a, b}));
  }

  for (std::size_t i = 0; i < bets.size(); ++i) {
    ++r.cases;
    if (judge(r, subject, tol, products[i], joints[i], false,
              {{"product", products[i]}, {"joint", joints[i]}})) {
      return r;
    }
  }
  const bool all_pairs = bets.size() <= 16;
  for (std::size_t i = 0; i < bets.size(); ++i) {
    const std::size_t last = all_pairs ? bets.size() : std::min(bets.size(), i + 2);
    for (std::size_t j = i + 1; j < last; ++j) {
      for (double a : alphas) {
        ++r.cases;
        if (judge(r, subject, tol, mix(products[i], products[j], a), mix(joints[i], joints[j], a), false,
                  {{"product_1", products[i]},
                   {"joint_1", joints[i]},
                   {"product_2", products[j]},
                   {"joint_2", joints[j]}},
                  a)) {
          return r;
        }
      }
    }
  }
  return r;
}

AxiomReport check_understanding(const AxiomSubject& subject, const std::vector<std::string>& actions,
                                const std::vector<Lottery>& menu, const AxiomTolerances& tol,
                                std::size_t cap) {
  AxiomReport r;
  r.axiom = "understanding";
  const auto& model = subject.model();
  const auto& table = model.actions();
  const auto& u = model.utility();
  std::set<std::string, std::less<>> synced;
  for (const auto& id : actions) {
    if (!table.contains(id) || !table.class_of(id)) {
      throw DomainError("understanding set names '" + id + "', which is not a declared action");
    }
    synced.insert(id);
  }
  const std::size_t k = model.space().size();

  for (std::size_t i = 0; i < menu.size(); ++i) {
    for (std::size_t j = 0; j < menu.size(); ++j) {
      if (i == j) continue;
      const Lottery& p = menu[i];
      const Lottery& q = menu[j];
      ++r.cases;
      std::set<std::string> ids;
      for (const auto& id : p.action_ids()) ids.insert(id);
      for (const auto& id : q.action_ids()) ids.insert(id);
      std::vector<std::string> free_ids;
      std::vector<std::string> fixed_ids;
      for (const auto& id : ids) (synced.count(id) ? fixed_ids : free_ids).push_back(id);
      std::vector<std::vector<double>> ranges;
      long double count = static_cast<long double>(k);
      for (const auto& id : free_ids) {
        ranges.push_back(table.range(id));
        count *= static_cast<long double>(ranges.back().size());
      }
      if (count > static_cast<long double>(cap)) {
        throw ResourceError("synchronous realization count exceeds the cap",
                            static_cast<std::size_t>(std::min<long double>(count, 1e18L)));
      }
      double worst = std::numeric_limits<double>::infinity();
      OutcomeVector x;
      for (std::size_t w = 0; w < k && worst >= -tol.band; ++w) {
        for (const auto& id : fixed_ids) x[id] = table.payoffs(id)[static_cast<Eigen::Index>(w)];
        std::vector<std::size_t> pos(free_ids.size(), 0);
        while (true) {
          for (std::size_t t = 0; t < free_ids.size(); ++t) x[free_ids[t]] = ranges[t][pos[t]];
          worst = std::min(worst, eu_at(p, x, u) - eu_at(q, x, u));
          if (worst < -tol.band) break;
          std::size_t t = free_ids.size();
          while (t > 0 && ++pos[t - 1] == ranges[t - 1].size()) pos[--t] = 0;
          if (t == 0) break;
        }
      }
      if (worst < -tol.band) continue;
      if (judge(r, subject, tol, p, q, worst >= tol.strict_premise, {{"p", p}, {"q", q}})) return r;
    }
  }
  return r;
}

AxiomReport check_understanding(const AxiomSubject& subject, const std::string& class_id,
                                const std::vector<Lottery>& menu, const AxiomTolerances& tol,
                                std::size_t cap) {
  subject.model().index().class_position(class_id);
  std::vector<std::string> members;
  for (const auto& a : subject.model().actions().declared()) {
    if (a.class_id == class_id) members.push_back(a.id);
  }
  return check_understanding(subject, members, menu, tol, cap);
}

bool reverify(const AxiomReport& report, const AxiomSubject& subject, double tol,
              const AxiomTolerances& tolerances) {
  if (report.holds() || !report.witness) return false;
  const Witness& w = *report.witness;
  const double vp = subject.evaluate(w.preferred);
  const double vo = subject.evaluate(w.other);
  if (std::abs(vp - w.preferred_value) > tol || std::abs(vo - w.other_value) > tol) return false;
  const double gap = vp - vo;
  return w.strict ? !(gap > tolerances.band) : gap < -tolerances.conclusion;
}

}  // namespace ccr
