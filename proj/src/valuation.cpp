#include "ccr/valuation.hpp"

#include <cmath>

#include "ccr/errors.hpp"

namespace ccr {

CcrModel::CcrModel(StateSpace space, ActionTable actions, UtilityIndex u, PriorSet prior_set)
    : space_(std::move(space)),
      actions_(std::move(actions)),
      u_(std::move(u)),
      prior_set_(std::move(prior_set)) {
  if (actions_.num_states() != space_.size()) {
    throw DomainError("action table and state space disagree on the number of states");
  }
  if (index().states_per_class() != space_.size()) {
    throw DomainError("prior set index and state space disagree on the number of states");
  }
  if ((prior_set_.mu() - space_.mu()).cwiseAbs().maxCoeff() > kProbabilitySumTolerance) {
    throw DomainError("prior set marginal differs from the state space measure");
  }
  for (const auto& a : actions_.declared()) {
    index().class_position(a.class_id);  // throws for unknown classes
  }
}

std::size_t CcrModel::coordinate_of(std::string_view action_id) const {
  auto cls = actions_.class_of(action_id);
  return cls ? index().class_position(*cls) : 0;
}

CcrModel CcrModel::with_prior_set(PriorSet prior_set) const {
  return CcrModel(space_, actions_, u_, std::move(prior_set));
}

CcrModel CcrModel::with_utility(UtilityIndex u) const {
  return CcrModel(space_, actions_, std::move(u), prior_set_);
}

namespace {

struct ResolvedProfile {
  double mass;
  // Expanded in canonical order: (coordinate, payoffs).
  std::vector<std::pair<std::size_t, Eigen::VectorXd>> terms;
};

std::vector<ResolvedProfile> resolve(const Lottery& p, const CcrModel& model) {
  std::vector<ResolvedProfile> out;
  for (const auto& [profile, mass] : p.support()) {
    ResolvedProfile r{mass, {}};
    for (const auto& [id, count] : profile.entries()) {
      if (!model.actions().contains(id)) throw DomainError("undeclared action '" + id + "'");
      const std::size_t coord = model.coordinate_of(id);
      const Eigen::VectorXd pay = model.actions().payoffs(id);
      for (int i = 0; i < count; ++i) r.terms.emplace_back(coord, pay);
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace

UtilityAct lift(const Lottery& p, const CcrModel& model) {
  const JointIndex& index = model.index();
  const auto profiles = resolve(p, model);
  Eigen::VectorXd f = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(index.size()));
  for (std::size_t j = 0; j < index.size(); ++j) {
    double acc = 0.0;
    for (const auto& rp : profiles) {
      double outcome = 0.0;
      for (const auto& [coord, pay] : rp.terms) {
        outcome += pay[static_cast<Eigen::Index>(index.state_of(j, coord))];
      }
      acc += rp.mass * model.utility()(outcome);
    }
    f[static_cast<Eigen::Index>(j)] = acc;
  }
  return UtilityAct{index, std::move(f)};
}

Valuation value(const Lottery& p, const CcrModel& model) {
  auto r = min_over_prior_set(lift(p, model), model.prior_set());
  return Valuation{r.value, std::move(r.argmin)};
}

Preference compare_values(double vp, double vq, double band) {
  if (vp - vq > band) return Preference::kStrictlyFirst;
  if (vq - vp > band) return Preference::kStrictlySecond;
  return Preference::kIndifferent;
}

Preference prefer(const Lottery& p, const Lottery& q, const CcrModel& model, double band) {
  return compare_values(value(p, model).value, value(q, model).value, band);
}

double certainty_equivalent(const Lottery& p, const CcrModel& model) {
  return model.utility().inverse(value(p, model).value);
}

Eigen::VectorXd statewise_payoff(const Profile& profile, const ActionTable& actions) {
  Eigen::VectorXd total = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(actions.num_states()));
  std::vector<Eigen::VectorXd> pays;
  for (const auto& e : profile.entries()) pays.push_back(actions.payoffs(e.first));
  for (Eigen::Index w = 0; w < total.size(); ++w) {
    std::size_t i = 0;
    total[w] = profile_sum(profile, [&](const std::string&) { return pays[i++][w]; });
  }
  return total;
}

std::optional<std::pair<Profile, Profile>> misperception_witness(const CcrModel& model,
                                                                 const std::vector<Profile>& menu,
                                                                 double band) {
  std::vector<Eigen::VectorXd> sums;
  std::vector<std::optional<double>> values(menu.size());
  for (const auto& f : menu) sums.push_back(statewise_payoff(f, model.actions()));
  auto v = [&](std::size_t i) {
    if (!values[i]) values[i] = value(Lottery::degenerate(menu[i]), model).value;
    return *values[i];
  };
  for (std::size_t i = 0; i < menu.size(); ++i) {
    for (std::size_t j = i + 1; j < menu.size(); ++j) {
      if (sums[i] != sums[j]) continue;
      if (compare_values(v(i), v(j), band) != Preference::kIndifferent) {
        return std::make_pair(menu[i], menu[j]);
      }
    }
  }
  return std::nullopt;
}

double seu_value(const Lottery& p, const CcrModel& model) {
  const auto& mu = model.space().mu();
  double total = 0.0;
  for (Eigen::Index w = 0; w < mu.size(); ++w) {
    double eu = 0.0;
    for (const auto& [profile, mass] : p.support()) {
      eu += mass * model.utility()(statewise_payoff(profile, model.actions())[w]);
    }
    total += mu[w] * eu;
  }
  return total;
}

}  // namespace ccr
