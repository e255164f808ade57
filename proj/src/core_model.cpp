#include "ccr/core_model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

#include "ccr/errors.hpp"

namespace ccr {

// ---------------------------------------------------------------- StateSpace

StateSpace::StateSpace(std::vector<std::string> labels, Eigen::VectorXd mu)
    : labels_(std::move(labels)), mu_(std::move(mu)) {
  if (labels_.empty()) throw DomainError("state space must contain at least one state");
  if (static_cast<std::size_t>(mu_.size()) != labels_.size()) {
    throw DomainError("mu has " + std::to_string(mu_.size()) + " entries for " +
                      std::to_string(labels_.size()) + " states");
  }
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (labels_[i] == labels_[j]) throw DomainError("duplicate state label '" + labels_[i] + "'");
    }
  }
  for (Eigen::Index i = 0; i < mu_.size(); ++i) {
    if (!(mu_[i] >= 0.0) || !std::isfinite(mu_[i])) throw DomainError("mu entries must be >= 0");
  }
  if (std::abs(mu_.sum() - 1.0) > kProbabilitySumTolerance) {
    throw DomainError("mu sum is not 1");
  }
}

std::size_t StateSpace::index_of(std::string_view label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) throw DomainError("unknown state '" + std::string(label) + "'");
  return static_cast<std::size_t>(it - labels_.begin());
}

// ------------------------------------------------------------ constant ids

std::string constant_action_id(double value) {
  if (!std::isfinite(value)) throw DomainError("constant action must be finite");
  if (value == 0.0) value = 0.0;  // fold -0
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return "#" + std::string(buf, res.ptr);
}

std::optional<double> parse_constant_action_id(std::string_view id) {
  if (id.size() < 2 || id.front() != '#') return std::nullopt;
  double v = 0.0;
  auto res = std::from_chars(id.data() + 1, id.data() + id.size(), v);
  if (res.ec != std::errc{} || res.ptr != id.data() + id.size() || !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

// ------------------------------------------------------------- ActionTable

ActionTable::ActionTable(std::size_t num_states, std::vector<Action> actions)
    : num_states_(num_states), actions_(std::move(actions)) {
  for (std::size_t i = 0; i < actions_.size(); ++i) {
    const Action& a = actions_[i];
    if (a.id.empty() || a.id.front() == '#') {
      throw DomainError("invalid action id '" + a.id + "'");
    }
    if (static_cast<std::size_t>(a.payoffs.size()) != num_states_) {
      throw DomainError("action '" + a.id + "' has " + std::to_string(a.payoffs.size()) +
                        " payoffs for " + std::to_string(num_states_) + " states");
    }
    if (!a.payoffs.allFinite()) throw DomainError("action '" + a.id + "' has non-finite payoffs");
    if (!by_id_.emplace(a.id, i).second) throw DomainError("duplicate action id '" + a.id + "'");
  }
}

const Action* ActionTable::find(std::string_view id) const {
  auto it = by_id_.find(id);
  return it == by_id_.end() ? nullptr : &actions_[it->second];
}

bool ActionTable::contains(std::string_view id) const {
  return find(id) != nullptr || parse_constant_action_id(id).has_value();
}

Eigen::VectorXd ActionTable::payoffs(std::string_view id) const {
  if (const Action* a = find(id)) return a->payoffs;
  if (auto c = parse_constant_action_id(id)) {
    return Eigen::VectorXd::Constant(static_cast<Eigen::Index>(num_states_), *c);
  }
  throw DomainError("undeclared action '" + std::string(id) + "'");
}

std::optional<std::string> ActionTable::class_of(std::string_view id) const {
  if (const Action* a = find(id)) return a->class_id;
  if (parse_constant_action_id(id)) return std::nullopt;
  throw DomainError("undeclared action '" + std::string(id) + "'");
}

std::vector<double> ActionTable::range(std::string_view id) const {
  const Eigen::VectorXd v = payoffs(id);
  std::vector<double> r(v.data(), v.data() + v.size());
  std::sort(r.begin(), r.end());
  r.erase(std::unique(r.begin(), r.end()), r.end());
  return r;
}

// ----------------------------------------------------------------- Profile

Profile::Profile(std::initializer_list<std::string> ids)
    : Profile(std::vector<std::string>(ids)) {}

Profile::Profile(std::vector<std::string> ids) {
  if (ids.empty()) throw DomainError("a profile must contain at least one action");
  std::sort(ids.begin(), ids.end());
  for (auto& id : ids) {
    if (id.empty()) throw DomainError("empty action id in profile");
    if (!entries_.empty() && entries_.back().first == id) {
      ++entries_.back().second;
    } else {
      entries_.emplace_back(std::move(id), 1);
    }
  }
}

std::size_t Profile::size() const noexcept {
  std::size_t n = 0;
  for (const auto& e : entries_) n += static_cast<std::size_t>(e.second);
  return n;
}

std::vector<std::string> Profile::expanded() const {
  std::vector<std::string> out;
  for (const auto& [id, count] : entries_) out.insert(out.end(), static_cast<std::size_t>(count), id);
  return out;
}

std::string Profile::to_string() const {
  std::string s = "<";
  bool first = true;
  for (const auto& id : expanded()) {
    if (!first) s += ",";
    first = false;
    s += id;
  }
  return s + ">";
}

// ----------------------------------------------------------------- Lottery

Lottery::Lottery(std::vector<Atom> support) {
  if (support.empty()) throw DomainError("a lottery needs a nonempty support");
  std::stable_sort(support.begin(), support.end(),
                   [](const Atom& a, const Atom& b) { return a.first < b.first; });
  double total = 0.0;
  for (auto& atom : support) {
    if (!(atom.second > 0.0) || !std::isfinite(atom.second)) {
      throw DomainError("lottery probabilities must be > 0");
    }
    total += atom.second;
    if (!support_.empty() && support_.back().first == atom.first) {
      support_.back().second += atom.second;
    } else {
      support_.push_back(std::move(atom));
    }
  }
  if (std::abs(total - 1.0) > kProbabilitySumTolerance) {
    throw DomainError("lottery probabilities do not sum to 1");
  }
}

Lottery Lottery::degenerate(Profile profile) { return Lottery({{std::move(profile), 1.0}}); }

bool Lottery::over_actions() const noexcept {
  return std::all_of(support_.begin(), support_.end(),
                     [](const Atom& a) { return a.first.is_single(); });
}

double Lottery::mass_of(const Profile& profile) const {
  for (const auto& [f, m] : support_) {
    if (f == profile) return m;
  }
  return 0.0;
}

std::vector<std::string> Lottery::action_ids() const {
  std::vector<std::string> ids;
  for (const auto& [f, m] : support_) {
    for (const auto& e : f.entries()) ids.push_back(e.first);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

std::string Lottery::to_string() const {
  std::ostringstream os;
  os.precision(12);
  os << "{";
  for (std::size_t i = 0; i < support_.size(); ++i) {
    if (i) os << ", ";
    os << support_[i].first.to_string() << ":" << support_[i].second;
  }
  os << "}";
  return os.str();
}

Lottery mix(const Lottery& p, const Lottery& q, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw DomainError("mixture weight must lie in [0,1]");
  }
  std::vector<Lottery::Atom> atoms;
  if (alpha > 0.0) {
    for (const auto& [f, m] : p.support()) atoms.emplace_back(f, alpha * m);
  }
  if (alpha < 1.0) {
    for (const auto& [f, m] : q.support()) atoms.emplace_back(f, (1.0 - alpha) * m);
  }
  return Lottery(std::move(atoms));
}

// --------------------------------------------------- plausible realizations

PlausibleRealizations::PlausibleRealizations(const Lottery& p, const Lottery& q,
                                             const ActionTable& actions, std::size_t cap) {
  ids_ = p.action_ids();
  auto more = q.action_ids();
  ids_.insert(ids_.end(), more.begin(), more.end());
  std::sort(ids_.begin(), ids_.end());
  ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());

  long double exact = 1.0L;
  for (const auto& id : ids_) {
    ranges_.push_back(actions.range(id));
    exact *= static_cast<long double>(ranges_.back().size());
  }
  if (exact > static_cast<long double>(cap)) {
    std::ostringstream os;
    os.precision(20);
    os << "plausible realization count " << exact << " exceeds cap " << cap;
    throw ResourceError(os.str(), exact > 1e19L ? static_cast<std::size_t>(-1)
                                                : static_cast<std::size_t>(exact));
  }
  count_ = static_cast<std::size_t>(exact);
}

void PlausibleRealizations::for_each(const std::function<bool(const OutcomeVector&)>& visit) const {
  std::vector<std::size_t> digit(ids_.size(), 0);
  OutcomeVector x;
  for (std::size_t i = 0; i < ids_.size(); ++i) x[ids_[i]] = ranges_[i][0];
  for (std::size_t n = 0; n < count_; ++n) {
    if (!visit(x)) return;
    for (std::size_t k = ids_.size(); k-- > 0;) {
      if (++digit[k] < ranges_[k].size()) {
        x[ids_[k]] = ranges_[k][digit[k]];
        break;
      }
      digit[k] = 0;
      x[ids_[k]] = ranges_[k][0];
    }
  }
}

std::vector<OutcomeVector> PlausibleRealizations::collect() const {
  std::vector<OutcomeVector> out;
  out.reserve(count_);
  for_each([&](const OutcomeVector& x) {
    out.push_back(x);
    return true;
  });
  return out;
}

std::vector<OutcomeVector> plausible_realizations(const Lottery& p, const Lottery& q,
                                                  const ActionTable& actions, std::size_t cap) {
  return PlausibleRealizations(p, q, actions, cap).collect();
}

Lottery induced_lottery(const Lottery& p, const OutcomeVector& x) {
  std::vector<Lottery::Atom> atoms;
  atoms.reserve(p.support().size());
  for (const auto& [profile, mass] : p.support()) {
    const double total = profile_sum(profile, [&](const std::string& id) {
      auto it = x.find(id);
      if (it == x.end()) throw DomainError("realization has no component for action '" + id + "'");
      return it->second;
    });
    atoms.emplace_back(Profile{constant_action_id(total)}, mass);
  }
  return Lottery(std::move(atoms));
}

}  // namespace ccr
