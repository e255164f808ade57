#include "ccr/scenario.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "ccr/errors.hpp"
#include "ccr/format.hpp"
#include "ccr/prior_engine.hpp"

namespace ccr {

using nlohmann::json;

std::string shortest_decimal(double x) {
  if (x == 0.0) x = 0.0;
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

const Lottery& ScenarioDocument::lottery(const std::string& wanted) const {
  for (const auto& l : lotteries) {
    if (l.name == wanted) return l.lottery;
  }
  throw ValidationError("unknown lottery '" + wanted + "'");
}

std::vector<const QueryBlock*> ScenarioDocument::queries_for(const std::string& command) const {
  std::vector<const QueryBlock*> out;
  for (const auto& q : queries) {
    if (q.command == command) out.push_back(&q);
  }
  return out;
}

std::string joint_state_label(const CcrModel& model, std::size_t linear) {
  const auto states = model.index().decode(linear);
  std::string s = "(";
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (i) s += ",";
    s += model.space().labels()[states[i]];
  }
  return s + ")";
}

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& msg) {
  throw ValidationError(field + ": " + msg);
}

const json& need(const json& j, const std::string& key, const std::string& field) {
  if (!j.is_object() || !j.contains(key)) fail(field.empty() ? key : field + "." + key, "missing");
  return j.at(key);
}

std::string join(const std::string& field, const std::string& key) {
  return field.empty() ? key : field + "." + key;
}

std::string at_index(const std::string& field, std::size_t i) {
  return field + "[" + std::to_string(i) + "]";
}

double decimal(const json& j, const std::string& field) {
  if (!j.is_string()) fail(field, "expected a decimal string");
  const std::string& s = j.get_ref<const std::string&>();
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
    fail(field, "'" + s + "' is not a decimal number");
  }
  return v;
}

double number(const json& j, const std::string& field) {
  if (!j.is_number()) fail(field, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(field, "must be finite");
  return v;
}

std::string text(const json& j, const std::string& field) {
  if (!j.is_string()) fail(field, "expected a string");
  return j.get<std::string>();
}

double opt_number(const json& j, const std::string& key, double fallback, const std::string& field) {
  return j.contains(key) ? number(j.at(key), join(field, key)) : fallback;
}

UtilityIndex parse_utility(const json& j, const std::string& field) {
  const std::string family = text(need(j, "family", field), join(field, "family"));
  UtilityIndex u = UtilityIndex::linear();
  try {
    if (family == "linear") {
      u = UtilityIndex::linear();
    } else if (family == "cara") {
      u = UtilityIndex::cara(number(need(j, "alpha", field), join(field, "alpha")));
    } else if (family == "crra") {
      u = UtilityIndex::crra(number(need(j, "gamma", field), join(field, "gamma")),
                             opt_number(j, "shift", 0.0, field));
    } else if (family == "log") {
      u = UtilityIndex::log(opt_number(j, "shift", 0.0, field));
    } else if (family == "piecewise_linear") {
      const json& ks = need(j, "knots", field);
      if (!ks.is_array()) fail(join(field, "knots"), "expected an array of [x, u] pairs");
      std::vector<UtilityIndex::Knot> knots;
      for (std::size_t i = 0; i < ks.size(); ++i) {
        const std::string f = at_index(join(field, "knots"), i);
        if (!ks[i].is_array() || ks[i].size() != 2) fail(f, "expected [x, u]");
        knots.emplace_back(number(ks[i][0], f), number(ks[i][1], f));
      }
      u = UtilityIndex::piecewise_linear(std::move(knots));
    } else {
      fail(join(field, "family"), "unknown utility family '" + family + "'");
    }
    const double scale = opt_number(j, "scale", 1.0, field);
    const double offset = opt_number(j, "offset", 0.0, field);
    if (scale != 1.0 || offset != 0.0) u = u.affine(scale, offset);
  } catch (const DomainError& e) {
    fail(field, e.what());
  }
  return u;
}

json utility_json(const UtilityIndex& u) {
  json j;
  switch (u.family()) {
    case UtilityIndex::Family::kLinear:
      j["family"] = "linear";
      break;
    case UtilityIndex::Family::kCara:
      j["family"] = "cara";
      j["alpha"] = u.alpha();
      break;
    case UtilityIndex::Family::kCrra:
      j["family"] = "crra";
      j["gamma"] = u.gamma();
      j["shift"] = u.shift();
      break;
    case UtilityIndex::Family::kLog:
      j["family"] = "log";
      j["shift"] = u.shift();
      break;
    case UtilityIndex::Family::kPiecewiseLinear: {
      j["family"] = "piecewise_linear";
      json ks = json::array();
      for (const auto& [x, v] : u.knots()) ks.push_back({x, v});
      j["knots"] = ks;
      break;
    }
  }
  if (u.scale() != 1.0 || u.offset() != 0.0) {
    j["scale"] = u.scale();
    j["offset"] = u.offset();
  }
  return j;
}

Eigen::VectorXd parse_table(const json& j, const std::map<std::string, std::size_t>& labels, std::size_t n,
                            const std::string& field, bool as_decimal) {
  if (!j.is_object()) fail(field, "expected an object keyed by joint state, e.g. \"(A,B)\"");
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  for (const auto& [key, val] : j.items()) {
    auto it = labels.find(key);
    if (it == labels.end()) fail(join(field, key), "unknown joint state");
    v[static_cast<Eigen::Index>(it->second)] = as_decimal ? decimal(val, join(field, key)) : number(val, join(field, key));
  }
  return v;
}

json table_json(const CcrModel& model, const Eigen::VectorXd& v, bool as_decimal) {
  json j = json::object();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (v[i] == 0.0) continue;
    const auto label = joint_state_label(model, static_cast<std::size_t>(i));
    if (as_decimal) {
      j[label] = shortest_decimal(v[i]);
    } else {
      j[label] = v[i];
    }
  }
  return j;
}

const char* sense_text(Sense s) {
  switch (s) {
    case Sense::kLessEqual:
      return "<=";
    case Sense::kEqual:
      return "=";
    case Sense::kGreaterEqual:
      return ">=";
  }
  return "?";
}

PriorSet parse_prior(const json& j, const JointIndex& index, const StateSpace& space,
                     const std::map<std::string, std::size_t>& labels) {
  const std::string field = "prior_set";
  const std::string kind = text(need(j, "kind", field), "prior_set.kind");
  const std::size_t n = index.size();
  auto coupling = [&](const json& c, const std::string& f) {
    if (c.is_string()) {
      const std::string word = c.get<std::string>();
      if (word == "diagonal") return diagonal_pushforward(space, index);
      if (word == "product") return product_measure(space, index);
      fail(f, "expected a coupling table, \"diagonal\" or \"product\"");
    }
    Eigen::VectorXd mass = parse_table(c, labels, n, f, true);
    try {
      Coupling cp(index, mass);
      if (cp.marginal_error(space.mu()) > kFeasibilityTolerance) fail(f, "marginals differ from mu");
      return cp;
    } catch (const DomainError& e) {
      fail(f, e.what());
    }
  };
  try {
    if (kind == "frechet") return PriorSet::frechet(index, space.mu());
    if (kind == "singleton") {
      return PriorSet::singleton(space.mu(), coupling(need(j, "coupling", field), "prior_set.coupling"));
    }
    if (kind == "hull") {
      const json& list = need(j, "couplings", field);
      if (!list.is_array() || list.empty()) fail("prior_set.couplings", "expected a nonempty array");
      std::vector<Coupling> cs;
      for (std::size_t i = 0; i < list.size(); ++i) cs.push_back(coupling(list[i], at_index("prior_set.couplings", i)));
      return PriorSet::hull(space.mu(), std::move(cs));
    }
    if (kind == "polytope") {
      const json& rows = need(j, "constraints", field);
      if (!rows.is_array()) fail("prior_set.constraints", "expected an array");
      std::vector<LinearConstraint> cons;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const std::string f = at_index("prior_set.constraints", i);
        LinearConstraint c;
        c.coeffs = parse_table(need(rows[i], "coeffs", f), labels, n, join(f, "coeffs"), false);
        const std::string s = text(need(rows[i], "sense", f), join(f, "sense"));
        if (s == "<=") {
          c.sense = Sense::kLessEqual;
        } else if (s == ">=") {
          c.sense = Sense::kGreaterEqual;
        } else if (s == "=") {
          c.sense = Sense::kEqual;
        } else {
          fail(join(f, "sense"), "expected \"<=\", \"=\" or \">=\"");
        }
        c.rhs = decimal(need(rows[i], "rhs", f), join(f, "rhs"));
        cons.push_back(std::move(c));
      }
      try {
        return PriorSet::polytope(index, space.mu(), std::move(cons));
      } catch (const InfeasibleError& e) {
        throw InfeasibleError(std::string("prior_set.constraints: ") + e.what(), e.irreducible());
      }
    }
  } catch (const DomainError& e) {
    fail(field, e.what());
  }
  fail("prior_set.kind", "unknown prior set kind '" + kind + "'");
}

json prior_json(const CcrModel& model) {
  const PriorSet& set = model.prior_set();
  json j;
  j["kind"] = set.kind();
  if (const auto* s = std::get_if<PriorSet::Singleton>(&set.encoding())) {
    j["coupling"] = table_json(model, s->coupling.mass(), true);
  } else if (const auto* h = std::get_if<PriorSet::Hull>(&set.encoding())) {
    json list = json::array();
    for (const auto& c : h->couplings) list.push_back(table_json(model, c.mass(), true));
    j["couplings"] = list;
  } else if (const auto* p = std::get_if<PriorSet::Polytope>(&set.encoding())) {
    json rows = json::array();
    for (const auto& c : p->constraints) {
      rows.push_back({{"coeffs", table_json(model, c.coeffs, false)},
                      {"sense", sense_text(c.sense)},
                      {"rhs", shortest_decimal(c.rhs)}});
    }
    j["constraints"] = rows;
  }
  return j;
}

Profile parse_profile(const json& j, const ActionTable& table, const std::string& field) {
  if (!j.is_array() || j.empty()) fail(field, "expected a nonempty array of action ids or constants");
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string f = at_index(field, i);
    if (j[i].is_number()) {
      ids.push_back(constant_action_id(number(j[i], f)));
    } else {
      const std::string id = text(j[i], f);
      if (!table.contains(id)) fail(f, "unknown action '" + id + "'");
      ids.push_back(id);
    }
  }
  return Profile(std::move(ids));
}

json profile_json(const Profile& p) {
  json a = json::array();
  for (const auto& id : p.expanded()) {
    if (auto c = parse_constant_action_id(id)) {
      a.push_back(*c);
    } else {
      a.push_back(id);
    }
  }
  return a;
}

Economy parse_economy(const json& j) {
  const std::string f = "economy";
  Economy e;
  e.mu = decimal(need(j, "mu", f), "economy.mu");
  e.u = parse_utility(need(j, "utility", f), "economy.utility");
  e.r_lo = decimal(need(j, "r_lo", f), "economy.r_lo");
  e.r_hi = decimal(need(j, "r_hi", f), "economy.r_hi");
  e.a = number(need(j, "a", f), "economy.a");
  e.b = number(need(j, "b", f), "economy.b");
  e.c_star = number(need(j, "c_star", f), "economy.c_star");
  try {
    e.validate();
  } catch (const DomainError& err) {
    fail(f, err.what());
  }
  return e;
}

json economy_json(const Economy& e) {
  return {{"mu", shortest_decimal(e.mu)},   {"utility", utility_json(e.u)},
          {"r_lo", shortest_decimal(e.r_lo)}, {"r_hi", shortest_decimal(e.r_hi)},
          {"a", e.a},                        {"b", e.b},
          {"c_star", e.c_star}};
}

}  // namespace

ScenarioDocument from_json(const json& j) {
  if (!j.is_object()) fail("document", "expected a JSON object");
  ScenarioDocument doc;
  if (j.contains("version")) {
    if (!j["version"].is_number_integer() || j["version"].get<int>() != 1) fail("version", "unsupported version");
  }
  doc.name = j.contains("name") ? text(j["name"], "name") : "";
  doc.description = j.contains("description") ? text(j["description"], "description") : "";

  const bool has_model = j.contains("states") || j.contains("actions") || j.contains("prior_set");
  if (has_model) {
    const json& st = need(j, "states", "");
    const json& lab = need(st, "labels", "states");
    const json& muj = need(st, "mu", "states");
    if (!lab.is_array() || lab.empty()) fail("states.labels", "expected a nonempty array");
    if (!muj.is_array() || muj.size() != lab.size()) fail("states.mu", "expected one decimal string per state");
    std::vector<std::string> labels;
    Eigen::VectorXd mu(static_cast<Eigen::Index>(lab.size()));
    double sum = 0.0;
    for (std::size_t i = 0; i < lab.size(); ++i) {
      labels.push_back(text(lab[i], at_index("states.labels", i)));
      mu[static_cast<Eigen::Index>(i)] = decimal(muj[i], at_index("states.mu", i));
      sum += mu[static_cast<Eigen::Index>(i)];
    }
    if (std::abs(sum - 1.0) > kProbabilitySumTolerance) {
      fail("states.mu", "mu sum is " + format_number(sum) + ", expected 1");
    }
    std::optional<StateSpace> space;
    try {
      space.emplace(labels, mu);
    } catch (const DomainError& e) {
      fail("states", e.what());
    }
    const std::size_t k = labels.size();

    const UtilityIndex u = parse_utility(need(j, "utility", ""), "utility");

    const json& cl = need(j, "classes", "");
    if (!cl.is_array() || cl.empty()) fail("classes", "expected a nonempty array");
    std::vector<std::string> classes;
    for (std::size_t i = 0; i < cl.size(); ++i) classes.push_back(text(cl[i], at_index("classes", i)));
    std::optional<JointIndex> index;
    try {
      index.emplace(classes, k);
    } catch (const DomainError& e) {
      fail("classes", e.what());
    }

    const json& acts = need(j, "actions", "");
    if (!acts.is_array()) fail("actions", "expected an array");
    std::vector<Action> actions;
    for (std::size_t i = 0; i < acts.size(); ++i) {
      const std::string f = at_index("actions", i);
      Action a;
      a.id = text(need(acts[i], "id", f), join(f, "id"));
      a.class_id = text(need(acts[i], "class", f), join(f, "class"));
      if (std::find(classes.begin(), classes.end(), a.class_id) == classes.end()) {
        fail(join(f, "class"), "unknown class '" + a.class_id + "'");
      }
      const json& pay = need(acts[i], "payoffs", f);
      if (!pay.is_array() || pay.size() != k) fail(join(f, "payoffs"), "expected one payoff per state");
      a.payoffs.resize(static_cast<Eigen::Index>(k));
      for (std::size_t s = 0; s < k; ++s) {
        a.payoffs[static_cast<Eigen::Index>(s)] = number(pay[s], at_index(join(f, "payoffs"), s));
      }
      actions.push_back(std::move(a));
    }
    std::optional<ActionTable> table;
    try {
      table.emplace(k, std::move(actions));
    } catch (const DomainError& e) {
      fail("actions", e.what());
    }

    std::map<std::string, std::size_t> joint_labels;
    for (std::size_t i = 0; i < index->size(); ++i) {
      const auto states = index->decode(i);
      std::string s = "(";
      for (std::size_t c = 0; c < states.size(); ++c) s += (c ? "," : "") + labels[states[c]];
      joint_labels[s + ")"] = i;
    }
    PriorSet prior = parse_prior(need(j, "prior_set", ""), *index, *space, joint_labels);
    try {
      doc.model.emplace(*space, *table, u, std::move(prior));
    } catch (const DomainError& e) {
      fail("document", e.what());
    }

    if (j.contains("lotteries")) {
      const json& ls = j["lotteries"];
      if (!ls.is_array()) fail("lotteries", "expected an array");
      for (std::size_t i = 0; i < ls.size(); ++i) {
        const std::string f = at_index("lotteries", i);
        NamedLottery nl{text(need(ls[i], "name", f), join(f, "name")), Lottery::degenerate(Profile{"#0"})};
        for (const auto& other : doc.lotteries) {
          if (other.name == nl.name) fail(join(f, "name"), "duplicate lottery name '" + nl.name + "'");
        }
        const json& sup = need(ls[i], "support", f);
        if (!sup.is_array() || sup.empty()) fail(join(f, "support"), "expected a nonempty array");
        std::vector<Lottery::Atom> atoms;
        for (std::size_t a = 0; a < sup.size(); ++a) {
          const std::string fa = at_index(join(f, "support"), a);
          atoms.emplace_back(parse_profile(need(sup[a], "profile", fa), *table, join(fa, "profile")),
                             decimal(need(sup[a], "p", fa), join(fa, "p")));
        }
        try {
          nl.lottery = Lottery(std::move(atoms));
        } catch (const DomainError& e) {
          fail(join(f, "support"), e.what());
        }
        doc.lotteries.push_back(std::move(nl));
      }
    }
  } else if (j.contains("lotteries")) {
    fail("lotteries", "lotteries need states, classes, actions and a prior set");
  }

  if (j.contains("economy")) doc.economy = parse_economy(j["economy"]);
  if (!doc.model && !doc.economy) fail("document", "needs a decision model (states, ...) or an economy");

  if (j.contains("queries")) {
    const json& qs = j["queries"];
    if (!qs.is_array()) fail("queries", "expected an array");
    for (std::size_t i = 0; i < qs.size(); ++i) {
      const std::string f = at_index("queries", i);
      if (!qs[i].is_object()) fail(f, "expected an object");
      QueryBlock q{text(need(qs[i], "command", f), join(f, "command")), qs[i]};
      q.params.erase("command");
      doc.queries.push_back(std::move(q));
    }
  }
  return doc;
}

json to_json(const ScenarioDocument& doc) {
  json j;
  j["version"] = 1;
  if (!doc.name.empty()) j["name"] = doc.name;
  if (!doc.description.empty()) j["description"] = doc.description;
  if (doc.model) {
    const CcrModel& m = *doc.model;
    json mu = json::array();
    for (Eigen::Index i = 0; i < m.space().mu().size(); ++i) mu.push_back(shortest_decimal(m.space().mu()[i]));
    j["states"] = {{"labels", m.space().labels()}, {"mu", mu}};
    j["utility"] = utility_json(m.utility());
    j["classes"] = m.index().classes();
    json acts = json::array();
    for (const auto& a : m.actions().declared()) {
      json pay = json::array();
      for (Eigen::Index s = 0; s < a.payoffs.size(); ++s) pay.push_back(a.payoffs[s]);
      acts.push_back({{"id", a.id}, {"class", a.class_id}, {"payoffs", pay}});
    }
    j["actions"] = acts;
    j["prior_set"] = prior_json(m);
    json ls = json::array();
    for (const auto& nl : doc.lotteries) {
      json sup = json::array();
      for (const auto& [profile, mass] : nl.lottery.support()) {
        sup.push_back({{"profile", profile_json(profile)}, {"p", shortest_decimal(mass)}});
      }
      ls.push_back({{"name", nl.name}, {"support", sup}});
    }
    j["lotteries"] = ls;
  }
  if (doc.economy) j["economy"] = economy_json(*doc.economy);
  if (!doc.queries.empty()) {
    json qs = json::array();
    for (const auto& q : doc.queries) {
      json b = q.params;
      b["command"] = q.command;
      qs.push_back(b);
    }
    j["queries"] = qs;
  }
  return j;
}

ScenarioDocument parse_scenario(const std::string& content) {
  json j;
  try {
    j = json::parse(content);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    std::size_t column = 1;
    const std::size_t end = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, content.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (content[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ValidationError("parse error at line " + std::to_string(line) + ", column " + std::to_string(column) +
                          ": " + e.what());
  }
  return from_json(j);
}

ScenarioDocument load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open scenario file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

std::string scenario_hash(const ScenarioDocument& doc) {
  const std::string dump = to_json(doc).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : dump) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace ccr
