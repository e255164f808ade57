#include "ccr/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "ccr/asset_pricing.hpp"
#include "ccr/axiom_lab.hpp"
#include "ccr/format.hpp"
#include "ccr/menu_generator.hpp"
#include "ccr/prior_engine.hpp"
#include "ccr/valuation.hpp"

namespace ccr {

using ojson = nlohmann::ordered_json;
using nlohmann::json;

Format parse_format(const std::string& name) {
  if (name == "json") return Format::kJson;
  if (name == "csv") return Format::kCsv;
  if (name == "text") return Format::kText;
  throw ValidationError("--format: unknown format '" + name + "'");
}

double round12(double x) {
  if (!std::isfinite(x)) return x;
  return std::strtod(format_number(x).c_str(), nullptr);
}

namespace {

ojson num(double x) {
  if (!std::isfinite(x)) return nullptr;
  return round12(x);
}

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

ojson header(const std::string& command, const ScenarioDocument& doc) {
  ojson b;
  b["tool"] = "ccr";
  b["version"] = kToolVersion;
  b["command"] = command;
  b["scenario"] = doc.name;
  b["scenario_hash"] = scenario_hash(doc);
  return b;
}

const CcrModel& need_model(const ScenarioDocument& doc, const std::string& command) {
  if (!doc.model) throw ValidationError(command + ": scenario has no decision model");
  return *doc.model;
}

const Economy& need_economy(const ScenarioDocument& doc, const std::string& command) {
  if (!doc.economy) throw ValidationError(command + ": scenario has no economy");
  return *doc.economy;
}

json params_for(const ScenarioDocument& doc, const std::string& command) {
  json merged = json::object();
  for (const auto* q : doc.queries_for(command)) {
    for (const auto& [k, v] : q->params.items()) merged[k] = v;
  }
  return merged;
}

double param_number(const json& j, const std::string& field) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (!s.empty() && end == s.c_str() + s.size() && std::isfinite(v)) return v;
  }
  throw ValidationError(field + ": expected a number or decimal string");
}

std::vector<std::string> param_strings(const json& j, const std::string& field) {
  if (!j.is_array()) throw ValidationError(field + ": expected an array of strings");
  std::vector<std::string> out;
  for (const auto& v : j) {
    if (!v.is_string()) throw ValidationError(field + ": expected an array of strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> param_pairs(const json& j, const std::string& field) {
  if (!j.is_array()) throw ValidationError(field + ": expected an array of [id, id] pairs");
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& v : j) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_string() || !v[1].is_string()) {
      throw ValidationError(field + ": expected an array of [id, id] pairs");
    }
    out.emplace_back(v[0].get<std::string>(), v[1].get<std::string>());
  }
  return out;
}

std::vector<NamedLottery> selected_lotteries(const ScenarioDocument& doc, const json& params) {
  if (!params.contains("lotteries")) return doc.lotteries;
  std::vector<NamedLottery> out;
  for (const auto& name : param_strings(params["lotteries"], "lotteries")) {
    out.push_back({name, doc.lottery(name)});
  }
  return out;
}

// ---------------------------------------------------------------- evaluate

Report run_evaluate(const ScenarioDocument& doc, const RunOptions&) {
  const CcrModel& model = need_model(doc, "evaluate");
  const json params = params_for(doc, "evaluate");
  Report rep;
  rep.body = header("evaluate", doc);
  rep.body["prior_set"] = model.prior_set().kind();
  rep.body["utility"] = model.utility().describe();
  Table t{"values", {"lottery", "value", "certainty_equivalent"}, {}};
  Table m{"minimizers", {"lottery"}, {}};
  for (std::size_t j = 0; j < model.index().size(); ++j) m.header.push_back(joint_state_label(model, j));
  ojson results = ojson::array();
  for (const auto& nl : selected_lotteries(doc, params)) {
    const Valuation v = value(nl.lottery, model);
    ojson r;
    r["lottery"] = nl.name;
    r["support"] = nl.lottery.to_string();
    r["value"] = num(v.value);
    std::string ce_text = "n/a";
    if (model.utility().in_range(v.value)) {
      const double ce = model.utility().inverse(v.value);
      r["certainty_equivalent"] = num(ce);
      ce_text = format_number(ce);
    } else {
      r["certainty_equivalent"] = nullptr;
    }
    ojson cp;
    std::vector<std::string> row{nl.name};
    for (std::size_t j = 0; j < model.index().size(); ++j) {
      const double mass = v.minimizer.mass()[static_cast<Eigen::Index>(j)];
      cp[joint_state_label(model, j)] = num(mass);
      row.push_back(format_number(mass));
    }
    r["a_minimizer"] = cp;
    results.push_back(r);
    t.rows.push_back({nl.name, format_number(v.value), ce_text});
    m.rows.push_back(std::move(row));
  }
  rep.body["results"] = results;
  rep.tables = {t, m};
  return rep;
}

// ----------------------------------------------------------------- compare

const char* verdict_symbol(Preference p) {
  switch (p) {
    case Preference::kStrictlyFirst:
      return ">";
    case Preference::kStrictlySecond:
      return "<";
    case Preference::kIndifferent:
      return "~";
  }
  return "?";
}

Report run_compare(const ScenarioDocument& doc, const RunOptions& opt) {
  const CcrModel& model = need_model(doc, "compare");
  const json params = params_for(doc, "compare");
  const double band = opt.tolerance.value_or(kIndifferenceBand);
  const auto ls = selected_lotteries(doc, params);
  std::vector<double> vals;
  for (const auto& nl : ls) vals.push_back(value(nl.lottery, model).value);

  Report rep;
  rep.body = header("compare", doc);
  rep.body["band"] = band;
  ojson names = ojson::array();
  for (const auto& nl : ls) names.push_back(nl.name);
  rep.body["lotteries"] = names;
  ojson values = ojson::array();
  for (double v : vals) values.push_back(num(v));
  rep.body["values"] = values;
  ojson matrix = ojson::array();
  Table t{"preferences", {"row_vs_column"}, {}};
  for (const auto& nl : ls) t.header.push_back(nl.name);
  for (std::size_t i = 0; i < ls.size(); ++i) {
    ojson row = ojson::array();
    std::vector<std::string> cells{ls[i].name};
    for (std::size_t j = 0; j < ls.size(); ++j) {
      const char* s = verdict_symbol(compare_values(vals[i], vals[j], band));
      row.push_back(s);
      cells.emplace_back(s);
    }
    matrix.push_back(row);
    t.rows.push_back(std::move(cells));
  }
  rep.body["matrix"] = matrix;
  rep.tables = {t};
  return rep;
}

// -------------------------------------------------------------- membership

Report run_membership(const ScenarioDocument& doc, const RunOptions& opt) {
  const CcrModel& model = need_model(doc, "membership");
  const double tol = opt.tolerance.value_or(kFeasibilityTolerance);
  const bool diag = is_member(diagonal_pushforward(model.space(), model.index()), model.prior_set(), tol);
  const bool prod = is_member(product_measure(model.space(), model.index()), model.prior_set(), tol);
  Report rep;
  rep.body = header("membership", doc);
  rep.body["prior_set"] = model.prior_set().kind();
  rep.body["tolerance"] = tol;
  rep.body["diagonal"] = diag;
  rep.body["product"] = prod;
  rep.tables = {Table{"membership",
                      {"coupling", "member"},
                      {{"diagonal", diag ? "true" : "false"}, {"product", prod ? "true" : "false"}}}};
  return rep;
}

// ------------------------------------------------------------------ axioms

ojson witness_json(const AxiomReport& r, const AxiomSubject& subject, const AxiomTolerances& tol) {
  if (!r.witness) return nullptr;
  const Witness& w = *r.witness;
  ojson j;
  ojson inputs;
  for (const auto& [role, l] : w.inputs) inputs[role] = l.to_string();
  j["inputs"] = inputs;
  j["alpha"] = w.alpha ? num(*w.alpha) : ojson(nullptr);
  j["preferred"] = w.preferred.to_string();
  j["other"] = w.other.to_string();
  j["preferred_value"] = num(w.preferred_value);
  j["other_value"] = num(w.other_value);
  j["gap"] = num(w.gap());
  j["strict"] = w.strict;
  j["reverified"] = reverify(r, subject, 1e-9, tol);
  return j;
}

Report run_axioms(const ScenarioDocument& doc, const RunOptions& opt) {
  const CcrModel& model = need_model(doc, "axioms");
  const json params = params_for(doc, "axioms");
  AxiomTolerances tol;
  if (opt.tolerance) {
    tol.band = *opt.tolerance;
    tol.conclusion = *opt.tolerance;
  }
  const std::uint64_t seed = opt.seed.value_or(0);

  std::vector<Lottery> menu;
  ojson menu_names = ojson::array();
  for (const auto& nl : selected_lotteries(doc, params.contains("menu") ? json{{"lotteries", params["menu"]}}
                                                                         : json::object())) {
    menu.push_back(nl.lottery);
    menu_names.push_back(nl.name);
  }
  Rng rng(seed);
  const std::size_t extra = params.contains("random_menu")
                                ? static_cast<std::size_t>(param_number(params["random_menu"], "random_menu"))
                                : 0;
  for (const auto& l : random_menu(rng, action_ids(model), extra)) {
    menu_names.push_back(l.to_string());
    menu.push_back(l);
  }
  std::vector<double> alphas = kDefaultAlphas;
  if (params.contains("alphas")) {
    alphas.clear();
    for (const auto& a : params["alphas"]) alphas.push_back(param_number(a, "alphas"));
  }

  std::vector<std::string> which;
  if (params.contains("axioms")) {
    which = param_strings(params["axioms"], "axioms");
  } else {
    which = {"weak_monotonicity", "simple_monotonicity", "nui", "independence", "complexity_aversion",
             "understanding"};
    if (params.contains("bet_pairs")) which.push_back("default_to_independence");
  }

  AxiomSubject subject(model);
  std::vector<AxiomReport> reports;
  for (const auto& name : which) {
    if (name == "weak_monotonicity") {
      reports.push_back(check_weak_monotonicity(subject, menu, tol));
    } else if (name == "simple_monotonicity") {
      std::vector<std::pair<std::string, std::string>> pairs;
      if (params.contains("action_pairs")) {
        pairs = param_pairs(params["action_pairs"], "action_pairs");
      } else {
        const auto ids = action_ids(model);
        for (std::size_t i = 0; i < ids.size(); ++i) {
          for (std::size_t j = i + 1; j < ids.size(); ++j) pairs.emplace_back(ids[i], ids[j]);
        }
      }
      reports.push_back(check_simple_monotonicity(subject, pairs, tol));
    } else if (name == "nui") {
      reports.push_back(check_nui(subject, menu, alphas, menu, tol));
    } else if (name == "independence") {
      reports.push_back(check_independence(subject, menu, alphas, tol));
    } else if (name == "complexity_aversion") {
      reports.push_back(check_complexity_aversion(subject, menu, tol));
    } else if (name == "default_to_independence") {
      if (!params.contains("bet_pairs")) throw ValidationError("axioms.bet_pairs: missing");
      reports.push_back(
          check_default_to_independence(subject, param_pairs(params["bet_pairs"], "bet_pairs"), alphas, tol));
    } else if (name == "understanding") {
      const auto classes = params.contains("understanding") ? param_strings(params["understanding"], "understanding")
                                                            : model.index().classes();
      for (const auto& c : classes) {
        auto r = check_understanding(subject, c, menu, tol);
        r.axiom = "understanding[" + c + "]";
        reports.push_back(std::move(r));
      }
      if (params.contains("understanding_sets")) {
        for (const auto& set : params["understanding_sets"]) {
          const auto ids = param_strings(set, "understanding_sets");
          auto r = check_understanding(subject, ids, menu, tol);
          std::string tag;
          for (const auto& id : ids) tag += (tag.empty() ? "" : ",") + id;
          r.axiom = "understanding{" + tag + "}";
          reports.push_back(std::move(r));
        }
      }
    } else {
      throw ValidationError("axioms: unknown axiom '" + name + "'");
    }
  }

  Report rep;
  rep.body = header("axioms", doc);
  rep.body["rng"] = {{"name", Rng::kName}, {"seed", seed}};
  rep.body["tolerances"] = {{"strict_premise", tol.strict_premise}, {"conclusion", tol.conclusion}, {"band", tol.band}};
  ojson al = ojson::array();
  for (double a : alphas) al.push_back(num(a));
  rep.body["alphas"] = al;
  rep.body["menu"] = menu_names;
  ojson out = ojson::array();
  Table t{"axioms", {"axiom", "verdict", "cases", "premises_met", "margin", "witness_gap"}, {}};
  for (const auto& r : reports) {
    ojson j;
    j["axiom"] = r.axiom;
    j["verdict"] = r.holds() ? "holds-on-menu" : "violated";
    j["cases"] = r.cases;
    j["premises_met"] = r.premises_met;
    j["margin"] = num(r.margin);
    j["witness"] = witness_json(r, subject, tol);
    out.push_back(j);
    if (!r.holds()) rep.violation_found = true;
    t.rows.push_back({r.axiom, r.holds() ? "holds-on-menu" : "violated", std::to_string(r.cases),
                      std::to_string(r.premises_met), std::isfinite(r.margin) ? format_number(r.margin) : "n/a",
                      r.witness ? format_number(r.witness->gap()) : ""});
  }
  rep.body["reports"] = out;
  rep.tables = {t};
  return rep;
}

// ------------------------------------------------------------- equilibrium

Report run_equilibrium(const ScenarioDocument& doc, const RunOptions&) {
  const Economy& econ = need_economy(doc, "equilibrium");
  const json params = params_for(doc, "equilibrium");
  const EquilibriumPrices eq = equilibrium_prices(econ);
  const Superdifferential sd = superdifferential_at_kink(econ.a, econ.b, econ.c_star, econ);

  Report rep;
  rep.body = header("equilibrium", doc);
  rep.body["p_alpha"] = num(eq.p_alpha);
  rep.body["p_beta"] = num(eq.p_beta);
  rep.body["p_beta_prime_interval"] = {num(eq.beta_prime.lo), num(eq.beta_prime.hi)};
  rep.body["interval_width"] = num(eq.beta_prime.width());
  rep.body["superdifferential_third"] = {num(sd.third.lo), num(sd.third.hi)};
  Table prices{"prices",
               {"quantity", "value"},
               {{"p_alpha", format_number(eq.p_alpha)},
                {"p_beta", format_number(eq.p_beta)},
                {"p_beta_prime_lo", format_number(eq.beta_prime.lo)},
                {"p_beta_prime_hi", format_number(eq.beta_prime.hi)},
                {"interval_width", format_number(eq.beta_prime.width())}}};

  std::vector<std::pair<double, std::optional<double>>> asks;
  asks.emplace_back(0.5 * (eq.beta_prime.lo + eq.beta_prime.hi), std::nullopt);
  if (params.contains("demand")) {
    for (const auto& d : params["demand"]) {
      if (!d.is_object() || !d.contains("p_beta_prime")) {
        throw ValidationError("equilibrium.demand: expected objects with p_beta_prime");
      }
      std::optional<double> w;
      if (d.contains("wealth")) w = param_number(d["wealth"], "equilibrium.demand.wealth");
      asks.emplace_back(param_number(d["p_beta_prime"], "equilibrium.demand.p_beta_prime"), w);
    }
  }
  Table dem{"demand", {"p_beta_prime", "wealth", "x", "y", "z", "c"}, {}};
  ojson dj = ojson::array();
  for (const auto& [q, w] : asks) {
    const Prices p{eq.p_alpha, eq.p_beta, q};
    const double wealth = w.value_or(endowment_wealth(econ, p));
    const PortfolioPoint pt = demand(p, econ, wealth);
    dj.push_back({{"p_beta_prime", num(q)},
                  {"wealth", num(wealth)},
                  {"x", num(pt.x)},
                  {"y", num(pt.y)},
                  {"z", num(pt.z)},
                  {"c", num(pt.c)}});
    dem.rows.push_back({format_number(q), format_number(wealth), format_number(pt.x), format_number(pt.y),
                        format_number(pt.z), format_number(pt.c)});
  }
  rep.body["demand"] = dj;
  rep.tables = {prices, dem};
  return rep;
}

// ------------------------------------------------------------------- sweep

std::vector<double> grid_of(const json& params, const std::string& key, double fallback) {
  if (!params.contains(key)) return {fallback};
  std::vector<double> out;
  for (const auto& v : params[key]) out.push_back(param_number(v, "sweep." + key));
  if (out.empty()) throw ValidationError("sweep." + key + ": empty grid");
  return out;
}

Report run_sweep(const ScenarioDocument& doc, const RunOptions&) {
  const Economy& base = need_economy(doc, "sweep");
  const json params = params_for(doc, "sweep");
  std::vector<std::pair<double, double>> rs{{base.r_lo, base.r_hi}};
  if (params.contains("r")) {
    rs.clear();
    for (const auto& v : params["r"]) {
      if (!v.is_array() || v.size() != 2) throw ValidationError("sweep.r: expected [r_lo, r_hi] pairs");
      rs.emplace_back(param_number(v[0], "sweep.r"), param_number(v[1], "sweep.r"));
    }
  }
  std::vector<Economy> grid;
  for (double a : grid_of(params, "a", base.a)) {
    for (double b : grid_of(params, "b", base.b)) {
      for (double c : grid_of(params, "c_star", base.c_star)) {
        for (const auto& [lo, hi] : rs) {
          Economy e = base;
          e.a = a;
          e.b = b;
          e.c_star = c;
          e.r_lo = lo;
          e.r_hi = hi;
          grid.push_back(e);
        }
      }
    }
  }
  const auto rows = sweep(grid);

  Report rep;
  rep.body = header("sweep", doc);
  ojson out = ojson::array();
  Table t{"sweep",
          {"a", "b", "c_star", "r_lo", "r_hi", "p_alpha", "p_beta", "interval_lo", "interval_hi", "interval_width",
           "status"},
          {}};
  for (const auto& row : rows) {
    const auto& e = row.econ;
    ojson j{{"a", num(e.a)}, {"b", num(e.b)}, {"c_star", num(e.c_star)}, {"r_lo", num(e.r_lo)}, {"r_hi", num(e.r_hi)}};
    std::vector<std::string> cells{format_number(e.a), format_number(e.b), format_number(e.c_star),
                                   format_number(e.r_lo), format_number(e.r_hi)};
    if (row.prices) {
      const auto& p = *row.prices;
      j["p_alpha"] = num(p.p_alpha);
      j["p_beta"] = num(p.p_beta);
      j["interval_lo"] = num(p.beta_prime.lo);
      j["interval_hi"] = num(p.beta_prime.hi);
      j["interval_width"] = num(p.beta_prime.width());
      for (double v : {p.p_alpha, p.p_beta, p.beta_prime.lo, p.beta_prime.hi, p.beta_prime.width()}) {
        cells.push_back(format_number(v));
      }
    } else {
      for (const char* k : {"p_alpha", "p_beta", "interval_lo", "interval_hi", "interval_width"}) j[k] = nullptr;
      cells.insert(cells.end(), 5, "");
    }
    j["status"] = row.status;
    cells.push_back(row.status);
    out.push_back(j);
    t.rows.push_back(std::move(cells));
  }
  rep.body["rows"] = out;
  rep.tables = {t};
  return rep;
}

}  // namespace

std::string Report::render(Format format) const {
  std::ostringstream os;
  switch (format) {
    case Format::kJson:
      os << body.dump(2) << '\n';
      break;
    case Format::kCsv:
      for (std::size_t i = 0; i < tables.size(); ++i) {
        const Table& t = tables[i];
        if (tables.size() > 1) os << (i ? "\n" : "") << "# " << t.title << '\n';
        for (std::size_t c = 0; c < t.header.size(); ++c) os << (c ? "," : "") << csv_cell(t.header[c]);
        os << '\n';
        for (const auto& row : t.rows) {
          for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << csv_cell(row[c]);
          os << '\n';
        }
      }
      break;
    case Format::kText: {
      os << "ccr " << kToolVersion << "  " << body.value("command", "") << "  scenario "
         << body.value("scenario", "") << "  hash " << body.value("scenario_hash", "") << '\n';
      for (const auto& t : tables) {
        os << '\n' << t.title << '\n';
        std::vector<std::size_t> width(t.header.size(), 0);
        for (std::size_t c = 0; c < t.header.size(); ++c) width[c] = t.header[c].size();
        for (const auto& row : t.rows) {
          for (std::size_t c = 0; c < row.size() && c < width.size(); ++c) width[c] = std::max(width[c], row[c].size());
        }
        auto line = [&](const std::vector<std::string>& cells) {
          std::string s;
          for (std::size_t c = 0; c < cells.size(); ++c) {
            if (c) s += "  ";
            s += cells[c];
            if (c + 1 < cells.size()) s.append(width[c] - cells[c].size(), ' ');
          }
          os << s << '\n';
        };
        line(t.header);
        for (const auto& row : t.rows) line(row);
      }
      break;
    }
  }
  return os.str();
}

Report run_command(const std::string& command, const ScenarioDocument& doc, const RunOptions& options) {
  if (command == "evaluate") return run_evaluate(doc, options);
  if (command == "compare") return run_compare(doc, options);
  if (command == "membership") return run_membership(doc, options);
  if (command == "axioms") return run_axioms(doc, options);
  if (command == "equilibrium") return run_equilibrium(doc, options);
  if (command == "sweep") return run_sweep(doc, options);
  throw ValidationError("unknown command '" + command + "'");
}

}  // namespace ccr
