#include <doctest.h>

#include "ccr/axiom_lab.hpp"
#include "ccr/errors.hpp"
#include "ccr/menu_generator.hpp"
#include "fixtures.hpp"

using namespace ccr;

namespace {

std::vector<Lottery> temperature_menu() {
  return {fx::sure(100), fx::delta({"b_C", "b_F"}), fx::delta({"b"}), fx::delta({"b_C", "neg_b_F"})};
}

const std::vector<std::pair<std::string, std::string>> kTemperaturePairs{
    {"b_C", "b"}, {"b_F", "neg_b_F"}, {"b_C", "b_F"}, {"b", "neg_b_F"}};

// Optimistic counterpart of the CCR value: best rather than worst coupling.
AxiomSubject::ValueFn maxmax(const CcrModel& m) {
  return [&m](const Lottery& p) {
    UtilityAct f = lift(p, m);
    f.value = -f.value;
    return -min_over_prior_set(f, m.prior_set()).value;
  };
}

void check_violation(const AxiomReport& r, const AxiomSubject& s) {
  REQUIRE_FALSE(r.holds());
  REQUIRE(r.witness.has_value());
  CHECK(r.witness->gap() < 0.0);
  CHECK(reverify(r, s));
}

}  // namespace

TEST_SUITE("axioms") {
  TEST_CASE("temperature menu under the Frechet set") {
    const CcrModel m = fx::temperature(fx::cara(), fx::frechet());
    const AxiomSubject s(m);
    const auto menu = temperature_menu();

    const auto wm = check_weak_monotonicity(s, menu);
    CHECK(wm.holds());
    CHECK(wm.cases == 12);
    CHECK(check_simple_monotonicity(s, kTemperaturePairs).holds());
    CHECK(check_nui(s, menu, kDefaultAlphas, menu).holds());
    CHECK(check_complexity_aversion(s, menu).holds());
    CHECK(check_default_to_independence(s, {{"b_C", "b_F"}}).holds());
    CHECK(check_understanding(s, std::string("C"), menu).holds());
    CHECK(check_understanding(s, std::string("F"), menu).holds());

    const auto ind = check_independence(s, menu, kDefaultAlphas);
    check_violation(ind, s);
    CHECK(ind.witness->alpha.has_value());

    const auto und = check_understanding(s, std::vector<std::string>{"b_C", "b_F"}, menu);
    check_violation(und, s);
    CHECK(und.witness->preferred == fx::delta({"b_C", "b_F"}));
    CHECK(und.witness->other == fx::sure(100));
  }

  TEST_CASE("independence witness from two indifferent lotteries") {
    const CcrModel m = fx::temperature(fx::cara(), fx::frechet());
    const AxiomSubject s(m);
    const Lottery p = fx::delta({"b"});
    const Lottery q = fx::delta({"b_C", "neg_b_F"});
    const Lottery r = fx::delta({"b_C", "b_F"});
    CHECK(s.value(p) == doctest::Approx(s.value(q)).epsilon(1e-13));
    for (double a : kDefaultAlphas) {
      CHECK(s.value(mix(q, r, a)) > s.value(mix(p, r, a)) + 1e-6);
    }
  }

  TEST_CASE("expected utility satisfies everything") {
    const CcrModel m = fx::temperature(fx::cara(), fx::diagonal_singleton());
    const AxiomSubject s(m);
    const auto menu = temperature_menu();
    CHECK(check_weak_monotonicity(s, menu).holds());
    CHECK(check_simple_monotonicity(s, kTemperaturePairs).holds());
    CHECK(check_nui(s, menu, kDefaultAlphas, menu).holds());
    CHECK(check_independence(s, menu, kDefaultAlphas).holds());
    CHECK(check_complexity_aversion(s, menu).holds());
    CHECK(check_understanding(s, std::vector<std::string>{"b_C", "b_F", "b", "neg_b_F"}, menu).holds());
  }

  TEST_CASE("optimistic valuation fails NUI") {
    const CcrModel m = fx::temperature(fx::cara(), fx::frechet());
    const AxiomSubject s(m, maxmax(m));
    const auto menu = temperature_menu();
    const auto r = check_nui(s, menu, kDefaultAlphas, menu);
    check_violation(r, s);
    CHECK(r.witness->inputs.size() == 3);
    CHECK(check_nui(AxiomSubject(m), menu, kDefaultAlphas, menu).holds());
  }

  TEST_CASE("complexity aversion fails when the diagonal is excluded") {
    const auto u = fx::cara();
    const std::vector<std::pair<Lottery, Lottery>> pairs{{fx::delta({"b"}), fx::delta({"b_C", "neg_b_F"})}};
    const CcrModel inside = fx::temperature(u, fx::t_interval(0.0, 0.4));
    CHECK(check_complexity_aversion(AxiomSubject(inside), pairs).holds());

    const CcrModel off = fx::temperature(u, fx::t_interval(0.1, 0.4));
    const AxiomSubject s(off);
    const auto r = check_complexity_aversion(s, pairs);
    check_violation(r, s);
    CHECK(r.witness->preferred == fx::delta({"b"}));

    // Complementary payoffs: the same exclusion is harmless.
    const std::vector<std::pair<Lottery, Lottery>> sure_pair{{fx::sure(100), fx::delta({"b_C", "b_F"})}};
    CHECK(check_complexity_aversion(s, sure_pair).holds());
    CHECK_THROWS_AS(check_complexity_aversion(s, std::vector<std::pair<Lottery, Lottery>>{
                                                     {fx::delta({"b_C", "b_F"}), fx::sure(100)}}),
                    DomainError);
  }

  TEST_CASE("default to independence fails without the product measure") {
    const auto u = fx::cara();
    const CcrModel low = fx::temperature(u, fx::t_interval(0.0, 0.2));
    const AxiomSubject s(low);
    const auto r = check_default_to_independence(s, {{"b_C", "b_F"}});
    check_violation(r, s);
    CHECK(r.witness->other == fx::delta({"b_C", "b_F"}));

    CHECK(check_default_to_independence(AxiomSubject(fx::temperature(u, fx::t_interval(0.2, 0.3))),
                                        {{"b_C", "b_F"}})
              .holds());
    // Above the product mass the joint bet is worth less, which the axiom allows.
    CHECK(check_default_to_independence(AxiomSubject(fx::temperature(u, fx::t_interval(0.3, 0.4))),
                                        {{"b_C", "b_F"}})
              .holds());

    CHECK_THROWS_AS(check_default_to_independence(s, {{"b_C", "b"}}), DomainError);
    CHECK_THROWS_AS(check_default_to_independence(s, {{"b_C", "nope"}}), DomainError);
    const CcrModel convex =
        fx::temperature(UtilityIndex::piecewise_linear({{0, 0}, {100, 10}, {200, 100}}), fx::frechet());
    CHECK_THROWS_AS(check_default_to_independence(AxiomSubject(convex), {{"b_C", "b_F"}}), DomainError);
  }

  TEST_CASE("default to independence over a bet family") {
    const auto family = two_value_bet_family(fx::temperature_mu(), {0, 50, 100});
    const CcrModel m(family.space, family.actions, fx::cara(),
                     PriorSet::frechet(bet_family_index(), fx::temperature_mu()));
    const AxiomSubject s(m);
    const auto r = check_default_to_independence(s, family.bet_pairs);
    CHECK(r.holds());
    CHECK(r.cases > family.bet_pairs.size());
    CHECK(check_complexity_aversion(s, family.complexity_pairs).holds());
  }

  TEST_CASE("understanding caps and validation") {
    const CcrModel m = fx::temperature(fx::cara(), fx::frechet());
    const AxiomSubject s(m);
    const auto menu = temperature_menu();
    CHECK_THROWS_AS(check_understanding(s, std::vector<std::string>{"b_C"}, menu, {}, 3), ResourceError);
    CHECK_THROWS_AS(check_understanding(s, std::vector<std::string>{"#100"}, menu), DomainError);
    CHECK_THROWS_AS(check_understanding(s, std::string("Q"), menu), DomainError);
    CHECK_THROWS_AS(check_weak_monotonicity(s, menu, {}, 2), ResourceError);
  }

  TEST_CASE("memo and reverify") {
    const CcrModel m = fx::temperature(fx::cara(), fx::frechet());
    const AxiomSubject s(m);
    const Lottery p = fx::delta({"b_C", "b_F"});
    CHECK(s.value(p) == s.evaluate(p));
    CHECK(s.value(p) == s.value(p));
    CHECK(s.state_utility(p, 0) == doctest::Approx(m.utility()(100)));

    const auto holds = check_complexity_aversion(s, temperature_menu());
    CHECK_FALSE(reverify(holds, s));
    auto bad = check_independence(s, temperature_menu(), kDefaultAlphas);
    REQUIRE(bad.witness.has_value());
    bad.witness->preferred_value += 1.0;
    CHECK_FALSE(reverify(bad, s));
  }

  TEST_CASE("random CCR models satisfy the representation axioms") {
    Rng rng(808);
    const std::vector<UtilityIndex> us{UtilityIndex::linear(), UtilityIndex::cara(0.2)};
    for (int trial = 0; trial < 25; ++trial) {
      const PriorKind kind = trial % 3 == 0 ? PriorKind::kPolytope : PriorKind::kFrechet;
      const CcrModel m = random_model(rng, us[static_cast<std::size_t>(trial) % 2], {2, 2, 2, 3, kind});
      const AxiomSubject s(m);
      const auto ids = action_ids(m);
      const auto menu = random_menu(rng, ids, 4);
      const auto simple = random_menu(rng, ids, 3, {2, 1, true});
      std::vector<std::pair<std::string, std::string>> pairs;
      for (std::size_t i = 0; i + 1 < ids.size(); ++i) pairs.emplace_back(ids[i], ids[i + 1]);

      CHECK(check_weak_monotonicity(s, menu).holds());
      CHECK(check_simple_monotonicity(s, pairs).holds());
      std::vector<Lottery> nui_menu = menu;
      nui_menu.insert(nui_menu.end(), simple.begin(), simple.end());
      CHECK(check_nui(s, nui_menu, {0.25, 0.5, 0.75}, menu).holds());
      for (const auto& cls : m.index().classes()) CHECK(check_understanding(s, cls, menu).holds());
      if (kind == PriorKind::kFrechet) {
        std::vector<Lottery> ca_menu = menu;
        ca_menu.insert(ca_menu.end(), simple.begin(), simple.end());
        CHECK(check_complexity_aversion(s, ca_menu).holds());
      }
    }
  }
}
