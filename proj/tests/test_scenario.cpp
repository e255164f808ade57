#include <doctest.h>

#include <fstream>
#include <sstream>

#include "ccr/errors.hpp"
#include "ccr/format.hpp"
#include "ccr/report.hpp"
#include "ccr/scenario.hpp"

using namespace ccr;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string temperature_text() { return read_file(std::string(CCR_FIXTURE_DIR) + "/temperature.json"); }
std::string economy_text() { return read_file(std::string(CCR_FIXTURE_DIR) + "/ln_economy.json"); }

std::string validation_message(const std::string& text) {
  try {
    parse_scenario(text);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "";
}

std::string with(std::string text, const std::string& from, const std::string& to) {
  const auto pos = text.find(from);
  REQUIRE(pos != std::string::npos);
  text.replace(pos, from.size(), to);
  return text;
}

}  // namespace

TEST_SUITE("scenario") {
  TEST_CASE("fixtures load") {
    const auto doc = parse_scenario(temperature_text());
    CHECK(doc.name == "temperature");
    REQUIRE(doc.model.has_value());
    CHECK(doc.model->prior_set().kind() == "frechet");
    CHECK(doc.lotteries.size() == 4);
    CHECK(doc.lottery("bC_bF").support().size() == 1);
    CHECK_THROWS_AS(doc.lottery("nope"), ValidationError);
    CHECK(doc.queries_for("axioms").size() == 1);
    CHECK(joint_state_label(*doc.model, 1) == "(A,B)");

    const auto eco = parse_scenario(economy_text());
    REQUIRE(eco.economy.has_value());
    CHECK(eco.economy->r_hi == 0.25);
    CHECK_FALSE(eco.model.has_value());
  }

  TEST_CASE("canonical round trip") {
    for (const auto& text : {temperature_text(), economy_text()}) {
      const auto doc = parse_scenario(text);
      const auto j = to_json(doc);
      const auto again = from_json(j);
      CHECK(to_json(again) == j);
      CHECK(scenario_hash(again) == scenario_hash(doc));
      CHECK(scenario_hash(doc).size() == 16);
    }
    // Whitespace and key order do not matter.
    const auto doc = parse_scenario(temperature_text());
    CHECK(scenario_hash(parse_scenario(to_json(doc).dump(2))) == scenario_hash(doc));
    CHECK(scenario_hash(parse_scenario(with(temperature_text(), "\"alpha\": 0.01", "\"alpha\": 0.02"))) !=
          scenario_hash(doc));
  }

  TEST_CASE("validation messages") {
    CHECK(validation_message(with(temperature_text(), "\"0.4\"]", "\"0.3\"]")).find("mu sum") != std::string::npos);
    CHECK(validation_message(with(temperature_text(), "\"cara\"", "\"quadratic\"")).find("utility") !=
          std::string::npos);
    CHECK(validation_message(with(temperature_text(), "\"class\": \"F\", \"payoffs\": [0, 100]",
                                  "\"class\": \"Z\", \"payoffs\": [0, 100]"))
              .find("actions") != std::string::npos);
    CHECK(validation_message(with(temperature_text(), "\"payoffs\": [100, 0]", "\"payoffs\": [100]")) != "");
    CHECK(validation_message(with(temperature_text(), "[\"b_C\", \"b_F\"], \"p\"", "[\"b_C\", \"zz\"], \"p\"")) !=
          "");

    const std::string msg = validation_message("{\n  \"name\": \"x\",\n  \"states\": ]\n}");
    CHECK(msg.find("line 3") != std::string::npos);
    CHECK(msg.find("column") != std::string::npos);
  }

  TEST_CASE("infeasible polytope exits as a solver error") {
    const std::string text = with(temperature_text(), "{\"kind\": \"frechet\"}",
                                  "{\"kind\": \"polytope\", \"constraints\": ["
                                  "{\"coeffs\": {\"(A,B)\": 1}, \"sense\": \">=\", \"rhs\": \"0.5\"}]}");
    try {
      parse_scenario(text);
      FAIL("accepted");
    } catch (const InfeasibleError& e) {
      CHECK(e.code() == ExitCode::kSolver);
      CHECK(std::string(e.what()).find("prior_set.constraints") != std::string::npos);
    }
  }

  TEST_CASE("number formatting") {
    CHECK(format_number(0.1 + 0.2) == "0.3");
    CHECK(format_number(-0.0) == "0");
    CHECK(format_number(-7e-15) == "0");
    CHECK(format_number(2e-12) == "2e-12");
    CHECK(format_number(63.21205588285577) == "63.2120558829");
    CHECK(round12(0.1 + 0.2) == 0.3);
    CHECK(shortest_decimal(0.1) == "0.1");
    CHECK(shortest_decimal(1.0 / 3.0) == "0.3333333333333333");
  }

  TEST_CASE("reports") {
    const auto doc = parse_scenario(temperature_text());
    const Report ev = run_command("evaluate", doc);
    CHECK(ev.body["results"][0]["value"].get<double>() == doctest::Approx(63.2120558829).epsilon(1e-12));
    CHECK(ev.body["results"][1]["a_minimizer"]["(A,B)"].get<double>() == doctest::Approx(0.4));
    CHECK(ev.body["scenario_hash"] == scenario_hash(doc));

    const Report cmp = run_command("compare", doc);
    REQUIRE(cmp.tables.size() == 1);
    CHECK(cmp.tables[0].rows[0][2] == ">");
    CHECK(cmp.tables[0].rows[2][4] == "~");

    const Report mem = run_command("membership", doc);
    CHECK(mem.body.dump().find("true") != std::string::npos);

    const Report ax = run_command("axioms", doc, {Format::kJson, 7, std::nullopt});
    CHECK(ax.violation_found);
    CHECK(ax.body["rng"]["seed"] == 7);

    // Same input, same bytes.
    CHECK(run_command("axioms", doc).render(Format::kJson) == run_command("axioms", doc).render(Format::kJson));
    CHECK(ev.render(Format::kCsv).find("lottery") != std::string::npos);
    CHECK_FALSE(ev.render(Format::kText).empty());

    const auto eco = parse_scenario(economy_text());
    const Report eq = run_command("equilibrium", eco);
    CHECK(eq.render(Format::kJson).find("0.55") != std::string::npos);
    const Report sw = run_command("sweep", eco);
    CHECK(sw.tables.at(0).rows.size() == 12);
    CHECK_THROWS_AS(run_command("equilibrium", doc), ValidationError);
    CHECK_THROWS_AS(run_command("evaluate", eco), ValidationError);
    CHECK_THROWS_AS(parse_format("yaml"), ValidationError);
  }
}
