#include <doctest.h>

#include <sstream>

#include "ccr/asset_pricing.hpp"
#include "ccr/errors.hpp"
#include "ccr/menu_generator.hpp"
#include "oracles.hpp"

using namespace ccr;

namespace {

Economy ln_economy() {
  Economy e;
  e.mu = 0.5;
  e.u = UtilityIndex::log();
  e.r_lo = 0.0;
  e.r_hi = 0.25;
  e.a = 2.0;
  e.b = 1.0;
  e.c_star = 1.0;
  return e;
}

Economy random_economy(Rng& rng) {
  Economy e;
  e.mu = rng.uniform(0.2, 0.8);
  const double cap = std::min(e.mu, 1.0 - e.mu);
  const double r1 = rng.uniform(0, cap);
  const double r2 = rng.uniform(0, cap);
  e.r_lo = std::min(r1, r2);
  e.r_hi = std::max(r1, r2);
  switch (rng.index(3)) {
    case 0: e.u = UtilityIndex::log(); break;
    case 1: e.u = UtilityIndex::cara(rng.uniform(0.1, 1.0)); break;
    default: e.u = UtilityIndex::crra(rng.uniform(0.5, 4.0)); break;
  }
  e.a = rng.uniform(0.5, 4.0);
  e.b = rng.uniform(0.5, 4.0);
  e.c_star = rng.uniform(0.5, 2.0);
  return e;
}

// Gradient of the fixed-r objective, written out by hand.
Eigen::Vector4d grad_fixed_r(const PortfolioPoint& p, const Economy& e, double r) {
  auto d = [&](double w) { return e.u.derivative(w); };
  const double gx = (e.mu - r) * d(p.x + p.c) + r * d(p.x + p.z + p.c);
  const double gy = r * d(p.y + p.c) + (1 - e.mu - r) * d(p.y + p.z + p.c);
  const double gz = r * d(p.x + p.z + p.c) + (1 - e.mu - r) * d(p.y + p.z + p.c);
  return {gx, gy, gz, gx + gy};
}

// Distance from the price ray of the best supergradient r in [r_lo, r_hi].
// g(r) - g_c(r) * prices is affine in r, so the best r is a clamped
// least-squares solution.
double optimality_residual(const PortfolioPoint& p, const Economy& e, const Prices& prices) {
  const Eigen::Vector4d target(prices.alpha, prices.beta, prices.beta_prime, 1.0);
  auto resid = [&](double r) {
    const Eigen::Vector4d g = grad_fixed_r(p, e, r);
    return Eigen::Vector4d(g - g[3] * target);
  };
  const Eigen::Vector4d e0 = resid(0.0);
  const Eigen::Vector4d e1 = resid(1.0) - e0;
  double r = e1.squaredNorm() > 0 ? -e0.dot(e1) / e1.squaredNorm() : e.r_lo;
  r = std::clamp(r, e.r_lo, e.r_hi);
  return resid(r).norm() / grad_fixed_r(p, e, r)[3];
}

double scan_value(const PortfolioPoint& p, const Economy& e) {
  return oracle::portfolio_value_scan([&](double w) { return e.u(w); }, e.mu, e.r_lo, e.r_hi, p.x, p.y, p.z, p.c, 3);
}

}  // namespace

TEST_SUITE("asset_pricing") {
  TEST_CASE("log economy prices") {
    const auto eq = equilibrium_prices(ln_economy());
    CHECK(eq.p_alpha == doctest::Approx(0.4).epsilon(1e-14));
    CHECK(eq.p_beta == doctest::Approx(0.6).epsilon(1e-14));
    CHECK(eq.beta_prime.lo == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(eq.beta_prime.hi == doctest::Approx(0.6).epsilon(1e-14));
    const auto zi = demand_zero_interval(ln_economy(), 2, 1, 1);
    CHECK(zi.lo == doctest::Approx(0.5));
    CHECK(zi.hi == doctest::Approx(0.6));
  }

  TEST_CASE("economy validation") {
    Economy e = ln_economy();
    e.r_hi = 0.6;
    CHECK_THROWS_AS(e.validate(), DomainError);
    e = ln_economy();
    e.r_lo = 0.3;
    CHECK_THROWS_AS(e.validate(), DomainError);
    e = ln_economy();
    e.u = UtilityIndex::linear();
    CHECK_THROWS_AS(e.validate(), DomainError);
    e = ln_economy();
    e.b = -1.0;
    CHECK_THROWS_AS(e.validate(), DomainError);
    e = ln_economy();
    e.mu = 1.0;
    CHECK_THROWS_AS(equilibrium_prices(e), DomainError);
    CHECK_NOTHROW(ln_economy().validate());
  }

  TEST_CASE("value against a scan over r") {
    Rng rng(31);
    for (int i = 0; i < 200; ++i) {
      const Economy e = random_economy(rng);
      const PortfolioPoint p{rng.uniform(0, 3), rng.uniform(0, 3), rng.uniform(-0.4, 0.4), rng.uniform(0.5, 1.5)};
      CHECK(portfolio_value(p, e) == doctest::Approx(scan_value(p, e)).epsilon(1e-13));
    }
  }

  TEST_CASE("gradient matches finite differences where smooth") {
    Rng rng(32);
    int tested = 0;
    for (int i = 0; i < 300; ++i) {
      const Economy e = random_economy(rng);
      const PortfolioPoint p{rng.uniform(0, 3), rng.uniform(0, 3), rng.uniform(-0.5, 0.5), rng.uniform(0.5, 1.5)};
      if (std::abs(k_term(p, e)) < 1e-4) continue;
      ++tested;
      auto f = [&](const Eigen::Vector4d& v) { return scan_value({v[0], v[1], v[2], v[3]}, e); };
      const Eigen::Vector4d fd = oracle::central_gradient(f, p.vec(), 1e-6);
      CHECK((portfolio_gradient(p, e) - fd).cwiseAbs().maxCoeff() <= 1e-6);
    }
    CHECK(tested > 200);

    // x = y with z = 0: K and its gradient vanish together.
    const Economy e = ln_economy();
    const PortfolioPoint flat{1.5, 1.5, 0.0, 1.0};
    auto f = [&](const Eigen::Vector4d& v) { return scan_value({v[0], v[1], v[2], v[3]}, e); };
    CHECK((portfolio_gradient(flat, e) - oracle::central_gradient(f, flat.vec(), 1e-6)).cwiseAbs().maxCoeff() <= 1e-6);
  }

  TEST_CASE("kinks") {
    const Economy e = ln_economy();
    CHECK_THROWS_AS(portfolio_gradient({2, 1, 0, 1}, e), DomainError);
    CHECK_THROWS_AS(portfolio_gradient({1, 1, 0.5, 1}, e), DomainError);
    Economy point = e;
    point.r_lo = point.r_hi = 0.1;
    CHECK_NOTHROW(portfolio_gradient({2, 1, 0, 1}, point));

    const auto sd = superdifferential_at_kink(2, 1, 1, e);
    CHECK_FALSE(sd.is_point());
    CHECK(sd.contains(grad_fixed_r({2, 1, 0, 1}, e, 0.1)));
    CHECK(sd.contains(0.5 * (sd.at_r_lo + sd.at_r_hi)));
    CHECK_FALSE(sd.contains(sd.at_r_lo + Eigen::Vector4d(0, 0, 1e-3, 0)));
    CHECK((sd.at_r_lo - grad_fixed_r({2, 1, 0, 1}, e, 0.0)).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK(superdifferential_at_kink(2, 1, 1, point).is_point());
    const double dc = sd.at_r_lo[3];
    CHECK(sd.third.lo / dc == doctest::Approx(0.5));
    CHECK(sd.third.hi / dc == doctest::Approx(0.6));
  }

  TEST_CASE("demand in the log economy") {
    const Economy e = ln_economy();
    for (double q : {0.5, 0.55, 0.6}) {
      const Prices pr{0.4, 0.6, q};
      const auto d = demand(pr, e, endowment_wealth(e, pr));
      CHECK(std::abs(d.z) <= 1e-9);
      CHECK(d.x == doctest::Approx(2.0).epsilon(1e-9));
      CHECK(d.y == doctest::Approx(1.0).epsilon(1e-9));
      CHECK(d.c == 1.0);
    }
    const Prices cheap{0.4, 0.6, 0.45};
    CHECK(demand(cheap, e, endowment_wealth(e, cheap)).z > 1e-3);
    const Prices dear{0.4, 0.6, 0.65};
    CHECK(demand(dear, e, endowment_wealth(e, dear)).z < -1e-3);
    CHECK_THROWS_AS(demand({0.5, 0.6, 0.55}, e, 3.0), DomainError);
    // beta' at or above the safe asset price is dominated.
    CHECK_THROWS_AS(demand({0.4, 0.6, 1.0}, e, 3.0), DomainError);
  }

  TEST_CASE("non-participation across random economies") {
    Rng rng(33);
    for (int i = 0; i < 60; ++i) {
      const Economy e = random_economy(rng);
      const auto eq = equilibrium_prices(e);
      CHECK(eq.p_alpha + eq.p_beta == doctest::Approx(1.0).epsilon(1e-14));
      CHECK(eq.beta_prime.lo <= eq.beta_prime.hi);
      if (e.r_lo == 0.0) CHECK(eq.beta_prime.contains(eq.p_beta, 1e-12));
      const double q = eq.beta_prime.lo + rng.uniform() * eq.beta_prime.width();
      const Prices pr{eq.p_alpha, eq.p_beta, q};
      const auto d = demand(pr, e, endowment_wealth(e, pr));
      CHECK(std::abs(d.z) <= 1e-8);
      CHECK(std::abs(d.x - e.a) <= 1e-7);
      CHECK(std::abs(d.y - e.b) <= 1e-7);
    }
  }

  TEST_CASE("demand is optimal on the budget set") {
    Rng rng(34);
    for (int i = 0; i < 40; ++i) {
      const Economy e = random_economy(rng);
      const auto eq = equilibrium_prices(e);
      const double q = rng.index(2) ? eq.beta_prime.lo * rng.uniform(0.5, 1.0)
                                    : eq.beta_prime.hi + (1.0 - eq.beta_prime.hi) * rng.uniform(0.0, 0.8);
      const Prices pr{eq.p_alpha, eq.p_beta, q};
      const double w = endowment_wealth(e, pr);
      const auto d = demand(pr, e, w);
      CHECK(pr.alpha * d.x + pr.beta * d.y + pr.beta_prime * d.z + d.c == doctest::Approx(w).epsilon(1e-12));
      CHECK(optimality_residual(d, e, pr) <= 1e-9);
      const double vd = portfolio_value(d, e);
      for (int k = 0; k < 50; ++k) {
        PortfolioPoint alt{d.x + rng.uniform(-0.2, 0.2), d.y + rng.uniform(-0.2, 0.2), d.z + rng.uniform(-0.2, 0.2),
                           0.0};
        alt.c = w - pr.alpha * alt.x - pr.beta * alt.y - pr.beta_prime * alt.z;
        if (!e.u.in_domain(alt.x + alt.c) || !e.u.in_domain(alt.y + alt.c) || !e.u.in_domain(alt.x + alt.z + alt.c) ||
            !e.u.in_domain(alt.y + alt.z + alt.c)) {
          continue;
        }
        CHECK(portfolio_value(alt, e) <= vd + 1e-10);
      }
    }
  }

  TEST_CASE("portfolio value equals the two-class model value") {
    Rng rng(35);
    for (int i = 0; i < 40; ++i) {
      const Economy e = random_economy(rng);
      const PortfolioPoint p{rng.uniform(0, 3), rng.uniform(0, 3), rng.uniform(-0.4, 0.4), rng.uniform(0.5, 1.5)};
      const auto sc = equivalent_ccr_model(p, e);
      CHECK(value(sc.portfolio, sc.model).value == doctest::Approx(portfolio_value(p, e)).epsilon(1e-10));
    }
  }

  TEST_CASE("interval widens with the correlation range") {
    Rng rng(36);
    for (int i = 0; i < 40; ++i) {
      Economy e = random_economy(rng);
      const double w1 = equilibrium_prices(e).beta_prime.width();
      e.r_lo *= 0.5;
      e.r_hi = std::min(e.r_hi * 1.2, std::min(e.mu, 1 - e.mu));
      CHECK(equilibrium_prices(e).beta_prime.width() >= w1 - 1e-15);
      e.r_lo = e.r_hi;
      CHECK(equilibrium_prices(e).beta_prime.width() == doctest::Approx(0.0));
    }
  }

  TEST_CASE("sweep") {
    Economy bad = ln_economy();
    bad.r_hi = 0.9;
    const auto rows = sweep({ln_economy(), bad});
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].status == "ok");
    CHECK(rows[0].prices.has_value());
    CHECK_FALSE(rows[1].prices.has_value());
    CHECK(rows[1].status != "ok");
    std::ostringstream out;
    write_sweep_csv(out, rows);
    const std::string csv = out.str();
    CHECK(csv.rfind("a,b,c_star,r_lo,r_hi,p_alpha,p_beta,interval_lo,interval_hi,interval_width,status\n", 0) == 0);
    CHECK(csv.find("2,1,1,0,0.25,0.4,0.6,0.5,0.6,0.1,ok") != std::string::npos);
  }
}
