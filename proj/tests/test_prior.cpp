#include <doctest.h>

#include "ccr/errors.hpp"
#include "ccr/menu_generator.hpp"
#include "ccr/prior_engine.hpp"
#include "ccr/simplex.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace ccr;

namespace {

Eigen::VectorXd random_act(Rng& rng, std::size_t n) {
  Eigen::VectorXd f(static_cast<Eigen::Index>(n));
  for (auto& v : f) v = rng.uniform(-10, 10);
  return f;
}

PriorSet random_prior(Rng& rng, std::size_t k, PriorKind kind) {
  return random_model(rng, UtilityIndex::linear(), {k, 2, 1, 1, kind}).prior_set();
}

void check_marginal_valid(const Coupling& c, const Eigen::VectorXd& mu) {
  CHECK(c.mass().minCoeff() >= -1e-9);
  CHECK(std::abs(c.mass().sum() - 1.0) <= 1e-9);
  CHECK(c.marginal_error(mu) <= 1e-9);
}

}  // namespace

TEST_SUITE("simplex") {
  TEST_CASE("Beale's cycling example terminates under Bland's rule") {
    Eigen::MatrixXd A(3, 7);
    A << 1, 0, 0, 0.25, -60, -0.04, 9,  //
        0, 1, 0, 0.5, -90, -0.02, 3,  //
        0, 0, 1, 0, 0, 1, 0;
    Eigen::VectorXd b(3);
    b << 0, 0, 1;
    Eigen::VectorXd c(7);
    c << 0, 0, 0, -0.75, 150, -0.02, 6;
    auto sol = DenseSimplex<double>(A, b, c).solve();
    REQUIRE(sol.status == LpStatus::kOptimal);
    CHECK(sol.objective == doctest::Approx(-0.05).epsilon(1e-12));
    CHECK((A * sol.x - b).cwiseAbs().maxCoeff() <= 1e-12);
  }

  TEST_CASE("status detection") {
    Eigen::MatrixXd A(1, 2);
    A << 1, 1;
    Eigen::VectorXd b(1);
    b << -1;
    Eigen::VectorXd c(2);
    c << 1, 1;
    CHECK(DenseSimplex<double>(A, b, c).solve().status == LpStatus::kInfeasible);

    A << 1, -1;
    b << 0;
    c << -1, 0;
    CHECK(DenseSimplex<double>(A, b, c).solve().status == LpStatus::kUnbounded);
  }

  TEST_CASE("redundant rows") {
    Eigen::MatrixXd A(3, 3);
    A << 1, 1, 1,  //
        1, 1, 1,   //
        2, 2, 2;
    Eigen::VectorXd b(3);
    b << 1, 1, 2;
    Eigen::VectorXd c(3);
    c << 3, 1, 2;
    auto sol = DenseSimplex<double>(A, b, c).solve();
    REQUIRE(sol.status == LpStatus::kOptimal);
    CHECK(sol.objective == doctest::Approx(1.0));
    CHECK(sol.x[1] == doctest::Approx(1.0));
  }

  TEST_CASE("random LPs agree with basis enumeration") {
    Rng rng(21);
    for (int trial = 0; trial < 100; ++trial) {
      const int m = 2 + static_cast<int>(rng.index(2));
      const int n = m + 2 + static_cast<int>(rng.index(3));
      Eigen::MatrixXd A(m, n);
      for (auto& v : A.reshaped()) v = static_cast<double>(rng.integer(-3, 3));
      Eigen::VectorXd x0(n);
      for (auto& v : x0) v = rng.uniform(0, 2);
      const Eigen::VectorXd b = A * x0;
      Eigen::VectorXd c(n);
      for (auto& v : c) v = rng.uniform(0, 5);
      Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
      if (lu.rank() < m) continue;
      auto sol = DenseSimplex<double>(A, b, c).solve();
      REQUIRE(sol.status == LpStatus::kOptimal);
      CHECK(sol.objective == doctest::Approx(oracle::brute_lp_min(A, b, c)).epsilon(1e-9));
      CHECK(sol.x.minCoeff() >= -1e-12);
    }
  }

  TEST_CASE("long double instantiation") {
    using M = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
    using V = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
    M A(2, 3);
    A << 1, 1, 0, 0, 1, 1;
    V b(2);
    b << 1, 1;
    V c(3);
    c << 1, 3, 1;
    auto sol = DenseSimplex<long double>(A, b, c).solve();
    REQUIRE(sol.status == LpStatus::kOptimal);
    CHECK(static_cast<double>(sol.objective) == doctest::Approx(2.0));
  }
}

TEST_SUITE("prior") {
  TEST_CASE("joint index linearization") {
    const JointIndex idx({"C", "F", "G"}, 3);
    CHECK(idx.size() == 27);
    for (std::size_t j = 0; j < idx.size(); ++j) {
      const auto s = idx.decode(j);
      CHECK(idx.encode(s) == j);
    }
    CHECK(idx.decode(1) == std::vector<std::size_t>{0, 0, 1});  // last class fastest
    CHECK(idx.state_of(3, 1) == 1);
    CHECK_THROWS_AS(idx.class_position("nope"), DomainError);
  }

  TEST_CASE("coupling clamping and rejection") {
    const JointIndex idx = fx::temperature_index();
    const Coupling c(idx, Eigen::Vector4d(0.6, -1e-12, 0.0, 0.4 + 1e-12));
    CHECK(c.mass()[1] == 0.0);
    CHECK(std::abs(c.mass().sum() - 1.0) <= 1e-15);
    CHECK_THROWS_AS(Coupling(idx, Eigen::Vector4d(0.7, -0.1, 0.0, 0.4)), DomainError);
    CHECK_THROWS_AS(Coupling(idx, Eigen::Vector4d(0.6, 0.0, 0.0, 0.3)), DomainError);
  }

  TEST_CASE("diagonal and product couplings") {
    const auto space = fx::temperature_space();
    const auto idx = fx::temperature_index();
    const Coupling d = diagonal_pushforward(space, idx);
    CHECK(d.mass().isApprox(Eigen::Vector4d(0.6, 0, 0, 0.4)));
    const Coupling p = product_measure(space, idx);
    CHECK((p.mass() - Eigen::Vector4d(0.36, 0.24, 0.24, 0.16)).cwiseAbs().maxCoeff() <= 1e-15);

    Eigen::VectorXd third = Eigen::VectorXd::Constant(3, 1.0 / 3.0);
    const StateSpace s3({"x", "y", "z"}, third);
    const Coupling d3 = diagonal_pushforward(s3, JointIndex({"C", "F"}, 3));
    CHECK(d3.mass()[0] == doctest::Approx(1.0 / 3));
    CHECK(d3.mass()[4] == doctest::Approx(1.0 / 3));
    CHECK(d3.mass()[8] == doctest::Approx(1.0 / 3));
    CHECK(d3.mass().sum() == doctest::Approx(1.0));

    const JointIndex one({"C"}, 2);
    CHECK(diagonal_pushforward(space, one).mass().isApprox(fx::temperature_mu()));
    CHECK(product_measure(space, one).mass().isApprox(fx::temperature_mu()));

    Eigen::VectorXd degenerate(2);
    degenerate << 1.0, 0.0;
    const StateSpace sd({"A", "B"}, degenerate);
    CHECK(product_measure(sd, idx).mass().isApprox(Eigen::Vector4d(1, 0, 0, 0)));
  }

  TEST_CASE("membership") {
    const auto space = fx::temperature_space();
    const auto idx = fx::temperature_index();
    const Coupling diag = diagonal_pushforward(space, idx);
    const Coupling prod = product_measure(space, idx);
    CHECK(is_member(diag, fx::frechet()));
    CHECK(is_member(prod, fx::frechet()));
    CHECK_FALSE(is_member(diag, fx::t_interval(0.1, 0.4)));
    CHECK(is_member(prod, fx::t_interval(0.2, 0.3)));
    CHECK_FALSE(is_member(prod, fx::t_interval(0.0, 0.2)));
    CHECK(is_member(diag, fx::diagonal_singleton()));
    CHECK_FALSE(is_member(prod, fx::diagonal_singleton()));

    const Coupling t4(idx, oracle::coupling_2x2(0.6, 0.4));
    const PriorSet hull = PriorSet::hull(fx::temperature_mu(), {diag, t4});
    CHECK(is_member(prod, hull));  // t = 0.24 lies on the segment
    CHECK_FALSE(is_member(Coupling(idx, oracle::coupling_2x2(0.6, 0.3)),
                          PriorSet::hull(fx::temperature_mu(), {diag, prod})));
  }

  TEST_CASE("documented minimizations") {
    const auto u = fx::cara();
    auto uf = [&](double x) { return u(x); };
    const Eigen::Vector4d f_long = oracle::act_2x2(uf, {100, 0}, {0, 100});
    const UtilityAct act_long{fx::temperature_index(), f_long};

    const auto single = min_over_prior_set(act_long, fx::diagonal_singleton());
    CHECK(single.value == doctest::Approx(u(100)).epsilon(1e-14));

    const auto fr = min_over_prior_set(act_long, fx::frechet());
    const auto grid = oracle::tgrid_min(f_long, 0.6, 0.0, 0.4, 100001);
    CHECK(fr.value == doctest::Approx(grid.value).epsilon(1e-12));
    CHECK(fr.value == doctest::Approx(0.2 * u(100) + 0.4 * u(200) + 0.4 * u(0)).epsilon(1e-13));
    CHECK(fr.argmin.mass()[1] == doctest::Approx(0.4).epsilon(1e-12));
    check_marginal_valid(fr.argmin, fx::temperature_mu());

    const Eigen::Vector4d f_short = oracle::act_2x2(uf, {100, 0}, {0, -100});
    const auto poly = min_over_prior_set({fx::temperature_index(), f_short}, fx::t_interval(0.1, 0.4));
    CHECK(poly.argmin.mass()[1] == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(poly.value == doctest::Approx(oracle::tgrid_min(f_short, 0.6, 0.1, 0.4, 100001).value).epsilon(1e-12));
    check_marginal_valid(poly.argmin, fx::temperature_mu());
  }

  TEST_CASE("infeasible polytope reports an irreducible subset") {
    const auto idx = fx::temperature_index();
    Eigen::VectorXd e = Eigen::VectorXd::Zero(4);
    e[1] = 1.0;
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(4);
    std::vector<LinearConstraint> rows{{ones, Sense::kLessEqual, 2.0},
                                       {e, Sense::kGreaterEqual, 0.3},
                                       {e, Sense::kLessEqual, 0.2}};
    try {
      PriorSet::polytope(idx, fx::temperature_mu(), rows);
      FAIL("infeasible polytope accepted");
    } catch (const InfeasibleError& err) {
      CHECK(err.irreducible() == std::vector<std::size_t>{1, 2});
      CHECK(err.code() == ExitCode::kSolver);
    }
    // t above min(mu) is infeasible on its own.
    CHECK_THROWS_AS(fx::t_interval(0.5, 0.6), InfeasibleError);
  }

  TEST_CASE("vertex oracle examples") {
    const auto fr = enumerate_vertices_oracle(fx::frechet());
    REQUIRE(fr.size() == 2);
    CHECK((fr[0].mass() - oracle::coupling_2x2(0.6, 0.4)).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((fr[1].mass() - oracle::coupling_2x2(0.6, 0.0)).cwiseAbs().maxCoeff() <= 1e-12);

    CHECK(enumerate_vertices_oracle(fx::diagonal_singleton()).size() == 1);

    const auto box = enumerate_vertices_oracle(fx::t_interval(0.1, 0.3));
    REQUIRE(box.size() == 2);
    CHECK(box[0].mass()[1] == doctest::Approx(0.3));
    CHECK(box[1].mass()[1] == doctest::Approx(0.1));

    const JointIndex big({"a", "b", "c", "d"}, 3);
    Eigen::VectorXd mu = Eigen::VectorXd::Constant(3, 1.0 / 3.0);
    CHECK_THROWS_AS(enumerate_vertices_oracle(PriorSet::frechet(big, mu)), ResourceError);
  }

  TEST_CASE("LP agrees with the vertex oracle") {
    Rng rng(1234);
    for (int trial = 0; trial < 60; ++trial) {
      const std::size_t k = 2 + rng.index(3);
      const PriorSet set = random_prior(rng, k, trial % 2 ? PriorKind::kPolytope : PriorKind::kFrechet);
      const UtilityAct f{set.index(), random_act(rng, set.index().size())};
      const auto lp = min_over_prior_set(f, set);
      double brute = std::numeric_limits<double>::infinity();
      for (const auto& v : enumerate_vertices_oracle(set)) brute = std::min(brute, f.value.dot(v.mass()));
      CHECK(std::abs(lp.value - brute) <= 1e-8);
      check_marginal_valid(lp.argmin, set.mu());
      CHECK(is_member(lp.argmin, set));
      CHECK(std::abs(f.value.dot(lp.argmin.mass()) - lp.value) <= 1e-9);
    }
  }

  TEST_CASE("hull and singleton minimizations") {
    Rng rng(99);
    for (int trial = 0; trial < 50; ++trial) {
      const PriorSet hull = random_prior(rng, 3, PriorKind::kHull);
      const UtilityAct f{hull.index(), random_act(rng, hull.index().size())};
      double brute = std::numeric_limits<double>::infinity();
      for (const auto& c : std::get<PriorSet::Hull>(hull.encoding()).couplings) {
        brute = std::min(brute, f.value.dot(c.mass()));
      }
      CHECK(min_over_prior_set(f, hull).value == doctest::Approx(brute).epsilon(1e-14));
      const PriorSet single = random_prior(rng, 3, PriorKind::kSingleton);
      const auto& c = std::get<PriorSet::Singleton>(single.encoding()).coupling;
      CHECK(min_over_prior_set({single.index(), f.value}, single).value ==
            doctest::Approx(f.value.dot(c.mass())).epsilon(1e-14));
    }
  }

  TEST_CASE("functional properties of the minimum") {
    Rng rng(77);
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t k = 2 + rng.index(3);
      const PriorSet set = random_prior(rng, k, trial % 2 ? PriorKind::kPolytope : PriorKind::kFrechet);
      const JointIndex& idx = set.index();
      const Eigen::VectorXd f = random_act(rng, idx.size());
      Eigen::VectorXd g = f;
      for (auto& v : g) v += rng.uniform(0, 3);
      const double mf = min_over_prior_set({idx, f}, set).value;
      const double mg = min_over_prior_set({idx, g}, set).value;
      CHECK(mf <= mg + 1e-9);

      const Eigen::VectorXd h = random_act(rng, idx.size());
      const double a = rng.uniform();
      const double mh = min_over_prior_set({idx, h}, set).value;
      const double mix = min_over_prior_set({idx, a * f + (1 - a) * h}, set).value;
      CHECK(mix >= a * mf + (1 - a) * mh - 1e-9);

      const double lambda = rng.uniform(0.1, 10);
      CHECK(std::abs(min_over_prior_set({idx, lambda * f}, set).value - lambda * mf) <= 1e-9 * (1 + std::abs(mf)) * lambda);

      // An act read through one class only is pinned by the marginal.
      const std::size_t pos = rng.index(idx.num_classes());
      Eigen::VectorXd per_state(static_cast<Eigen::Index>(k));
      for (auto& v : per_state) v = rng.uniform(-10, 10);
      Eigen::VectorXd pinned(static_cast<Eigen::Index>(idx.size()));
      for (std::size_t j = 0; j < idx.size(); ++j) {
        pinned[static_cast<Eigen::Index>(j)] = per_state[static_cast<Eigen::Index>(idx.state_of(j, pos))];
      }
      CHECK(std::abs(min_over_prior_set({idx, pinned}, set).value - per_state.dot(set.mu())) <= 1e-9);
    }
  }
}
