#pragma once

#include <Eigen/Dense>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ccr/core_model.hpp"
#include "ccr/utility.hpp"
#include "ccr/valuation.hpp"

namespace ccr {

/// Two-state exchange economy with states A (probability mu) and B. Assets:
/// alpha pays 1 in A, beta pays 1 in B, beta' pays 1 in B but is perceived
/// through its own class, and the safe asset (numeraire) pays 1 in both.
/// The representative agent holds (a, b, 0, c_star).
struct Economy {
  double mu = 0.5;
  UtilityIndex u = UtilityIndex::log();
  double r_lo = 0.0;
  double r_hi = 0.0;
  double a = 0.0;
  double b = 0.0;
  double c_star = 0.0;

  /// Throws DomainError when an invariant fails.
  void validate() const;
};

struct PortfolioPoint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double c = 0.0;

  Eigen::Vector4d vec() const { return {x, y, z, c}; }
};

struct PriceInterval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const { return hi - lo; }
  bool contains(double p, double tol = 0.0) const { return p >= lo - tol && p <= hi + tol; }
};

/// u(x+z+c) + u(y+c) - u(x+c) - u(y+z+c).
double k_term(const PortfolioPoint& pt, const Economy& econ);

/// min over r in [r_lo, r_hi] of mu u(x+c) + (1-mu) u(y+z+c) + r K.
double portfolio_value(const PortfolioPoint& pt, const Economy& econ);

/// Gradient in (x, y, z, c). Throws DomainError where the value is not
/// differentiable (K = 0 with a nonzero K gradient and r_lo < r_hi).
Eigen::Vector4d portfolio_gradient(const PortfolioPoint& pt, const Economy& econ);

/// Segment of supergradients at (x, y, 0, c), traced by r over [r_lo, r_hi].
struct Superdifferential {
  Eigen::Vector4d at_r_lo;
  Eigen::Vector4d at_r_hi;
  /// Range of the third component, ordered.
  PriceInterval third;

  bool is_point() const { return at_r_lo == at_r_hi; }
  bool contains(const Eigen::Vector4d& v, double tol = 1e-12) const;
};

Superdifferential superdifferential_at_kink(double x, double y, double c, const Economy& econ);

struct EquilibriumPrices {
  double p_alpha = 0.0;
  double p_beta = 0.0;
  PriceInterval beta_prime;
};

EquilibriumPrices equilibrium_prices(const Economy& econ);

/// Prices of alpha, beta and beta' in units of the safe asset.
struct Prices {
  double alpha = 0.0;
  double beta = 0.0;
  double beta_prime = 0.0;
};

struct DemandOptions {
  /// Half-width of the search box for consumption in each state and for z.
  double box = 1e4;
  double tolerance = 1e-13;
  int max_iterations = 200;
};

/// Optimal portfolio at `prices` with budget p.(x, y, z) + c = wealth.
/// Requires p_alpha + p_beta = 1 (otherwise safe and alpha + beta would admit
/// arbitrage). Since alpha + beta replicates the safe asset the optimum is a
/// line; the point with c = econ.c_star is returned.
PortfolioPoint demand(const Prices& prices, const Economy& econ, double wealth,
                      const DemandOptions& options = {});

/// Closed range of beta' prices at which (x, y, 0, c) is demanded.
PriceInterval demand_zero_interval(const Economy& econ, double x, double y, double c);

/// Market value of the endowment at equilibrium prices with beta' at `p_beta_prime`.
double endowment_wealth(const Economy& econ, const Prices& prices);

struct SweepRow {
  Economy econ;
  std::optional<EquilibriumPrices> prices;
  std::string status = "ok";
};

std::vector<SweepRow> sweep(const std::vector<Economy>& grid);
/// CSV with a fixed header, 12 significant digits, one row per economy.
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

/// The economy as a two-class scenario: alpha, beta and safe holdings in the
/// understood class, beta' in its own class, off-diagonal mass in [r_lo, r_hi].
struct EquivalentScenario {
  CcrModel model;
  Lottery portfolio;
};

EquivalentScenario equivalent_ccr_model(const PortfolioPoint& pt, const Economy& econ);

}  // namespace ccr
