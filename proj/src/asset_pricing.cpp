#include "ccr/asset_pricing.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <limits>

#include "ccr/errors.hpp"
#include "ccr/format.hpp"
#include "ccr/prior_engine.hpp"

namespace ccr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEps = std::numeric_limits<double>::epsilon();

// G_r in consumption coordinates: (mu - r) u(cA) + r u(cA + z) + r u(cB) + (1 - mu - r) u(cB + z).
double g_value(const Economy& e, double r, double ca, double cb, double z) {
  const auto& u = e.u;
  return (e.mu - r) * u(ca) + r * u(ca + z) + r * u(cb) + (1.0 - e.mu - r) * u(cb + z);
}

bool in_domain(const Economy& e, double ca, double cb, double z) {
  return e.u.in_domain(ca) && e.u.in_domain(cb) && e.u.in_domain(ca + z) && e.u.in_domain(cb + z);
}

double value_c(const Economy& e, double ca, double cb, double z) {
  if (!in_domain(e, ca, cb, z)) return -kInf;
  return std::min(g_value(e, e.r_lo, ca, cb, z), g_value(e, e.r_hi, ca, cb, z));
}

double domain_floor(const UtilityIndex& u) {
  switch (u.family()) {
    case UtilityIndex::Family::kLog:
    case UtilityIndex::Family::kCrra:
      return -u.shift();
    default:
      return -kInf;
  }
}

// Maximizer of a concave function on the open interval (lo, hi) given its
// decreasing derivative, by bisection.
double argmax_1d(const std::function<double(double)>& dphi, double lo, double hi) {
  for (int i = 0; i < 400 && hi - lo > 0.0; ++i) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    (dphi(mid) > 0.0 ? lo : hi) = mid;
  }
  return lo + 0.5 * (hi - lo);
}

struct Candidate {
  double ca;
  double cb;
  double z;
  double v;
};

}  // namespace

void Economy::validate() const {
  if (!(mu > 0.0 && mu < 1.0)) throw DomainError("mu must lie in (0, 1)");
  if (!u.strictly_concave_family()) {
    throw DomainError("economy utility must be twice differentiable and strictly concave (log, crra, cara)");
  }
  if (!(r_lo >= 0.0 && r_lo <= r_hi && r_hi <= std::min(mu, 1.0 - mu))) {
    throw DomainError("correlation bounds must satisfy 0 <= r_lo <= r_hi <= min(mu, 1 - mu)");
  }
  if (!(a + c_star > 0.0 && b + c_star > 0.0) || !u.in_domain(a + c_star) || !u.in_domain(b + c_star)) {
    throw DomainError("endowment consumption must be positive and in the utility domain");
  }
}

double k_term(const PortfolioPoint& pt, const Economy& econ) {
  const auto& u = econ.u;
  const double x = pt.x, y = pt.y, z = pt.z, c = pt.c;
  if (z == 0.0 || x == y) return 0.0;  // exact zero, free of rounding
  return u(x + z + c) + u(y + c) - u(x + c) - u(y + z + c);
}

double portfolio_value(const PortfolioPoint& pt, const Economy& econ) {
  const double k = k_term(pt, econ);
  const double r = k >= 0.0 ? econ.r_lo : econ.r_hi;
  return econ.mu * econ.u(pt.x + pt.c) + (1.0 - econ.mu) * econ.u(pt.y + pt.z + pt.c) + r * k;
}

namespace {

Eigen::Vector4d g_gradient(const PortfolioPoint& pt, const Economy& e, double r) {
  const auto& u = e.u;
  const double d1 = u.derivative(pt.x + pt.c);
  const double d2 = u.derivative(pt.x + pt.z + pt.c);
  const double d3 = u.derivative(pt.y + pt.c);
  const double d4 = u.derivative(pt.y + pt.z + pt.c);
  Eigen::Vector4d g;
  g[0] = (e.mu - r) * d1 + r * d2;
  g[1] = r * d3 + (1.0 - e.mu - r) * d4;
  g[2] = r * d2 + (1.0 - e.mu - r) * d4;
  g[3] = g[0] + g[1];
  return g;
}

}  // namespace

Eigen::Vector4d portfolio_gradient(const PortfolioPoint& pt, const Economy& econ) {
  const double k = k_term(pt, econ);
  if (k == 0.0 && econ.r_lo < econ.r_hi) {
    const Eigen::Vector4d lo = g_gradient(pt, econ, econ.r_lo);
    const Eigen::Vector4d hi = g_gradient(pt, econ, econ.r_hi);
    if (lo != hi) throw DomainError("portfolio value is not differentiable at this point");
    return lo;
  }
  return g_gradient(pt, econ, k >= 0.0 ? econ.r_lo : econ.r_hi);
}

bool Superdifferential::contains(const Eigen::Vector4d& v, double tol) const {
  const Eigen::Vector4d d = at_r_hi - at_r_lo;
  const double len2 = d.squaredNorm();
  const double s = len2 > 0.0 ? std::clamp((v - at_r_lo).dot(d) / len2, 0.0, 1.0) : 0.0;
  return (at_r_lo + s * d - v).cwiseAbs().maxCoeff() <= tol;
}

Superdifferential superdifferential_at_kink(double x, double y, double c, const Economy& econ) {
  const PortfolioPoint pt{x, y, 0.0, c};
  Superdifferential s{g_gradient(pt, econ, econ.r_lo), g_gradient(pt, econ, econ.r_hi), {}};
  s.third = {std::min(s.at_r_lo[2], s.at_r_hi[2]), std::max(s.at_r_lo[2], s.at_r_hi[2])};
  return s;
}

PriceInterval demand_zero_interval(const Economy& econ, double x, double y, double c) {
  const auto s = superdifferential_at_kink(x, y, c, econ);
  const double d = s.at_r_lo[3];
  return {s.third.lo / d, s.third.hi / d};
}

EquilibriumPrices equilibrium_prices(const Economy& econ) {
  econ.validate();
  const double da = econ.u.derivative(econ.a + econ.c_star);
  const double db = econ.u.derivative(econ.b + econ.c_star);
  const double d = econ.mu * da + (1.0 - econ.mu) * db;
  return {econ.mu * da / d, (1.0 - econ.mu) * db / d,
          demand_zero_interval(econ, econ.a, econ.b, econ.c_star)};
}

double endowment_wealth(const Economy& econ, const Prices& prices) {
  return prices.alpha * econ.a + prices.beta * econ.b + econ.c_star;
}

PortfolioPoint demand(const Prices& prices, const Economy& econ, double wealth, const DemandOptions& options) {
  econ.validate();
  const double pa = prices.alpha;
  const double pb = prices.beta;
  const double q = prices.beta_prime;
  if (!(pa > 0.0 && pb > 0.0 && q > 0.0)) throw DomainError("prices must be strictly positive");
  if (std::abs(pa + pb - 1.0) > 1e-12) {
    throw DomainError("p_alpha + p_beta must equal the safe asset price 1");
  }
  if (!(q < 1.0)) throw DomainError("p_beta_prime must be below the safe asset price 1");
  const double box = options.box;
  const double floor = std::max(domain_floor(econ.u), -box);
  const double mu = econ.mu;
  const auto& u = econ.u;
  auto cb_of = [&](double ca, double z) { return (wealth - pa * ca - q * z) / pb; };

  std::vector<Candidate> cands;

  // Kink z = 0: maximize mu u(cA) + (1 - mu) u(cB).
  {
    const double lo = floor;
    const double hi = std::min(box, (wealth - pb * floor) / pa);
    if (lo < hi) {
      const double ca = argmax_1d(
          [&](double s) { return mu * u.derivative(s) - (1.0 - mu) * (pa / pb) * u.derivative(cb_of(s, 0.0)); },
          lo, hi);
      const double cb = cb_of(ca, 0.0);
      cands.push_back({ca, cb, 0.0, value_c(econ, ca, cb, 0.0)});
    }
  }

  // Kink cA = cB = s with s = wealth - q z: mu u(s) + (1 - mu) u(s + z).
  {
    double lo = -box;
    double hi = box;
    // Both wealth - q z and wealth + (1 - q) z must exceed the floor.
    auto bound = [&](double a0, double slope) {
      if (slope > 0.0) lo = std::max(lo, (floor - a0) / slope);
      if (slope < 0.0) hi = std::min(hi, (floor - a0) / slope);
      if (slope == 0.0 && !(a0 > floor)) hi = lo;
    };
    bound(wealth, -q);
    bound(wealth, 1.0 - q);
    if (lo < hi) {
      const double z = argmax_1d(
          [&](double t) {
            const double s = wealth - q * t;
            return -q * mu * u.derivative(s) + (1.0 - q) * (1.0 - mu) * u.derivative(s + t);
          },
          lo, hi);
      const double s = wealth - q * z;
      cands.push_back({s, s, z, value_c(econ, s, s, z)});
    }
  }

  // Smooth regimes r = r_lo and r = r_hi: damped Newton on (cA, z).
  const double sa = pa / pb;
  const double sz = q / pb;
  for (double r : {econ.r_lo, econ.r_hi}) {
    const double w1 = mu - r;
    const double w4 = 1.0 - mu - r;
    auto g = [&](const Eigen::Vector2d& v) {
      const double cb = cb_of(v[0], v[1]);
      if (!in_domain(econ, v[0], cb, v[1])) return -kInf;
      return g_value(econ, r, v[0], cb, v[1]);
    };
    Eigen::Vector2d v(wealth, 0.0);
    if (!std::isfinite(g(v))) continue;
    bool ok = false;
    int polish = 0;
    for (int it = 0; it < options.max_iterations; ++it) {
      const double ca = v[0], z = v[1], cb = cb_of(ca, z);
      const double d1 = u.derivative(ca), d2 = u.derivative(ca + z);
      const double d3 = u.derivative(cb), d4 = u.derivative(cb + z);
      const double h1 = u.second_derivative(ca), h2 = u.second_derivative(ca + z);
      const double h3 = u.second_derivative(cb), h4 = u.second_derivative(cb + z);
      Eigen::Vector2d grad(w1 * d1 + r * d2 - sa * (r * d3 + w4 * d4),
                           r * d2 - sz * r * d3 + (1.0 - sz) * w4 * d4);
      Eigen::Matrix2d hess;
      hess(0, 0) = w1 * h1 + r * h2 + sa * sa * (r * h3 + w4 * h4);
      hess(0, 1) = r * h2 + sa * sz * r * h3 - sa * (1.0 - sz) * w4 * h4;
      hess(1, 1) = r * h2 + sz * sz * r * h3 + (1.0 - sz) * (1.0 - sz) * w4 * h4;
      hess(1, 0) = hess(0, 1);
      Eigen::Vector2d step;
      Eigen::LLT<Eigen::Matrix2d> llt(-hess);
      if (llt.info() == Eigen::Success) {
        step = llt.solve(grad);
      } else {
        step = grad;
      }
      const double decrement = grad.dot(step);
      if (!(decrement > options.tolerance * options.tolerance)) {
        ok = true;
        break;
      }
      const double g0 = g(v);
      // Below the resolution of G the line search only sees rounding noise;
      // finish with plain Newton steps.
      if (decrement < 1e-10 * (1.0 + std::abs(g0))) {
        const Eigen::Vector2d next = v + step;
        if (std::isfinite(g(next))) v = next;
        if (++polish >= 4 || step.norm() <= 4.0 * kEps * (1.0 + v.norm())) {
          ok = true;
          break;
        }
        continue;
      }
      double t = 1.0;
      Eigen::Vector2d next = v + step;
      while (t > 1e-20 && !(g(next) >= g0 + 1e-4 * t * decrement)) {
        t *= 0.5;
        next = v + t * step;
      }
      if (t <= 1e-20) {
        ok = true;
        break;
      }
      v = next;
      if (std::abs(v[0]) > box || std::abs(v[1]) > box || std::abs(cb_of(v[0], v[1])) > box) break;
    }
    if (!ok) continue;
    const double cb = cb_of(v[0], v[1]);
    cands.push_back({v[0], cb, v[1], value_c(econ, v[0], cb, v[1])});
  }

  // Kink candidates come first and win ties, so a flat optimum resolves to
  // non-participation when that is optimal.
  const Candidate* best = nullptr;
  for (const auto& c : cands) {
    if (std::isfinite(c.v) && (!best || c.v > best->v + 1e-13 * (1.0 + std::abs(best->v)))) best = &c;
  }
  const double edge = box * (1.0 - 1e-9);
  if (!best || std::abs(best->ca) >= edge || std::abs(best->cb) >= edge || std::abs(best->z) >= edge) {
    throw DomainError("no interior optimum in the search box [" + format_number(-box) + ", " +
                      format_number(box) + "]");
  }
  const double c = econ.c_star;
  return PortfolioPoint{best->ca - c, best->cb - c, best->z, c};
}

std::vector<SweepRow> sweep(const std::vector<Economy>& grid) {
  std::vector<SweepRow> rows;
  rows.reserve(grid.size());
  for (const auto& e : grid) {
    SweepRow row{e, std::nullopt, "ok"};
    try {
      row.prices = equilibrium_prices(e);
    } catch (const Error& err) {
      row.status = err.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "a,b,c_star,r_lo,r_hi,p_alpha,p_beta,interval_lo,interval_hi,interval_width,status\n";
  for (const auto& row : rows) {
    const auto& e = row.econ;
    out << format_number(e.a) << ',' << format_number(e.b) << ',' << format_number(e.c_star) << ','
        << format_number(e.r_lo) << ',' << format_number(e.r_hi) << ',';
    if (row.prices) {
      const auto& p = *row.prices;
      out << format_number(p.p_alpha) << ',' << format_number(p.p_beta) << ','
          << format_number(p.beta_prime.lo) << ',' << format_number(p.beta_prime.hi) << ','
          << format_number(p.beta_prime.width()) << ',';
    } else {
      out << ",,,,,";
    }
    out << csv_field(row.status) << '\n';
  }
}

EquivalentScenario equivalent_ccr_model(const PortfolioPoint& pt, const Economy& econ) {
  econ.validate();
  Eigen::VectorXd mu(2);
  mu << econ.mu, 1.0 - econ.mu;
  StateSpace space({"A", "B"}, mu);
  std::vector<Action> actions{
      {"alpha", Eigen::Vector2d(pt.x, 0.0), "understood"},
      {"beta", Eigen::Vector2d(0.0, pt.y), "understood"},
      {"safe", Eigen::Vector2d(pt.c, pt.c), "understood"},
      {"beta_prime", Eigen::Vector2d(0.0, pt.z), "misperceived"},
  };
  JointIndex index({"understood", "misperceived"}, 2);
  const std::size_t ab[] = {0, 1};
  PriorSet set = cell_mass_interval(index, mu, index.encode(ab), econ.r_lo, econ.r_hi);
  CcrModel model(std::move(space), ActionTable(2, std::move(actions)), econ.u, std::move(set));
  return {std::move(model), Lottery::degenerate(Profile{"alpha", "beta", "safe", "beta_prime"})};
}

}  // namespace ccr
