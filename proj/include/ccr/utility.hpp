#pragma once

#include <string>
#include <utility>
#include <vector>

namespace ccr {

/// Strictly increasing, continuous Bernoulli utility index over monetary
/// outcomes. Every family may be composed with a positive affine map
/// `scale * base(x) + offset`.
///
/// Families:
///   linear           base(x) = x
///   cara(alpha)      base(x) = (1 - exp(-alpha x)) / alpha,           alpha > 0
///   crra(gamma, s)   base(x) = ((x + s)^(1 - gamma) - 1) / (1 - gamma), gamma > 0, gamma != 1
///   log(s)           base(x) = ln(x + s)
///   piecewise_linear interpolation through strictly increasing knots,
///                    extended beyond the end knots with the end slopes
class UtilityIndex {
 public:
  enum class Family { kLinear, kCara, kCrra, kLog, kPiecewiseLinear };
  using Knot = std::pair<double, double>;

  static UtilityIndex linear();
  static UtilityIndex cara(double alpha);
  static UtilityIndex crra(double gamma, double shift = 0.0);
  static UtilityIndex log(double shift = 0.0);
  static UtilityIndex piecewise_linear(std::vector<Knot> knots);

  /// Returns `scale * u + offset`; `scale` must be positive.
  UtilityIndex affine(double scale, double offset) const;

  Family family() const noexcept { return family_; }
  double alpha() const noexcept { return alpha_; }
  double gamma() const noexcept { return gamma_; }
  double shift() const noexcept { return shift_; }
  double scale() const noexcept { return scale_; }
  double offset() const noexcept { return offset_; }
  const std::vector<Knot>& knots() const noexcept { return knots_; }

  bool in_domain(double x) const noexcept;
  /// True when `v` is attained by the index.
  bool in_range(double v) const noexcept;

  double operator()(double x) const;
  double inverse(double v) const;
  double derivative(double x) const;
  double second_derivative(double x) const;

  /// Twice differentiable with u'' < 0 on the domain.
  bool strictly_concave_family() const noexcept;

  std::string describe() const;

 private:
  UtilityIndex() = default;
  double base(double x) const;
  double base_inverse(double w) const;
  void require_domain(double x) const;

  Family family_ = Family::kLinear;
  double alpha_ = 0.0;
  double gamma_ = 0.0;
  double shift_ = 0.0;
  double scale_ = 1.0;
  double offset_ = 0.0;
  std::vector<Knot> knots_;
};

inline double utility_of(const UtilityIndex& u, double x) { return u(x); }
inline double inverse_utility(const UtilityIndex& u, double v) { return u.inverse(v); }

/// Midpoint concavity test of `u` on a uniform grid over [lo, hi].
bool is_concave_on(const UtilityIndex& u, double lo, double hi, int grid_points = 201);

}  // namespace ccr
