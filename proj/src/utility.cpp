#include "ccr/utility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ccr/errors.hpp"

namespace ccr {

namespace {

std::string num(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

}  // namespace

UtilityIndex UtilityIndex::linear() { return UtilityIndex{}; }

UtilityIndex UtilityIndex::cara(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw DomainError("cara utility requires a finite alpha > 0, got " + num(alpha));
  }
  UtilityIndex u;
  u.family_ = Family::kCara;
  u.alpha_ = alpha;
  return u;
}

UtilityIndex UtilityIndex::crra(double gamma, double shift) {
  if (!(gamma > 0.0) || !std::isfinite(gamma) || !std::isfinite(shift)) {
    throw DomainError("crra utility requires a finite gamma > 0, got " + num(gamma));
  }
  if (gamma == 1.0) return log(shift);
  UtilityIndex u;
  u.family_ = Family::kCrra;
  u.gamma_ = gamma;
  u.shift_ = shift;
  return u;
}

UtilityIndex UtilityIndex::log(double shift) {
  if (!std::isfinite(shift)) throw DomainError("log utility requires a finite shift");
  UtilityIndex u;
  u.family_ = Family::kLog;
  u.shift_ = shift;
  return u;
}

UtilityIndex UtilityIndex::piecewise_linear(std::vector<Knot> knots) {
  if (knots.size() < 2) throw DomainError("piecewise-linear utility needs at least two knots");
  for (std::size_t i = 0; i < knots.size(); ++i) {
    if (!std::isfinite(knots[i].first) || !std::isfinite(knots[i].second)) {
      throw DomainError("piecewise-linear knots must be finite");
    }
    if (i > 0 && !(knots[i].first > knots[i - 1].first && knots[i].second > knots[i - 1].second)) {
      throw DomainError("piecewise-linear knots must be strictly increasing in both coordinates");
    }
  }
  UtilityIndex u;
  u.family_ = Family::kPiecewiseLinear;
  u.knots_ = std::move(knots);
  return u;
}

UtilityIndex UtilityIndex::affine(double scale, double offset) const {
  if (!(scale > 0.0) || !std::isfinite(scale) || !std::isfinite(offset)) {
    throw DomainError("affine rescaling requires a finite positive scale");
  }
  UtilityIndex u = *this;
  u.offset_ = scale * offset_ + offset;
  u.scale_ = scale * scale_;
  return u;
}

bool UtilityIndex::in_domain(double x) const noexcept {
  if (!std::isfinite(x)) return false;
  switch (family_) {
    case Family::kCrra:
    case Family::kLog:
      return x + shift_ > 0.0;
    default:
      return true;
  }
}

bool UtilityIndex::in_range(double v) const noexcept {
  if (!std::isfinite(v)) return false;
  const double w = (v - offset_) / scale_;
  switch (family_) {
    case Family::kCara:
      return w < 1.0 / alpha_;
    case Family::kCrra:
      return w * (1.0 - gamma_) + 1.0 > 0.0;
    default:
      return true;
  }
}

void UtilityIndex::require_domain(double x) const {
  if (!in_domain(x)) {
    throw DomainError("outcome " + num(x) + " outside the domain of utility " + describe());
  }
}

double UtilityIndex::base(double x) const {
  switch (family_) {
    case Family::kLinear:
      return x;
    case Family::kCara:
      return -std::expm1(-alpha_ * x) / alpha_;
    case Family::kCrra:
      return (std::pow(x + shift_, 1.0 - gamma_) - 1.0) / (1.0 - gamma_);
    case Family::kLog:
      return std::log(x + shift_);
    case Family::kPiecewiseLinear: {
      const auto& k = knots_;
      std::size_t seg = 0;
      if (x >= k.back().first) {
        seg = k.size() - 2;
      } else if (x > k.front().first) {
        auto it = std::upper_bound(k.begin(), k.end(), x,
                                   [](double v, const Knot& kn) { return v < kn.first; });
        seg = static_cast<std::size_t>(it - k.begin()) - 1;
      }
      const auto [x0, y0] = k[seg];
      const auto [x1, y1] = k[seg + 1];
      if (x == x1) return y1;
      return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
    }
  }
  return x;
}

double UtilityIndex::base_inverse(double w) const {
  switch (family_) {
    case Family::kLinear:
      return w;
    case Family::kCara:
      return -std::log1p(-alpha_ * w) / alpha_;
    case Family::kCrra:
      return std::pow(w * (1.0 - gamma_) + 1.0, 1.0 / (1.0 - gamma_)) - shift_;
    case Family::kLog:
      return std::exp(w) - shift_;
    case Family::kPiecewiseLinear: {
      const auto& k = knots_;
      std::size_t seg = 0;
      if (w >= k.back().second) {
        seg = k.size() - 2;
      } else if (w > k.front().second) {
        auto it = std::upper_bound(k.begin(), k.end(), w,
                                   [](double v, const Knot& kn) { return v < kn.second; });
        seg = static_cast<std::size_t>(it - k.begin()) - 1;
      }
      const auto [x0, y0] = k[seg];
      const auto [x1, y1] = k[seg + 1];
      if (w == y1) return x1;
      return x0 + (x1 - x0) * (w - y0) / (y1 - y0);
    }
  }
  return w;
}

double UtilityIndex::operator()(double x) const {
  require_domain(x);
  return scale_ * base(x) + offset_;
}

double UtilityIndex::inverse(double v) const {
  if (!in_range(v)) {
    throw DomainError("utility value " + num(v) + " outside the range of utility " + describe());
  }
  return base_inverse((v - offset_) / scale_);
}

double UtilityIndex::derivative(double x) const {
  require_domain(x);
  double d = 1.0;
  switch (family_) {
    case Family::kLinear:
      d = 1.0;
      break;
    case Family::kCara:
      d = std::exp(-alpha_ * x);
      break;
    case Family::kCrra:
      d = std::pow(x + shift_, -gamma_);
      break;
    case Family::kLog:
      d = 1.0 / (x + shift_);
      break;
    case Family::kPiecewiseLinear: {
      // Right derivative at knots.
      const auto& k = knots_;
      std::size_t seg = 0;
      while (seg + 2 < k.size() && x >= k[seg + 1].first) ++seg;
      d = (k[seg + 1].second - k[seg].second) / (k[seg + 1].first - k[seg].first);
      break;
    }
  }
  return scale_ * d;
}

double UtilityIndex::second_derivative(double x) const {
  require_domain(x);
  double d = 0.0;
  switch (family_) {
    case Family::kCara:
      d = -alpha_ * std::exp(-alpha_ * x);
      break;
    case Family::kCrra:
      d = -gamma_ * std::pow(x + shift_, -gamma_ - 1.0);
      break;
    case Family::kLog:
      d = -1.0 / ((x + shift_) * (x + shift_));
      break;
    default:
      d = 0.0;
  }
  return scale_ * d;
}

bool UtilityIndex::strictly_concave_family() const noexcept {
  return family_ == Family::kCara || family_ == Family::kCrra || family_ == Family::kLog;
}

std::string UtilityIndex::describe() const {
  std::string s;
  switch (family_) {
    case Family::kLinear:
      s = "linear";
      break;
    case Family::kCara:
      s = "cara(alpha=" + num(alpha_) + ")";
      break;
    case Family::kCrra:
      s = "crra(gamma=" + num(gamma_) + ",shift=" + num(shift_) + ")";
      break;
    case Family::kLog:
      s = "log(shift=" + num(shift_) + ")";
      break;
    case Family::kPiecewiseLinear: {
      s = "piecewise_linear(";
      for (std::size_t i = 0; i < knots_.size(); ++i) {
        if (i) s += ",";
        s += "(" + num(knots_[i].first) + "," + num(knots_[i].second) + ")";
      }
      s += ")";
      break;
    }
  }
  if (scale_ != 1.0 || offset_ != 0.0) s = num(scale_) + "*" + s + "+" + num(offset_);
  return s;
}

bool is_concave_on(const UtilityIndex& u, double lo, double hi, int grid_points) {
  if (hi < lo) std::swap(lo, hi);
  if (grid_points < 3 || hi == lo) return true;
  std::vector<double> xs(static_cast<std::size_t>(grid_points));
  for (int i = 0; i < grid_points; ++i) {
    xs[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (grid_points - 1);
  }
  const double scale_tol = 1e-12 * std::max(1.0, std::abs(u(lo)) + std::abs(u(hi)));
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t j = i + 2; j < xs.size(); j += 2) {
      const double mid = xs[(i + j) / 2];
      if (u(mid) + scale_tol < 0.5 * (u(xs[i]) + u(xs[j]))) return false;
    }
  }
  return true;
}

}  // namespace ccr
