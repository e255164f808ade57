#pragma once

#include <initializer_list>
#include <string>

#include "ccr/core_model.hpp"
#include "ccr/prior_engine.hpp"
#include "ccr/utility.hpp"
#include "ccr/valuation.hpp"

namespace fx {

inline Eigen::VectorXd temperature_mu() {
  Eigen::VectorXd mu(2);
  mu << 0.6, 0.4;
  return mu;
}

inline ccr::StateSpace temperature_space() { return ccr::StateSpace({"A", "B"}, temperature_mu()); }

inline ccr::JointIndex temperature_index() { return ccr::JointIndex({"C", "F"}, 2); }

/// b_C pays 100 in A, b_F pays 100 in B; b = b_C - b_F; neg_b_F = -b_F.
inline ccr::ActionTable temperature_actions() {
  return ccr::ActionTable(2, {{"b_C", Eigen::Vector2d(100, 0), "C"},
                              {"b_F", Eigen::Vector2d(0, 100), "F"},
                              {"b", Eigen::Vector2d(100, -100), "C"},
                              {"neg_b_F", Eigen::Vector2d(0, -100), "F"}});
}

inline ccr::PriorSet frechet() { return ccr::PriorSet::frechet(temperature_index(), temperature_mu()); }

/// Couplings whose off-diagonal mass t = pi(A in C, B in F) lies in [lo, hi].
inline ccr::PriorSet t_interval(double lo, double hi) {
  return ccr::cell_mass_interval(temperature_index(), temperature_mu(), 1, lo, hi);
}

inline ccr::PriorSet diagonal_singleton() {
  return ccr::PriorSet::singleton(temperature_mu(),
                                  ccr::diagonal_pushforward(temperature_space(), temperature_index()));
}

inline ccr::CcrModel temperature(const ccr::UtilityIndex& u, ccr::PriorSet set) {
  return ccr::CcrModel(temperature_space(), temperature_actions(), u, std::move(set));
}

inline ccr::UtilityIndex cara() { return ccr::UtilityIndex::cara(0.01); }

inline ccr::UtilityIndex piecewise() {
  return ccr::UtilityIndex::piecewise_linear({{-100, -100}, {0, -25}, {100, 60}, {200, 100}});
}

inline ccr::Lottery delta(std::initializer_list<std::string> ids) {
  return ccr::Lottery::degenerate(ccr::Profile(ids));
}

inline ccr::Lottery sure(double x) { return delta({ccr::constant_action_id(x)}); }

}  // namespace fx
