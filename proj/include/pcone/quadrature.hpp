#pragma once

// Gauss-Legendre rules remapped to [0, 1], backed by Boost.Math's node
// tables. Exposed as plain node/weight arrays so matrix-valued integrands
// can be accumulated directly.

#include <boost/math/quadrature/gauss.hpp>

#include <vector>

namespace pcone {

struct GaussRule {
  std::vector<double> nodes;    // in (0, 1)
  std::vector<double> weights;  // sum to 1
};

namespace detail {

template <unsigned N>
GaussRule make_gauss_rule() {
  using G = boost::math::quadrature::gauss<double, N>;
  GaussRule rule;
  const auto& half_nodes = G::abscissa();   // nonnegative half of [-1, 1]
  const auto& half_weights = G::weights();
  for (std::size_t i = 0; i < half_nodes.size(); ++i) {
    const double x = half_nodes[i];
    const double w = half_weights[i] / 2.0;  // interval shrinks 2 -> 1
    rule.nodes.push_back((1.0 - x) / 2.0);
    rule.weights.push_back(w);
    if (x > 0.0) {
      rule.nodes.push_back((1.0 + x) / 2.0);
      rule.weights.push_back(w);
    }
  }
  return rule;
}

}  // namespace detail

inline const GaussRule& gauss16() {
  static const GaussRule rule = detail::make_gauss_rule<16>();
  return rule;
}

inline const GaussRule& gauss64() {
  static const GaussRule rule = detail::make_gauss_rule<64>();
  return rule;
}

}  // namespace pcone
