#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

#include "hausdorff/common.hpp"

namespace hausdorff {

/// Nodes and weights of the `count`-point Gauss–Legendre rule on [-1, 1],
/// nodes ascending. Exact for polynomials of degree <= 2 count - 1.
template <typename Scalar = double>
std::pair<Vector<Scalar>, Vector<Scalar>> gauss_legendre_rule(int count) {
  require(count >= 1, "gauss_legendre_rule: count must be >= 1");
  Vector<Scalar> nodes(count);
  Vector<Scalar> weights(count);
  // Returns (P_count(x), P_count'(x)) by the three-term recurrence.
  const auto legendre = [count](Scalar x) {
    Scalar p0(1);
    Scalar p1 = x;
    for (int k = 2; k <= count; ++k) {
      const Scalar p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / Scalar(k);
      p0 = p1;
      p1 = p2;
    }
    return std::pair{p1, Scalar(count) * (x * p1 - p0) / (x * x - Scalar(1))};
  };
  const int half = (count + 1) / 2;
  for (int i = 0; i < half; ++i) {
    Scalar x = std::cos(std::numbers::pi_v<Scalar> * (Scalar(i) + Scalar(0.75)) /
                        (Scalar(count) + Scalar(0.5)));
    for (int iter = 0; iter < 100; ++iter) {
      const auto [value, slope] = legendre(x);
      const Scalar step = value / slope;
      x -= step;
      if (std::abs(step) <= Scalar(4) * std::numeric_limits<Scalar>::epsilon()) break;
    }
    const Scalar slope = legendre(x).second;
    const Scalar w = Scalar(2) / ((Scalar(1) - x * x) * slope * slope);
    nodes(count - 1 - i) = x;
    nodes(i) = -x;
    weights(i) = w;
    weights(count - 1 - i) = w;
  }
  if (count % 2 == 1) nodes(count / 2) = Scalar(0);
  return {nodes, weights};
}

/// Gauss–Legendre rule mapped affinely onto [lower, upper].
template <typename Scalar = double>
std::pair<Vector<Scalar>, Vector<Scalar>> gauss_legendre_rule(int count, Scalar lower, Scalar upper) {
  require(lower < upper, "gauss_legendre_rule: empty interval");
  auto [nodes, weights] = gauss_legendre_rule<Scalar>(count);
  const Scalar half = (upper - lower) / Scalar(2);
  const Scalar mid = (upper + lower) / Scalar(2);
  nodes = (nodes.array() * half + mid).matrix();
  weights *= half;
  return {nodes, weights};
}

}  // namespace hausdorff
