#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "hausdorff/isometry.hpp"
#include "hausdorff/measure.hpp"

namespace hausdorff {

enum class FiniteGroupKind { SignFlips, SignedPermutations, CyclicRotation2D };

struct FiniteGroupSpec {
  FiniteGroupKind kind = FiniteGroupKind::SignFlips;
  int order = 1;  // m for CyclicRotation2D
};

inline constexpr double kMaxGroupOrder = 1e6;

inline double finite_group_order(const FiniteGroupSpec& spec, int n) {
  switch (spec.kind) {
    case FiniteGroupKind::SignFlips: return std::pow(2.0, n);
    case FiniteGroupKind::SignedPermutations: return std::pow(2.0, n) * std::tgamma(n + 1.0);
    case FiniteGroupKind::CyclicRotation2D: return spec.order;
  }
  return 0;
}

/// All elements of a finite subgroup of O(n) paired with its normalized
/// counting (Haar) measure.
template <typename Scalar = double>
std::pair<IsometryFamily<Scalar>, DiscretizedMeasure<Scalar>> finite_group_family(const FiniteGroupSpec& spec, int n) {
  require(n >= 1, "finite_group_family: n must be >= 1");
  const double order = finite_group_order(spec, n);
  require(order <= kMaxGroupOrder, "finite_group_family: group order " + std::to_string(order) +
                                       " exceeds the cap of 1e6 elements");
  std::vector<Isometry<Scalar>> members;
  switch (spec.kind) {
    case FiniteGroupKind::SignFlips: {
      for (long mask = 0; mask < (1L << n); ++mask) {
        Vector<Scalar> diag(n);
        for (int k = 0; k < n; ++k) diag(k) = (mask >> k) & 1 ? Scalar(-1) : Scalar(1);
        members.push_back(Isometry<Scalar>::linear(diag.asDiagonal().toDenseMatrix()));
      }
      break;
    }
    case FiniteGroupKind::SignedPermutations: {
      std::vector<int> perm(static_cast<std::size_t>(n));
      std::iota(perm.begin(), perm.end(), 0);
      do {
        for (long mask = 0; mask < (1L << n); ++mask) {
          Matrix<Scalar> v = Matrix<Scalar>::Zero(n, n);
          for (int k = 0; k < n; ++k) v(k, perm[k]) = (mask >> k) & 1 ? Scalar(-1) : Scalar(1);
          members.push_back(Isometry<Scalar>::linear(std::move(v)));
        }
      } while (std::next_permutation(perm.begin(), perm.end()));
      break;
    }
    case FiniteGroupKind::CyclicRotation2D: {
      require(n == 2, "finite_group_family: cyclic rotations need n = 2");
      require(spec.order >= 1, "finite_group_family: cyclic order must be >= 1");
      for (int k = 0; k < spec.order; ++k) {
        const Scalar angle = Scalar(2) * std::numbers::pi_v<Scalar> * Scalar(k) / Scalar(spec.order);
        Matrix<Scalar> v(2, 2);
        v << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
        members.push_back(Isometry<Scalar>::linear(std::move(v)));
      }
      break;
    }
  }
  const int count = static_cast<int>(members.size());
  auto measure = discretize<Scalar>(UniformSpec{count});
  return {IsometryFamily<Scalar>(std::move(members)), std::move(measure)};
}

}  // namespace hausdorff
