#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>

#include "hausdorff/common.hpp"
#include "hausdorff/gauss_legendre.hpp"

namespace hausdorff {

enum class DomainShape { Ball, Box, TruncatedSpace };

/// A closed region of R^n with the Euclidean metric. TruncatedSpace(h) is
/// the box [-h, h]^n standing in for all of R^n; images of points under
/// motions are not required to stay inside it.
template <typename Scalar>
class Domain {
 public:
  using VectorType = Vector<Scalar>;

  static Domain ball(const VectorType& center, Scalar radius) {
    require(center.size() >= 1, "Domain::ball: dimension must be >= 1");
    require(radius > Scalar(0), "Domain::ball: radius must be positive");
    Domain d(DomainShape::Ball, center.size());
    d.center_ = center;
    d.radius_ = radius;
    d.lower_ = center.array() - radius;
    d.upper_ = center.array() + radius;
    return d;
  }

  static Domain box(const VectorType& lower, const VectorType& upper) {
    require(lower.size() >= 1, "Domain::box: dimension must be >= 1");
    require(lower.size() == upper.size(), "Domain::box: corner dimensions differ");
    require((lower.array() < upper.array()).all(), "Domain::box: need lower < upper componentwise");
    Domain d(DomainShape::Box, lower.size());
    d.lower_ = lower;
    d.upper_ = upper;
    d.center_ = (lower + upper) / Scalar(2);
    return d;
  }

  static Domain truncated_space(Eigen::Index dimension, Scalar halfwidth) {
    require(dimension >= 1, "Domain::truncated_space: dimension must be >= 1");
    require(halfwidth > Scalar(0), "Domain::truncated_space: halfwidth must be positive");
    Domain d(DomainShape::TruncatedSpace, dimension);
    d.lower_ = VectorType::Constant(dimension, -halfwidth);
    d.upper_ = VectorType::Constant(dimension, halfwidth);
    d.center_ = VectorType::Zero(dimension);
    d.radius_ = halfwidth;
    return d;
  }

  Eigen::Index dimension() const { return dimension_; }
  DomainShape shape() const { return shape_; }
  bool approximates_whole_space() const { return shape_ == DomainShape::TruncatedSpace; }

  const VectorType& center() const { return center_; }
  /// Ball radius, or halfwidth for TruncatedSpace.
  Scalar radius() const { return radius_; }
  Scalar halfwidth() const { return radius_; }
  const VectorType& lower() const { return lower_; }
  const VectorType& upper() const { return upper_; }

  Scalar volume() const {
    if (shape_ == DomainShape::Ball) {
      const Scalar n = Scalar(dimension_);
      return std::pow(std::numbers::pi_v<Scalar>, n / 2) / std::tgamma(n / 2 + 1) *
             std::pow(radius_, n);
    }
    return (upper_ - lower_).prod();
  }

  /// Closed-region membership, optionally inflated by `tolerance`.
  template <typename Derived>
  bool contains(const Eigen::MatrixBase<Derived>& x, Scalar tolerance = Scalar(0)) const {
    require(x.size() == dimension_, "contains: point dimension " + std::to_string(x.size()) +
                                        " does not match domain dimension " +
                                        std::to_string(dimension_));
    if (shape_ == DomainShape::Ball) return (x - center_).norm() <= radius_ + tolerance;
    return ((x.array() >= lower_.array() - tolerance) && (x.array() <= upper_.array() + tolerance))
        .all();
  }

  /// Distance from an interior point to the boundary (negative outside).
  template <typename Derived>
  Scalar boundary_margin(const Eigen::MatrixBase<Derived>& x) const {
    if (shape_ == DomainShape::Ball) return radius_ - (x - center_).norm();
    return std::min((x - lower_).minCoeff(), (upper_ - x).minCoeff());
  }

  std::string describe() const {
    switch (shape_) {
      case DomainShape::Ball:
        return "ball(n=" + std::to_string(dimension_) + ", r=" + std::to_string(radius_) + ")";
      case DomainShape::Box:
        return "box(n=" + std::to_string(dimension_) + ")";
      case DomainShape::TruncatedSpace:
        return "R^" + std::to_string(dimension_) + " truncated to halfwidth " +
               std::to_string(radius_);
    }
    return {};
  }

 private:
  Domain(DomainShape shape, Eigen::Index dimension) : shape_(shape), dimension_(dimension) {}

  DomainShape shape_;
  Eigen::Index dimension_;
  VectorType center_;
  VectorType lower_;
  VectorType upper_;
  Scalar radius_{0};
};

using Domaind = Domain<double>;

template <typename Scalar, typename Derived>
bool contains(const Domain<Scalar>& domain, const Eigen::MatrixBase<Derived>& x) {
  return domain.contains(x);
}

/// `count` i.i.d. uniform points of the domain as columns. Balls use
/// rejection from the bounding box.
template <typename Scalar>
PointSet<Scalar> sample_uniform(const Domain<Scalar>& domain, Eigen::Index count, std::uint64_t seed) {
  require(count >= 1, "sample_uniform: count must be >= 1");
  std::mt19937_64 engine(seed);
  std::uniform_real_distribution<Scalar> unit(Scalar(0), Scalar(1));
  const Eigen::Index n = domain.dimension();
  const Vector<Scalar> extent = domain.upper() - domain.lower();
  PointSet<Scalar> points(n, count);
  Vector<Scalar> x(n);
  for (Eigen::Index i = 0; i < count;) {
    for (Eigen::Index k = 0; k < n; ++k) x(k) = domain.lower()(k) + extent(k) * unit(engine);
    if (domain.shape() == DomainShape::Ball && !domain.contains(x)) continue;
    points.col(i++) = x;
  }
  return points;
}

/// Nodes (columns) and positive weights approximating the Lebesgue
/// measure on a domain.
template <typename Scalar>
struct DomainQuadrature {
  PointSet<Scalar> nodes;
  Vector<Scalar> weights;
  int resolution = 0;

  Eigen::Index size() const { return weights.size(); }
  Scalar total_weight() const { return pairwise_sum(weights); }
};

using DomainQuadratured = DomainQuadrature<double>;

/// Tensor Gauss–Legendre over the bounding box. For balls, nodes outside
/// the ball are dropped together with their weights.
template <typename Scalar>
DomainQuadrature<Scalar> build_grid_quadrature(const Domain<Scalar>& domain, int resolution) {
  require(resolution >= 2, "build_grid_quadrature: resolution must be >= 2");
  const Eigen::Index n = domain.dimension();
  std::vector<Vector<Scalar>> axis_nodes;
  std::vector<Vector<Scalar>> axis_weights;
  for (Eigen::Index k = 0; k < n; ++k) {
    auto [x, w] = gauss_legendre_rule<Scalar>(resolution, domain.lower()(k), domain.upper()(k));
    axis_nodes.push_back(std::move(x));
    axis_weights.push_back(std::move(w));
  }
  Eigen::Index total = 1;
  for (Eigen::Index k = 0; k < n; ++k) total *= resolution;

  DomainQuadrature<Scalar> quad;
  quad.resolution = resolution;
  quad.nodes.resize(n, total);
  quad.weights.resize(total);
  std::vector<int> index(static_cast<std::size_t>(n), 0);
  Vector<Scalar> x(n);
  Eigen::Index kept = 0;
  for (Eigen::Index flat = 0; flat < total; ++flat) {
    Scalar w(1);
    for (Eigen::Index k = 0; k < n; ++k) {
      x(k) = axis_nodes[k](index[k]);
      w *= axis_weights[k](index[k]);
    }
    if (domain.contains(x)) {
      quad.nodes.col(kept) = x;
      quad.weights(kept) = w;
      ++kept;
    }
    for (Eigen::Index k = n - 1; k >= 0; --k) {
      if (++index[k] < resolution) break;
      index[k] = 0;
    }
  }
  quad.nodes.conservativeResize(n, kept);
  quad.weights.conservativeResize(kept);
  return quad;
}

}  // namespace hausdorff
