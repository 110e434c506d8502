#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "hausdorff/common.hpp"
#include "hausdorff/geometry.hpp"

namespace hausdorff {

inline constexpr double kOrthogonalityTolerance = 1e-12;

/// Euclidean motion x -> Vx + b with V orthogonal. The Jacobian of every
/// component a_k(x) = (Vx + b)_k is the constant row V(k, :).
template <typename Scalar>
class Isometry {
 public:
  using VectorType = Vector<Scalar>;
  using MatrixType = Matrix<Scalar>;

  Isometry(MatrixType linear, VectorType translation)
      : linear_(std::move(linear)), translation_(std::move(translation)) {
    require(linear_.rows() == linear_.cols(), "Isometry: linear part must be square");
    require(linear_.rows() == translation_.size(), "Isometry: translation dimension mismatch");
    require(linear_.rows() >= 1, "Isometry: dimension must be >= 1");
    const Scalar defect = orthogonality_defect(linear_);
    require(defect <= Scalar(kOrthogonalityTolerance),
            "Isometry: linear part is not orthogonal (max |V^T V - I| = " +
                std::to_string(defect) + ")");
  }

  static Isometry identity(Eigen::Index n) {
    return Isometry(MatrixType::Identity(n, n), VectorType::Zero(n));
  }
  static Isometry linear(MatrixType v) {
    const Eigen::Index n = v.rows();
    return Isometry(std::move(v), VectorType::Zero(n));
  }
  static Isometry translation(VectorType b) {
    const Eigen::Index n = b.size();
    return Isometry(MatrixType::Identity(n, n), std::move(b));
  }

  template <typename Derived>
  static Scalar orthogonality_defect(const Eigen::MatrixBase<Derived>& v) {
    return (v.transpose() * v - MatrixType::Identity(v.cols(), v.cols())).cwiseAbs().maxCoeff();
  }

  Eigen::Index dimension() const { return linear_.rows(); }
  const MatrixType& linear() const { return linear_; }
  const VectorType& translation() const { return translation_; }
  /// d a_k / d x_j = V(k, j).
  const MatrixType& jacobian() const { return linear_; }
  Scalar determinant() const { return linear_.determinant(); }

  template <typename Derived>
  VectorType operator()(const Eigen::MatrixBase<Derived>& x) const {
    require(x.size() == dimension(), "Isometry: point dimension mismatch");
    return linear_ * x + translation_;
  }

  /// Allocation-free image for hot loops; `out` must be preallocated.
  template <typename Derived>
  void apply_into(const Eigen::MatrixBase<Derived>& x, Eigen::Ref<VectorType> out) const {
    out.noalias() = linear_ * x;
    out += translation_;
  }

  template <typename Derived>
  VectorType inverse_apply(const Eigen::MatrixBase<Derived>& y) const {
    return linear_.transpose() * (y - translation_);
  }

  Isometry inverse() const {
    return Isometry(linear_.transpose(), -(linear_.transpose() * translation_));
  }

  /// (this * other)(x) = this(other(x)).
  Isometry operator*(const Isometry& other) const {
    return Isometry(linear_ * other.linear_, linear_ * other.translation_ + translation_);
  }

 private:
  MatrixType linear_;
  VectorType translation_;
};

using Isometryd = Isometry<double>;

template <typename Scalar, typename Derived>
Vector<Scalar> apply_isometry(const Isometry<Scalar>& iso, const Eigen::MatrixBase<Derived>& x) {
  return iso(x);
}

/// max over column pairs of | |Vx + b - (Vy + b)| - |x - y| | for an arbitrary
/// (possibly non-orthogonal) affine map.
template <typename DerivedV, typename DerivedB, typename Scalar>
Scalar motion_defect(const Eigen::MatrixBase<DerivedV>& v, const Eigen::MatrixBase<DerivedB>& b,
                     const PointSet<Scalar>& xs, const PointSet<Scalar>& ys) {
  require(xs.cols() >= 1, "isometry_defect: need at least one pair");
  require(xs.cols() == ys.cols() && xs.rows() == ys.rows(), "isometry_defect: pair sets differ in shape");
  Scalar worst(0);
  for (Eigen::Index i = 0; i < xs.cols(); ++i) {
    const Vector<Scalar> ax = v * xs.col(i) + b;
    const Vector<Scalar> ay = v * ys.col(i) + b;
    worst = std::max(worst, std::abs((ax - ay).norm() - (xs.col(i) - ys.col(i)).norm()));
  }
  return worst;
}

template <typename Scalar>
Scalar isometry_defect(const Isometry<Scalar>& iso, const PointSet<Scalar>& xs, const PointSet<Scalar>& ys) {
  return motion_defect(iso.linear(), iso.translation(), xs, ys);
}

/// Haar-distributed element of O(n): QR of a standard Gaussian matrix with
/// column j of Q multiplied by sign(R(j, j)).
template <typename Scalar, typename Engine>
Matrix<Scalar> haar_orthogonal(Eigen::Index n, Engine& engine) {
  require(n >= 1, "haar_orthogonal: n must be >= 1");
  std::normal_distribution<Scalar> normal(Scalar(0), Scalar(1));
  Matrix<Scalar> gaussian(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) gaussian(i, j) = normal(engine);
  Eigen::HouseholderQR<Matrix<Scalar>> qr(gaussian);
  Matrix<Scalar> q = qr.householderQ() * Matrix<Scalar>::Identity(n, n);
  const Matrix<Scalar>& r = qr.matrixQR();
  for (Eigen::Index j = 0; j < n; ++j)
    if (r(j, j) < Scalar(0)) q.col(j) = -q.col(j);
  return q;
}

template <typename Scalar = double>
Matrix<Scalar> haar_orthogonal(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  return haar_orthogonal<Scalar>(n, engine);
}

/// A finite family of motions, one per node of the paired measure.
template <typename Scalar>
class IsometryFamily {
 public:
  IsometryFamily() = default;
  explicit IsometryFamily(std::vector<Isometry<Scalar>> members) : members_(std::move(members)) {
    require(!members_.empty(), "IsometryFamily: needs at least one member");
    const Eigen::Index n = members_.front().dimension();
    for (const auto& m : members_) {
      require(m.dimension() == n, "IsometryFamily: members differ in dimension");
      jacobian_bound_ = std::max(jacobian_bound_, m.linear().cwiseAbs().maxCoeff());
      translation_bound_ = std::max(translation_bound_, m.translation().norm());
    }
  }

  std::size_t size() const { return members_.size(); }
  Eigen::Index dimension() const { return members_.front().dimension(); }
  const Isometry<Scalar>& operator[](std::size_t i) const { return members_[i]; }
  const std::vector<Isometry<Scalar>>& members() const { return members_; }
  auto begin() const { return members_.begin(); }
  auto end() const { return members_.end(); }

  /// C: max over members and entries of |V(k, j)|.
  Scalar jacobian_bound() const { return jacobian_bound_; }
  /// C1: max over members of |b|.
  Scalar translation_bound() const { return translation_bound_; }

  /// Statistical domain-preservation check: every member must map a seeded
  /// sample of the domain into the domain (up to `tolerance`). Truncated
  /// spaces stand for R^n, which every motion preserves.
  void validate_domain_preserving(const Domain<Scalar>& domain, std::uint64_t seed,
                                  Eigen::Index samples = 1000, Scalar tolerance = Scalar(1e-9)) const {
    require(domain.dimension() == dimension(), "IsometryFamily: dimension differs from domain");
    if (domain.approximates_whole_space()) return;
    const PointSet<Scalar> points = sample_uniform(domain, samples, seed);
    Vector<Scalar> y(dimension());
    for (std::size_t i = 0; i < members_.size(); ++i) {
      for (Eigen::Index s = 0; s < points.cols(); ++s) {
        members_[i].apply_into(points.col(s), y);
        if (!domain.contains(y, tolerance))
          throw ContractError("IsometryFamily: member " + std::to_string(i) +
                              " maps points of " + domain.describe() + " outside the domain");
      }
    }
  }

 private:
  std::vector<Isometry<Scalar>> members_;
  Scalar jacobian_bound_{0};
  Scalar translation_bound_{0};
};

using IsometryFamilyd = IsometryFamily<double>;

template <typename Scalar, typename Engine>
IsometryFamily<Scalar> haar_rotation_family(Eigen::Index n, std::size_t count, Engine& engine) {
  std::vector<Isometry<Scalar>> members;
  members.reserve(count);
  for (std::size_t i = 0; i < count; ++i)
    members.push_back(Isometry<Scalar>::linear(haar_orthogonal<Scalar>(n, engine)));
  return IsometryFamily<Scalar>(std::move(members));
}

template <typename Scalar = double>
IsometryFamily<Scalar> haar_rotation_family(Eigen::Index n, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  return haar_rotation_family<Scalar>(n, count, engine);
}

/// Translations x -> x + u_i d along a fixed unit direction d.
template <typename Scalar = double>
IsometryFamily<Scalar> shift_family(const std::type_identity_t<Vector<Scalar>>& nodes,
                                    const std::type_identity_t<Vector<Scalar>>& direction) {
  require(nodes.size() >= 1, "shift_family: needs at least one node");
  require(std::abs(direction.norm() - Scalar(1)) <= Scalar(1e-12), "shift_family: direction must be a unit vector");
  std::vector<Isometry<Scalar>> members;
  members.reserve(static_cast<std::size_t>(nodes.size()));
  for (Eigen::Index i = 0; i < nodes.size(); ++i)
    members.push_back(Isometry<Scalar>::translation(nodes(i) * direction));
  return IsometryFamily<Scalar>(std::move(members));
}

/// One-dimensional translations x -> x + u_i.
template <typename Scalar = double>
IsometryFamily<Scalar> shift_family(const std::type_identity_t<Vector<Scalar>>& nodes) {
  return shift_family<Scalar>(nodes, Vector<Scalar>::Ones(1));
}

/// Shifts by the fractional part u - floor(u), so every translation lies in
/// [0, 1) while the parameter u itself is unbounded.
template <typename Scalar = double>
IsometryFamily<Scalar> folded_shift_family(const std::type_identity_t<Vector<Scalar>>& nodes) {
  Vector<Scalar> folded = nodes.unaryExpr([](Scalar u) { return u - std::floor(u); });
  return shift_family<Scalar>(folded);
}

}  // namespace hausdorff
