#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>

#include "hausdorff/common.hpp"
#include "hausdorff/field.hpp"
#include "hausdorff/finite_group.hpp"
#include "hausdorff/geometry.hpp"
#include "hausdorff/isometry.hpp"
#include "hausdorff/measure.hpp"

namespace hausdorff {

/// Images of domain points may leave the domain by at most this much.
inline constexpr double kEscapeTolerance = 1e-9;

/// H f(x) = sum_i w_i Phi(u_i) f(A(u_i) x): the Hausdorff-type operator of a
/// discretized measure, a kernel and a family of motions over a domain.
template <typename Scalar>
class HausdorffOperator {
 public:
  HausdorffOperator(DiscretizedMeasure<Scalar> measure, Kernel<Scalar> kernel, IsometryFamily<Scalar> family,
                    Domain<Scalar> domain, std::uint64_t validation_seed = 0)
      : measure_(std::move(measure)), kernel_(std::move(kernel)), family_(std::move(family)),
        domain_(std::move(domain)) {
    require(measure_.size() == kernel_.size(),
            "HausdorffOperator: measure has " + std::to_string(measure_.size()) + " nodes but kernel has " +
                std::to_string(kernel_.size()) + " values");
    require(static_cast<Eigen::Index>(family_.size()) == measure_.size(),
            "HausdorffOperator: family has " + std::to_string(family_.size()) + " members but measure has " +
                std::to_string(measure_.size()) + " nodes");
    require(family_.dimension() == domain_.dimension(), "HausdorffOperator: family and domain dimensions differ");
    family_.validate_domain_preserving(domain_, validation_seed);
    coefficients_ = measure_.weights().cwiseProduct(kernel_.values());
  }

  /// Single node, unit weight, Phi = 1, identity motion.
  static HausdorffOperator identity(const Domain<Scalar>& domain) {
    DiscretizedMeasure<Scalar> m(Vector<Scalar>::Zero(1), Vector<Scalar>::Ones(1));
    return HausdorffOperator(m, Kernel<Scalar>(Vector<Scalar>::Ones(1), "1"),
                             IsometryFamily<Scalar>({Isometry<Scalar>::identity(domain.dimension())}), domain);
  }

  const DiscretizedMeasure<Scalar>& measure() const { return measure_; }
  const Kernel<Scalar>& kernel() const { return kernel_; }
  const IsometryFamily<Scalar>& family() const { return family_; }
  const Domain<Scalar>& domain() const { return domain_; }
  Eigen::Index dimension() const { return domain_.dimension(); }
  Eigen::Index size() const { return measure_.size(); }
  /// w_i Phi(u_i).
  const Vector<Scalar>& coefficients() const { return coefficients_; }
  Scalar kernel_l1() const { return kernel_l1_norm(kernel_, measure_); }

  HausdorffOperator with_kernel(Kernel<Scalar> kernel) const {
    return HausdorffOperator(measure_, std::move(kernel), family_, domain_);
  }

  Scalar apply(const ScalarField<Scalar>& f, const Eigen::Ref<const Vector<Scalar>>& x) const {
    check_point(f, x);
    const Eigen::Index m = size();
    Vector<Scalar> y(dimension());
    Vector<Scalar> terms(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      image(i, x, y);
      terms(i) = coefficients_(i) * f(y);
    }
    return pairwise_sum(terms);
  }

  /// Component j: sum_i w_i Phi(u_i) sum_k (d_k f)(A_i x) V_i(k, j).
  Vector<Scalar> apply_gradient(const ScalarField<Scalar>& f, const Eigen::Ref<const Vector<Scalar>>& x) const {
    Vector<Scalar> out(dimension());
    value_and_gradient(f, x, out);
    return out;
  }

  /// Fused evaluation of H f(x) and its gradient; one pass over the nodes.
  Scalar value_and_gradient(const ScalarField<Scalar>& f, const Eigen::Ref<const Vector<Scalar>>& x,
                            Eigen::Ref<Vector<Scalar>> gradient) const {
    check_point(f, x);
    require(f.has_gradient(), "apply_gradient: field '" + f.description() + "' has no gradient");
    const Eigen::Index m = size();
    const Eigen::Index n = dimension();
    Vector<Scalar> y(n);
    Vector<Scalar> g(n);
    Vector<Scalar> values(m);
    // Row-major terms: column j holds the m contributions to component j.
    Matrix<Scalar> terms(m, n);
    for (Eigen::Index i = 0; i < m; ++i) {
      image(i, x, y);
      values(i) = coefficients_(i) * f.value_and_gradient(y, g);
      terms.row(i).noalias() = coefficients_(i) * (g.transpose() * family_[static_cast<std::size_t>(i)].jacobian());
    }
    for (Eigen::Index j = 0; j < n; ++j)
      gradient(j) = pairwise_sum(std::span<const Scalar>(terms.col(j).data(), static_cast<std::size_t>(m)));
    return pairwise_sum(values);
  }

 private:
  void check_point(const ScalarField<Scalar>& f, const Eigen::Ref<const Vector<Scalar>>& x) const {
    require(f.dimension() == dimension(), "HausdorffOperator: field dimension differs from domain dimension");
    require(x.size() == dimension(), "HausdorffOperator: point dimension differs from domain dimension");
    if (!domain_.contains(x, Scalar(kEscapeTolerance))) throw ContractError("HausdorffOperator: point outside " + domain_.describe());
  }

  void image(Eigen::Index i, const Eigen::Ref<const Vector<Scalar>>& x, Eigen::Ref<Vector<Scalar>> y) const {
    family_[static_cast<std::size_t>(i)].apply_into(x, y);
    if (!domain_.approximates_whole_space() && !domain_.contains(y, Scalar(kEscapeTolerance)))
      throw ContractError("HausdorffOperator: node " + std::to_string(i) + " maps a point of " + domain_.describe() +
                          " outside the domain");
  }

  DiscretizedMeasure<Scalar> measure_;
  Kernel<Scalar> kernel_;
  IsometryFamily<Scalar> family_;
  Domain<Scalar> domain_;
  Vector<Scalar> coefficients_;
};

using HausdorffOperatord = HausdorffOperator<double>;

template <typename Scalar>
Scalar apply(const HausdorffOperator<Scalar>& op, const ScalarField<Scalar>& f,
             const std::type_identity_t<Eigen::Ref<const Vector<Scalar>>>& x) {
  return op.apply(f, x);
}

template <typename Scalar>
Vector<Scalar> apply_gradient(const HausdorffOperator<Scalar>& op, const ScalarField<Scalar>& f,
                              const std::type_identity_t<Eigen::Ref<const Vector<Scalar>>>& x) {
  return op.apply_gradient(f, x);
}

/// H f as a lazily evaluated field: value = apply, gradient = apply_gradient.
template <typename Scalar>
ScalarField<Scalar> push_field(const HausdorffOperator<Scalar>& op, const ScalarField<Scalar>& f) {
  auto shared = std::make_shared<const HausdorffOperator<Scalar>>(op);
  using In = typename ScalarField<Scalar>::In;
  using Out = typename ScalarField<Scalar>::Out;
  typename ScalarField<Scalar>::ValueGradientFn fused;
  if (f.has_gradient()) fused = [shared, f](In x, Out g) { return shared->value_and_gradient(f, x, g); };
  return ScalarField<Scalar>(op.dimension(), [shared, f](In x) { return shared->apply(f, x); }, {}, fused,
                             FieldKind::Custom, "H[" + f.description() + "]");
}

/// Haar measure on O(n) approximated by `count` seeded draws.
struct HaarMonteCarlo {
  int count = 64;
  std::uint64_t seed = 0;
};

using AveragingGroup = std::variant<FiniteGroupSpec, HaarMonteCarlo>;

/// Phi = 1 with a probability measure over rotations (b = 0): the average
/// of f over the orbit of x.
template <typename Scalar = double>
HausdorffOperator<Scalar> averaging_operator(int n, const AveragingGroup& group, const Domain<Scalar>& domain) {
  require(domain.dimension() == n, "averaging_operator: domain dimension differs from n");
  const bool centered_ball =
      domain.shape() == DomainShape::Ball && domain.center().cwiseAbs().maxCoeff() <= Scalar(1e-12);
  require(centered_ball || domain.approximates_whole_space(),
          "averaging_operator: domain must be a ball centered at the origin or a truncated space; "
          "rotations would leave " + domain.describe());
  IsometryFamily<Scalar> family;
  DiscretizedMeasure<Scalar> measure;
  if (const auto* finite = std::get_if<FiniteGroupSpec>(&group)) {
    std::tie(family, measure) = finite_group_family<Scalar>(*finite, n);
  } else {
    const auto& haar = std::get<HaarMonteCarlo>(group);
    require(haar.count >= 1, "averaging_operator: Haar sample count must be >= 1");
    family = haar_rotation_family<Scalar>(n, static_cast<std::size_t>(haar.count), haar.seed);
    measure = discretize<Scalar>(UniformSpec{haar.count});
  }
  auto kernel = make_kernel(KernelExpr::constant(1), measure);
  return HausdorffOperator<Scalar>(std::move(measure), std::move(kernel), std::move(family), domain);
}

}  // namespace hausdorff
