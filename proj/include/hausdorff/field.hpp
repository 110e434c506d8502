#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "hausdorff/common.hpp"
#include "hausdorff/geometry.hpp"

namespace hausdorff {

enum class FieldKind { Gaussian, Polynomial, GaussianTimesPoly, Custom };

/// coef * prod_k y_k^powers[k]
template <typename Scalar>
struct Monomial {
  Scalar coef{1};
  std::vector<int> powers;
};

inline constexpr double kGradientCheckStep = 1e-5;
inline constexpr double kGradientCheckTolerance = 1e-6;

/// A real function on R^n with an optional analytic gradient. Evaluation
/// takes Eigen::Ref so that matrix columns and preallocated buffers can be
/// passed without copies.
template <typename Scalar>
class ScalarField {
 public:
  using VectorType = Vector<Scalar>;
  using In = Eigen::Ref<const VectorType>;
  using Out = Eigen::Ref<VectorType>;
  using ValueFn = std::function<Scalar(In)>;
  using GradientFn = std::function<void(In, Out)>;
  /// Writes the gradient into `out` and returns the value.
  using ValueGradientFn = std::function<Scalar(In, Out)>;

  ScalarField(Eigen::Index dimension, ValueFn value, GradientFn gradient = {}, ValueGradientFn fused = {},
              FieldKind kind = FieldKind::Custom, std::string description = "custom")
      : dimension_(dimension), value_(std::move(value)), gradient_(std::move(gradient)),
        fused_(std::move(fused)), kind_(kind), description_(std::move(description)) {
    require(dimension_ >= 1, "ScalarField: dimension must be >= 1");
    require(static_cast<bool>(value_), "ScalarField: value function required");
    if (!fused_ && gradient_) {
      fused_ = [value = value_, gradient = gradient_](In y, Out g) {
        gradient(y, g);
        return value(y);
      };
    }
    if (!gradient_ && fused_) {
      gradient_ = [fused = fused_](In y, Out g) { fused(y, g); };
    }
  }

  Eigen::Index dimension() const { return dimension_; }
  FieldKind kind() const { return kind_; }
  const std::string& description() const { return description_; }
  bool has_gradient() const { return static_cast<bool>(gradient_); }

  Scalar operator()(In y) const { return value_(y); }
  Scalar value(In y) const { return value_(y); }

  void gradient(In y, Out out) const {
    require(has_gradient(), "ScalarField '" + description_ + "' has no gradient");
    gradient_(y, out);
  }
  VectorType gradient(In y) const {
    VectorType g(dimension_);
    gradient(y, g);
    return g;
  }
  Scalar value_and_gradient(In y, Out out) const {
    require(has_gradient(), "ScalarField '" + description_ + "' has no gradient");
    return fused_(y, out);
  }

 private:
  Eigen::Index dimension_;
  ValueFn value_;
  GradientFn gradient_;
  ValueGradientFn fused_;
  FieldKind kind_;
  std::string description_;
};

using ScalarFieldd = ScalarField<double>;

/// max over points of |grad f - central FD| / (1 + |central FD|), taken
/// over every axis.
template <typename Scalar>
Scalar gradient_self_check_defect(const ScalarField<Scalar>& f, const PointSet<Scalar>& points,
                                  Scalar step = Scalar(kGradientCheckStep)) {
  const Eigen::Index n = f.dimension();
  Vector<Scalar> g(n);
  Vector<Scalar> shifted(n);
  Scalar worst(0);
  for (Eigen::Index i = 0; i < points.cols(); ++i) {
    f.gradient(points.col(i), g);
    for (Eigen::Index j = 0; j < n; ++j) {
      shifted = points.col(i);
      shifted(j) += step;
      const Scalar up = f(shifted);
      shifted(j) -= 2 * step;
      const Scalar down = f(shifted);
      const Scalar fd = (up - down) / (2 * step);
      worst = std::max(worst, std::abs(g(j) - fd) / (Scalar(1) + std::abs(fd)));
    }
  }
  return worst;
}

namespace detail {

template <typename Scalar>
void self_check(const ScalarField<Scalar>& f, const Vector<Scalar>& center, Scalar halfwidth) {
  const auto box = Domain<Scalar>::box(center.array() - halfwidth, center.array() + halfwidth);
  const PointSet<Scalar> points = sample_uniform(box, 100, 0x5eedULL);
  const Scalar defect = gradient_self_check_defect(f, points);
  require(defect <= Scalar(kGradientCheckTolerance),
          "ScalarField '" + f.description() + "': analytic gradient disagrees with finite differences (defect " +
              std::to_string(defect) + ")");
}

template <typename Scalar>
struct PolynomialData {
  std::vector<Monomial<Scalar>> terms;
  Eigen::Index dimension = 0;

  Scalar value(const Eigen::Ref<const Vector<Scalar>>& y) const {
    Scalar sum(0);
    for (const auto& t : terms) {
      Scalar prod = t.coef;
      for (Eigen::Index k = 0; k < dimension; ++k) prod *= integer_power(y(k), t.powers[k]);
      sum += prod;
    }
    return sum;
  }

  void gradient(const Eigen::Ref<const Vector<Scalar>>& y, Eigen::Ref<Vector<Scalar>> out) const {
    out.setZero();
    for (const auto& t : terms) {
      for (Eigen::Index j = 0; j < dimension; ++j) {
        if (t.powers[j] == 0) continue;
        Scalar prod = t.coef * Scalar(t.powers[j]) * integer_power(y(j), t.powers[j] - 1);
        for (Eigen::Index k = 0; k < dimension; ++k)
          if (k != j) prod *= integer_power(y(k), t.powers[k]);
        out(j) += prod;
      }
    }
  }

  static Scalar integer_power(Scalar x, int e) {
    Scalar r(1);
    for (int i = 0; i < e; ++i) r *= x;
    return r;
  }
};

template <typename Scalar>
std::shared_ptr<const PolynomialData<Scalar>> make_polynomial_data(Eigen::Index n, std::vector<Monomial<Scalar>> terms) {
  require(n >= 1, "polynomial: dimension must be >= 1");
  for (const auto& t : terms) {
    require(static_cast<Eigen::Index>(t.powers.size()) == n, "polynomial: monomial exponent count differs from dimension");
    for (int e : t.powers) require(e >= 0, "polynomial: exponents must be nonnegative");
  }
  return std::make_shared<const PolynomialData<Scalar>>(PolynomialData<Scalar>{std::move(terms), n});
}

}  // namespace detail

/// amplitude * exp(-|y - center|^2 / width^2). With center 0, width 1 this
/// is e^{-|y|^2}.
template <typename Scalar>
ScalarField<Scalar> gaussian_field(const Vector<Scalar>& center, Scalar width = Scalar(1), Scalar amplitude = Scalar(1)) {
  require(width > Scalar(0), "gaussian_field: width must be positive");
  const Scalar inv_w2 = Scalar(1) / (width * width);
  auto value = [center, inv_w2, amplitude](typename ScalarField<Scalar>::In y) {
    return amplitude * std::exp(-(y - center).squaredNorm() * inv_w2);
  };
  auto fused = [center, inv_w2, amplitude](typename ScalarField<Scalar>::In y, typename ScalarField<Scalar>::Out g) {
    const Scalar v = amplitude * std::exp(-(y - center).squaredNorm() * inv_w2);
    g = (y - center) * (Scalar(-2) * inv_w2 * v);
    return v;
  };
  ScalarField<Scalar> f(center.size(), value, {}, fused, FieldKind::Gaussian,
                        "gaussian(w=" + std::to_string(width) + ")");
  detail::self_check(f, center, Scalar(3) * width);
  return f;
}

template <typename Scalar>
ScalarField<Scalar> polynomial_field(Eigen::Index n, std::vector<Monomial<Scalar>> terms) {
  auto data = detail::make_polynomial_data(n, std::move(terms));
  ScalarField<Scalar> f(
      n, [data](typename ScalarField<Scalar>::In y) { return data->value(y); },
      [data](typename ScalarField<Scalar>::In y, typename ScalarField<Scalar>::Out g) { data->gradient(y, g); }, {},
      FieldKind::Polynomial, "poly(" + std::to_string(data->terms.size()) + " terms)");
  detail::self_check(f, Vector<Scalar>(Vector<Scalar>::Zero(n)), Scalar(1));
  return f;
}

/// exp(-|y - center|^2 / width^2) * P(y).
template <typename Scalar>
ScalarField<Scalar> gauss_poly_field(const Vector<Scalar>& center, Scalar width, std::vector<Monomial<Scalar>> terms) {
  require(width > Scalar(0), "gauss_poly_field: width must be positive");
  const Eigen::Index n = center.size();
  auto data = detail::make_polynomial_data(n, std::move(terms));
  const Scalar inv_w2 = Scalar(1) / (width * width);
  auto value = [center, inv_w2, data](typename ScalarField<Scalar>::In y) {
    return std::exp(-(y - center).squaredNorm() * inv_w2) * data->value(y);
  };
  auto fused = [center, inv_w2, data](typename ScalarField<Scalar>::In y, typename ScalarField<Scalar>::Out g) {
    const Scalar gauss = std::exp(-(y - center).squaredNorm() * inv_w2);
    const Scalar poly = data->value(y);
    data->gradient(y, g);
    g = gauss * g + (y - center) * (Scalar(-2) * inv_w2 * gauss * poly);
    return gauss * poly;
  };
  ScalarField<Scalar> f(n, value, {}, fused, FieldKind::GaussianTimesPoly,
                        "gausspoly(w=" + std::to_string(width) + ")");
  detail::self_check(f, center, Scalar(3) * width);
  return f;
}

/// alpha f + beta g, pointwise, gradients combined when both exist.
template <typename Scalar>
ScalarField<Scalar> linear_combination(Scalar alpha, const ScalarField<Scalar>& f, Scalar beta, const ScalarField<Scalar>& g) {
  require(f.dimension() == g.dimension(), "linear_combination: dimension mismatch");
  using In = typename ScalarField<Scalar>::In;
  using Out = typename ScalarField<Scalar>::Out;
  auto value = [=](In y) { return alpha * f(y) + beta * g(y); };
  typename ScalarField<Scalar>::ValueGradientFn fused;
  if (f.has_gradient() && g.has_gradient()) {
    fused = [=](In y, Out out) {
      Vector<Scalar> tmp(f.dimension());
      const Scalar a = f.value_and_gradient(y, out);
      const Scalar b = g.value_and_gradient(y, tmp);
      out = alpha * out + beta * tmp;
      return alpha * a + beta * b;
    };
  }
  return ScalarField<Scalar>(f.dimension(), value, {}, fused, FieldKind::Custom,
                             "(" + f.description() + ")+(" + g.description() + ")");
}

template <typename Scalar>
ScalarField<Scalar> operator+(const ScalarField<Scalar>& f, const ScalarField<Scalar>& g) {
  return linear_combination(Scalar(1), f, Scalar(1), g);
}

template <typename Scalar>
ScalarField<Scalar> operator*(Scalar lambda, const ScalarField<Scalar>& f) {
  using In = typename ScalarField<Scalar>::In;
  using Out = typename ScalarField<Scalar>::Out;
  typename ScalarField<Scalar>::ValueGradientFn fused;
  if (f.has_gradient()) {
    fused = [=](In y, Out out) {
      const Scalar v = f.value_and_gradient(y, out);
      out *= lambda;
      return lambda * v;
    };
  }
  return ScalarField<Scalar>(f.dimension(), [=](In y) { return lambda * f(y); }, {}, fused, FieldKind::Custom,
                             std::to_string(lambda) + "*" + f.description());
}

/// f evaluated at every quadrature node.
template <typename Scalar>
Vector<Scalar> evaluate_on(const ScalarField<Scalar>& f, const PointSet<Scalar>& nodes) {
  require(nodes.rows() == f.dimension(), "evaluate_on: node dimension differs from field dimension");
  Vector<Scalar> values(nodes.cols());
  parallel_for(static_cast<std::size_t>(nodes.cols()), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) values(static_cast<Eigen::Index>(i)) = f(nodes.col(static_cast<Eigen::Index>(i)));
  });
  return values;
}

/// Values (length N) and gradients (n x N) at every node.
template <typename Scalar>
std::pair<Vector<Scalar>, Matrix<Scalar>> evaluate_with_gradient_on(const ScalarField<Scalar>& f,
                                                                  const PointSet<Scalar>& nodes) {
  require(nodes.rows() == f.dimension(), "evaluate_with_gradient_on: node dimension differs from field dimension");
  require(f.has_gradient(), "ScalarField '" + f.description() + "' has no gradient");
  Vector<Scalar> values(nodes.cols());
  Matrix<Scalar> grads(nodes.rows(), nodes.cols());
  parallel_for(static_cast<std::size_t>(nodes.cols()), [&](std::size_t begin, std::size_t end) {
    Vector<Scalar> g(nodes.rows());
    for (std::size_t s = begin; s < end; ++s) {
      const auto i = static_cast<Eigen::Index>(s);
      values(i) = f.value_and_gradient(nodes.col(i), g);
      grads.col(i) = g;
    }
  });
  return {values, grads};
}

/// (sum_i w_i |v_i|^p)^{1/p} with pairwise summation.
template <typename Derived, typename Scalar>
Scalar lp_norm_of_samples(const Eigen::MatrixBase<Derived>& values, const Vector<Scalar>& weights, Scalar p) {
  require(p >= Scalar(1), "lp_norm: p must be >= 1 (got " + std::to_string(p) + ")");
  require(values.size() == weights.size(), "lp_norm: sample and weight counts differ");
  Vector<Scalar> terms(values.size());
  if (p == Scalar(1)) {
    terms = values.cwiseAbs().cwiseProduct(weights);
  } else if (p == Scalar(2)) {
    terms = values.cwiseAbs2().cwiseProduct(weights);
  } else {
    terms = values.cwiseAbs().array().pow(p).matrix().cwiseProduct(weights);
  }
  const Scalar total = pairwise_sum(terms);
  if (p == Scalar(1)) return total;
  if (p == Scalar(2)) return std::sqrt(total);
  return std::pow(total, Scalar(1) / p);
}

template <typename Scalar>
Scalar lp_norm(const ScalarField<Scalar>& f, Scalar p, const DomainQuadrature<Scalar>& quad) {
  require(p >= Scalar(1), "lp_norm: p must be >= 1 (got " + std::to_string(p) + ")");
  return lp_norm_of_samples(evaluate_on(f, quad.nodes), quad.weights, p);
}

/// ||f||_p, ||d_k f||_p for each axis, and their sum ||f||_{W^{1,p}}.
template <typename Scalar>
struct NormReport {
  Scalar lp{0};
  Vector<Scalar> per_axis_derivative_lp;
  Scalar sobolev{0};
  Scalar p{1};
  int quadrature_resolution = 0;
};

using NormReportd = NormReport<double>;

template <typename Scalar>
NormReport<Scalar> sobolev_report_from_samples(const Vector<Scalar>& values, const Matrix<Scalar>& grads,
                                               const Vector<Scalar>& weights, Scalar p, int resolution) {
  NormReport<Scalar> r;
  r.p = p;
  r.quadrature_resolution = resolution;
  r.lp = lp_norm_of_samples(values, weights, p);
  r.per_axis_derivative_lp.resize(grads.rows());
  for (Eigen::Index k = 0; k < grads.rows(); ++k)
    r.per_axis_derivative_lp(k) = lp_norm_of_samples(grads.row(k).transpose(), weights, p);
  r.sobolev = r.lp;
  for (Eigen::Index k = 0; k < grads.rows(); ++k) r.sobolev += r.per_axis_derivative_lp(k);
  return r;
}

/// Sobolev norms for several exponents from a single pass over the nodes.
template <typename Scalar>
std::vector<NormReport<Scalar>> sobolev_norms(const ScalarField<Scalar>& f, const std::vector<Scalar>& ps,
                                              const DomainQuadrature<Scalar>& quad) {
  for (Scalar p : ps) require(p >= Scalar(1), "sobolev_norm: p must be >= 1 (got " + std::to_string(p) + ")");
  const auto [values, grads] = evaluate_with_gradient_on(f, quad.nodes);
  std::vector<NormReport<Scalar>> out;
  out.reserve(ps.size());
  for (Scalar p : ps) out.push_back(sobolev_report_from_samples(values, grads, quad.weights, p, quad.resolution));
  return out;
}

template <typename Scalar>
NormReport<Scalar> sobolev_norm(const ScalarField<Scalar>& f, Scalar p, const DomainQuadrature<Scalar>& quad) {
  return sobolev_norms(f, std::vector<Scalar>{p}, quad).front();
}

/// max over pairs of |f(x) - f(y)| - |x - y| (g(x) + g(y)); a value <= 0
/// means g is a Hajlasz gradient of f on the sampled pairs.
template <typename Scalar>
Scalar hajlasz_defect(const ScalarField<Scalar>& f, const ScalarField<Scalar>& g, const PointSet<Scalar>& xs,
                      const PointSet<Scalar>& ys) {
  require(xs.cols() >= 1 && xs.cols() == ys.cols(), "hajlasz_defect: need matching, nonempty pair sets");
  Scalar worst = -std::numeric_limits<Scalar>::infinity();
  for (Eigen::Index i = 0; i < xs.cols(); ++i) {
    const Scalar lhs = std::abs(f(xs.col(i)) - f(ys.col(i)));
    const Scalar rhs = (xs.col(i) - ys.col(i)).norm() * (g(xs.col(i)) + g(ys.col(i)));
    worst = std::max(worst, lhs - rhs);
  }
  return worst;
}

}  // namespace hausdorff
