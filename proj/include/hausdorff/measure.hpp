#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "hausdorff/common.hpp"
#include "hausdorff/gauss_legendre.hpp"

namespace hausdorff {

enum class MeasureScheme { Explicit, GaussLegendre, GradedGaussLegendre, MonteCarlo, FiniteGroupUniform };

/// Nodes u_i of the parameter space T with nonnegative weights w_i, so that
/// integrals over (T, mu) become sum_i w_i F(u_i).
template <typename Scalar>
class DiscretizedMeasure {
 public:
  DiscretizedMeasure() = default;
  DiscretizedMeasure(Vector<Scalar> nodes, Vector<Scalar> weights,
                     MeasureScheme scheme = MeasureScheme::Explicit, std::string description = "explicit")
      : nodes_(std::move(nodes)), weights_(std::move(weights)), scheme_(scheme),
        description_(std::move(description)) {
    require(nodes_.size() >= 1, "DiscretizedMeasure: needs at least one node");
    require(nodes_.size() == weights_.size(), "DiscretizedMeasure: " + std::to_string(nodes_.size()) +
                                                  " nodes but " + std::to_string(weights_.size()) + " weights");
    require((weights_.array() >= Scalar(0)).all(), "DiscretizedMeasure: weights must be nonnegative");
    require(weights_.allFinite() && nodes_.allFinite(), "DiscretizedMeasure: nodes and weights must be finite");
  }

  Eigen::Index size() const { return nodes_.size(); }
  const Vector<Scalar>& nodes() const { return nodes_; }
  const Vector<Scalar>& weights() const { return weights_; }
  MeasureScheme scheme() const { return scheme_; }
  const std::string& description() const { return description_; }
  Scalar total_mass() const { return pairwise_sum(weights_); }

 private:
  Vector<Scalar> nodes_;
  Vector<Scalar> weights_;
  MeasureScheme scheme_ = MeasureScheme::Explicit;
  std::string description_;
};

using DiscretizedMeasured = DiscretizedMeasure<double>;

struct GaussLegendreSpec {
  double lower = 0;
  double upper = 1;
  int count = 16;
};
/// Composite Gauss–Legendre on panels [lower, lower+1], [lower+1, lower+2],
/// [lower+2, lower+4], ... doubling in length, clipped at `upper`. Suited to
/// slowly decaying kernels on long intervals.
struct GradedGaussLegendreSpec {
  double lower = 0;
  double upper = 1;
  int points_per_panel = 16;
};
struct MonteCarloSpec {
  double lower = 0;
  double upper = 1;
  int count = 1;
  std::uint64_t seed = 0;
};
struct ExplicitSpec {
  std::vector<double> nodes;
  std::vector<double> weights;
};
/// Probability measure with equal weights on nodes 0, 1, ..., count - 1.
struct UniformSpec {
  int count = 1;
};

using MeasureSpec = std::variant<GaussLegendreSpec, GradedGaussLegendreSpec, MonteCarloSpec, ExplicitSpec, UniformSpec>;

inline Eigen::Index node_count(const MeasureSpec& spec) {
  struct Counter {
    Eigen::Index operator()(const GaussLegendreSpec& s) const { return s.count; }
    Eigen::Index operator()(const GradedGaussLegendreSpec& s) const {
      Eigen::Index panels = 0;
      double a = s.lower;
      double length = 1;
      while (a < s.upper) {
        a += length;
        if (panels > 0) length *= 2;
        ++panels;
      }
      return panels * s.points_per_panel;
    }
    Eigen::Index operator()(const MonteCarloSpec& s) const { return s.count; }
    Eigen::Index operator()(const ExplicitSpec& s) const { return static_cast<Eigen::Index>(s.nodes.size()); }
    Eigen::Index operator()(const UniformSpec& s) const { return s.count; }
  };
  return std::visit(Counter{}, spec);
}

template <typename Scalar = double>
DiscretizedMeasure<Scalar> discretize(const MeasureSpec& spec) {
  struct Builder {
    DiscretizedMeasure<Scalar> operator()(const GaussLegendreSpec& s) const {
      require(s.lower < s.upper, "discretize: empty interval");
      require(s.count >= 1, "discretize: count must be >= 1");
      auto [x, w] = gauss_legendre_rule<Scalar>(s.count, Scalar(s.lower), Scalar(s.upper));
      return {std::move(x), std::move(w), MeasureScheme::GaussLegendre,
              "gauss_legendre[" + std::to_string(s.lower) + "," + std::to_string(s.upper) + "]x" +
                  std::to_string(s.count)};
    }
    DiscretizedMeasure<Scalar> operator()(const GradedGaussLegendreSpec& s) const {
      require(s.lower < s.upper, "discretize: empty interval");
      require(s.points_per_panel >= 1, "discretize: points_per_panel must be >= 1");
      std::vector<std::pair<Scalar, Scalar>> panels;
      Scalar a = Scalar(s.lower);
      Scalar length(1);
      while (a < Scalar(s.upper)) {
        const Scalar b = std::min(a + length, Scalar(s.upper));
        panels.emplace_back(a, b);
        a = b;
        if (panels.size() > 1) length *= 2;
      }
      const Eigen::Index m = s.points_per_panel;
      Vector<Scalar> nodes(static_cast<Eigen::Index>(panels.size()) * m);
      Vector<Scalar> weights(nodes.size());
      for (std::size_t p = 0; p < panels.size(); ++p) {
        auto [x, w] = gauss_legendre_rule<Scalar>(s.points_per_panel, panels[p].first, panels[p].second);
        nodes.segment(static_cast<Eigen::Index>(p) * m, m) = x;
        weights.segment(static_cast<Eigen::Index>(p) * m, m) = w;
      }
      return {std::move(nodes), std::move(weights), MeasureScheme::GradedGaussLegendre,
              "graded_gauss_legendre[" + std::to_string(s.lower) + "," + std::to_string(s.upper) + "]x" +
                  std::to_string(s.points_per_panel)};
    }
    DiscretizedMeasure<Scalar> operator()(const MonteCarloSpec& s) const {
      require(s.lower < s.upper, "discretize: empty interval");
      require(s.count >= 1, "discretize: count must be >= 1");
      std::mt19937_64 engine(s.seed);
      std::uniform_real_distribution<Scalar> dist(Scalar(s.lower), Scalar(s.upper));
      Vector<Scalar> nodes(s.count);
      for (Eigen::Index i = 0; i < nodes.size(); ++i) nodes(i) = dist(engine);
      Vector<Scalar> weights = Vector<Scalar>::Constant(s.count, Scalar(s.upper - s.lower) / Scalar(s.count));
      return {std::move(nodes), std::move(weights), MeasureScheme::MonteCarlo,
              "monte_carlo x" + std::to_string(s.count)};
    }
    DiscretizedMeasure<Scalar> operator()(const ExplicitSpec& s) const {
      require(s.nodes.size() == s.weights.size(), "discretize: explicit nodes and weights differ in length");
      Vector<Scalar> nodes = Eigen::Map<const Vector<double>>(s.nodes.data(), s.nodes.size()).template cast<Scalar>();
      Vector<Scalar> weights =
          Eigen::Map<const Vector<double>>(s.weights.data(), s.weights.size()).template cast<Scalar>();
      return {std::move(nodes), std::move(weights), MeasureScheme::Explicit, "explicit"};
    }
    DiscretizedMeasure<Scalar> operator()(const UniformSpec& s) const {
      require(s.count >= 1, "discretize: count must be >= 1");
      return {Vector<Scalar>::LinSpaced(s.count, Scalar(0), Scalar(s.count - 1)),
              Vector<Scalar>::Constant(s.count, Scalar(1) / Scalar(s.count)), MeasureScheme::FiniteGroupUniform,
              "uniform x" + std::to_string(s.count)};
    }
  };
  return std::visit(Builder{}, spec);
}

enum class KernelForm { ExpDecay, Power, Constant, Indicator };

/// Whitelisted kernel expressions:
///   exp_decay(a): e^{-a u}      power(a): (1 + |u|)^{-a}
///   constant(c): c              indicator(lo, hi): 1 on [lo, hi]
/// each multiplied by `scale`.
struct KernelExpr {
  KernelForm form = KernelForm::Constant;
  double a = 1;
  double lo = 0;
  double hi = 1;
  double scale = 1;

  static KernelExpr exp_decay(double a) { return {KernelForm::ExpDecay, a}; }
  static KernelExpr power(double a) { return {KernelForm::Power, a}; }
  static KernelExpr constant(double c) { return {KernelForm::Constant, c}; }
  static KernelExpr indicator(double lo, double hi) { return {KernelForm::Indicator, 1, lo, hi}; }

  KernelExpr scaled(double factor) const {
    KernelExpr k = *this;
    k.scale *= factor;
    return k;
  }

  template <typename Scalar>
  Scalar operator()(Scalar u) const {
    Scalar v(0);
    switch (form) {
      case KernelForm::ExpDecay: v = std::exp(-Scalar(a) * u); break;
      case KernelForm::Power: v = std::pow(Scalar(1) + std::abs(u), -Scalar(a)); break;
      case KernelForm::Constant: v = Scalar(a); break;
      case KernelForm::Indicator: v = (u >= Scalar(lo) && u <= Scalar(hi)) ? Scalar(1) : Scalar(0); break;
    }
    return Scalar(scale) * v;
  }

  /// Whether the integral of |Phi| over [0, inf) is finite.
  bool integrable_on_half_line() const {
    if (scale == 0) return true;
    switch (form) {
      case KernelForm::ExpDecay: return a > 0;
      case KernelForm::Power: return a > 1;
      case KernelForm::Constant: return a == 0;
      case KernelForm::Indicator: return true;
    }
    return true;
  }

  std::string describe() const {
    std::string body;
    switch (form) {
      case KernelForm::ExpDecay: body = "exp(-" + std::to_string(a) + "u)"; break;
      case KernelForm::Power: body = "(1+|u|)^-" + std::to_string(a); break;
      case KernelForm::Constant: body = std::to_string(a); break;
      case KernelForm::Indicator: body = "1[" + std::to_string(lo) + "," + std::to_string(hi) + "]"; break;
    }
    return scale == 1 ? body : std::to_string(scale) + "*" + body;
  }
};

/// Values Phi(u_i) aligned with the nodes of a measure.
template <typename Scalar>
class Kernel {
 public:
  Kernel() = default;
  Kernel(Vector<Scalar> values, std::string description)
      : values_(std::move(values)), description_(std::move(description)) {
    require(values_.size() >= 1, "Kernel: needs at least one value");
    require(values_.allFinite(), "Kernel: values must be finite");
  }

  Eigen::Index size() const { return values_.size(); }
  const Vector<Scalar>& values() const { return values_; }
  const std::string& description() const { return description_; }

  Kernel scaled(Scalar factor) const { return Kernel(values_ * factor, std::to_string(factor) + "*" + description_); }
  Kernel abs() const { return Kernel(values_.cwiseAbs(), "|" + description_ + "|"); }

 private:
  Vector<Scalar> values_;
  std::string description_;
};

using Kerneld = Kernel<double>;

template <typename Scalar>
Kernel<Scalar> make_kernel(const KernelExpr& expr, const DiscretizedMeasure<Scalar>& measure) {
  return Kernel<Scalar>(measure.nodes().unaryExpr([&expr](Scalar u) { return expr(u); }), expr.describe());
}

/// ||Phi||_{L^1(mu)} = sum_i |Phi(u_i)| w_i.
template <typename Scalar>
Scalar kernel_l1_norm(const Kernel<Scalar>& kernel, const DiscretizedMeasure<Scalar>& measure) {
  require(kernel.size() == measure.size(), "kernel_l1_norm: kernel has " + std::to_string(kernel.size()) +
                                               " values but measure has " + std::to_string(measure.size()) +
                                               " nodes");
  const Vector<Scalar> terms = kernel.values().cwiseAbs().cwiseProduct(measure.weights());
  return pairwise_sum(terms);
}

/// Kernel restricted to [0, endpoint_k] for each endpoint, discretized with
/// graded Gauss–Legendre panels.
template <typename Scalar = double>
std::vector<std::pair<Kernel<Scalar>, DiscretizedMeasure<Scalar>>> truncation_sequence(
    const KernelExpr& expr, const std::vector<double>& endpoints, int points_per_panel = 16) {
  require(!endpoints.empty(), "truncation_sequence: no endpoints");
  std::vector<std::pair<Kernel<Scalar>, DiscretizedMeasure<Scalar>>> out;
  double previous = 0;
  for (double e : endpoints) {
    require(e > previous, "truncation_sequence: endpoints must be positive and strictly increasing");
    previous = e;
    auto measure = discretize<Scalar>(GradedGaussLegendreSpec{0.0, e, points_per_panel});
    auto kernel = make_kernel(expr, measure);
    out.emplace_back(std::move(kernel), std::move(measure));
  }
  return out;
}

}  // namespace hausdorff
