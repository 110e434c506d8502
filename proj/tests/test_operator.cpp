#include <doctest.h>

#include <cmath>
#include <random>
#include <string>

#include "hausdorff/operator.hpp"
#include "oracles.hpp"

using namespace hausdorff;

namespace {

Vectord vec(std::initializer_list<double> v) {
  Vectord out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

ScalarFieldd linear_1d() { return polynomial_field<double>(1, {{1.0, {1}}}); }

}  // namespace

TEST_CASE("identity operator returns f") {
  const auto domain = Domaind::ball(vec({0, 0}), 2.0);
  const auto op = HausdorffOperatord::identity(domain);
  const auto f = gaussian_field<double>(vec({0.3, -0.4}), 0.7);
  for (const auto& x : {vec({0, 0}), vec({1.2, -0.5}), vec({-1, 1})}) {
    CHECK(apply(op, f, x) == f(x));
    CHECK(apply_gradient(op, f, x) == f.gradient(x));
  }
}

TEST_CASE("two shifts with explicit kernel") {
  const DiscretizedMeasured measure(vec({0, 1}), vec({1, 1}));
  const HausdorffOperatord op(measure, Kerneld(vec({2, 3}), "explicit"), shift_family(vec({0, 1})),
                              Domaind::truncated_space(1, 8.0));
  for (double x : {-2.0, 0.0, 0.25, 3.0}) {
    CHECK(std::abs(apply(op, linear_1d(), vec({x})) - (5 * x + 3)) <= 1e-14);
    CHECK(apply_gradient(op, linear_1d(), vec({x}))(0) == 5.0);
  }
}

TEST_CASE("exponential kernel against a trapezoid oracle") {
  const auto measure = discretize<double>(GaussLegendreSpec{0, 20, 64});
  const auto kernel = make_kernel(KernelExpr::exp_decay(1), measure);
  const HausdorffOperatord op(measure, kernel, shift_family(measure.nodes()), Domaind::truncated_space(1, 8.0));
  const auto f = gaussian_field<double>(vec({0}));
  const double oracle = oracle::trapezoid([](double u) { return std::exp(-u - u * u); }, 0, 20, 1000000);
  CHECK(std::abs(apply(op, f, vec({0})) - oracle) <= 1e-6);
}

TEST_CASE("gradient transport") {
  SUBCASE("O(1) averaging gives the odd part of f'") {
    const auto op = averaging_operator<double>(1, FiniteGroupSpec{FiniteGroupKind::SignFlips}, Domaind::ball(vec({0}), 3.0));
    const auto f = gaussian_field<double>(vec({0.4}), 0.9);
    for (double x : {-2.0, -0.3, 0.0, 1.7}) {
      const double expected = 0.5 * (f.gradient(vec({x}))(0) - f.gradient(vec({-x}))(0));
      CHECK(std::abs(apply_gradient(op, f, vec({x}))(0) - expected) <= 1e-14);
    }
  }
  SUBCASE("analytic gradient agrees with central differences") {
    const auto op = averaging_operator<double>(3, HaarMonteCarlo{32, 5}, Domaind::ball(Vectord::Zero(3), 2.0));
    const auto f = gauss_poly_field<double>(vec({0.5, -0.2, 0.1}), 0.8, {{1.0, {1, 1, 0}}, {0.3, {0, 0, 2}}});
    const auto pts = sample_uniform(Domaind::ball(Vectord::Zero(3), 1.5), 20, 7);
    const double h = 1e-5;
    for (Eigen::Index i = 0; i < pts.cols(); ++i) {
      const Vectord x = pts.col(i);
      const Vectord g = apply_gradient(op, f, x);
      for (Eigen::Index j = 0; j < 3; ++j) {
        Vectord up = x, down = x;
        up(j) += h;
        down(j) -= h;
        const double fd = (apply(op, f, up) - apply(op, f, down)) / (2 * h);
        CHECK(std::abs(g(j) - fd) <= 1e-5 * (1 + std::abs(fd)));
      }
    }
  }
  SUBCASE("missing gradient is an error") {
    const ScalarFieldd plain(1, [](ScalarFieldd::In x) { return x(0); });
    CHECK_THROWS_AS(apply_gradient(HausdorffOperatord::identity(Domaind::truncated_space(1, 1.0)), plain, vec({0})),
                    ContractError);
  }
}

TEST_CASE("push_field is linear and matches apply") {
  const auto domain = Domaind::truncated_space(2, 6.0);
  const auto measure = discretize<double>(GaussLegendreSpec{0, 3, 12});
  const auto op = HausdorffOperatord(measure, make_kernel(KernelExpr::exp_decay(0.5), measure),
                                     shift_family(measure.nodes(), vec({0.6, 0.8})), domain);
  const auto f = gaussian_field<double>(vec({1, 0}), 1.2);
  const auto g = polynomial_field<double>(2, {{1.0, {2, 0}}, {-2.0, {0, 1}}});
  const auto hf = push_field(op, f);
  const auto hg = push_field(op, g);
  const auto hsum = push_field(op, 2.5 * f + (-1.5) * g);
  for (const auto& x : {vec({0, 0}), vec({-1, 2}), vec({0.3, -0.7})}) {
    CHECK(hf(x) == apply(op, f, x));
    CHECK(hf.gradient(x) == apply_gradient(op, f, x));
    const double lhs = hsum(x), rhs = 2.5 * hf(x) - 1.5 * hg(x);
    CHECK(std::abs(lhs - rhs) <= 1e-12 * (1 + std::abs(rhs)));
  }
}

TEST_CASE("averaging operators") {
  SUBCASE("quarter turns average x^2 to (x^2 + y^2) / 2") {
    const auto op = averaging_operator<double>(2, FiniteGroupSpec{FiniteGroupKind::CyclicRotation2D, 4},
                                               Domaind::ball(vec({0, 0}), 2.0));
    const auto f = polynomial_field<double>(2, {{1.0, {2, 0}}});
    for (const auto& x : {vec({1, 0}), vec({0.3, -1.1}), vec({-1.2, 0.9})}) {
      CHECK(std::abs(apply(op, f, x) - 0.5 * x.squaredNorm()) <= 1e-14);
      const Vectord g = apply_gradient(op, f, x);
      CHECK((g - x).cwiseAbs().maxCoeff() <= 1e-14);
    }
  }
  SUBCASE("O(1) symmetrizes") {
    const auto op = averaging_operator<double>(1, FiniteGroupSpec{FiniteGroupKind::SignFlips}, Domaind::truncated_space(1, 4.0));
    const auto f = polynomial_field<double>(1, {{1.0, {3}}, {2.0, {2}}, {1.0, {0}}});
    for (double x : {-1.5, 0.2, 3.0}) CHECK(std::abs(apply(op, f, vec({x})) - (2 * x * x + 1)) <= 1e-13);
  }
  SUBCASE("Haar Monte Carlo averages a linear field to about zero") {
    const int n = 3, count = 4096;
    const auto op = averaging_operator<double>(n, HaarMonteCarlo{count, 11}, Domaind::ball(Vectord::Zero(n), 2.0));
    const auto f = polynomial_field<double>(n, {{1.0, {1, 0, 0}}});
    const Vectord x = vec({0.5, -1.0, 0.7});
    const double sigma = x.norm() / std::sqrt(static_cast<double>(n) * count);
    CHECK(std::abs(apply(op, f, x)) <= 3 * sigma);
  }
  SUBCASE("non-centered domains are rejected") {
    CHECK_THROWS_AS(averaging_operator<double>(2, HaarMonteCarlo{8, 1}, Domaind::ball(vec({1, 0}), 2.0)), ContractError);
    CHECK_THROWS_AS(averaging_operator<double>(2, FiniteGroupSpec{FiniteGroupKind::SignFlips},
                                               Domaind::box(vec({-1, -1}), vec({1, 1}))),
                    ContractError);
  }
}

TEST_CASE("contract violations") {
  const auto ball = Domaind::ball(vec({0}), 1.0);
  SUBCASE("size mismatches") {
    const auto m = discretize<double>(UniformSpec{3});
    CHECK_THROWS_AS(HausdorffOperatord(m, Kerneld(Vectord::Ones(2), "k"), shift_family(Vectord::Zero(3)), ball),
                    ContractError);
    CHECK_THROWS_AS(HausdorffOperatord(m, Kerneld(Vectord::Ones(3), "k"), shift_family(Vectord::Zero(2)), ball),
                    ContractError);
  }
  SUBCASE("point outside the domain") {
    const auto op = HausdorffOperatord::identity(ball);
    CHECK_THROWS_AS(apply(op, linear_1d(), vec({1.5})), ContractError);
    CHECK_NOTHROW(apply(op, linear_1d(), vec({1.0})));
  }
  SUBCASE("escaping images name the node") {
    // A flip of [0, 2] about its left end fails validation outright.
    const auto box = Domaind::box(vec({0}), vec({2}));
    const auto m = discretize<double>(UniformSpec{2});
    const IsometryFamilyd flip({Isometryd::identity(1), Isometryd::linear(-Matrixd::Identity(1, 1))});
    CHECK_THROWS_AS(HausdorffOperatord(m, make_kernel(KernelExpr::constant(1), m), flip, box), ContractError);
    // A translation by 1e-8 passes the sampled validation but moves the
    // right endpoint out of the box.
    const IsometryFamilyd nudge({Isometryd::identity(1), Isometryd::translation(vec({1e-8}))});
    const HausdorffOperatord op(m, make_kernel(KernelExpr::constant(1), m), nudge, box);
    CHECK_NOTHROW(apply(op, linear_1d(), vec({1.0})));
    try {
      (void)apply(op, linear_1d(), vec({2.0}));
      FAIL("expected an escape error");
    } catch (const ContractError& e) {
      CHECK(std::string(e.what()).find("node 1") != std::string::npos);
    }
  }
}

TEST_CASE("finite-group averages are invariant under the group") {
  const auto domain = Domaind::ball(Vectord::Zero(3), 2.0);
  const FiniteGroupSpec spec{FiniteGroupKind::SignedPermutations};
  const auto op = averaging_operator<double>(3, spec, domain);
  const auto f = gauss_poly_field<double>(vec({0.4, 0.1, -0.3}), 0.9, {{1.0, {1, 2, 0}}, {2.0, {0, 0, 1}}});
  const auto group = finite_group_family<double>(spec, 3).first;
  const auto pts = sample_uniform(domain, 10, 3);
  for (Eigen::Index i = 0; i < pts.cols(); ++i) {
    const Vectord x = pts.col(i);
    const double base = apply(op, f, x);
    for (const auto& g : group) CHECK(std::abs(apply(op, f, g(x)) - base) <= 1e-12);
  }
}

TEST_CASE("pointwise bound and linearity on random instances") {
  std::mt19937_64 engine(77);
  std::uniform_real_distribution<double> coef(-3, 3);
  const auto domain = Domaind::truncated_space(2, 5.0);
  const auto measure = discretize<double>(MonteCarloSpec{0, 2, 24, 13});
  const auto kernel = make_kernel(KernelExpr::power(1.5), measure).scaled(-1.7);
  const auto op = HausdorffOperatord(measure, kernel, haar_rotation_family<double>(2, 24, std::uint64_t{13}), domain);
  const auto f = gaussian_field<double>(vec({0.2, 0.2}), 1.0, 1.5);  // sup |f| = 1.5
  const auto g = gaussian_field<double>(vec({-1, 0.5}), 0.5, -0.7);
  const auto pts = sample_uniform(domain, 50, 14);
  for (Eigen::Index i = 0; i < pts.cols(); ++i) {
    const Vectord x = pts.col(i);
    CHECK(std::abs(apply(op, f, x)) <= op.kernel_l1() * 1.5 + 1e-12);
    const double a = coef(engine), b = coef(engine);
    const double combined = apply(op, a * f + b * g, x);
    const double separate = a * apply(op, f, x) + b * apply(op, g, x);
    CHECK(std::abs(combined - separate) <= 1e-12 * (1 + std::abs(separate)));
  }
}
