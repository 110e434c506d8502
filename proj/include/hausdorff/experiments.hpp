#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hausdorff/field.hpp"
#include "hausdorff/geometry.hpp"
#include "hausdorff/isometry.hpp"
#include "hausdorff/measure.hpp"
#include "hausdorff/operator.hpp"

namespace hausdorff::experiments {

/// Numerical slack of every experiment, in one place.
struct Tolerances {
  double lp_bound = 5e-3;         // relative, lhs <= rhs (1 + tol)
  double sobolev_bound = 5e-3;    // relative, lhs <= rhs (1 + tol)
  double gradient = 1e-5;         // max |grad - FD| / (1 + |FD|)
  double fd_step = 1e-5;
  double measure_sigmas = 3.0;    // Monte Carlo acceptance band in binomial sigmas
  double determinant = 1e-12;     // | |det V| - 1 |
  double necessity_ratio = 1e-9;  // slack on H_k / S_k >= lower bound
  double necessity_growth = 10.0; // H at last endpoint / H at first endpoint
};

struct ExperimentReport {
  std::string name;
  double p = 0;
  double lhs = 0;
  double rhs = 0;
  double bound_constant = 0;
  double margin = 0;  // rhs - lhs
  int resolution = 0;
  std::uint64_t seed = 0;
  bool passed = false;
  /// Informative reports never change the overall verdict.
  bool fatal = true;
  std::string notes;
};

struct DivergenceReport {
  std::vector<double> truncation_points;
  std::vector<double> l1_norms;
  std::vector<double> operator_values_at_x0;
  std::vector<double> ratios;
  double lower_bound_constant = 0;
  double translation_bound = 0;
  bool ratios_above_bound = false;
  bool l1_nondecreasing = false;
  bool values_increasing = false;
  bool values_grow = false;
  bool passed = false;
};

/// ||H f||_p <= ||Phi||_1 ||f||_p.
ExperimentReport run_lp_bound(const HausdorffOperatord& op, const ScalarFieldd& f, double p,
                              const DomainQuadratured& quad, const Tolerances& tol = {});

/// ||H f||_{W^{1,p}} <= (C n + 1) ||Phi||_1 ||f||_{W^{1,p}}; fatal only at p = 1.
ExperimentReport run_sobolev_bound(const HausdorffOperatord& op, const ScalarFieldd& f, double p,
                                   const DomainQuadratured& quad, const Tolerances& tol = {});

struct BoundReports {
  std::vector<ExperimentReport> lp;
  std::vector<ExperimentReport> sobolev;
};

/// Both bounds for every p from one evaluation of f and H f on the grid.
BoundReports run_bounds(const HausdorffOperatord& op, const ScalarFieldd& f, const std::vector<double>& ps,
                        const DomainQuadratured& quad, const Tolerances& tol = {});

/// Relative excess max(0, lhs / rhs - 1).
double relative_violation(const ExperimentReport& r);

/// True when the relative violation never grows along a refinement sequence.
bool refinement_non_worsening(const std::vector<ExperimentReport>& coarse_to_fine, double slack = 1e-12);

/// Seeded points in the bulk of a domain: balls shrink to 0.9 r, truncated
/// spaces to halfwidth min(h, 3) where smooth test fields carry their mass.
PointSetd interior_sample(const Domaind& domain, Eigen::Index count, std::uint64_t seed);

/// apply_gradient against central differences of apply at `points`
/// (columns). Points closer than `step` to the boundary are skipped.
ExperimentReport run_gradient_check(const HausdorffOperatord& op, const ScalarFieldd& f, const PointSetd& points,
                                    const Tolerances& tol = {});

/// Monte Carlo comparison of vol(region) and vol(A(region)) on a box window
/// containing both, plus the analytic check | |det V| - 1 | <= tol.
ExperimentReport run_measure_preservation(const Isometryd& iso, const Domaind& region, long samples,
                                          std::uint64_t seed, const std::optional<Domaind>& window = std::nullopt,
                                          const Tolerances& tol = {});

/// Smallest box containing region and its image under iso.
Domaind measure_window(const Isometryd& iso, const Domaind& region);

/// Truncations of a non-integrable kernel applied to the Gaussian e^{-|y|^2}
/// under folded shifts x -> x + frac(u), evaluated at x0 (n = 1).
DivergenceReport run_necessity_divergence(const KernelExpr& kernel, const std::vector<double>& endpoints,
                                          double x0 = 0.0, double translation_bound = 1.0,
                                          int points_per_panel = 16, const Tolerances& tol = {});

ExperimentReport summarize(const DivergenceReport& report, const Tolerances& tol = {});

}  // namespace hausdorff::experiments
