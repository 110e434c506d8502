#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "hausdorff/cli.hpp"
#include "hausdorff/finite_group.hpp"
#include "hausdorff/operator.hpp"

namespace hausdorff::cli {

namespace {

Vectord to_vector(const std::vector<double>& v) { return Eigen::Map<const Vectord>(v.data(), static_cast<Eigen::Index>(v.size())); }

Domaind make_domain(const DomainSpec& d, int n) {
  switch (d.shape) {
    case DomainShape::Ball: return Domaind::ball(to_vector(d.center), d.radius);
    case DomainShape::Box: return Domaind::box(to_vector(d.lower), to_vector(d.upper));
    case DomainShape::TruncatedSpace: return Domaind::truncated_space(n, d.halfwidth);
  }
  throw ContractError("unknown domain shape");
}

ScalarFieldd make_field(const FieldSpec& f, int n) {
  switch (f.kind) {
    case FieldKind::Gaussian: return gaussian_field<double>(to_vector(f.center), f.width, f.amplitude);
    case FieldKind::Polynomial: return polynomial_field<double>(n, f.terms);
    case FieldKind::GaussianTimesPoly: return gauss_poly_field<double>(to_vector(f.center), f.width, f.terms);
    case FieldKind::Custom: break;
  }
  throw ContractError("unsupported field kind");
}

std::string describe_field(const FieldSpec& f) {
  std::ostringstream out;
  switch (f.kind) {
    case FieldKind::Gaussian: out << "gaussian(width=" << f.width << ", amplitude=" << f.amplitude << ")"; break;
    case FieldKind::Polynomial: out << "poly(" << f.terms.size() << " terms)"; break;
    case FieldKind::GaussianTimesPoly: out << "gausspoly(width=" << f.width << ", " << f.terms.size() << " terms)"; break;
    case FieldKind::Custom: out << "custom"; break;
  }
  return out.str();
}

HausdorffOperatord make_operator(const RunConfig& c) {
  const int n = c.dimension;
  const auto domain = make_domain(c.domain, n);
  const auto& fam = c.family;
  const std::uint64_t family_seed = fam.seed.value_or(c.seed);

  std::optional<DiscretizedMeasured> measure;
  if (c.measure) {
    MeasureSpec spec = *c.measure;
    if (auto* mc = std::get_if<MonteCarloSpec>(&spec); mc && mc->seed == 0) mc->seed = c.seed;
    measure = discretize<double>(spec);
  }

  IsometryFamilyd family;
  switch (fam.type) {
    case FamilyType::Identity: family = IsometryFamilyd({Isometryd::identity(n)}); break;
    case FamilyType::RotationsHaar:
      family = haar_rotation_family<double>(n, static_cast<std::size_t>(fam.count), family_seed);
      break;
    case FamilyType::FiniteGroup: {
      auto [group, uniform] = finite_group_family<double>(fam.group, n);
      family = std::move(group);
      if (!measure) measure = std::move(uniform);
      break;
    }
    case FamilyType::Shifts:
      family = fam.direction.empty() ? shift_family(measure->nodes())
                                     : shift_family(measure->nodes(), to_vector(fam.direction).normalized().eval());
      break;
    case FamilyType::FoldedShifts: family = folded_shift_family(measure->nodes()); break;
    case FamilyType::Motions: {
      std::vector<Isometryd> members;
      for (const auto& m : fam.motions) {
        Matrixd v(n, n);
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) v(i, j) = m.matrix[i][j];
        members.emplace_back(v, m.translation.empty() ? Vectord::Zero(n) : to_vector(m.translation));
      }
      family = IsometryFamilyd(std::move(members));
      break;
    }
  }
  if (!measure) measure = discretize<double>(UniformSpec{static_cast<int>(family.size())});
  auto kernel = make_kernel(c.kernel, *measure);
  return HausdorffOperatord(std::move(*measure), std::move(kernel), std::move(family), domain, c.seed);
}

std::string format_number(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.17g", v);
  return buffer;
}

/// Measure preservation over the first `max_members` family members. The
/// row's lhs is the ceil(pass_fraction * m)-th smallest discrepancy in units
/// of the 3-sigma band, so lhs <= 1 exactly when enough members pass.
experiments::ExperimentReport measure_preservation_row(const RunConfig& c, const HausdorffOperatord& op) {
  const int n = c.dimension;
  const Domaind region = c.measure_preservation.region
                             ? make_domain(*c.measure_preservation.region, n)
                             : Domaind::box(Vectord::Zero(n), Vectord::Ones(n));
  const std::size_t m = std::min<std::size_t>(op.family().size(), static_cast<std::size_t>(c.measure_preservation.max_members));
  std::vector<double> normalized;
  bool determinants_ok = true;
  int passed = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const auto r = experiments::run_measure_preservation(op.family()[i], region, c.measure_preservation.samples,
                                                         c.seed + 2 + i, std::nullopt, c.tolerances);
    normalized.push_back(r.rhs > 0 ? r.lhs / r.rhs : (r.lhs > 0 ? INFINITY : 0.0));
    determinants_ok = determinants_ok && std::abs(std::abs(op.family()[i].determinant()) - 1.0) <= c.tolerances.determinant;
    passed += r.passed ? 1 : 0;
  }
  std::sort(normalized.begin(), normalized.end());
  const auto needed = static_cast<std::size_t>(std::ceil(c.measure_preservation.pass_fraction * static_cast<double>(m)));
  const std::size_t index = std::clamp<std::size_t>(needed, 1, m) - 1;

  experiments::ExperimentReport row;
  row.name = "measure_preservation";
  row.lhs = normalized[index];
  row.rhs = 1.0;
  row.bound_constant = c.tolerances.measure_sigmas;
  row.margin = row.rhs - row.lhs;
  row.seed = c.seed;
  row.passed = row.lhs <= row.rhs && determinants_ok;
  row.notes = std::to_string(passed) + "/" + std::to_string(m) + " members within band" +
              (determinants_ok ? "" : "; determinant check FAILED");
  return row;
}

}  // namespace

RunResult run(const RunConfig& c) {
  RunResult result;
  const int n = c.dimension;
  const auto has = [&](const std::string& name) {
    return std::find(c.experiments.begin(), c.experiments.end(), name) != c.experiments.end();
  };

  const HausdorffOperatord op = make_operator(c);
  const auto quad = build_grid_quadrature(op.domain(), c.resolution);

  std::optional<experiments::ExperimentReport> preservation;
  if (has("measure_preservation")) preservation = measure_preservation_row(c, op);
  std::optional<experiments::ExperimentReport> necessity;
  if (has("necessity_divergence")) {
    result.divergence = experiments::run_necessity_divergence(c.kernel, c.necessity.endpoints, c.necessity.x0,
                                                              c.necessity.translation_bound, c.necessity.points_per_panel,
                                                              c.tolerances);
    necessity = experiments::summarize(*result.divergence, c.tolerances);
  }

  std::ostringstream summary;
  summary << "hausdorff-op run\n"
          << "dimension: " << n << "\n"
          << "domain: " << op.domain().describe() << "\n"
          << "family: " << op.family().size() << " members, C=" << op.family().jacobian_bound()
          << ", C1=" << op.family().translation_bound() << "\n"
          << "measure: " << op.measure().description() << "\n"
          << "kernel: " << op.kernel().description() << ", ||Phi||_1=" << format_number(op.kernel_l1()) << "\n"
          << "resolution: " << c.resolution << " (" << quad.size() << " nodes), seed: " << c.seed << "\n\n";

  for (std::size_t fi = 0; fi < c.fields.size(); ++fi) {
    const auto f = make_field(c.fields[fi], n);
    summary << "field " << fi << ": " << describe_field(c.fields[fi]) << "\n";

    std::optional<experiments::BoundReports> bounds;
    if (has("lp_bound") || has("sobolev_bound")) bounds = experiments::run_bounds(op, f, c.p, quad, c.tolerances);
    std::optional<experiments::ExperimentReport> gradient;
    if (has("gradient_check")) {
      const auto points = experiments::interior_sample(op.domain(), c.gradient_check.points, c.seed + 1);
      gradient = experiments::run_gradient_check(op, f, points, c.tolerances);
      gradient->resolution = c.resolution;
    }

    for (const auto& name : c.experiments) {
      for (std::size_t pi = 0; pi < c.p.size(); ++pi) {
        experiments::ExperimentReport row;
        if (name == "lp_bound") row = bounds->lp[pi];
        else if (name == "sobolev_bound") row = bounds->sobolev[pi];
        else if (name == "gradient_check") row = *gradient;
        else if (name == "measure_preservation") row = *preservation;
        else if (name == "necessity_divergence") row = *necessity;
        row.p = c.p[pi];
        row.seed = c.seed;
        row.resolution = c.resolution;
        summary << "  " << (row.passed ? "PASS" : (row.fatal ? "FAIL" : "WARN")) << "  " << name << " p=" << row.p
                << "  lhs=" << format_number(row.lhs) << "  rhs=" << format_number(row.rhs)
                << "  margin=" << format_number(row.margin);
        if (!row.notes.empty()) summary << "  [" << row.notes << "]";
        summary << "\n";
        if (row.fatal && !row.passed) result.exit_code = 1;
        result.reports.push_back(std::move(row));
      }
    }
  }
  if (result.divergence) {
    const auto& d = *result.divergence;
    summary << "\nnecessity divergence (lower bound " << format_number(d.lower_bound_constant) << "):\n";
    for (std::size_t k = 0; k < d.truncation_points.size(); ++k)
      summary << "  endpoint " << d.truncation_points[k] << ": S=" << format_number(d.l1_norms[k])
              << " H=" << format_number(d.operator_values_at_x0[k]) << " ratio=" << format_number(d.ratios[k]) << "\n";
  }
  summary << "\nverdict: " << (result.exit_code == 0 ? "all fatal experiments passed" : "FAILED") << "\n";
  result.summary = summary.str();
  return result;
}

std::string results_csv(const std::vector<experiments::ExperimentReport>& reports) {
  std::ostringstream out;
  out << "experiment,p,lhs,rhs,bound_constant,margin,resolution,seed,passed\n";
  for (const auto& r : reports)
    out << r.name << ',' << format_number(r.p) << ',' << format_number(r.lhs) << ',' << format_number(r.rhs) << ','
        << format_number(r.bound_constant) << ',' << format_number(r.margin) << ',' << r.resolution << ',' << r.seed
        << ',' << (r.passed ? "true" : "false") << '\n';
  return out.str();
}

std::string divergence_csv(const experiments::DivergenceReport& d) {
  std::ostringstream out;
  out << "endpoint,l1_norm,h_value,ratio,lower_bound\n";
  for (std::size_t k = 0; k < d.truncation_points.size(); ++k)
    out << format_number(d.truncation_points[k]) << ',' << format_number(d.l1_norms[k]) << ','
        << format_number(d.operator_values_at_x0[k]) << ',' << format_number(d.ratios[k]) << ','
        << format_number(d.lower_bound_constant) << '\n';
  return out.str();
}

void write_outputs(const RunResult& result, const std::filesystem::path& directory) {
  std::filesystem::create_directories(directory);
  const auto write = [](const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out) throw std::runtime_error("write failed for " + path.string());
  };
  write(directory / "results.csv", results_csv(result.reports));
  write(directory / "summary.txt", result.summary);
  const auto divergence_path = directory / "divergence.csv";
  if (result.divergence) write(divergence_path, divergence_csv(*result.divergence));
  else std::filesystem::remove(divergence_path);
}

}  // namespace hausdorff::cli
