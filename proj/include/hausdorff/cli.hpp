#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hausdorff/experiments.hpp"
#include "hausdorff/finite_group.hpp"
#include "hausdorff/geometry.hpp"
#include "hausdorff/measure.hpp"

namespace hausdorff::cli {

/// Every problem found in a config, not just the first.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> errors);
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  std::vector<std::string> errors_;
};

struct DomainSpec {
  DomainShape shape = DomainShape::Box;
  std::vector<double> center;
  double radius = 1;
  std::vector<double> lower;
  std::vector<double> upper;
  double halfwidth = 8;
};

enum class FamilyType { Identity, RotationsHaar, FiniteGroup, Shifts, FoldedShifts, Motions };

struct MotionSpec {
  std::vector<std::vector<double>> matrix;
  std::vector<double> translation;
};

struct FamilySpec {
  FamilyType type = FamilyType::Identity;
  int count = 1;
  std::optional<std::uint64_t> seed;
  FiniteGroupSpec group;
  std::vector<double> direction;
  std::vector<MotionSpec> motions;
};

struct FieldSpec {
  FieldKind kind = FieldKind::Gaussian;
  std::vector<double> center;
  double width = 1;
  double amplitude = 1;
  std::vector<Monomial<double>> terms;
};

struct GradientCheckSettings {
  int points = 50;
};

struct MeasurePreservationSettings {
  long samples = 1000000;
  std::optional<DomainSpec> region;  // default: unit box [0, 1]^n
  int max_members = 10;
  double pass_fraction = 0.8;
};

struct NecessitySettings {
  std::vector<double> endpoints{10, 100, 1000, 10000};
  double x0 = 0;
  double translation_bound = 1;
  int points_per_panel = 16;
};

struct RunConfig {
  int dimension = 1;
  DomainSpec domain;
  FamilySpec family;
  std::optional<MeasureSpec> measure;  // default: uniform probability over the family
  KernelExpr kernel = KernelExpr::constant(1);
  std::vector<FieldSpec> fields;
  std::vector<double> p{1, 2, 4};
  int resolution = 64;
  std::vector<std::string> experiments{"lp_bound"};
  std::uint64_t seed = 0;
  std::string output = "out";
  GradientCheckSettings gradient_check;
  MeasurePreservationSettings measure_preservation;
  NecessitySettings necessity;
  experiments::Tolerances tolerances;
};

const std::vector<std::string>& experiment_names();

/// Strict parse of the JSON config: unknown keys, missing keys, bad values
/// and cross-field inconsistencies are all collected into one ConfigError.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

struct RunResult {
  int exit_code = 0;
  std::vector<experiments::ExperimentReport> reports;
  std::optional<experiments::DivergenceReport> divergence;
  std::string summary;
};

/// Runs every configured experiment; rows are ordered field, experiment, p.
RunResult run(const RunConfig& config);

/// Writes results.csv, summary.txt and (when present) divergence.csv into
/// `directory`, replacing earlier files.
void write_outputs(const RunResult& result, const std::filesystem::path& directory);

std::string results_csv(const std::vector<experiments::ExperimentReport>& reports);
std::string divergence_csv(const experiments::DivergenceReport& report);

}  // namespace hausdorff::cli
