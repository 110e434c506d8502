#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "hausdorff/cli.hpp"

namespace hausdorff::cli {

using nlohmann::json;

namespace {

std::string join(const std::vector<std::string>& items, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? sep : "") + items[i];
  return out;
}

const std::vector<std::string> kKernelForms{"exp_decay", "power", "constant", "indicator"};
const std::vector<std::string> kDomainTypes{"ball", "box", "truncated_space"};
const std::vector<std::string> kFamilyTypes{"identity", "rotations_haar", "finite_group", "shifts", "folded_shifts", "motions"};
const std::vector<std::string> kSchemes{"gauss_legendre", "graded_gauss_legendre", "monte_carlo", "explicit", "uniform"};
const std::vector<std::string> kFieldTypes{"gaussian", "poly", "gausspoly"};
const std::vector<std::string> kGroupKinds{"sign_flips", "signed_permutations", "cyclic_rotation_2d"};

/// Typed access to one JSON object; records every key it reads so that the
/// rest can be reported as unknown.
class Reader {
 public:
  Reader(const json& object, std::string path, std::vector<std::string>& errors)
      : object_(object), path_(std::move(path)), errors_(errors) {
    if (!object_.is_object()) error("", "must be an object");
  }

  bool has(const std::string& key) const { return object_.is_object() && object_.contains(key); }

  template <typename T>
  std::optional<T> get(const std::string& key, bool required) {
    seen_.insert(key);
    if (!has(key)) {
      if (required) error(key, "missing required key");
      return std::nullopt;
    }
    return convert<T>(object_.at(key), key);
  }

  template <typename T>
  T get_or(const std::string& key, T fallback) {
    auto v = get<T>(key, false);
    return v ? *v : fallback;
  }

  const json* child(const std::string& key, bool required) {
    seen_.insert(key);
    if (!has(key)) {
      if (required) error(key, "missing required key");
      return nullptr;
    }
    return &object_.at(key);
  }

  std::optional<std::string> choice(const std::string& key, const std::vector<std::string>& allowed, bool required) {
    auto v = get<std::string>(key, required);
    if (v && std::find(allowed.begin(), allowed.end(), *v) == allowed.end()) {
      error(key, "unknown value '" + *v + "'; expected one of: " + join(allowed, ", "));
      return std::nullopt;
    }
    return v;
  }

  void finish() {
    if (!object_.is_object()) return;
    for (const auto& [key, value] : object_.items())
      if (!seen_.count(key)) error(key, "unknown key");
  }

  std::string key_path(const std::string& key) const {
    if (key.empty()) return path_.empty() ? "<root>" : path_;
    return path_.empty() ? key : path_ + "." + key;
  }

  void error(const std::string& key, const std::string& message) { errors_.push_back(key_path(key) + ": " + message); }

 private:
  template <typename T>
  std::optional<T> convert(const json& value, const std::string& key) {
    try {
      if constexpr (std::is_same_v<T, double>) {
        if (!value.is_number()) throw std::invalid_argument("expected a number");
      } else if constexpr (std::is_integral_v<T>) {
        if (!value.is_number_integer()) throw std::invalid_argument("expected an integer");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!value.is_string()) throw std::invalid_argument("expected a string");
      }
      return value.get<T>();
    } catch (const std::exception& e) {
      error(key, e.what());
      return std::nullopt;
    }
  }

  const json& object_;
  std::string path_;
  std::vector<std::string>& errors_;
  std::set<std::string> seen_;
};

std::optional<DomainSpec> read_domain(const json& j, const std::string& path, std::vector<std::string>& errors) {
  Reader r(j, path, errors);
  DomainSpec d;
  const auto type = r.choice("type", kDomainTypes, true);
  if (type == "ball") {
    d.shape = DomainShape::Ball;
    d.center = r.get<std::vector<double>>("center", true).value_or(std::vector<double>{});
    d.radius = r.get_or<double>("radius", 1.0);
    if (d.radius <= 0) r.error("radius", "must be positive");
  } else if (type == "box") {
    d.shape = DomainShape::Box;
    d.lower = r.get<std::vector<double>>("lower", true).value_or(std::vector<double>{});
    d.upper = r.get<std::vector<double>>("upper", true).value_or(std::vector<double>{});
    bool ordered = d.lower.size() == d.upper.size();
    for (std::size_t k = 0; ordered && k < d.lower.size(); ++k) ordered = d.lower[k] < d.upper[k];
    if (!ordered) r.error("", "box needs lower < upper componentwise");
  } else if (type == "truncated_space") {
    d.shape = DomainShape::TruncatedSpace;
    d.halfwidth = r.get_or<double>("halfwidth", 8.0);
    if (d.halfwidth <= 0) r.error("halfwidth", "must be positive");
  }
  r.finish();
  if (!type) return std::nullopt;
  return d;
}

std::optional<Eigen::Index> domain_dimension(const DomainSpec& d) {
  switch (d.shape) {
    case DomainShape::Ball: return static_cast<Eigen::Index>(d.center.size());
    case DomainShape::Box: return static_cast<Eigen::Index>(d.lower.size());
    case DomainShape::TruncatedSpace: return std::nullopt;
  }
  return std::nullopt;
}

std::vector<Monomial<double>> read_terms(const json* j, const std::string& path, std::vector<std::string>& errors) {
  std::vector<Monomial<double>> terms;
  if (!j) return terms;
  if (!j->is_array()) {
    errors.push_back(path + ": expected an array of {coef, powers}");
    return terms;
  }
  for (std::size_t i = 0; i < j->size(); ++i) {
    Reader t((*j)[i], path + "[" + std::to_string(i) + "]", errors);
    Monomial<double> m;
    m.coef = t.get_or<double>("coef", 1.0);
    m.powers = t.get<std::vector<int>>("powers", true).value_or(std::vector<int>{});
    t.finish();
    terms.push_back(std::move(m));
  }
  return terms;
}

FieldSpec read_field(const json& j, const std::string& path, std::vector<std::string>& errors) {
  Reader r(j, path, errors);
  FieldSpec f;
  const auto type = r.choice("type", kFieldTypes, true);
  if (type == "gaussian" || type == "gausspoly") {
    f.kind = type == "gaussian" ? FieldKind::Gaussian : FieldKind::GaussianTimesPoly;
    f.center = r.get<std::vector<double>>("center", true).value_or(std::vector<double>{});
    f.width = r.get_or<double>("width", 1.0);
    if (f.width <= 0) r.error("width", "must be positive");
    if (type == "gaussian") f.amplitude = r.get_or<double>("amplitude", 1.0);
    else f.terms = read_terms(r.child("terms", true), r.key_path("terms"), errors);
  } else if (type == "poly") {
    f.kind = FieldKind::Polynomial;
    f.terms = read_terms(r.child("terms", true), r.key_path("terms"), errors);
  }
  r.finish();
  return f;
}

std::optional<MeasureSpec> read_measure(const json& j, std::vector<std::string>& errors) {
  Reader r(j, "measure", errors);
  const auto scheme = r.choice("scheme", kSchemes, true);
  std::optional<MeasureSpec> out;
  const auto interval = [&]() -> std::pair<double, double> {
    auto v = r.get<std::vector<double>>("interval", true);
    if (!v) return {0, 1};
    if (v->size() != 2 || !((*v)[0] < (*v)[1])) {
      r.error("interval", "expected [lower, upper] with lower < upper");
      return {0, 1};
    }
    return {(*v)[0], (*v)[1]};
  };
  const auto positive_count = [&](const std::string& key) {
    const int c = r.get<int>(key, true).value_or(1);
    if (c < 1) r.error(key, "must be >= 1");
    return c;
  };
  if (scheme == "gauss_legendre") {
    auto [a, b] = interval();
    out = GaussLegendreSpec{a, b, positive_count("count")};
  } else if (scheme == "graded_gauss_legendre") {
    auto [a, b] = interval();
    out = GradedGaussLegendreSpec{a, b, positive_count("points_per_panel")};
  } else if (scheme == "monte_carlo") {
    auto [a, b] = interval();
    const int count = positive_count("count");
    out = MonteCarloSpec{a, b, count, r.get_or<std::uint64_t>("seed", 0)};
  } else if (scheme == "explicit") {
    ExplicitSpec e;
    e.nodes = r.get<std::vector<double>>("nodes", true).value_or(std::vector<double>{});
    e.weights = r.get<std::vector<double>>("weights", true).value_or(std::vector<double>{});
    if (e.nodes.empty()) r.error("nodes", "must not be empty");
    if (e.nodes.size() != e.weights.size())
      r.error("weights", std::to_string(e.weights.size()) + " weights for " + std::to_string(e.nodes.size()) + " nodes");
    if (std::any_of(e.weights.begin(), e.weights.end(), [](double w) { return w < 0; }))
      r.error("weights", "must be nonnegative");
    out = e;
  } else if (scheme == "uniform") {
    out = UniformSpec{positive_count("count")};
  }
  r.finish();
  return out;
}

KernelExpr read_kernel(const json& j, std::vector<std::string>& errors) {
  Reader r(j, "kernel", errors);
  KernelExpr k;
  const auto form = r.get<std::string>("form", true);
  if (form && std::find(kKernelForms.begin(), kKernelForms.end(), *form) == kKernelForms.end())
    r.error("form", "unknown kernel '" + *form + "'; whitelist: " + join(kKernelForms, ", "));
  if (form == "exp_decay") k = KernelExpr::exp_decay(r.get_or<double>("a", 1.0));
  else if (form == "power") k = KernelExpr::power(r.get_or<double>("a", 1.0));
  else if (form == "constant") k = KernelExpr::constant(r.get_or<double>("c", 1.0));
  else if (form == "indicator") k = KernelExpr::indicator(r.get<double>("lo", true).value_or(0), r.get<double>("hi", true).value_or(1));
  k.scale = r.get_or<double>("scale", 1.0);
  r.finish();
  return k;
}

FamilySpec read_family(const json& j, std::vector<std::string>& errors) {
  Reader r(j, "family", errors);
  FamilySpec f;
  const auto type = r.choice("type", kFamilyTypes, true);
  if (type == "identity") {
    f.type = FamilyType::Identity;
  } else if (type == "rotations_haar") {
    f.type = FamilyType::RotationsHaar;
    f.count = r.get<int>("count", true).value_or(1);
    if (f.count < 1) r.error("count", "must be >= 1");
    f.seed = r.get<std::uint64_t>("seed", false);
  } else if (type == "finite_group") {
    f.type = FamilyType::FiniteGroup;
    const auto kind = r.choice("kind", kGroupKinds, true);
    if (kind == "sign_flips") f.group.kind = FiniteGroupKind::SignFlips;
    if (kind == "signed_permutations") f.group.kind = FiniteGroupKind::SignedPermutations;
    if (kind == "cyclic_rotation_2d") {
      f.group.kind = FiniteGroupKind::CyclicRotation2D;
      f.group.order = r.get<int>("order", true).value_or(1);
      if (f.group.order < 1) r.error("order", "must be >= 1");
    }
  } else if (type == "shifts") {
    f.type = FamilyType::Shifts;
    f.direction = r.get_or<std::vector<double>>("direction", {});
  } else if (type == "folded_shifts") {
    f.type = FamilyType::FoldedShifts;
  } else if (type == "motions") {
    f.type = FamilyType::Motions;
    if (const json* members = r.child("members", true)) {
      if (!members->is_array() || members->empty()) {
        r.error("members", "expected a nonempty array");
      } else {
        for (std::size_t i = 0; i < members->size(); ++i) {
          Reader m((*members)[i], "family.members[" + std::to_string(i) + "]", errors);
          MotionSpec spec;
          spec.matrix = m.get<std::vector<std::vector<double>>>("matrix", true).value_or(std::vector<std::vector<double>>{});
          spec.translation = m.get_or<std::vector<double>>("translation", {});
          m.finish();
          f.motions.push_back(std::move(spec));
        }
      }
    }
    f.count = static_cast<int>(f.motions.size());
  }
  r.finish();
  return f;
}

void read_tolerances(const json& j, experiments::Tolerances& t, std::vector<std::string>& errors) {
  Reader r(j, "tolerances", errors);
  t.lp_bound = r.get_or("lp_bound", t.lp_bound);
  t.sobolev_bound = r.get_or("sobolev_bound", t.sobolev_bound);
  t.gradient = r.get_or("gradient", t.gradient);
  t.fd_step = r.get_or("fd_step", t.fd_step);
  t.measure_sigmas = r.get_or("measure_sigmas", t.measure_sigmas);
  t.determinant = r.get_or("determinant", t.determinant);
  t.necessity_ratio = r.get_or("necessity_ratio", t.necessity_ratio);
  t.necessity_growth = r.get_or("necessity_growth", t.necessity_growth);
  r.finish();
}

void check_dimension(std::size_t actual, int n, const std::string& what, std::vector<std::string>& errors) {
  if (static_cast<int>(actual) != n)
    errors.push_back(what + ": has " + std::to_string(actual) + " components but dimension is " + std::to_string(n));
}

std::optional<Eigen::Index> family_count(const FamilySpec& f, int n) {
  switch (f.type) {
    case FamilyType::Identity: return 1;
    case FamilyType::RotationsHaar: return f.count;
    case FamilyType::FiniteGroup: return static_cast<Eigen::Index>(finite_group_order(f.group, n));
    case FamilyType::Motions: return f.count;
    case FamilyType::Shifts:
    case FamilyType::FoldedShifts: return std::nullopt;
  }
  return std::nullopt;
}

void cross_validate(RunConfig& c, bool has_family, std::vector<std::string>& errors) {
  const int n = c.dimension;
  if (auto dn = domain_dimension(c.domain); dn && *dn != n) check_dimension(static_cast<std::size_t>(*dn), n, "domain", errors);

  for (std::size_t i = 0; i < c.fields.size(); ++i) {
    const auto& f = c.fields[i];
    const std::string where = "fields[" + std::to_string(i) + "]";
    if (f.kind != FieldKind::Polynomial) check_dimension(f.center.size(), n, where + ".center", errors);
    for (std::size_t t = 0; t < f.terms.size(); ++t)
      check_dimension(f.terms[t].powers.size(), n, where + ".terms[" + std::to_string(t) + "].powers", errors);
  }

  const auto& fam = c.family;
  const bool centered_ball = c.domain.shape == DomainShape::Ball &&
                             std::all_of(c.domain.center.begin(), c.domain.center.end(), [](double v) { return v == 0; });
  const bool whole_space = c.domain.shape == DomainShape::TruncatedSpace;
  switch (fam.type) {
    case FamilyType::RotationsHaar:
      if (!centered_ball && !whole_space)
        errors.push_back("family: rotations_haar needs a ball centered at the origin or a truncated_space domain");
      break;
    case FamilyType::FiniteGroup:
      if (fam.group.kind == FiniteGroupKind::CyclicRotation2D && n != 2)
        errors.push_back("family: cyclic_rotation_2d needs dimension 2");
      if (finite_group_order(fam.group, n) > kMaxGroupOrder)
        errors.push_back("family: finite group order exceeds the cap of 1e6 elements");
      break;
    case FamilyType::Shifts:
      if (!fam.direction.empty()) check_dimension(fam.direction.size(), n, "family.direction", errors);
      else if (n != 1) errors.push_back("family: shifts without a direction need dimension 1");
      [[fallthrough]];
    case FamilyType::FoldedShifts:
      if (fam.type == FamilyType::FoldedShifts && n != 1) errors.push_back("family: folded_shifts need dimension 1");
      if (!whole_space) errors.push_back("family: translations need a truncated_space domain");
      if (!c.measure) errors.push_back("measure: required for shift families (nodes are the shifts)");
      break;
    case FamilyType::Motions:
      for (std::size_t i = 0; i < fam.motions.size(); ++i) {
        const auto& m = fam.motions[i];
        const std::string where = "family.members[" + std::to_string(i) + "]";
        check_dimension(m.matrix.size(), n, where + ".matrix", errors);
        for (const auto& row : m.matrix) check_dimension(row.size(), n, where + ".matrix row", errors);
        if (!m.translation.empty()) check_dimension(m.translation.size(), n, where + ".translation", errors);
      }
      break;
    case FamilyType::Identity: break;
  }

  if (has_family || c.measure) {
    const auto fc = family_count(fam, n);
    if (c.measure && fc) {
      const Eigen::Index mc = node_count(*c.measure);
      if (mc != *fc)
        errors.push_back("family/measure mismatch: family has " + std::to_string(*fc) + " members but measure has " +
                         std::to_string(mc) + " nodes");
    }
  }

  for (double p : c.p)
    if (!(p >= 1 && p <= 16)) errors.push_back("p: value " + std::to_string(p) + " outside [1, 16]");
  if (c.resolution < 2) errors.push_back("resolution: must be >= 2");
  if (c.fields.empty()) errors.push_back("fields: at least one field required");
  if (c.p.empty()) errors.push_back("p: at least one exponent required");

  for (const auto& e : c.experiments) {
    const auto& names = experiment_names();
    if (std::find(names.begin(), names.end(), e) == names.end())
      errors.push_back("experiments: unknown experiment '" + e + "'; expected one of: " + join(names, ", "));
  }
  if (std::find(c.experiments.begin(), c.experiments.end(), "necessity_divergence") != c.experiments.end()) {
    if (n != 1) errors.push_back("necessity_divergence: needs dimension 1");
    if (c.kernel.integrable_on_half_line())
      errors.push_back("necessity_divergence: kernel " + c.kernel.describe() + " is integrable, not a necessity witness");
    const auto& e = c.necessity.endpoints;
    if (e.empty() || e.front() <= 0 || !std::is_sorted(e.begin(), e.end()) ||
        std::adjacent_find(e.begin(), e.end()) != e.end())
      errors.push_back("necessity.endpoints: must be positive and strictly increasing");
  }
  if (c.measure_preservation.region) {
    if (auto dn = domain_dimension(*c.measure_preservation.region); dn && *dn != n)
      errors.push_back("measure_preservation.region: dimension differs from config dimension");
    if (c.measure_preservation.region->shape == DomainShape::TruncatedSpace)
      errors.push_back("measure_preservation.region: must be a ball or box");
  }
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> errors)
    : std::runtime_error("invalid config:\n  " + join(errors, "\n  ")), errors_(std::move(errors)) {}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"lp_bound", "sobolev_bound", "gradient_check", "measure_preservation",
                                              "necessity_divergence"};
  return names;
}

RunConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("syntax error: ") + e.what()});
  }
  std::vector<std::string> errors;
  RunConfig c;
  Reader r(root, "", errors);
  if (!root.is_object()) throw ConfigError(errors);

  c.dimension = r.get<int>("dimension", true).value_or(1);
  if (c.dimension < 1) r.error("dimension", "must be >= 1");
  if (const json* d = r.child("domain", true))
    if (auto spec = read_domain(*d, "domain", errors)) c.domain = *spec;
  const json* fam = r.child("family", false);
  if (fam) c.family = read_family(*fam, errors);
  if (const json* m = r.child("measure", false)) c.measure = read_measure(*m, errors);
  if (const json* k = r.child("kernel", false)) c.kernel = read_kernel(*k, errors);
  if (const json* fields = r.child("fields", true)) {
    if (!fields->is_array()) {
      r.error("fields", "expected an array");
    } else {
      for (std::size_t i = 0; i < fields->size(); ++i)
        c.fields.push_back(read_field((*fields)[i], "fields[" + std::to_string(i) + "]", errors));
    }
  }
  c.p = r.get_or("p", c.p);
  c.resolution = r.get_or("resolution", c.resolution);
  c.experiments = r.get_or("experiments", c.experiments);
  c.seed = r.get_or<std::uint64_t>("seed", c.seed);
  c.output = r.get_or("output", c.output);
  if (const json* g = r.child("gradient_check", false)) {
    Reader gr(*g, "gradient_check", errors);
    c.gradient_check.points = gr.get_or("points", c.gradient_check.points);
    if (c.gradient_check.points < 1) gr.error("points", "must be >= 1");
    gr.finish();
  }
  if (const json* m = r.child("measure_preservation", false)) {
    Reader mr(*m, "measure_preservation", errors);
    auto& s = c.measure_preservation;
    s.samples = mr.get_or("samples", s.samples);
    if (s.samples < 1) mr.error("samples", "must be >= 1");
    s.max_members = mr.get_or("max_members", s.max_members);
    if (s.max_members < 1) mr.error("max_members", "must be >= 1");
    s.pass_fraction = mr.get_or("pass_fraction", s.pass_fraction);
    if (const json* region = mr.child("region", false)) s.region = read_domain(*region, "measure_preservation.region", errors);
    mr.finish();
  }
  if (const json* nd = r.child("necessity", false)) {
    Reader nr(*nd, "necessity", errors);
    auto& s = c.necessity;
    s.endpoints = nr.get_or("endpoints", s.endpoints);
    s.x0 = nr.get_or("x0", s.x0);
    s.translation_bound = nr.get_or("translation_bound", s.translation_bound);
    s.points_per_panel = nr.get_or("points_per_panel", s.points_per_panel);
    if (s.points_per_panel < 1) nr.error("points_per_panel", "must be >= 1");
    nr.finish();
  }
  if (const json* t = r.child("tolerances", false)) read_tolerances(*t, c.tolerances, errors);
  r.finish();

  if (errors.empty()) cross_validate(c, fam != nullptr, errors);
  if (!errors.empty()) throw ConfigError(std::move(errors));
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

}  // namespace hausdorff::cli
