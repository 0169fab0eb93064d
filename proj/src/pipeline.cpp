#include "heislift/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "heislift/analyze.hpp"
#include "heislift/errors.hpp"

namespace heislift {

namespace fs = std::filesystem;

namespace {

template <typename T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config field '") + key + "': " + e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void write_json(const fs::path& path, const nlohmann::json& j, bool pretty) {
  write_text(path, (pretty ? j.dump(2) : j.dump()) + "\n");
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

bool AnalysisPlan::enabled(const std::string& check) const {
  return std::find(checks.begin(), checks.end(), check) != checks.end();
}

TargetSpace RunConfig::target() const {
  return target_kind == "heisenberg" ? TargetSpace::heisenberg(target_dim) : TargetSpace::euclidean(target_dim);
}

RunConfig parse_config(const nlohmann::json& j, const fs::path& base_dir) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  RunConfig c;
  c.m = get_or<int>(j, "m", 0);
  c.n = get_or<int>(j, "n", 0);
  if (c.m < 1) throw ConfigError("config: m must be >= 1");
  if (c.n < 1) throw ConfigError("config: n must be >= 1");
  if (c.n > c.m) throw ConfigError("config: n must not exceed m");

  if (!j.contains("omega")) throw ConfigError("config: omega is required");
  try {
    c.omega = j.at("omega").get<Box>();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: omega: ") + e.what());
  }
  if (c.omega.dim() != c.m || static_cast<int>(c.omega.hi.size()) != c.m) {
    throw ConfigError("config: omega must have m coordinates in lo and hi");
  }
  for (int i = 0; i < c.m; ++i) {
    if (!(c.omega.lo[i] < c.omega.hi[i])) throw ConfigError("config: omega lo must be below hi on every axis");
  }

  const nlohmann::json target = j.value("target", nlohmann::json::object());
  c.target_kind = get_or<std::string>(target, "kind", "heisenberg");
  if (c.target_kind == "heisenberg") {
    c.target_dim = get_or<int>(target, "dim", c.n);
    if (c.target_dim != c.n) throw ConfigError("config: a Heisenberg target H^n needs dim equal to n");
    // Only spheres S^0 can be filled in H^n, so the skeleton stops at edges.
    if (c.n >= 2) throw UnsupportedFill(TargetSpace::heisenberg(c.n).name(), 1);
  } else if (c.target_kind == "euclidean") {
    c.target_dim = get_or<int>(target, "dim", 1);
    if (c.target_dim < 1) throw ConfigError("config: Euclidean target needs dim >= 1");
  } else {
    throw ConfigError("config: unknown target kind '" + c.target_kind + "'");
  }

  const auto data = get_or<std::string>(j, "data", "");
  if (data.empty()) throw ConfigError("config: data path is required");
  c.data_path = fs::path(data).is_absolute() ? fs::path(data) : base_dir / data;
  c.max_generation = get_or<int>(j, "max_generation", 8);
  if (c.max_generation < 0 || c.max_generation > 40) throw ConfigError("config: max_generation must be in [0, 40]");
  c.eps_sing = get_or<double>(j, "eps_sing", 1e-6);
  if (!(c.eps_sing > 0.0 && c.eps_sing < 1.0)) throw ConfigError("config: eps_sing must be in (0, 1)");
  c.collar = get_or<double>(j, "collar", -1.0);
  const auto out = get_or<std::string>(j, "output", "out");
  c.output = fs::path(out).is_absolute() ? fs::path(out) : base_dir / out;

  const nlohmann::json a = j.value("analysis", nlohmann::json::object());
  auto& plan = c.analysis;
  plan.seed = get_or<std::uint64_t>(a, "seed", 1);
  std::vector<std::string> defaults;
  for (const auto& name : known_checks()) {
    const bool heis_only = name == "contact" || name == "domination";
    if (!heis_only || c.target_kind == "heisenberg") defaults.push_back(name);
  }
  plan.checks = get_or<std::vector<std::string>>(a, "checks", defaults);
  for (const auto& name : plan.checks) {
    if (std::find(known_checks().begin(), known_checks().end(), name) == known_checks().end()) {
      throw ConfigError("config: unknown check '" + name + "'");
    }
    if ((name == "contact" || name == "domination") && c.target_kind != "heisenberg") {
      throw ConfigError("config: check '" + name + "' needs a Heisenberg target");
    }
  }
  plan.p_list = get_or<std::vector<double>>(a, "p_list", plan.p_list);
  if (plan.p_list.empty()) throw ConfigError("config: p_list must not be empty");
  if (!std::is_sorted(plan.p_list.begin(), plan.p_list.end())) throw ConfigError("config: p_list must be ascending");
  for (double p : plan.p_list) {
    if (!(p >= 1.0)) throw ConfigError("config: every p must be >= 1");
  }
  plan.samples = get_or<std::size_t>(a, "samples", plan.samples);
  plan.trace_samples = get_or<std::size_t>(a, "trace_samples", plan.trace_samples);
  plan.contact_lines = get_or<std::size_t>(a, "contact_lines", plan.contact_lines);
  plan.contact_tolerance = get_or<double>(a, "contact_tolerance", plan.contact_tolerance);
  plan.domination_functions = get_or<std::size_t>(a, "domination_functions", plan.domination_functions);
  plan.domination_points = get_or<std::size_t>(a, "domination_points", plan.domination_points);
  if (plan.samples == 0) throw ConfigError("config: samples must be positive");
  return c;
}

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(j, path.parent_path());
}

BoundaryData read_boundary_csv(const fs::path& path, int m, const TargetSpace& target) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open data file " + path.string());
  const std::size_t width = static_cast<std::size_t>(m + target.ambient_dim());
  std::vector<std::vector<double>> sites;
  std::vector<TargetPoint> values;
  std::string line;
  int row = 0;
  while (std::getline(in, line)) {
    ++row;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::vector<double> fields;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        fields.push_back(std::stod(cell, &used));
        if (cell.find_first_not_of(" \t\r", used) != std::string::npos) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw ConfigError(path.string() + ":" + std::to_string(row) + ": not a number: '" + cell + "'");
      }
    }
    if (fields.size() != width) {
      throw ConfigError(path.string() + ":" + std::to_string(row) + ": expected " + std::to_string(width) +
                        " columns, found " + std::to_string(fields.size()));
    }
    sites.emplace_back(fields.begin(), fields.begin() + m);
    values.emplace_back(fields.begin() + m, fields.end());
  }
  if (sites.empty()) throw ConfigError(path.string() + ": no data rows");
  try {
    return BoundaryData::make(std::move(sites), std::move(values), target);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

CheckReport check_config(const fs::path& path) {
  CheckReport r;
  RunConfig c;
  try {
    c = load_config(path);
  } catch (const UnsupportedFill& e) {
    r.ok = false;
    r.errors.push_back(std::string("extend: ") + e.what());
    return r;
  } catch (const ConfigError& e) {
    r.ok = false;
    r.errors.push_back(e.what());
    return r;
  }
  BoundaryData data;
  try {
    data = read_boundary_csv(c.data_path, c.m, c.target());
  } catch (const ConfigError& e) {
    r.ok = false;
    r.errors.push_back(e.what());
    return r;
  }
  for (std::size_t i = 0; i < data.sites.size(); ++i) {
    if (!c.omega.contains_strictly(data.sites[i])) {
      r.ok = false;
      r.errors.push_back("site " + std::to_string(i) + " is not strictly inside omega");
    }
  }
  for (double p : c.analysis.p_list) {
    if (p >= c.n + 1) {
      r.warnings.push_back("p = " + fmt(p) + " >= n + 1: the energy is not expected to be finite (blow-up demonstration)");
    }
  }
  return r;
}

bool RunResult::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

RunResult run_pipeline(const RunConfig& c, int jobs) {
  const TargetSpace target = c.target();
  BoundaryData data = read_boundary_csv(c.data_path, c.m, target);
  for (std::size_t i = 0; i < data.sites.size(); ++i) {
    if (!c.omega.contains_strictly(data.sites[i])) {
      throw ConfigError("site " + std::to_string(i) + " is not strictly inside omega");
    }
  }
  const fs::path out = c.output;
  const fs::path reports = out / "reports";
  fs::create_directories(reports);

  FieldPolicy policy{c.eps_sing, c.collar};
  auto z = std::make_shared<const CompactSet>(data.sites);
  Decomposition dec = decompose(*z, c.omega, c.max_generation);
  write_json(out / "cubes.json", cubes_to_json(dec), false);
  auto complex = std::make_shared<const SimplicialComplex>(build_complex(dec));
  write_json(out / "complex.json", complex_to_json(*complex), false);
  const QualityReport quality = quality_report(*complex, *z);
  const ComplexValidation validation = validate_complex(*complex);
  write_json(out / "quality.json", {{"quality", quality}, {"validation", validation}}, true);

  SkeletonMap sk = extend_skeleton(*complex, *z, data, target, c.n, jobs);
  const ExtensionField field(complex, z, data, target, std::move(sk), policy);
  write_json(out / "field.json", field_to_json(field), false);

  RunResult result;
  const auto& plan = c.analysis;
  const double lip = data.lipschitz;

  if (plan.enabled("whitney")) {
    const WhitneyReport w = verify_whitney(dec, *z);
    write_json(reports / "whitney.json", w, true);
    result.checks.push_back({"whitney", w.ok(),
                             "d(Q,Z)/diam(Q) in [" + fmt(w.min_ratio) + ", " + fmt(w.max_ratio) + "], neighbors " +
                                 std::to_string(w.max_neighbors) + ", generation jump " +
                                 std::to_string(w.max_generation_jump)});
  }
  if (plan.enabled("complex")) {
    const bool ok = validation.violations() == 0 && quality.degenerate == 0 && quality.size_ok();
    result.checks.push_back({"complex", ok,
                             std::to_string(validation.violations()) + " conformity violations, " +
                                 std::to_string(quality.class_count()) + " similarity classes, diam/beta <= " +
                                 fmt(quality.max_diam_over_beta)});
  }
  if (plan.enabled("skeleton")) {
    const auto& s = field.skeleton();
    const double heis_bound = target.gamma() * s.vertex_report.edge_bound;
    const bool ok = s.vertex_report.max_witness_error <= 1e-12 &&
                    s.vertex_report.max_edge_ratio <= s.vertex_report.edge_bound &&
                    (lip == 0.0 || s.max_edge_lipschitz <= heis_bound * lip * (1.0 + 1e-9));
    write_json(reports / "skeleton.json",
               {{"c_tilde", s.c_tilde},
                {"max_edge_lipschitz", s.max_edge_lipschitz},
                {"corner_mu", s.corner_mu},
                {"lipschitz", lip},
                {"gamma", target.gamma()},
                {"vertex_report", s.vertex_report}},
               true);
    result.checks.push_back({"skeleton", ok, "C~ = " + fmt(s.c_tilde) + ", edge ratio " +
                                                 fmt(s.vertex_report.max_edge_ratio) + " <= " +
                                                 fmt(s.vertex_report.edge_bound)});
  }
  if (plan.enabled("trace")) {
    const TraceReport t = trace_check(field, plan.trace_samples, plan.seed);
    write_json(reports / "trace.json", t, true);
    result.checks.push_back({"trace", t.violations == 0,
                             "max ratio " + fmt(t.max_ratio) + " vs L(C~+4) = " + fmt(t.bound)});
  }
  if (plan.enabled("sobolev") || plan.enabled("blowup")) {
    const SweepReport sweep = p_sweep(field, plan.p_list, plan.samples, plan.seed, {}, jobs);
    write_json(reports / "sobolev.json", sweep, true);
    write_text(reports / "p_sweep.csv", sweep_csv(sweep));
    if (plan.enabled("sobolev")) {
      bool ok = true;
      std::string detail;
      for (const auto& row : sweep.refinement) {
        if (row[0].p >= c.n + 1) continue;
        const double change = std::abs(row[1].estimate - row[0].estimate);
        ok = ok && std::isfinite(row[0].estimate) && change <= 3.0 * row[0].std_error;
        if (!detail.empty()) detail += "; ";
        detail += "p=" + fmt(row[0].p) + ": " + fmt(row[0].estimate) + " -> " + fmt(row[1].estimate) + " (se " +
                  fmt(row[0].std_error) + ")";
      }
      result.checks.push_back({"sobolev", ok, detail});
    }
    if (plan.enabled("blowup")) {
      const auto& top = sweep.refinement.back();
      const SobolevReport* reference = nullptr;
      for (const auto& row : sweep.rows) {
        if (row.p == 1.5 || (row.p < c.n + 1 && (!reference || reference->p != 1.5))) reference = &row;
      }
      const bool applicable = sweep.p_max >= c.n + 1 && reference;
      const bool ok = applicable && sweep.p_max_increasing && top[2].estimate > 3.0 * reference->estimate;
      result.checks.push_back(
          {"blowup", ok,
           applicable ? "p=" + fmt(sweep.p_max) + ": " + fmt(top[0].estimate) + ", " + fmt(top[1].estimate) + ", " +
                            fmt(top[2].estimate) + " vs 3 x " + fmt(reference->estimate) + " at p=" +
                            fmt(reference->p)
                      : "p_list needs some p >= n + 1 and some p < n + 1"});
    }
  }
  if (plan.enabled("contact")) {
    const auto lines = random_segments(c.omega, plan.contact_lines, plan.seed);
    const ContactReport cr = contact_residual(field, lines, 1e-3 * c.omega.diameter());
    write_json(reports / "contact.json", cr, true);
    std::ostringstream csv;
    csv.precision(17);
    csv << "line,residual_h,residual_h_half\n";
    for (std::size_t i = 0; i < cr.per_line.size(); ++i) {
      csv << i << ',' << cr.per_line[i] << ',' << cr.per_line_half[i] << '\n';
    }
    write_text(reports / "contact.csv", csv.str());
    const bool ok = cr.median <= plan.contact_tolerance * lip && cr.median_half <= 0.75 * cr.median;
    result.checks.push_back({"contact", ok,
                             "median " + fmt(cr.median) + " vs " + fmt(plan.contact_tolerance * lip) +
                                 ", half step " + fmt(cr.median_half)});
  }
  if (plan.enabled("domination")) {
    const DominationReport d =
        slope_domination_check(field, plan.domination_functions, plan.domination_points, plan.seed, {}, jobs);
    write_json(reports / "domination.json", d, true);
    result.checks.push_back({"domination", d.violations == 0,
                             std::to_string(d.violations) + " violations in " + std::to_string(d.comparisons) +
                                 " comparisons, max ratio " + fmt(d.max_ratio)});
  }

  nlohmann::json checks = nlohmann::json::array();
  for (const auto& ch : result.checks) checks.push_back({{"name", ch.name}, {"passed", ch.passed}, {"detail", ch.detail}});
  write_json(out / "summary.json",
             {{"m", c.m},
              {"n", c.n},
              {"target", target},
              {"sites", data.sites.size()},
              {"lipschitz", lip},
              {"cubes", dec.cubes.size()},
              {"unresolved_cubes", dec.unresolved.size()},
              {"simplices", complex->simplex_count(c.m)},
              {"seed", plan.seed},
              {"checks", checks},
              {"passed", result.all_passed()}},
             true);
  return result;
}

void to_json(nlohmann::json& j, const CheckReport& r) {
  j = nlohmann::json{{"ok", r.ok}, {"errors", r.errors}, {"warnings", r.warnings}};
}

}  // namespace heislift
