#include "magpath/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "magpath/errors.hpp"

namespace magpath {

namespace {

using nlohmann::json;

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

json number(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

double finite(const json& j, const std::string& where) {
  if (!j.is_number()) throw ScenarioError(where + ": expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ScenarioError(where + ": must be finite");
  return v;
}

std::vector<double> numbers(const json& j, const std::string& where) {
  std::vector<double> out;
  if (j.is_number()) {
    out.push_back(finite(j, where));
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i)
      out.push_back(finite(j[i], where + "[" + std::to_string(i) + "]"));
  } else {
    throw ScenarioError(where + ": expected a number or an array of numbers");
  }
  return out;
}

std::vector<std::size_t> counts(const json& j, const std::string& where) {
  std::vector<std::size_t> out;
  for (double v : numbers(j, where)) {
    if (v < 1.0 || v != std::floor(v)) throw ScenarioError(where + ": expected positive integers");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

const json& require(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key))
    throw ScenarioError(where + ": missing field '" + key + "'");
  return j.at(key);
}

Point point(const json& j, std::size_t dim, const std::string& where) {
  auto v = numbers(j, where);
  if (v.size() == 1 && dim > 1) v.assign(dim, v[0]);
  if (v.size() != dim)
    throw ScenarioError(where + ": expected " + std::to_string(dim) + " components");
  return v;
}

FamilySpec family(const json& j, const std::string& where) {
  FamilySpec f;
  if (j.is_string()) {
    f.family = j.get<std::string>();
    return f;
  }
  const json& id = require(j, "family", where);
  if (!id.is_string()) throw ScenarioError(where + ".family: expected a string");
  f.family = id.get<std::string>();
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it.key() == "family") continue;
    if (it.value().is_string()) continue;  // labels such as "gauge" handled by the factories
    f.params[it.key()] = numbers(it.value(), where + "." + it.key());
  }
  return f;
}

GaussianPacket packet(const json& j, std::size_t dim, const std::string& where) {
  GaussianPacket p;
  p.center = point(require(j, "center", where), dim, where + ".center");
  p.width = j.contains("width") ? finite(j.at("width"), where + ".width") : 1.0;
  if (!(p.width > 0.0)) throw ScenarioError(where + ".width: must be positive");
  p.momentum = j.contains("momentum") ? point(j.at("momentum"), dim, where + ".momentum")
                                      : Point(dim, 0.0);
  return p;
}

std::string gauge_label(const json& j) {
  if (j.is_object() && j.contains("gauge") && j.at("gauge").is_string())
    return j.at("gauge").get<std::string>();
  return "symmetric";
}

}  // namespace

double FamilySpec::scalar(const std::string& key, double fallback) const {
  const auto it = params.find(key);
  if (it == params.end()) return fallback;
  if (it->second.size() != 1)
    throw ScenarioError("family '" + family + "': parameter '" + key + "' must be a scalar");
  return it->second[0];
}

std::vector<double> FamilySpec::vector(const std::string& key, std::vector<double> fallback) const {
  const auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

Grid GridSpec::make() const {
  if (lower.size() != upper.size() || lower.size() != points.size())
    throw ScenarioError("grid: lower, upper and points must have the same length");
  std::vector<Axis> axes;
  for (std::size_t b = 0; b < lower.size(); ++b) axes.push_back({lower[b], upper[b], points[b]});
  try {
    return Grid(std::move(axes));
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(std::string("grid: ") + e.what());
  }
}

ScalarPotentialSpec make_scalar_family(const FamilySpec& spec, std::size_t dim) {
  const auto& f = spec.family;
  auto centre = [&] {
    auto c = spec.vector("center", Point(dim, 0.0));
    if (c.size() == 1 && dim > 1) c.assign(dim, c[0]);
    if (c.size() != dim) throw ScenarioError("potential '" + f + "': center has wrong length");
    return c;
  };
  if (f == "free" || f == "zero" || f == "constant-field-2d") return free_potential(dim);
  if (f == "harmonic") return harmonic_potential(dim, spec.scalar("strength", 1.0), centre());
  if (f == "step-discontinuity") {
    if (dim != 1) throw ScenarioError("potential 'step-discontinuity' is one-dimensional");
    return step_potential(spec.scalar("height", 1.0), spec.scalar("position", 0.0));
  }
  if (f == "regularized-coulomb")
    return regularized_coulomb_potential(dim, spec.scalar("charge", 1.0),
                                         spec.scalar("softening", 1.0), centre());
  if (f == "inverse-power-singular")
    return inverse_power_potential(dim, spec.scalar("strength", 1.0), spec.scalar("power", 0.5),
                                   centre());
  throw ScenarioError("unknown potential family '" + f + "'");
}

VectorPotentialSpec make_vector_family(const FamilySpec& spec, std::size_t dim) {
  const auto& f = spec.family;
  if (f.empty() || f == "zero" || f == "free") return VectorPotentialSpec::zero(dim);
  if (f == "constant") {
    auto v = spec.vector("value", Point(dim, 0.0));
    if (v.size() != dim) throw ScenarioError("vector potential 'constant': value has wrong length");
    return constant_vector_potential(v);
  }
  if (f == "sinusoidal")
    return sinusoidal_vector_potential(dim, spec.scalar("amplitude", 1.0),
                                       spec.scalar("wavenumber", 1.0));
  if (f == "constant-field-2d" || f == "landau-2d") {
    if (dim != 2) throw ScenarioError("vector potential '" + f + "' needs dimension 2");
    const double b = spec.scalar("field", 1.0);
    return f == "landau-2d" ? landau_gauge_potential(b) : symmetric_gauge_potential(b);
  }
  throw ScenarioError("unknown vector potential family '" + f + "'");
}

ScalarPotentialSpec Scenario::make_potential() const { return make_scalar_family(potential, dim); }

VectorPotentialSpec Scenario::make_vector_potential() const {
  // constant-field-2d may be named in the potential slot; it then supplies the field.
  if (vector_potential.family.empty() && potential.family == "constant-field-2d") {
    FamilySpec field = potential;
    if (field.params.count("landau")) field.family = "landau-2d";
    return make_vector_family(field, dim);
  }
  return make_vector_family(vector_potential, dim);
}

Scenario parse_scenario(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end(), nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ScenarioError(std::string("scenario is not valid JSON: ") + e.what());
  }
  const std::string root = "scenario";
  const json& schema = require(doc, "schema", root);
  if (!schema.is_string() || schema.get<std::string>() != kScenarioSchema)
    throw ScenarioError("scenario: schema must be \"" + std::string(kScenarioSchema) + "\"");

  Scenario s;
  const json& name = require(doc, "name", root);
  if (!name.is_string() || name.get<std::string>().empty())
    throw ScenarioError("scenario.name: expected a non-empty string");
  s.name = name.get<std::string>();
  const auto dims = counts(require(doc, "dimension", root), "scenario.dimension");
  if (dims.size() != 1) throw ScenarioError("scenario.dimension: expected one integer");
  s.dim = dims[0];

  const json& g = require(doc, "grid", root);
  s.grid.lower = point(require(g, "lower", "grid"), s.dim, "grid.lower");
  s.grid.upper = point(require(g, "upper", "grid"), s.dim, "grid.upper");
  auto pts = counts(require(g, "points", "grid"), "grid.points");
  if (pts.size() == 1 && s.dim > 1) pts.assign(s.dim, pts[0]);
  if (pts.size() != s.dim) throw ScenarioError("grid.points: wrong length");
  s.grid.points = pts;

  s.potential = doc.contains("potential") ? family(doc.at("potential"), "potential")
                                          : FamilySpec{"free", {}};
  if (doc.contains("vector_potential")) {
    s.vector_potential = family(doc.at("vector_potential"), "vector_potential");
    if (gauge_label(doc.at("vector_potential")) == "landau" &&
        s.vector_potential.family == "constant-field-2d")
      s.vector_potential.family = "landau-2d";
  }
  if (s.potential.family == "constant-field-2d" && gauge_label(doc.at("potential")) == "landau")
    s.potential.params["landau"] = {1.0};

  s.initial_state = packet(require(doc, "initial_state", root), s.dim, "initial_state");
  s.final_state = doc.contains("final_state") ? packet(doc.at("final_state"), s.dim, "final_state")
                                              : s.initial_state;
  s.time = finite(require(doc, "time", root), "scenario.time");
  if (!(s.time > 0.0)) throw ScenarioError("scenario.time: must be positive");
  s.slices = doc.contains("slices") ? counts(doc.at("slices"), "scenario.slices")
                                    : std::vector<std::size_t>{};

  if (doc.contains("reference")) {
    const json& r = doc.at("reference");
    if (r.contains("stencil")) {
      const auto st = r.at("stencil").get<std::string>();
      if (st == "central2") {
        s.stencil = Stencil::central2;
      } else if (st == "fourier") {
        s.stencil = Stencil::fourier;
      } else {
        throw ScenarioError("reference.stencil: expected 'central2' or 'fourier'");
      }
    }
  }

  if (doc.contains("amplitude")) {
    const json& a = doc.at("amplitude");
    AmplitudeConfig c;
    c.slices = counts(require(a, "slices", "amplitude"), "amplitude.slices");
    c.radii = numbers(require(a, "radii", "amplitude"), "amplitude.radii");
    if (a.contains("gap_radii")) c.gap_radii = numbers(a.at("gap_radii"), "amplitude.gap_radii");
    if (c.gap_radii.size() != 1 && c.gap_radii.size() != c.radii.size())
      throw ScenarioError("amplitude.gap_radii: need one value or one per radius");
    if (a.contains("mesh")) c.mesh = finite(a.at("mesh"), "amplitude.mesh");
    if (a.contains("tail_count")) c.tail_count = counts(a.at("tail_count"), "amplitude.tail_count").at(0);
    if (a.contains("threshold")) c.threshold = finite(a.at("threshold"), "amplitude.threshold");
    if (a.contains("max_work")) c.max_work = finite(a.at("max_work"), "amplitude.max_work");
    if (a.contains("box_center")) c.box_center = point(a.at("box_center"), s.dim, "amplitude.box_center");
    s.amplitude = c;
  }

  if (doc.contains("gauge")) {
    const json& gj = doc.at("gauge");
    GaugeCheckConfig c;
    c.point = gj.contains("point") ? point(gj.at("point"), s.dim, "gauge.point") : Point(s.dim, 0.1);
    c.direction = gj.contains("direction") ? point(gj.at("direction"), s.dim, "gauge.direction")
                                           : Point(s.dim, 1.0);
    if (gj.contains("step")) c.step = finite(gj.at("step"), "gauge.step");
    if (gj.contains("halvings")) c.halvings = counts(gj.at("halvings"), "gauge.halvings").at(0);
    s.gauge = c;
  }

  if (doc.contains("assertions")) {
    const json& list = doc.at("assertions");
    if (!list.is_array()) throw ScenarioError("assertions: expected an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string where = "assertions[" + std::to_string(i) + "]";
      const json& q = require(list[i], "quantity", where);
      if (!q.is_string()) throw ScenarioError(where + ".quantity: expected a string");
      Assertion as{q.get<std::string>(), std::nullopt, std::nullopt};
      if (list[i].contains("min")) as.min = finite(list[i].at("min"), where + ".min");
      if (list[i].contains("max")) as.max = finite(list[i].at("max"), where + ".max");
      if (!as.min && !as.max) throw ScenarioError(where + ": needs min or max");
      s.assertions.push_back(std::move(as));
    }
  }

  // Build the fields once so bad family parameters fail at load time.
  (void)s.grid.make();
  (void)s.make_potential();
  (void)s.make_vector_potential();
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

void Report::merge(const Report& other) {
  if (scenario.empty()) scenario = other.scenario;
  rows.insert(rows.end(), other.rows.begin(), other.rows.end());
  for (const auto& [k, v] : other.metrics) metrics[k] = v;
  for (const auto& [k, v] : other.diagnostics) diagnostics[k] = v;
  warnings.insert(warnings.end(), other.warnings.begin(), other.warnings.end());
  for (const auto& [k, v] : other.timings) timings[k] = v;
}

std::string Report::to_csv() const {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& r : rows) {
    out += csv_field(r.scenario) + ',' + csv_field(r.quantity) + ',' + csv_field(r.k_or_step) + ',' +
           fmt(r.value) + ',' + fmt(r.reference) + ',' + fmt(r.abs_error) + ',' + fmt(r.rel_error) +
           ',' + csv_field(r.oracle) + '\n';
  }
  return out;
}

std::string Report::to_json() const {
  json doc;
  doc["scenario"] = scenario;
  json rows_json = json::array();
  for (const auto& r : rows) {
    rows_json.push_back({{"quantity", r.quantity},
                         {"k_or_step", r.k_or_step},
                         {"value", number(r.value)},
                         {"reference", number(r.reference)},
                         {"abs_error", number(r.abs_error)},
                         {"rel_error", number(r.rel_error)},
                         {"oracle", r.oracle}});
  }
  doc["rows"] = rows_json;
  json m = json::object();
  for (const auto& [k, v] : metrics) m[k] = number(v);
  doc["metrics"] = m;
  doc["diagnostics"] = diagnostics;
  doc["warnings"] = warnings;
  json t = json::object();
  for (const auto& [k, v] : timings) t[k] = v;
  doc["timings_seconds"] = t;
  return doc.dump(2) + "\n";
}

std::vector<AssertionOutcome> check_assertions(const Scenario& scenario, const Report& report,
                                               const std::vector<std::string>& prefixes) {
  std::vector<AssertionOutcome> out;
  for (const auto& a : scenario.assertions) {
    bool selected = prefixes.empty();
    for (const auto& p : prefixes) selected = selected || a.quantity.rfind(p, 0) == 0;
    if (!selected) continue;
    AssertionOutcome o{a, std::nan(""), false, false};
    const auto it = report.metrics.find(a.quantity);
    if (it != report.metrics.end()) {
      o.found = true;
      o.value = it->second;
      o.passed = std::isfinite(o.value) && (!a.min || o.value >= *a.min) && (!a.max || o.value <= *a.max);
    }
    out.push_back(o);
  }
  return out;
}

}  // namespace magpath
