#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "magpath/families.hpp"
#include "magpath/fields.hpp"
#include "magpath/reference.hpp"

namespace magpath {

inline constexpr std::string_view kScenarioSchema = "magpath.scenario/1";

/// Family id plus numeric parameters (scalars stored as one-element vectors).
struct FamilySpec {
  std::string family;
  std::map<std::string, std::vector<double>> params;

  double scalar(const std::string& key, double fallback) const;
  std::vector<double> vector(const std::string& key, std::vector<double> fallback) const;
};

struct GridSpec {
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<std::size_t> points;

  Grid make() const;
};

struct AmplitudeConfig {
  std::vector<std::size_t> slices;
  /// Outer box half-width per schedule step.
  std::vector<double> radii;
  /// Gap radius per schedule step, or a single value for all steps.
  std::vector<double> gap_radii{1e-3};
  double mesh = 0.0;
  std::size_t tail_count = 8;
  double threshold = 1e-3;
  double max_work = 1e8;
  Point box_center;
};

struct GaugeCheckConfig {
  Point point;
  Point direction;
  double step = 0.2;
  std::size_t halvings = 4;
};

/// Bound on a named report metric.
struct Assertion {
  std::string quantity;
  std::optional<double> min;
  std::optional<double> max;
};

struct Scenario {
  std::string name;
  std::size_t dim = 1;
  GridSpec grid;
  FamilySpec potential;
  FamilySpec vector_potential;
  GaussianPacket initial_state;
  GaussianPacket final_state;
  double time = 1.0;
  std::vector<std::size_t> slices;
  Stencil stencil = Stencil::fourier;
  std::optional<AmplitudeConfig> amplitude;
  std::optional<GaugeCheckConfig> gauge;
  std::vector<Assertion> assertions;

  ScalarPotentialSpec make_potential() const;
  VectorPotentialSpec make_vector_potential() const;
};

/// Throws ScenarioError on malformed documents or unknown families.
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::filesystem::path& path);

ScalarPotentialSpec make_scalar_family(const FamilySpec& spec, std::size_t dim);
VectorPotentialSpec make_vector_family(const FamilySpec& spec, std::size_t dim);

struct ReportRow {
  std::string scenario;
  std::string quantity;
  std::string k_or_step;
  double value = 0.0;
  double reference = 0.0;
  double abs_error = 0.0;
  double rel_error = 0.0;
  /// dense | closed-form | split-step | symbolic
  std::string oracle;
};

struct Report {
  std::string scenario;
  std::vector<ReportRow> rows;
  /// Scalars that scenario assertions refer to, e.g. "trotter.fitted_order".
  std::map<std::string, double> metrics;
  std::map<std::string, std::string> diagnostics;
  std::vector<std::string> warnings;
  /// Wall-clock seconds per study; kept out of the CSV so tables stay reproducible.
  std::map<std::string, double> timings;

  void merge(const Report& other);
  std::string to_csv() const;
  std::string to_json() const;
};

inline constexpr std::string_view kCsvHeader =
    "scenario,quantity,k-or-step,value,reference,abs_error,rel_error,oracle";

struct AssertionOutcome {
  Assertion assertion;
  double value = 0.0;
  bool found = false;
  bool passed = false;
};

/// Checks every assertion whose quantity starts with one of `prefixes`
/// (all assertions when `prefixes` is empty). Missing metrics fail.
std::vector<AssertionOutcome> check_assertions(const Scenario& scenario, const Report& report,
                                               const std::vector<std::string>& prefixes = {});

}  // namespace magpath
