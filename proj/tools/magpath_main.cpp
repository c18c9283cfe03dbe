#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "magpath/errors.hpp"
#include "magpath/scenario.hpp"
#include "magpath/studies.hpp"

namespace {

struct Args {
  std::string scenario;
  std::string out = "magpath-out";
  std::size_t max_dense = 4096;
  std::size_t threads = 1;
};

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream f(p);
  if (!f) throw magpath::Error("cannot write " + p.string());
  f << text;
}

int run(const std::string& command, const Args& args) {
  const magpath::Scenario sc = magpath::load_scenario(args.scenario);
  const magpath::StudyOptions opts{args.max_dense, args.threads};

  magpath::Report report;
  report.scenario = sc.name;
  std::vector<std::string> prefixes;
  if (command == "trotter" || command == "all") {
    report.merge(magpath::run_trotter_study(sc, opts));
    prefixes.push_back("trotter.");
  }
  if (command == "gauge" || command == "all") {
    report.merge(magpath::run_gauge_check(sc, opts));
    prefixes.push_back("gauge.");
  }
  if (command == "amplitude" || command == "all") {
    report.merge(magpath::run_amplitude_study(sc, opts));
    prefixes.push_back("amplitude.");
  }

  std::filesystem::create_directories(args.out);
  const std::filesystem::path base = std::filesystem::path(args.out) / (sc.name + "." + command);
  write_file(base.string() + ".csv", report.to_csv());
  write_file(base.string() + ".json", report.to_json());

  for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
  bool ok = true;
  for (const auto& o : magpath::check_assertions(sc, report, prefixes)) {
    ok = ok && o.passed;
    char bounds[96];
    std::snprintf(bounds, sizeof bounds, "[%g, %g]", o.assertion.min.value_or(-HUGE_VAL),
                  o.assertion.max.value_or(HUGE_VAL));
    if (!o.found) {
      std::printf("FAIL %s: not produced by this run\n", o.assertion.quantity.c_str());
    } else {
      std::printf("%s %s = %.6g in %s\n", o.passed ? "PASS" : "FAIL", o.assertion.quantity.c_str(),
                  o.value, bounds);
    }
  }
  std::printf("report: %s.{csv,json}\n", base.string().c_str());
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gauge-split propagators and time-sliced path-integral amplitudes"};
  app.require_subcommand(1);
  Args args;
  std::string command;
  for (const char* name : {"trotter", "amplitude", "gauge", "all"}) {
    const std::string n = name;
    const char* help = n == "trotter"     ? "split-step error against the dense reference over k"
                       : n == "amplitude" ? "excised path-integral amplitude per k"
                       : n == "gauge"     ? "gauge conjugation and midpoint checks"
                                          : "every study";
    auto* sub = app.add_subcommand(n, help);
    sub->add_option("--scenario", args.scenario, "scenario JSON file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", args.out, "report directory")->capture_default_str();
    sub->add_option("--max-dense", args.max_dense, "dense reference matrix cap")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    sub->add_option("--threads", args.threads, "worker threads for path-integral sums")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    sub->callback([&command, n] { command = n; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help and --version exit 0; usage errors share the error exit code
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    return run(command, args);
  } catch (const magpath::CapExceededError& e) {
    std::cerr << "error: " << e.what() << " (suggested k = " << e.suggested_slices() << ")\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
  }
  return 2;
}
