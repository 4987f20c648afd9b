#pragma once

#include <chrono>
#include <string>
#include <vector>

#include "config.hpp"
#include "json.hpp"

namespace gwcli {

using json = nlohmann::json;

constexpr const char* kReportSchema = "gwmlve.report/1";

struct SuiteReport {
  explicit SuiteReport(std::string name) : suite(std::move(name)) {}

  std::string suite;
  json checks = json::array();
  json constants = json::object();
  json data = json::object();
  // Timings and cache state; everything outside this block is deterministic.
  json runtime = json::object();

  void check(const std::string& name, bool ok, json detail = json::object());
  void skip(const std::string& name, const std::string& reason);
  bool passed() const;
  json to_json(const RunConfig& cfg) const;
};

// Names accepted by run_suite, without "all".
const std::vector<std::string>& suite_names();

SuiteReport run_suite(const std::string& name, const RunConfig& cfg);

// Runs a suite (or all), writes <output_dir>/<suite>.json plus CSVs and
// optional plots. Returns the process exit code.
int run(const std::string& name, const RunConfig& cfg);

// Copy of a report with every "runtime" member removed, for determinism checks.
json strip_runtime(const json& report);

}  // namespace gwcli
