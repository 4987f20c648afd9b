#include <filesystem>
#include <fstream>

#include "config.hpp"
#include "doctest.h"
#include "suites.hpp"

using namespace gwcli;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("gwmlve-unit-" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("config hash tracks result-relevant fields only") {
    RunConfig a, b;
    CHECK(a.hash() == b.hash());
    b.output_dir = "elsewhere";
    b.plots = true;
    CHECK(a.hash() == b.hash());
    b.seed = 2;
    CHECK(a.hash() != b.hash());
    RunConfig c;
    c.cutoff = 0;
    CHECK(a.hash() != c.hash());
    CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
    CHECK(hex64(fnv1a("a")) == "af63dc4c8601ec8c");
  }

  TEST_CASE("INI sections populate the config") {
    fs::path dir = scratch_dir("ini");
    fs::path f = dir / "run.ini";
    std::ofstream(f) << "[model]\ncutoff = 1\nlambda = 0.05,0.1\nscale_base = 2\n"
                     << "[sampling]\nsamples = 5000\nseed = 9\n"
                     << "[tolerance]\nse_multiplier = 4\n"
                     << "[output]\ndir = out\ncsv = false\n";
    RunConfig cfg;
    load_ini(f.string(), cfg);
    CHECK(cfg.cutoff.value() == 1);
    CHECK(cfg.lambdas == std::vector<double>{0.05, 0.1});
    CHECK(cfg.scale_bases == std::vector<int>{2});
    CHECK(cfg.samples == 5000);
    CHECK(cfg.seed == 9);
    CHECK(cfg.se_multiplier == 4.0);
    CHECK(cfg.output_dir == "out");
    CHECK_FALSE(cfg.csv);
    cfg.validate();

    std::ofstream(f) << "[model]\nbogus = 1\n";
    CHECK_THROWS_AS(load_ini(f.string(), cfg), std::invalid_argument);
  }

  TEST_CASE("validation rejects out-of-range values") {
    RunConfig cfg;
    cfg.rho = 1.5;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = RunConfig{};
    cfg.order = 6;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = RunConfig{};
    cfg.scale_bases = {1};
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  }

  TEST_CASE("report status is fail iff a check fails") {
    SuiteReport r("demo");
    r.check("a", true);
    r.skip("b", "not applicable");
    CHECK(r.passed());
    r.check("c", false);
    CHECK_FALSE(r.passed());
    RunConfig cfg;
    auto j = r.to_json(cfg);
    CHECK(j["status"] == "fail");
    CHECK(j["schema"] == kReportSchema);
    CHECK(j["provenance"]["config_hash"] == cfg.hash());
  }

  TEST_CASE("runtime blocks are stripped recursively") {
    json j = {{"a", 1}, {"runtime", {{"t", 2}}}, {"reports", json::array({{{"runtime", 3}, {"b", 4}}})}};
    json s = strip_runtime(j);
    CHECK_FALSE(s.contains("runtime"));
    CHECK_FALSE(s["reports"][0].contains("runtime"));
    CHECK(s["reports"][0]["b"] == 4);
  }

  TEST_CASE("coefficient cache round trip") {
    fs::path dir = scratch_dir("cache");
    RunConfig cfg;
    cfg.cutoff = 1;
    cfg.order = 3;
    cfg.output_dir = (dir / "out").string();
    cfg.cache_dir = (dir / "cache").string();
    fs::create_directories(cfg.output_dir);
    auto first = run_suite("coefficients", cfg);
    CHECK(first.passed());
    CHECK(first.runtime["cache"]["hit"] == false);
    CHECK(first.data["power_series"]["coefficients"][0]["exact"] == "-5/18");
    cfg.verify_cache = true;
    auto second = run_suite("coefficients", cfg);
    CHECK(second.passed());
    CHECK(second.runtime["cache"]["hit"] == true);
    CHECK(second.runtime["cache"]["verified"] == true);
    CHECK(strip_runtime(first.to_json(cfg)) == strip_runtime(second.to_json(cfg)));

    // A tampered cache entry is detected on verification.
    for (const auto& e : fs::directory_iterator(cfg.cache_dir)) {
      std::ifstream in(e.path());
      json c = json::parse(in);
      in.close();
      c["coefficients"][0] = "1/2";
      std::ofstream(e.path()) << c.dump();
    }
    CHECK_FALSE(run_suite("coefficients", cfg).passed());
  }

  TEST_CASE("forests suite counts two-level trees") {
    fs::path dir = scratch_dir("forests");
    RunConfig cfg;
    cfg.count_two_level = 4;
    cfg.output_dir = dir.string();
    auto r = run_suite("forests", cfg);
    CHECK(r.passed());
    CHECK(r.data["two_level_count"]["count"] == "128");
    CHECK_THROWS_AS(run_suite("nonsense", cfg), std::invalid_argument);
  }
}
