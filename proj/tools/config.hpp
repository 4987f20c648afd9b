#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace gwcli {

struct RunConfig {
  // Model
  std::optional<int> cutoff;      // unset: each suite uses its acceptance cutoffs
  std::vector<double> lambdas;    // unset: each suite uses its acceptance couplings
  std::vector<int> scale_bases{2, 3};
  double rho = 0.1;
  int order = 4;
  int j_max = 10;
  int q_kernel_j_max = 8;
  int count_two_level = 0;

  // Sampling
  long samples = 100000;
  long order2_samples = 20000;
  long resolvent_samples = 10000;
  std::uint64_t seed = 1;

  // Tolerance
  double se_multiplier = 3.0;
  double quadrature_tolerance = 1e-6;
  double derivative_tolerance = 1e-5;
  double resum_tolerance = 1e-4;

  // Output
  std::string output_dir = "reports";
  std::string cache_dir = ".gwmlve-cache";
  bool verify_cache = false;
  bool csv = true;
  bool plots = false;

  void validate() const;
  // Stable text form of every field that affects results.
  std::string canonical() const;
  std::string hash() const;
};

std::uint64_t fnv1a(const std::string& text);
std::string hex64(std::uint64_t v);

// Flat INI sections [model] [sampling] [tolerance] [output]; unknown keys are
// rejected.
void load_ini(const std::string& path, RunConfig& cfg);

}  // namespace gwcli
