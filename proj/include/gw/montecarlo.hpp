#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "gw/model.hpp"

namespace gw {

struct SamplerSpec {
  long samples = 100000;
  std::uint64_t seed = 1;
  // Negates every draw; used for the conjugation symmetry check.
  bool mirrored = false;
};

// Worker count from GWMLVE_THREADS, falling back to the hardware concurrency.
int worker_count();

std::uint64_t splitmix64(std::uint64_t x);

// Hermitian matrix with <s_mn s_kl> = d_ml d_nk (unit covariance).
Eigen::MatrixXcd sample_unit_hermitian(std::mt19937_64& rng, int n);

// Hermitian matrix distributed with covariance <phi_mn phi_kl> = C_mn d_ml d_nk.
Eigen::MatrixXcd sample_field(std::mt19937_64& rng, const Eigen::MatrixXd& cov);

struct MultiEstimate {
  std::vector<cplx> mean;
  std::vector<double> std_error;
  long samples = 0;
  std::uint64_t seed = 0;
};

using Observable = std::function<void(const Eigen::MatrixXcd& sigma, cplx* out)>;

// Averages `observables` complex quantities over Gaussian unit-covariance sigma.
// Samples are split into fixed-size chunks seeded from (seed, chunk index) and
// the chunk sums are merged by a fixed pairwise tree, so results do not depend
// on the number of workers.
MultiEstimate mc_estimate(const SamplerSpec& spec, int n, int observables, const Observable& f);

}  // namespace gw
