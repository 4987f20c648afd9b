#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "gw/model.hpp"

namespace gw {

// Gauss-Hermite rule for the standard normal weight; weights sum to 1.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussRule gauss_hermite_normal(int n);

// Tensor Gauss-Hermite expectation over unit-covariance Hermitian sigma of
// size n (n*n real coordinates). Only meant for n <= 2.
std::vector<cplx> gh_sigma_expectation(int nodes, int n, int observables,
                                       const std::function<void(const Eigen::MatrixXcd&, cplx*)>& f);

}  // namespace gw
