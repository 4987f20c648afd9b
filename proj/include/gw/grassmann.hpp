#pragma once

#include <random>
#include <set>
#include <vector>

#include <Eigen/Dense>

#include "gw/forests.hpp"

namespace gw {

// Square block matrix with unit diagonal, entries in [0,1], PSD.
struct FermionicBlockMatrix {
  explicit FermionicBlockMatrix(Eigen::MatrixXd y);
  Eigen::MatrixXd Y;
  int size() const { return static_cast<int>(Y.rows()); }
};

// Y_BB' = min of w along the fermionic forest path between blocks.
FermionicBlockMatrix block_matrix(const Forest& fermionic, const std::vector<double>& w);

// Gram matrix of random unit vectors in the non-negative orthant.
Eigen::MatrixXd random_unit_gram(int size, std::mt19937_64& rng);

// det of Y with the listed rows and columns removed (det Y when empty).
double grassmann_minor(const FermionicBlockMatrix& Y, const std::vector<int>& rows, const std::vector<int>& cols);

// int dchi-bar dchi exp(-chi-bar Y chi) prod_i chi-bar_{a_i} chi_{b_i},
// normalized so that the empty product gives det Y. Signed minor form.
double grassmann_moment(const Eigen::MatrixXd& Y, const std::vector<int>& a, const std::vector<int>& b);
// The same integral by explicit exterior-algebra expansion (size <= 4).
double grassmann_moment_oracle(const Eigen::MatrixXd& Y, const std::vector<int>& a, const std::vector<int>& b);

// Vertex slice sets grouped by block: slice_sets[block][vertex] is the set of
// scale indices carried by that vertex.
using BlockSliceSets = std::vector<std::vector<std::set<int>>>;

// Hardcore indicator: vertices of one block carry pairwise disjoint slices.
bool hardcore_indicator(const BlockSliceSets& sets);

// Each fermionic edge (B, B') inserts chi-bar_B chi_B' + chi-bar_B' chi_B; the
// 2^k choices give signed minors, multiplied by the hardcore indicator.
double fermionic_forest_integral(const Forest& fermionic, const FermionicBlockMatrix& Y, const BlockSliceSets& sets);
double fermionic_forest_integral_oracle(const Forest& fermionic, const FermionicBlockMatrix& Y,
                                        const BlockSliceSets& sets);

}  // namespace gw
