#pragma once

#include <functional>
#include <map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gw/rational.hpp"

namespace gw {

using Edge = std::pair<int, int>;  // stored with first < second

struct Forest {
  int n = 0;
  std::vector<Edge> edges;
  bool is_acyclic() const;
  // Edge indices along the unique path from i to j (empty when i == j).
  // Returns false if i and j lie in different components.
  bool path(int i, int j, std::vector<int>& out) const;
  std::vector<int> component_labels() const;
};

// Index of the pair (i, j), i < j, in lexicographic order over n vertices.
int pair_index(int i, int j, int n);
std::vector<Edge> all_pairs(int n);

// Calls visit once per forest on n labelled vertices (empty forest included).
void enumerate_forests(int n, const std::function<void(const Forest&)>& visit);
long count_forests(int n);

// Polynomial in the pair variables x_ij with exact coefficients.
struct EdgePolynomial {
  int n = 0;
  std::map<std::vector<int>, Rational> terms;  // exponent per pair -> coefficient
  static EdgePolynomial monomial(int n, const std::vector<int>& exponents, Rational coeff = 1);
  EdgePolynomial derivative(int pair) const;
  Rational at_ones() const;
  int degree() const;
};

// Forest sum of the interpolation formula with exact w-integrals: each w
// ordering turns path infima into single variables integrated over a simplex.
Rational bkar_evaluate(const EdgePolynomial& f);
// Contribution of one forest.
Rational bkar_forest_term(const EdgePolynomial& f, const Forest& forest);

// Mixed partial derivative of f in the listed pair variables at x.
using SmoothEdgeFunction = std::function<double(const std::vector<double>& x, const std::vector<int>& pairs)>;
// Same forest sum for a smooth f: Gauss-Legendre on each ordering simplex.
double bkar_evaluate_smooth(int n, const SmoothEdgeFunction& f);

// X_ij = min of w along the forest path, 1 on the diagonal, 0 across
// components. Throws InvariantViolation if X fails to be PSD.
Eigen::MatrixXd replica_covariance(const Forest& forest, const std::vector<double>& w);

struct Jungle {
  Forest bosonic;
  std::vector<int> block_of;  // vertex -> block label
  int blocks = 0;
  Forest fermionic;           // over blocks
};

// Spanning trees with each edge coloured bosonic (0) or fermionic (1).
struct ColoredTree {
  Forest tree;
  std::vector<int> colors;
};

void enumerate_spanning_trees(int n, const std::function<void(const Forest&)>& visit);
void enumerate_two_level_trees(int n, const std::function<void(const ColoredTree&)>& visit);
Jungle jungle_of(const ColoredTree& t);
BigInt count_two_level_trees(int n);
// m^{n-1} n^{n-2}; enumerated_multi_level_trees counts spanning trees with m
// edge colours by enumeration.
BigInt count_multi_level_trees(int m, int n);
long enumerated_multi_level_trees(int m, int n);

}  // namespace gw
