#pragma once

#include <utility>
#include <vector>

#include "gw/model.hpp"
#include "gw/perturbation.hpp"
#include "gw/rational.hpp"

namespace gw {

struct CardioidDomain {
  explicit CardioidDomain(double rho);
  double rho;
  bool contains(const Coupling& lambda) const;
  // Points r * rho * cos^2(phi/2) e^{i phi} for the given radial fractions
  // in (0,1) and phases in (-pi, pi).
  std::vector<cplx> grid(const std::vector<double>& fractions, const std::vector<double>& phases) const;
};

// |lambda| < rho cos^2(arg lambda / 2) with arg lambda = pi excluded.
bool cardioid_contains(const Coupling& lambda, double rho);

struct BorelSeries {
  explicit BorelSeries(std::vector<Rational> a);  // a_0..a_N
  explicit BorelSeries(const PowerSeries& s);
  std::vector<Rational> source;
  std::vector<Rational> borel_coefficients;  // a_n / n!
};

struct PadeApproximant {
  int L = 0;
  int M = 0;
  std::vector<Rational> numerator;    // p_0..p_L
  std::vector<Rational> denominator;  // q_0 = 1, q_1..q_M
  std::vector<cplx> poles;
  cplx operator()(cplx x) const;
};

// [L/M] approximant of sum b_n x^n; needs b_0..b_{L+M}.
PadeApproximant pade(const std::vector<Rational>& b, int L, int M);

// Near-diagonal default (floor(N/2), ceil(N/2) - 1) for a_1..a_N.
std::pair<int, int> default_pade_order(int n_coefficients);

struct BorelPadeResult {
  cplx value;
  double quadrature_error;
  double tail_bound;
  double truncation;  // upper end of the Laplace integral
  int L;
  int M;
  std::vector<cplx> poles;  // in the Borel plane
};

// int_0^inf e^{-t} P(lambda t) dt for the Pade approximant P of the Borel
// transform. Throws PoleObstruction when a pole lies on the ray lambda t.
BorelPadeResult borel_pade_evaluate(const BorelSeries& series, cplx lambda, int L, int M);
BorelPadeResult borel_pade_evaluate(const PowerSeries& series, cplx lambda);

struct RemainderRow {
  cplx lambda;
  int n;
  cplx remainder;
  double ratio;  // |R_n| / (n! |lambda|^n)
};

struct RemainderReport {
  std::vector<RemainderRow> rows;
  std::vector<double> sup_ratio;    // per lambda
  std::vector<double> k_estimate;   // per lambda, exp of the fitted log-ratio slope
  std::vector<double> max_step;     // per lambda, largest consecutive ratio change
  bool passed;                      // finite and consecutive ratios within a factor 10
};

// R_n(lambda) = reference - sum_{k<n} a_k lambda^k.
RemainderReport remainder_growth_diagnostic(const PowerSeries& series, const std::vector<cplx>& lambdas,
                                            const std::vector<int>& n_grid, const std::vector<cplx>& references);

}  // namespace gw
