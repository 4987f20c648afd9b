#pragma once

#include <functional>
#include <string>
#include <vector>

#include "gw/model.hpp"
#include "gw/rational.hpp"

namespace gw {

// Slots 4v..4v+3 belong to vertex v in cyclic order; slot 4v+k carries the
// field phi_{i_k i_{k+1}} of Tr phi^4.
struct PairingDiagram {
  int order = 0;
  std::vector<int> partner;
  bool connected = false;
  // No contraction between cyclically adjacent slots of one vertex; these are
  // exactly the pairings that survive Wick ordering.
  bool wick_admissible = false;
};

constexpr int kMaxPairingOrder = 4;

// Visits all (4n-1)!! perfect matchings once. Orders above 4 need allow_large.
long enumerate_pairings(int order, const std::function<void(const PairingDiagram&)>& visit,
                        bool allow_large = false);

// Contracts every pair with C_mn d_ml d_nk and sums the free face indices.
Rational diagram_amplitude(const PairingDiagram& diagram, const Cutoff& cutoff);

struct PowerSeries {
  int cutoff = 0;
  // a_1..a_N, the coefficients of lambda^n in log Z.
  std::vector<Rational> coefficients;
  std::string normalization =
      "log Z with S_int = (lambda/4)[Tr phi^4 - 4 Tr(phi^2 T) + 2 Pi], normalized Gaussian measure, C_mn = 1/(m+n+1)";
  // a_0..a_N with a_0 = 0.
  std::vector<Rational> with_constant() const;
};

// a_n = (-1/4)^n / n! times the sum over connected Wick-admissible diagrams.
PowerSeries log_z_coefficients(const Cutoff& cutoff, int n_max, bool allow_large = false);

// Z_1..Z_N from all Wick-admissible diagrams (connected or not).
std::vector<Rational> z_coefficients(const Cutoff& cutoff, int n_max, bool allow_large = false);

// Z_1..Z_N with the counterterms kept as separate vertex species: Tr phi^4,
// -4 Tr(phi^2 T) and the constant 2 Pi, all pairings allowed.
std::vector<Rational> z_coefficients_counterterm_species(const Cutoff& cutoff, int n_max);

// Logarithm of 1 + sum_{n>=1} z_n x^n, returned as l_1..l_N.
std::vector<Rational> series_log(const std::vector<Rational>& z);

// Independent route at cutoff 0: exact Gaussian moments of exp(-(lambda/4)(x^4-4x^2+2)).
PowerSeries coefficient_oracle(const Cutoff& cutoff, int n_max);

struct TadpoleCancellationReport {
  int cutoff = 0;
  Rational planar_bare;         // both planar pairings of the bare vertex
  Rational nonplanar_bare;      // the crossing pairing
  Rational quadratic_counterterm;  // -4 <Tr phi^2 T>
  Rational constant_counterterm;   // 2 Pi
  Rational survivor;            // sum_m C_mm^2
  Rational cancelled_mass;      // planar part removed by the counterterms
  bool structural = false;      // admissible order-1 set is the single crossing diagram, no T weights
  bool survivor_matches = false;
  bool bounded = false;         // survivor / 4 < pi^2 / 32
  bool passed() const { return structural && survivor_matches && bounded; }
};

TadpoleCancellationReport tadpole_cancellation_check(const Cutoff& cutoff);

// Sum of the Wick-admissible first-order amplitudes, which carry no T
// weights; cheap enough for cutoffs in the thousands.
Rational renormalized_first_order_amplitude(const Cutoff& cutoff);

}  // namespace gw
