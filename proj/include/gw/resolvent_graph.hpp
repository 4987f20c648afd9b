#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gw/model.hpp"
#include "gw/rational.hpp"
#include "gw/series.hpp"

namespace gw {

// Building blocks of slice-testing amplitudes. Operators act on n x n
// matrices (basis E_pq); propagators act by entrywise multiplication.
enum class FactorKind {
  resolvent,            // R = (1 + i c C(t) s-hat)^{-1}
  resolvent_minus_one,  // R - 1
  propagator,           // C(t) (mark -1) or a marked slice C^omega (mark k)
  hook,                 // e_ab (end 0) or e_ba (end 1) of a sigma line
  crossing,             // sum_ab of the mixed-border pieces of e_ba X e_ab
  tadpole,              // multiplication by T^X_p + T^X_q; never in renormalized terms
};

enum class HookSide { both, left, right };

struct Factor {
  FactorKind kind;
  int mark = -1;
  int line = -1;
  int end = 0;
  HookSide side = HookSide::both;
};

// One trace of a product of factors, read left to right.
using ResolventChain = std::vector<Factor>;

struct Term {
  Rational coefficient;
  int coupling_power = 0;  // power of c^2 = lambda/2
  std::vector<ResolventChain> traces;
  int lines = 0;           // sigma lines, each summed over (a,b)
  std::string group;
};

struct Amplitude {
  std::vector<Term> terms;
  bool has_tadpole_factors() const;
  // Number of distinct terms after canonical relabelling and merging.
  int distinct_term_count() const;
};

// Renormalized first-order amplitude for the marked slice `mark`.
// Groups A-E: single-loop pair, two-loop pair, two crossing insertions and
// the pure crossing vacuum piece.
Amplitude order1_terms(int mark);
// Same amplitude with explicit border choices: planar pieces (same border on
// both ends, plus the two-loop pair) and non-planar pieces (opposite borders).
Amplitude order1_sided_terms(int mark);
// First order after integration by parts but before cancellation; carries
// tadpole operators and the squared-counterterm piece.
Amplitude order1_unrenormalized_terms(int mark);

// Renormalized second-order amplitude for marks 0 and 1.
Amplitude order2_terms();
// Second order after integration by parts with tadpoles kept.
Amplitude order2_unrenormalized_terms();

// Operators on n x n matrices; storage is bounded so small products stay on
// the stack (n <= 4).
constexpr int kMaxGraphDim = 16;
using GraphOp = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxGraphDim, kMaxGraphDim>;

// Numeric data at fixed sigma and t.
struct GraphContext {
  GraphContext(const Eigen::MatrixXcd& sigma, const Eigen::MatrixXd& propagator_t,
               const std::vector<Eigen::MatrixXd>& marked, cplx c);
  int n;
  cplx c;
  GraphOp R;
  GraphOp Rm1;
  std::vector<GraphOp> prop;      // index mark + 1
  std::vector<GraphOp> crossing;  // index mark + 1
  std::vector<GraphOp> tadpole;   // index mark + 1
};

cplx evaluate(const Term& term, const GraphContext& ctx);
cplx evaluate(const Amplitude& amp, const GraphContext& ctx);

// Single-site (cutoff 0) evaluation at t = 1 as a series in (c, s), where
// sigma = s: R = 1/(1 + 2ics), every propagator is 1.
BiSeries evaluate_single_site(const Amplitude& amp, int order);

std::string describe(const Term& term);

}  // namespace gw
