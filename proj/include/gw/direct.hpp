#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gw/model.hpp"
#include "gw/montecarlo.hpp"

namespace gw {

struct ZEstimate {
  cplx value;
  double std_error = 0.0;
  std::string method;  // "quadrature" or "monte-carlo"
  long samples = 0;
  std::uint64_t seed = 0;
  // Difference between two node counts; only set for quadrature.
  double quadrature_error = 0.0;
};

ZEstimate z_direct_quadrature(double lambda, const Cutoff& cutoff, int nodes = 0);
ZEstimate z_intermediate_field(const Coupling& coupling, const Cutoff& cutoff, const SamplerSpec& sampler);
// Same integral by tensor Gauss-Hermite over sigma; cutoff 0 or 1 only.
ZEstimate z_intermediate_quadrature(const Coupling& coupling, const Cutoff& cutoff, int nodes = 0);

// Operator X -> sigma X + X sigma on n x n matrices, basis E_pq at index p*n+q.
Eigen::MatrixXcd hat_operator(const Eigen::MatrixXcd& sigma);

// C acting on matrices by entrywise multiplication, as a diagonal vector.
Eigen::VectorXd propagator_diagonal(const Eigen::MatrixXd& c);

struct LoopVertexParts {
  cplx trace_log;    // Tr log(1 + i c C sigma-hat)
  cplx trace_log2;   // Tr [log(1+x) - x] with x = i c C sigma-hat
  cplx linear;       // i c Tr(C sigma-hat), computed from the spectrum
  cplx counterterm;  // i c sum_m T_m sigma_mm
  cplx constant;     // (lambda/2) Pi
  cplx value;        // V(sigma)
  double decomposition_error;  // relative mismatch of Tr(C sigma-hat) vs 2 sum T sigma_mm
};

LoopVertexParts loop_vertex_parts(const Eigen::MatrixXcd& sigma, const Coupling& coupling,
                                  const Cutoff& cutoff);
cplx loop_vertex_value(const Eigen::MatrixXcd& sigma, const Coupling& coupling, const Cutoff& cutoff);

enum class ResolventKind { plain, symmetric };

Eigen::MatrixXcd build_resolvent(const Eigen::MatrixXcd& sigma, const Coupling& coupling,
                                 const Cutoff& cutoff, ResolventKind kind);

struct ResolventNormReport {
  long samples = 0;
  int couplings = 0;
  double max_ratio = 0.0;   // max of ||R-hat|| cos(arg lambda / 2)
  double min_margin = 1.0;  // min of 1 - ratio^2, evaluated without cancellation
  long violations = 0;
  bool passed() const { return violations == 0 && max_ratio < 1.0; }
};

ResolventNormReport resolvent_norm_check(const SamplerSpec& sampler, const std::vector<Coupling>& grid,
                                         const Cutoff& cutoff);

// Max deviation between the central difference of R in sigma_(alpha,beta) and
// -i c R C e_(alpha,beta) R, relative to the largest analytic entry.
double resolvent_derivative_check(const Eigen::MatrixXcd& sigma, const Coupling& coupling,
                                  const Cutoff& cutoff, int alpha, int beta, double h,
                                  ResolventKind kind = ResolventKind::plain);

struct NelsonReport {
  double lambda;
  int cutoff;
  double z;
  double bound;
  bool holds;
};

NelsonReport nelson_bound_check(double lambda, const Cutoff& cutoff);

struct RepresentationReport {
  double lambda;
  int cutoff;
  ZEstimate direct;
  ZEstimate intermediate;
  ZEstimate intermediate_quadrature;
  double abs_difference;
  double combined_std_error;
  double quadrature_difference;  // |direct - intermediate| with both by quadrature
  bool passed;  // MC within 3 combined standard errors and quadratures within 1e-6
};

RepresentationReport verify_representation(double lambda, const Cutoff& cutoff, const SamplerSpec& sampler);

// Hook operator e_(a,b): X -> E_ab X + X E_ab, dense in the E_pq basis.
Eigen::MatrixXd hook_operator(int n, int a, int b);

}  // namespace gw
