#pragma once

#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gw/montecarlo.hpp"
#include "gw/model.hpp"
#include "gw/resolvent_graph.hpp"
#include "gw/scales.hpp"

namespace gw {

// One parameter t^omega in [0, 1] per anti-diagonal omega = 0..2 lambda_max.
struct InterpolationVector {
  explicit InterpolationVector(const Cutoff& cutoff, double value = 1.0);
  Cutoff cutoff;
  std::vector<double> t;
  Eigen::MatrixXd propagator() const;  // C(t) = sum t^omega C^omega
  Eigen::VectorXd tadpole() const;     // T(t) = sum t^omega T^omega
  int slices() const { return static_cast<int>(t.size()); }
};

Eigen::MatrixXd marked_propagator(int omega, const Cutoff& cutoff);

// V(sigma, t) with C(t), the counterterm T(t) and (lambda/2) sum_m T(t)_m^2.
cplx interpolated_vertex(const Eigen::MatrixXcd& sigma, const InterpolationVector& t, const Coupling& coupling);

struct DerivativeEstimate {
  cplx value;
  double std_error;
  double step;
  long samples;
};

// Central difference in t^omega (and t^omega2 for the mixed version) of the
// sigma average of exp V(sigma, t), differenced per sample.
DerivativeEstimate dZ_dt_numeric(int omega, const Coupling& coupling, const Cutoff& cutoff,
                                 const SamplerSpec& sampler, const InterpolationVector* base = nullptr,
                                 double step = 1e-3);
DerivativeEstimate d2Z_dt2_numeric(int omega1, int omega2, const Coupling& coupling, const Cutoff& cutoff,
                                   const SamplerSpec& sampler, const InterpolationVector* base = nullptr,
                                   double step = 1e-3);
// d/ds Z(s t)|_{s=1}.
DerivativeEstimate dZ_ds_numeric(const Coupling& coupling, const Cutoff& cutoff, const SamplerSpec& sampler,
                                 double step = 1e-3);

struct Order1Value {
  cplx planar_renormalized;
  cplx non_planar;
  cplx total;
  std::map<std::string, cplx> graphs;  // A-E
};

Order1Value order1_amplitude(int omega, const Eigen::MatrixXcd& sigma, const InterpolationVector& t,
                             const Coupling& coupling);

struct Order2Value {
  std::map<std::string, cplx> groups;
  cplx total;
};

Order2Value order2_amplitude(int omega1, int omega2, const Eigen::MatrixXcd& sigma, const InterpolationVector& t,
                             const Coupling& coupling);

struct CancellationEntry {
  std::vector<int> omegas;
  cplx renormalized{};   // < e^V A^R >
  // < e^V dV > (order 1) or < e^V (d1V d2V + d12V) > (order 2), with the
  // explicit T(t), T^omega counterterm pieces of V.
  cplx unrenormalized{};
  cplx numeric{};        // finite-difference derivative of Z
  cplx diff_numeric{};   // paired mean of e^V A^R - finite difference
  double diff_numeric_se = 0.0;
  cplx diff_unrenormalized{};  // paired mean of e^V A^R - unrenormalized form
  double diff_unrenormalized_se = 0.0;
  // Max relative |A^R - A^T| over fixed draws, A^T the integrated form with
  // tadpole operators kept.
  double pointwise_deviation = 0.0;
  bool passed = false;
};

struct CancellationReport {
  int order;
  int cutoff;
  cplx coupling;
  bool symbolic;  // cutoff 0: exact series identities
  int series_order;
  long samples;
  std::vector<CancellationEntry> entries;
  double max_symmetry_deviation;  // order 2: |A(w1,w2) - A(w2,w1)| relative, per sample
  bool passed;
};

// Compares the renormalized amplitudes with the tadpole-carrying form and
// with derivatives of Z. Cutoff 0 is checked exactly as series in c.
// Throws InvariantViolation when a deterministic identity fails.
CancellationReport counterterm_cancellation_check(int order, const Cutoff& cutoff, const Coupling& coupling,
                                                  const SamplerSpec& sampler, int series_order = 8);

struct SymbolicIdentityReport {
  int order;
  int series_order;
  bool derivative_identity;  // <e^V A^R> = c^k d^k Z/dc^k
  bool pointwise_identity;   // A^R = A with tadpoles, as series in (c, s)
};
SymbolicIdentityReport single_site_identity(int order, int series_order);

struct StoppingSchedule {
  double a;
  int M;
  std::vector<int> scales;  // j_max down to 0
  std::vector<long> quotas;
};

StoppingSchedule stopping_rule_schedule(const ScalePartition& partition, double a);
// 4^{N+1} N!
BigInt resolvent_graph_count_bound(int N);

struct TermCounts {
  int order1;
  int order1_sided;
  int order2;
};
TermCounts enumerated_term_counts();

}  // namespace gw
