#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gw/model.hpp"
#include "gw/rational.hpp"

namespace gw {

// Slices I_j = [M^j, M^{j+1}-1] of the index range [0, max_index]; I_0 also
// holds the residual index 0 and the last slice is cut at max_index.
struct ScalePartition {
  ScalePartition(int M, int max_index);
  int M;
  int max_index;
  int j_max;
  std::vector<std::pair<int, int>> slices;
  bool truncated(int j) const;
};

int slice_of(int omega, const ScalePartition& partition);

struct SlicedPropagator {
  int omega;
  int j;
  int cutoff;
  Rational value;  // every non-zero entry equals 1/(omega+1)
  std::vector<std::pair<int, int>> support;
  Eigen::MatrixXd dense() const;
};

SlicedPropagator sliced_propagator(int omega, const Cutoff& cutoff, int M = 2);

// T^omega_m = sum_n C_mn [m+n = omega] over the full anti-diagonal.
Rational sliced_tadpole(int omega, int m, const Cutoff& cutoff);
// T^j_m = sum over omega in I_j of T^omega_m.
Rational coarse_tadpole(int j, int m, const ScalePartition& omega_partition, const Cutoff& cutoff);
// Pi^j = sum_{m in I_j} (sum_{p in I_{<=j}} 1/(p+m+1))^2 over matrix indices.
long double sliced_vacuum_tadpole(int j, const ScalePartition& index_partition);

struct SliceBoundRow {
  int j;
  double c_low;
  double c_high;
  int size;
  bool truncated;
};

struct SliceBoundsReport {
  int M;
  std::vector<SliceBoundRow> rows;
  double residual_entry;  // C^0 = 1, kept apart from the M^j scaling
  bool passed;
};

// Realized constants of O(1) M^{-j-1} <= |C^omega| <= O(1) M^{-j} over the
// omega slices of `partition` (residual omega = 0 reported separately).
SliceBoundsReport slice_bounds_report(const ScalePartition& partition);

struct TadpoleBoundRow {
  int j;
  double max_coarse_tadpole;  // sup_m T^j_m
  double vacuum;              // Pi^j
  double vacuum_constant;     // Pi^j / M^j
};

std::vector<TadpoleBoundRow> tadpole_bounds(int M, int j_max);

struct QKernel {
  int omega;
  int cutoff;
  double rho;
  // Quadratic form rho Tr(C^{<=omega} s-hat C^omega s-hat) in orthonormal
  // Hermitian coordinates: a dense block on the diagonal entries plus scalar
  // eigenvalues (each twice) for the off-diagonal pairs.
  Eigen::MatrixXd diagonal_block;
  std::vector<double> offdiagonal_eigenvalues;
};

QKernel q_kernel(int omega, const Cutoff& cutoff, double rho);
// Full dense form on all (Λ+1)^2 real coordinates, built from the operator
// expression directly. Only for small cutoffs.
Eigen::MatrixXd q_kernel_dense(int omega, const Cutoff& cutoff, double rho);

struct QKernelReport {
  int omega;
  int j;
  int M;
  double rho;
  double norm;
  double trace;
  double min_eigenvalue;
  double norm_constant;   // norm M^j / rho
  double trace_constant;  // |trace| / rho
  bool passed;
};

QKernelReport q_kernel_bounds_check(int omega, const Cutoff& cutoff, double rho, int M = 2);

}  // namespace gw
