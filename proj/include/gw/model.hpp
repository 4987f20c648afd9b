#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "gw/rational.hpp"

namespace gw {

using cplx = std::complex<double>;

// Matrix dimension is lambda_max + 1, indices run 0..lambda_max.
struct Cutoff {
  explicit Cutoff(int lambda_max);
  int lambda_max;
  int dim() const { return lambda_max + 1; }
  void check_index(int m) const;
};

class Coupling {
 public:
  explicit Coupling(cplx value);
  Coupling(double value) : Coupling(cplx(value, 0.0)) {}
  static Coupling polar(double modulus, double phase);

  cplx value() const { return value_; }
  double modulus() const { return std::abs(value_); }
  // In (-pi, pi]; zero coupling has phase 0.
  double phase() const;
  bool on_negative_axis() const;
  // sqrt(2 lambda)/2 on the principal branch.
  cplx field_coefficient() const;
  void require_off_cut() const;

 private:
  cplx value_;
};

Rational covariance(int m, int n, const Cutoff& cutoff);
Rational laplacian_entry(int m, int n, int k, int l, const Cutoff& cutoff);
// Four-index covariance C_{mn,kl} = C_mn d_ml d_nk.
Rational covariance_entry(int m, int n, int k, int l, const Cutoff& cutoff);
// Checks sum_rs Delta_{mn,rs} C_{sr,kl} = d_ml d_nk for all indices; returns
// the number of index tuples where it fails.
long inverse_identity_failures(const Cutoff& cutoff);
Rational tadpole(int m, const Cutoff& cutoff);
Rational vacuum_tadpole(const Cutoff& cutoff);

// Floating versions for large cutoffs where exact rationals get unwieldy.
long double tadpole_float(int m, const Cutoff& cutoff);
long double vacuum_tadpole_float(const Cutoff& cutoff);

class CovarianceTable {
 public:
  explicit CovarianceTable(const Cutoff& cutoff);
  const Cutoff& cutoff() const { return cutoff_; }
  const Rational& at(int m, int n) const;
  Eigen::MatrixXd to_matrix() const;

 private:
  Cutoff cutoff_;
  std::vector<Rational> entries_;
};

class TadpoleTable {
 public:
  explicit TadpoleTable(const Cutoff& cutoff);
  const Cutoff& cutoff() const { return cutoff_; }
  const std::vector<Rational>& t_values() const { return t_; }
  const Rational& pi_value() const { return pi_; }
  Eigen::VectorXd t_vector() const;

 private:
  Cutoff cutoff_;
  std::vector<Rational> t_;
  Rational pi_;
};

// Floating snapshot of the model constants used by the numeric kernels.
struct ModelData {
  explicit ModelData(const Cutoff& cutoff);
  int n;
  Eigen::MatrixXd C;
  Eigen::VectorXd T;
  double Pi;
};

using HermitianMatrix = Eigen::MatrixXcd;

void require_hermitian(const HermitianMatrix& m, double tol = 1e-12);

cplx wick_interaction(const HermitianMatrix& phi, const Coupling& coupling, const Cutoff& cutoff);
double nelson_bound_rhs(double lambda, const Cutoff& cutoff);

}  // namespace gw
