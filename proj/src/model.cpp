#include "gw/model.hpp"

#include <cmath>
#include <numbers>

#include "gw/errors.hpp"

namespace gw {

Cutoff::Cutoff(int lm) : lambda_max(lm) {
  if (lm < 0) throw DomainError("cutoff must be non-negative");
}

void Cutoff::check_index(int m) const {
  if (m < 0 || m > lambda_max)
    throw RangeError("index " + std::to_string(m) + " outside 0.." + std::to_string(lambda_max));
}

Coupling::Coupling(cplx value) : value_(value) {
  if (!std::isfinite(value.real()) || !std::isfinite(value.imag()))
    throw DomainError("coupling must be finite");
}

Coupling Coupling::polar(double modulus, double phase) {
  return Coupling(std::polar(modulus, phase));
}

double Coupling::phase() const {
  if (value_ == cplx(0.0, 0.0)) return 0.0;
  double p = std::arg(value_);
  // std::arg returns -pi for (negative, -0.0); fold onto (-pi, pi].
  if (p <= -std::numbers::pi) p = std::numbers::pi;
  return p;
}

bool Coupling::on_negative_axis() const {
  return value_.imag() == 0.0 && value_.real() < 0.0;
}

cplx Coupling::field_coefficient() const { return std::sqrt(2.0 * value_) / 2.0; }

void Coupling::require_off_cut() const {
  if (on_negative_axis()) throw DomainError("coupling lies on the negative real axis");
}

Rational covariance(int m, int n, const Cutoff& cutoff) {
  cutoff.check_index(m);
  cutoff.check_index(n);
  return Rational(1, m + n + 1);
}

Rational laplacian_entry(int m, int n, int k, int l, const Cutoff& cutoff) {
  for (int i : {m, n, k, l}) cutoff.check_index(i);
  if (m == l && n == k) return Rational(m + n + 1);
  return Rational(0);
}

Rational covariance_entry(int m, int n, int k, int l, const Cutoff& cutoff) {
  for (int i : {m, n, k, l}) cutoff.check_index(i);
  if (m == l && n == k) return Rational(1, m + n + 1);
  return Rational(0);
}

long inverse_identity_failures(const Cutoff& cutoff) {
  const int d = cutoff.dim();
  long failures = 0;
  for (int m = 0; m < d; ++m)
    for (int n = 0; n < d; ++n)
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) {
          Rational s = 0;
          for (int r = 0; r < d; ++r)
            for (int q = 0; q < d; ++q) s += laplacian_entry(m, n, r, q, cutoff) * covariance_entry(q, r, k, l, cutoff);
          if (s != Rational(m == l && n == k ? 1 : 0)) ++failures;
        }
  return failures;
}

Rational tadpole(int m, const Cutoff& cutoff) {
  cutoff.check_index(m);
  Rational s = 0;
  for (int q = 0; q <= cutoff.lambda_max; ++q) s += Rational(1, q + m + 1);
  return s;
}

Rational vacuum_tadpole(const Cutoff& cutoff) {
  return TadpoleTable(cutoff).pi_value();
}

long double tadpole_float(int m, const Cutoff& cutoff) {
  cutoff.check_index(m);
  long double s = 0;
  for (int q = cutoff.lambda_max; q >= 0; --q) s += 1.0L / (q + m + 1);
  return s;
}

long double vacuum_tadpole_float(const Cutoff& cutoff) {
  long double s = 0;
  for (int m = cutoff.lambda_max; m >= 0; --m) {
    long double t = tadpole_float(m, cutoff);
    s += t * t;
  }
  return s;
}

CovarianceTable::CovarianceTable(const Cutoff& cutoff) : cutoff_(cutoff) {
  int d = cutoff.dim();
  entries_.reserve(static_cast<size_t>(d) * d);
  for (int m = 0; m < d; ++m)
    for (int n = 0; n < d; ++n) entries_.emplace_back(1, m + n + 1);
}

const Rational& CovarianceTable::at(int m, int n) const {
  cutoff_.check_index(m);
  cutoff_.check_index(n);
  return entries_[static_cast<size_t>(m) * cutoff_.dim() + n];
}

Eigen::MatrixXd CovarianceTable::to_matrix() const {
  int d = cutoff_.dim();
  Eigen::MatrixXd c(d, d);
  for (int m = 0; m < d; ++m)
    for (int n = 0; n < d; ++n) c(m, n) = 1.0 / (m + n + 1);
  return c;
}

TadpoleTable::TadpoleTable(const Cutoff& cutoff) : cutoff_(cutoff) {
  int d = cutoff.dim();
  // T_m = H_{m+Λ+1} - H_m, built incrementally from T_0.
  Rational t0 = 0;
  for (int q = 0; q < d; ++q) t0 += Rational(1, q + 1);
  t_.push_back(t0);
  for (int m = 1; m < d; ++m) t_.push_back(t_.back() - Rational(1, m) + Rational(1, m + d));
  pi_ = 0;
  for (const auto& t : t_) pi_ += t * t;
}

Eigen::VectorXd TadpoleTable::t_vector() const {
  Eigen::VectorXd v(t_.size());
  for (size_t i = 0; i < t_.size(); ++i) v(i) = to_double(t_[i]);
  return v;
}

ModelData::ModelData(const Cutoff& cutoff) : n(cutoff.dim()) {
  C = CovarianceTable(cutoff).to_matrix();
  T.resize(n);
  for (int m = 0; m < n; ++m) T(m) = static_cast<double>(tadpole_float(m, cutoff));
  Pi = static_cast<double>(vacuum_tadpole_float(cutoff));
}

void require_hermitian(const HermitianMatrix& m, double tol) {
  if (m.rows() != m.cols()) throw ArgumentError("matrix is not square");
  for (int i = 0; i < m.rows(); ++i) {
    if (std::abs(m(i, i).imag()) > tol) throw ArgumentError("diagonal entry is not real");
    for (int j = i + 1; j < m.cols(); ++j)
      if (std::abs(m(i, j) - std::conj(m(j, i))) > tol) throw ArgumentError("matrix is not Hermitian");
  }
}

cplx wick_interaction(const HermitianMatrix& phi, const Coupling& coupling, const Cutoff& cutoff) {
  if (phi.rows() != cutoff.dim() || phi.cols() != cutoff.dim())
    throw ArgumentError("field dimension does not match cutoff");
  ModelData md(cutoff);
  Eigen::MatrixXcd p2 = phi * phi;
  cplx tr4 = (p2 * p2).trace();
  cplx tr2t = 0;
  for (int m = 0; m < md.n; ++m) tr2t += p2(m, m) * md.T(m);
  cplx val = coupling.value() / 4.0 * (tr4 - 4.0 * tr2t + 2.0 * md.Pi);
  return val;
}

double nelson_bound_rhs(double lambda, const Cutoff& cutoff) {
  if (!(lambda > 0.0)) throw DomainError("Nelson bound needs a positive real coupling");
  return std::exp(lambda / 2.0 * to_double(vacuum_tadpole(cutoff)));
}

}  // namespace gw
