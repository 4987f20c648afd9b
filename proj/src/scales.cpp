#include "gw/scales.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "gw/direct.hpp"
#include "gw/errors.hpp"

namespace gw {

ScalePartition::ScalePartition(int m, int mi) : M(m), max_index(mi), j_max(0) {
  if (M < 2) throw DomainError("scale base must be at least 2");
  if (max_index < 0) throw DomainError("index range must be non-negative");
  long lo = 1;
  int j = 0;
  slices.emplace_back(0, std::min<long>(M - 1, max_index));
  while (lo * M <= max_index) {
    lo *= M;
    ++j;
    slices.emplace_back(static_cast<int>(lo), static_cast<int>(std::min<long>(lo * M - 1, max_index)));
  }
  j_max = j;
}

bool ScalePartition::truncated(int j) const {
  long full = 1;
  for (int k = 0; k <= j; ++k) full *= M;
  return slices.at(j).second < full - 1;
}

int slice_of(int omega, const ScalePartition& p) {
  if (omega < 0 || omega > p.max_index) throw RangeError("scale index outside the partition");
  for (int j = 0; j <= p.j_max; ++j)
    if (omega >= p.slices[j].first && omega <= p.slices[j].second) return j;
  throw RangeError("scale index not covered");
}

Eigen::MatrixXd SlicedPropagator::dense() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(cutoff + 1, cutoff + 1);
  for (auto& [a, b] : support) m(a, b) = to_double(value);
  return m;
}

SlicedPropagator sliced_propagator(int omega, const Cutoff& cutoff, int M) {
  if (omega < 0 || omega > 2 * cutoff.lambda_max) throw RangeError("scale index outside 0..2Λ");
  SlicedPropagator s;
  s.omega = omega;
  s.cutoff = cutoff.lambda_max;
  s.j = slice_of(omega, ScalePartition(M, 2 * cutoff.lambda_max));
  s.value = Rational(1, omega + 1);
  for (int m = std::max(0, omega - cutoff.lambda_max); m <= std::min(omega, cutoff.lambda_max); ++m)
    s.support.emplace_back(m, omega - m);
  return s;
}

Rational sliced_tadpole(int omega, int m, const Cutoff& cutoff) {
  cutoff.check_index(m);
  if (omega < 0 || omega > 2 * cutoff.lambda_max) throw RangeError("scale index outside 0..2Λ");
  if (omega >= m && omega - m <= cutoff.lambda_max) return Rational(1, omega + 1);
  return Rational(0);
}

Rational coarse_tadpole(int j, int m, const ScalePartition& p, const Cutoff& cutoff) {
  Rational s = 0;
  for (int w = p.slices.at(j).first; w <= p.slices.at(j).second; ++w)
    if (w <= 2 * cutoff.lambda_max) s += sliced_tadpole(w, m, cutoff);
  return s;
}

long double sliced_vacuum_tadpole(int j, const ScalePartition& p) {
  const auto& sl = p.slices.at(j);
  int top = sl.second;  // I_{<=j} = [0, top]
  // Harmonic numbers give the inner sum in O(1).
  std::vector<long double> h(2 * top + 3, 0.0L);
  for (size_t k = 1; k < h.size(); ++k) h[k] = h[k - 1] + 1.0L / k;
  long double s = 0;
  for (int m = sl.first; m <= sl.second; ++m) {
    long double inner = h[top + m + 1] - h[m];
    s += inner * inner;
  }
  return s;
}

SliceBoundsReport slice_bounds_report(const ScalePartition& p) {
  SliceBoundsReport r;
  r.M = p.M;
  r.residual_entry = 1.0;
  r.passed = true;
  double mj = 1.0;
  for (int j = 0; j <= p.j_max; ++j, mj *= p.M) {
    int lo = std::max(1, p.slices[j].first);
    int hi = p.slices[j].second;
    if (hi < lo) continue;
    SliceBoundRow row;
    row.j = j;
    row.size = hi - lo + 1;
    row.truncated = p.truncated(j);
    row.c_high = mj / (lo + 1.0);
    row.c_low = mj * p.M / (hi + 1.0);
    bool ok = row.c_low >= 0.5 && row.c_low <= 2.0 && row.c_high >= 0.5 && row.c_high <= 2.0;
    if (!row.truncated) r.passed = r.passed && ok;
    r.rows.push_back(row);
  }
  return r;
}

std::vector<TadpoleBoundRow> tadpole_bounds(int M, int j_max) {
  long top = 1;
  for (int k = 0; k <= j_max; ++k) top *= M;
  ScalePartition idx(M, static_cast<int>(top - 1));
  std::vector<TadpoleBoundRow> rows;
  double mj = 1.0;
  for (int j = 0; j <= j_max; ++j, mj *= M) {
    TadpoleBoundRow r;
    r.j = j;
    // sup_m T^j_m: the slice sum of 1/(omega+1) is largest when the whole
    // slice lies on the anti-diagonal range of m, which holds for m = 0.
    long double t = 0;
    for (int w = idx.slices[j].first; w <= idx.slices[j].second; ++w) t += 1.0L / (w + 1);
    r.max_coarse_tadpole = static_cast<double>(t);
    r.vacuum = static_cast<double>(sliced_vacuum_tadpole(j, idx));
    r.vacuum_constant = r.vacuum / mj;
    rows.push_back(r);
  }
  return rows;
}

namespace {

// S_pa = sum_q A_pq B_aq with A = C^{<=omega}, B = C^omega.
double s_entry(int p, int a, int omega, int lm) {
  int q = omega - a;
  if (q < 0 || q > lm) return 0.0;
  if (p + q > omega) return 0.0;
  return 1.0 / ((p + q + 1.0) * (omega + 1.0));
}

}  // namespace

QKernel q_kernel(int omega, const Cutoff& cutoff, double rho) {
  if (!(rho > 0.0 && rho < 1.0)) throw DomainError("rho must lie in (0,1)");
  if (omega < 0 || omega > 2 * cutoff.lambda_max) throw RangeError("scale index outside 0..2Λ");
  int n = cutoff.dim(), lm = cutoff.lambda_max;
  QKernel k;
  k.omega = omega;
  k.cutoff = lm;
  k.rho = rho;
  k.diagonal_block = Eigen::MatrixXd::Zero(n, n);
  double w = 1.0 / ((omega + 1.0) * (omega + 1.0));
  for (int p = 0; p < n; ++p) {
    k.diagonal_block(p, p) += 2.0 * rho * s_entry(p, p, omega, lm);
    int q = omega - p;
    if (q >= 0 && q <= lm) k.diagonal_block(p, q) += 2.0 * rho * w;
  }
  for (int p = 0; p < n; ++p)
    for (int a = p + 1; a < n; ++a) {
      double v = rho * (s_entry(p, a, omega, lm) + s_entry(a, p, omega, lm));
      k.offdiagonal_eigenvalues.push_back(v);
    }
  return k;
}

Eigen::MatrixXd q_kernel_dense(int omega, const Cutoff& cutoff, double rho) {
  int n = cutoff.dim();
  if (n > 6) throw ComplexityGuard("dense Q kernel limited to cutoff 5");
  Eigen::MatrixXd cle = Eigen::MatrixXd::Zero(n, n), cw = Eigen::MatrixXd::Zero(n, n);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) {
      if (p + q <= omega) cle(p, q) = 1.0 / (p + q + 1);
      if (p + q == omega) cw(p, q) = 1.0 / (p + q + 1);
    }
  Eigen::VectorXd a = propagator_diagonal(cle), b = propagator_diagonal(cw);
  // Orthonormal basis of Hermitian matrices under Tr(XY).
  std::vector<Eigen::MatrixXcd> basis;
  const double r2 = std::sqrt(0.5);
  for (int p = 0; p < n; ++p) {
    Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(n, n);
    e(p, p) = 1.0;
    basis.push_back(e);
  }
  for (int p = 0; p < n; ++p)
    for (int q = p + 1; q < n; ++q) {
      Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(n, n);
      e(p, q) = e(q, p) = r2;
      basis.push_back(e);
      e(p, q) = cplx(0.0, r2);
      e(q, p) = cplx(0.0, -r2);
      basis.push_back(e);
    }
  size_t dim = basis.size();
  std::vector<Eigen::MatrixXcd> hats;
  for (auto& e : basis) hats.push_back(hat_operator(e));
  Eigen::MatrixXd Q(dim, dim);
  for (size_t i = 0; i < dim; ++i)
    for (size_t j = 0; j < dim; ++j) {
      cplx v = (a.cast<cplx>().asDiagonal() * hats[i] * b.cast<cplx>().asDiagonal() * hats[j]).trace();
      Q(i, j) = rho * v.real();
    }
  return 0.5 * (Q + Q.transpose());
}

QKernelReport q_kernel_bounds_check(int omega, const Cutoff& cutoff, double rho, int M) {
  QKernel k = q_kernel(omega, cutoff, rho);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(k.diagonal_block, Eigen::EigenvaluesOnly);
  QKernelReport r;
  r.omega = omega;
  r.M = M;
  r.rho = rho;
  r.j = slice_of(omega, ScalePartition(M, std::max(omega, 1)));
  double mx = es.eigenvalues().maxCoeff(), mn = es.eigenvalues().minCoeff();
  double tr = k.diagonal_block.trace();
  for (double v : k.offdiagonal_eigenvalues) {
    mx = std::max(mx, v);
    mn = std::min(mn, v);
    tr += 2.0 * v;
  }
  r.norm = std::max(std::abs(mx), std::abs(mn));
  r.trace = tr;
  r.min_eigenvalue = mn;
  r.norm_constant = r.norm * std::pow(static_cast<double>(M), r.j) / rho;
  r.trace_constant = std::abs(tr) / rho;
  r.passed = r.min_eigenvalue >= -1e-12 && r.norm_constant < 10.0 && r.trace_constant < 10.0;
  return r;
}

}  // namespace gw
