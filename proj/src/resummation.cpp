#include "gw/resummation.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "gw/errors.hpp"

namespace gw {

namespace {

const double kPi = 3.14159265358979323846;

cplx horner(const std::vector<double>& cd, cplx x) {
  cplx r = 0.0;
  for (size_t k = cd.size(); k-- > 0;) r = r * x + cd[k];
  return r;
}

std::vector<double> to_doubles(const std::vector<Rational>& v) {
  std::vector<double> out;
  for (const auto& q : v) out.push_back(to_double(q));
  return out;
}

// Solves A x = y exactly; throws on a singular system.
std::vector<Rational> solve_exact(std::vector<std::vector<Rational>> A, std::vector<Rational> y) {
  const int n = static_cast<int>(y.size());
  for (int col = 0; col < n; ++col) {
    int piv = col;
    while (piv < n && A[piv][col] == 0) ++piv;
    if (piv == n) throw NumericalFailure("degenerate Pade system");
    std::swap(A[piv], A[col]);
    std::swap(y[piv], y[col]);
    for (int r = 0; r < n; ++r) {
      if (r == col || A[r][col] == 0) continue;
      Rational f = A[r][col] / A[col][col];
      for (int k = col; k < n; ++k) A[r][k] -= f * A[col][k];
      y[r] -= f * y[col];
    }
  }
  for (int i = 0; i < n; ++i) y[i] /= A[i][i];
  return y;
}

}  // namespace

CardioidDomain::CardioidDomain(double r) : rho(r) {
  if (!(rho > 0.0 && rho < 1.0)) throw DomainError("cardioid radius must lie in (0, 1)");
}

bool CardioidDomain::contains(const Coupling& lambda) const { return cardioid_contains(lambda, rho); }

std::vector<cplx> CardioidDomain::grid(const std::vector<double>& fractions, const std::vector<double>& phases) const {
  std::vector<cplx> out;
  for (double f : fractions) {
    if (!(f > 0.0 && f < 1.0)) throw DomainError("radial fractions must lie in (0, 1)");
    for (double phi : phases) {
      if (!(phi > -kPi && phi < kPi)) throw DomainError("phases must lie in (-pi, pi)");
      double c = std::cos(phi / 2.0);
      out.push_back(std::polar(f * rho * c * c, phi));
    }
  }
  return out;
}

bool cardioid_contains(const Coupling& lambda, double rho) {
  if (lambda.on_negative_axis()) return false;
  double c = std::cos(lambda.phase() / 2.0);
  return lambda.modulus() < rho * c * c;
}

BorelSeries::BorelSeries(std::vector<Rational> a) : source(std::move(a)) {
  Rational fact = 1;
  for (size_t n = 0; n < source.size(); ++n) {
    if (n > 0) fact *= static_cast<long>(n);
    borel_coefficients.push_back(source[n] / fact);
  }
}

BorelSeries::BorelSeries(const PowerSeries& s) : BorelSeries(s.with_constant()) {}

cplx PadeApproximant::operator()(cplx x) const {
  return horner(to_doubles(numerator), x) / horner(to_doubles(denominator), x);
}

PadeApproximant pade(const std::vector<Rational>& b, int L, int M) {
  if (L < 0 || M < 0) throw ArgumentError("Pade orders must be non-negative");
  if (static_cast<int>(b.size()) < L + M + 1) throw ArgumentError("not enough coefficients for the Pade order");
  auto coef = [&](int k) { return k < 0 ? Rational(0) : b[k]; };
  PadeApproximant p;
  p.L = L;
  p.M = M;
  p.denominator.assign(M + 1, Rational(0));
  p.denominator[0] = 1;
  if (M > 0) {
    // sum_{j=1..M} q_j b_{k-j} = -b_k for k = L+1..L+M
    std::vector<std::vector<Rational>> A(M, std::vector<Rational>(M));
    std::vector<Rational> y(M);
    for (int r = 0; r < M; ++r) {
      int k = L + 1 + r;
      for (int j = 1; j <= M; ++j) A[r][j - 1] = coef(k - j);
      y[r] = -coef(k);
    }
    auto q = solve_exact(A, y);
    for (int j = 1; j <= M; ++j) p.denominator[j] = q[j - 1];
  }
  p.numerator.assign(L + 1, Rational(0));
  for (int k = 0; k <= L; ++k)
    for (int j = 0; j <= std::min(k, M); ++j) p.numerator[k] += p.denominator[j] * coef(k - j);
  // Poles: roots of the denominator through its companion matrix.
  int deg = M;
  while (deg > 0 && p.denominator[deg] == 0) --deg;
  if (deg > 0) {
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(deg, deg);
    double lead = to_double(p.denominator[deg]);
    for (int i = 0; i < deg; ++i) comp(0, i) = -to_double(p.denominator[deg - 1 - i]) / lead;
    for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
    Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
    for (int i = 0; i < deg; ++i) p.poles.push_back(es.eigenvalues()(i));
  }
  return p;
}

std::pair<int, int> default_pade_order(int n) {
  if (n < 1) throw ArgumentError("need at least one coefficient");
  return {n / 2, (n + 1) / 2 - 1};
}

BorelPadeResult borel_pade_evaluate(const BorelSeries& series, cplx lambda, int L, int M) {
  PadeApproximant p = pade(series.borel_coefficients, L, M);
  BorelPadeResult r{};
  r.L = L;
  r.M = M;
  r.poles = p.poles;
  if (lambda == 0.0) {
    r.value = to_double(series.source.at(0));
    return r;
  }
  for (const cplx& x : p.poles) {
    cplx t = x / lambda;  // pole location along the ray parameter
    if (t.real() >= 0.0 && std::abs(t.imag()) <= 1e-10 * std::max(1.0, std::abs(t)))
      throw PoleObstruction("Pade pole on the Laplace integration ray", x.real(), x.imag());
  }
  const std::vector<double> num = to_doubles(p.numerator), den = to_doubles(p.denominator);
  auto B = [&](double t) {
    cplx x = lambda * t;
    return horner(num, x) / horner(den, x);
  };
  // Truncate where e^{-t} |B(lambda t)| drops below 1e-16 of its scale.
  double scale = std::abs(B(0.0));
  for (double t = 0.5; t <= 40.0; t += 0.5) scale = std::max(scale, std::exp(-t) * std::abs(B(t)));
  if (scale == 0.0) scale = 1.0;
  double T = 40.0;
  while (std::exp(-T) * std::abs(B(T)) > 1e-16 * scale && T < 2000.0) T *= 1.5;
  r.truncation = T;
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  double err_re = 0.0, err_im = 0.0;
  double re = GK::integrate([&](double t) { return std::exp(-t) * B(t).real(); }, 0.0, T, 15, 1e-14, &err_re);
  double im = GK::integrate([&](double t) { return std::exp(-t) * B(t).imag(); }, 0.0, T, 15, 1e-14, &err_im);
  r.value = cplx(re, im);
  r.quadrature_error = std::hypot(err_re * std::max(1.0, std::abs(re)), err_im * std::max(1.0, std::abs(im)));
  // |B(lambda t)| grows at most like t^{max(L-M,0)}; bound the tail by the
  // integrand at T times a polynomial-growth factor.
  r.tail_bound = std::exp(-T) * std::abs(B(T)) * (1.0 + std::max(L - M, 0));
  if (!std::isfinite(r.value.real()) || !std::isfinite(r.value.imag()))
    throw NumericalFailure("Borel-Pade integral is not finite");
  return r;
}

BorelPadeResult borel_pade_evaluate(const PowerSeries& series, cplx lambda) {
  auto [L, M] = default_pade_order(static_cast<int>(series.coefficients.size()));
  return borel_pade_evaluate(BorelSeries(series), lambda, L, M);
}

RemainderReport remainder_growth_diagnostic(const PowerSeries& series, const std::vector<cplx>& lambdas,
                                            const std::vector<int>& n_grid, const std::vector<cplx>& references) {
  if (references.size() != lambdas.size()) throw DependencyError("one reference value per coupling is required");
  const auto a = series.with_constant();
  for (int n : n_grid)
    if (n < 0 || n > static_cast<int>(a.size())) throw RangeError("remainder order exceeds available coefficients");
  RemainderReport rep;
  rep.passed = true;
  for (size_t i = 0; i < lambdas.size(); ++i) {
    const cplx lam = lambdas[i];
    std::vector<double> ratios;
    for (int n : n_grid) {
      cplx partial = 0.0, pw = 1.0;
      for (int k = 0; k < n; ++k) {
        partial += to_double(a[k]) * pw;
        pw *= lam;
      }
      RemainderRow row{lam, n, references[i] - partial, 0.0};
      if (lam != 0.0) {
        double denom = std::tgamma(n + 1.0) * std::pow(std::abs(lam), n);
        row.ratio = std::abs(row.remainder) / denom;
      }
      if (!std::isfinite(row.ratio)) rep.passed = false;
      ratios.push_back(row.ratio);
      rep.rows.push_back(row);
    }
    double sup = 0.0, step = 1.0;
    for (size_t k = 0; k < ratios.size(); ++k) {
      sup = std::max(sup, ratios[k]);
      if (k > 0 && ratios[k] > 0.0 && ratios[k - 1] > 0.0)
        step = std::max({step, ratios[k] / ratios[k - 1], ratios[k - 1] / ratios[k]});
    }
    // Least-squares slope of log ratio against n.
    double k_est = 0.0;
    std::vector<std::pair<double, double>> pts;
    for (size_t k = 0; k < ratios.size(); ++k)
      if (ratios[k] > 0.0) pts.emplace_back(n_grid[k], std::log(ratios[k]));
    if (pts.size() >= 2) {
      double mx = 0, my = 0;
      for (auto& [x, y] : pts) {
        mx += x;
        my += y;
      }
      mx /= pts.size();
      my /= pts.size();
      double sxy = 0, sxx = 0;
      for (auto& [x, y] : pts) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
      }
      k_est = sxx > 0 ? std::exp(sxy / sxx) : 0.0;
    }
    rep.sup_ratio.push_back(sup);
    rep.k_estimate.push_back(k_est);
    rep.max_step.push_back(step);
    if (!std::isfinite(sup) || step > 10.0) rep.passed = false;
  }
  return rep;
}

}  // namespace gw
