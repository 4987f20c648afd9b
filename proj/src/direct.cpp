#include "gw/direct.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "gw/errors.hpp"
#include "gw/quadrature.hpp"

namespace gw {

namespace {

cplx i_unit(0.0, 1.0);

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

// Integrand e^{-S_int} at Λ=0 and Λ=1 written out by hand for speed.
double quadrature_lambda0(double lambda, int nodes) {
  GaussRule g = gauss_hermite_normal(nodes);
  double acc = 0.0;
  for (int i = 0; i < nodes; ++i) {
    double x = g.nodes[i];
    double x2 = x * x;
    acc += g.weights[i] * std::exp(-lambda / 4.0 * (x2 * x2 - 4.0 * x2 + 2.0));
  }
  return acc;
}

double quadrature_lambda1(double lambda, int nodes) {
  GaussRule g = gauss_hermite_normal(nodes);
  const double t0 = 1.0 + 0.5, t1 = 0.5 + 1.0 / 3.0;
  const double pi = t0 * t0 + t1 * t1;
  const double s0 = 1.0, s1 = std::sqrt(1.0 / 3.0), so = std::sqrt(0.25);
  double acc = 0.0;
  for (int i = 0; i < nodes; ++i) {
    double x0 = s0 * g.nodes[i];
    for (int j = 0; j < nodes; ++j) {
      double x1 = s1 * g.nodes[j];
      double wij = g.weights[i] * g.weights[j];
      for (int k = 0; k < nodes; ++k) {
        double a = so * g.nodes[k];
        double wijk = wij * g.weights[k];
        for (int l = 0; l < nodes; ++l) {
          double b = so * g.nodes[l];
          double r = a * a + b * b;
          double d0 = x0 * x0 + r, d1 = x1 * x1 + r, s = x0 + x1;
          double tr4 = d0 * d0 + d1 * d1 + 2.0 * s * s * r;
          double tr2t = t0 * d0 + t1 * d1;
          acc += wijk * g.weights[l] * std::exp(-lambda / 4.0 * (tr4 - 4.0 * tr2t + 2.0 * pi));
        }
      }
    }
  }
  return acc;
}

Eigen::MatrixXcd plain_operator(const Eigen::MatrixXcd& sigma, const Eigen::VectorXd& cdiag, cplx c) {
  Eigen::MatrixXcd op = hat_operator(sigma);
  op = (i_unit * c) * (cdiag.cast<cplx>().asDiagonal() * op);
  op.diagonal().array() += 1.0;
  return op;
}

}  // namespace

Eigen::MatrixXcd hat_operator(const Eigen::MatrixXcd& sigma) {
  int n = static_cast<int>(sigma.rows());
  int d = n * n;
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(d, d);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) {
      int col = p * n + q;
      for (int a = 0; a < n; ++a) h(a * n + q, col) += sigma(a, p);
      for (int b = 0; b < n; ++b) h(p * n + b, col) += sigma(q, b);
    }
  return h;
}

Eigen::MatrixXd hook_operator(int n, int a, int b) {
  int d = n * n;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(d, d);
  for (int q = 0; q < n; ++q) h(a * n + q, b * n + q) += 1.0;
  for (int p = 0; p < n; ++p) h(p * n + b, p * n + a) += 1.0;
  return h;
}

Eigen::VectorXd propagator_diagonal(const Eigen::MatrixXd& c) {
  int n = static_cast<int>(c.rows());
  Eigen::VectorXd v(n * n);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) v(p * n + q) = c(p, q);
  return v;
}

ZEstimate z_direct_quadrature(double lambda, const Cutoff& cutoff, int nodes) {
  if (!(lambda >= 0.0)) throw DomainError("direct quadrature needs a real non-negative coupling");
  if (cutoff.lambda_max >= 2) throw UnsupportedDimension("direct quadrature supports cutoff 0 or 1 only");
  ZEstimate z;
  z.method = "quadrature";
  double v, v2;
  if (cutoff.lambda_max == 0) {
    if (nodes == 0) nodes = 160;
    v = quadrature_lambda0(lambda, nodes);
    v2 = quadrature_lambda0(lambda, nodes + 40);
    z.samples = nodes;
  } else {
    if (nodes == 0) nodes = 48;
    v = quadrature_lambda1(lambda, nodes);
    v2 = quadrature_lambda1(lambda, nodes - 12);
    z.samples = static_cast<long>(nodes) * nodes * nodes * nodes;
  }
  z.value = v;
  z.quadrature_error = std::abs(v - v2);
  return z;
}

LoopVertexParts loop_vertex_parts(const Eigen::MatrixXcd& sigma, const Coupling& coupling,
                                  const Cutoff& cutoff) {
  coupling.require_off_cut();
  if (sigma.rows() != cutoff.dim()) throw ArgumentError("sigma dimension does not match cutoff");
  ModelData md(cutoff);
  cplx c = coupling.field_coefficient();
  Eigen::VectorXd sq = propagator_diagonal(md.C).cwiseSqrt();
  Eigen::MatrixXcd h = sq.cast<cplx>().asDiagonal() * hat_operator(sigma) * sq.cast<cplx>().asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  LoopVertexParts r{};
  double musum = 0.0;
  for (int k = 0; k < es.eigenvalues().size(); ++k) {
    double mu = es.eigenvalues()(k);
    cplx x = i_unit * c * mu;
    cplx l = std::log(1.0 + x);
    r.trace_log += l;
    r.trace_log2 += l - x;
    musum += mu;
  }
  double tsig = 0.0;
  for (int m = 0; m < md.n; ++m) tsig += md.T(m) * sigma(m, m).real();
  r.linear = i_unit * c * musum;
  r.counterterm = i_unit * c * tsig;
  r.constant = coupling.value() / 2.0 * md.Pi;
  r.value = -0.5 * r.trace_log2 + r.counterterm + r.constant;
  double scale = std::max({1.0, std::abs(musum), std::abs(2.0 * tsig)});
  r.decomposition_error = std::abs(musum - 2.0 * tsig) / scale;
  if (!finite(r.value)) throw NumericalFailure("non-finite loop vertex");
  return r;
}

cplx loop_vertex_value(const Eigen::MatrixXcd& sigma, const Coupling& coupling, const Cutoff& cutoff) {
  return loop_vertex_parts(sigma, coupling, cutoff).value;
}

ZEstimate z_intermediate_field(const Coupling& coupling, const Cutoff& cutoff, const SamplerSpec& sampler) {
  coupling.require_off_cut();
  ModelData md(cutoff);
  cplx c = coupling.field_coefficient();
  Eigen::VectorXd sq = propagator_diagonal(md.C).cwiseSqrt();
  cplx constant = coupling.value() / 2.0 * md.Pi;
  auto f = [&](const Eigen::MatrixXcd& s, cplx* out) {
    Eigen::MatrixXcd h = sq.cast<cplx>().asDiagonal() * hat_operator(s) * sq.cast<cplx>().asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
    cplx tl2 = 0.0;
    for (int k = 0; k < es.eigenvalues().size(); ++k) {
      cplx x = i_unit * c * es.eigenvalues()(k);
      tl2 += std::log(1.0 + x) - x;
    }
    double tsig = 0.0;
    for (int m = 0; m < md.n; ++m) tsig += md.T(m) * s(m, m).real();
    out[0] = std::exp(-0.5 * tl2 + i_unit * c * tsig + constant);
  };
  MultiEstimate e = mc_estimate(sampler, md.n, 1, f);
  ZEstimate z;
  z.value = e.mean[0];
  z.std_error = e.std_error[0];
  z.method = "monte-carlo";
  z.samples = e.samples;
  z.seed = e.seed;
  return z;
}

ZEstimate z_intermediate_quadrature(const Coupling& coupling, const Cutoff& cutoff, int nodes) {
  coupling.require_off_cut();
  if (cutoff.lambda_max >= 2) throw UnsupportedDimension("sigma quadrature supports cutoff 0 or 1 only");
  if (nodes == 0) nodes = cutoff.lambda_max == 0 ? 120 : 24;
  auto f = [&](const Eigen::MatrixXcd& s, cplx* out) { out[0] = std::exp(loop_vertex_value(s, coupling, cutoff)); };
  ZEstimate z;
  z.method = "quadrature";
  z.value = gh_sigma_expectation(nodes, cutoff.dim(), 1, f)[0];
  z.quadrature_error = std::abs(z.value - gh_sigma_expectation(nodes - 8, cutoff.dim(), 1, f)[0]);
  z.samples = cutoff.lambda_max == 0 ? nodes : static_cast<long>(nodes) * nodes * nodes * nodes;
  return z;
}

Eigen::MatrixXcd build_resolvent(const Eigen::MatrixXcd& sigma, const Coupling& coupling,
                                 const Cutoff& cutoff, ResolventKind kind) {
  coupling.require_off_cut();
  if (sigma.rows() != cutoff.dim()) throw ArgumentError("sigma dimension does not match cutoff");
  ModelData md(cutoff);
  cplx c = coupling.field_coefficient();
  Eigen::VectorXd cd = propagator_diagonal(md.C);
  Eigen::MatrixXcd op;
  if (kind == ResolventKind::plain) {
    op = plain_operator(sigma, cd, c);
  } else {
    Eigen::VectorXd sq = cd.cwiseSqrt();
    op = (i_unit * c) * (sq.cast<cplx>().asDiagonal() * hat_operator(sigma) * sq.cast<cplx>().asDiagonal());
    op.diagonal().array() += 1.0;
  }
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(op);
  Eigen::MatrixXcd r = lu.inverse();
  if (!r.allFinite()) throw NumericalFailure("resolvent inversion failed");
  return r;
}

ResolventNormReport resolvent_norm_check(const SamplerSpec& sampler, const std::vector<Coupling>& grid,
                                         const Cutoff& cutoff) {
  for (const auto& g : grid) g.require_off_cut();
  ModelData md(cutoff);
  Eigen::VectorXd sq = propagator_diagonal(md.C).cwiseSqrt();
  std::vector<cplx> cs;
  std::vector<double> cosines;
  for (const auto& g : grid) {
    cs.push_back(g.field_coefficient());
    cosines.push_back(std::cos(g.phase() / 2.0));
  }
  int ng = static_cast<int>(grid.size());
  // Observables per coupling: ratio and margin, packed as real parts.
  auto f = [&](const Eigen::MatrixXcd& s, cplx* out) {
    Eigen::MatrixXcd h = sq.cast<cplx>().asDiagonal() * hat_operator(s) * sq.cast<cplx>().asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
    for (int g = 0; g < ng; ++g) {
      double theta = std::arg(cs[g]);
      double mod = std::abs(cs[g]);
      double min_abs = INFINITY;
      double min_margin = INFINITY;
      for (int k = 0; k < es.eigenvalues().size(); ++k) {
        double mu = es.eigenvalues()(k);
        double a = std::abs(1.0 + cplx(0.0, 1.0) * cs[g] * mu);
        min_abs = std::min(min_abs, a);
        // 1 - (cos/|1+icmu|)^2 = (|c| mu - sin)^2 / |1+icmu|^2
        double dlt = mod * mu - std::sin(theta);
        min_margin = std::min(min_margin, dlt * dlt / (a * a));
      }
      out[2 * g] = cosines[g] / min_abs;
      out[2 * g + 1] = min_margin;
    }
  };
  // Run the sampler through the common engine but track extrema, not means.
  ResolventNormReport rep;
  rep.couplings = ng;
  std::mt19937_64 rng(splitmix64(sampler.seed));
  std::vector<cplx> out(2 * ng);
  for (long i = 0; i < sampler.samples; ++i) {
    Eigen::MatrixXcd s = sample_unit_hermitian(rng, md.n);
    if (sampler.mirrored) s = -s;
    f(s, out.data());
    for (int g = 0; g < ng; ++g) {
      double ratio = out[2 * g].real();
      double margin = out[2 * g + 1].real();
      rep.max_ratio = std::max(rep.max_ratio, ratio);
      rep.min_margin = std::min(rep.min_margin, margin);
      if (!(margin > 0.0) || !(ratio <= 1.0)) ++rep.violations;
    }
  }
  rep.samples = sampler.samples;
  return rep;
}

double resolvent_derivative_check(const Eigen::MatrixXcd& sigma, const Coupling& coupling,
                                  const Cutoff& cutoff, int alpha, int beta, double h, ResolventKind kind) {
  if (h < 1e-7 || h > 1e-3) throw DomainError("finite-difference step outside [1e-7, 1e-3]");
  cutoff.check_index(alpha);
  cutoff.check_index(beta);
  int n = cutoff.dim();
  Eigen::MatrixXcd sp = sigma, sm = sigma;
  sp(alpha, beta) += h;
  sm(alpha, beta) -= h;
  Eigen::MatrixXcd fd = (build_resolvent(sp, coupling, cutoff, kind) - build_resolvent(sm, coupling, cutoff, kind)) / (2.0 * h);
  Eigen::MatrixXcd r = build_resolvent(sigma, coupling, cutoff, kind);
  ModelData md(cutoff);
  Eigen::VectorXd cd = propagator_diagonal(md.C);
  Eigen::MatrixXcd e = hook_operator(n, alpha, beta).cast<cplx>();
  cplx c = coupling.field_coefficient();
  Eigen::MatrixXcd an;
  if (kind == ResolventKind::plain) {
    an = -i_unit * c * r * cd.cast<cplx>().asDiagonal() * e * r;
  } else {
    Eigen::VectorXd sq = cd.cwiseSqrt();
    an = -i_unit * c * r * sq.cast<cplx>().asDiagonal() * e * sq.cast<cplx>().asDiagonal() * r;
  }
  double scale = an.cwiseAbs().maxCoeff();
  double dev = (fd - an).cwiseAbs().maxCoeff();
  if (scale == 0.0) return dev == 0.0 ? 0.0 : INFINITY;
  return dev / scale;
}

NelsonReport nelson_bound_check(double lambda, const Cutoff& cutoff) {
  if (lambda < 0.0) throw DomainError("Nelson bound needs a non-negative real coupling");
  NelsonReport r{lambda, cutoff.lambda_max, 0.0, 1.0, false};
  r.z = z_direct_quadrature(lambda, cutoff).value.real();
  r.bound = lambda == 0.0 ? 1.0 : nelson_bound_rhs(lambda, cutoff);
  r.holds = r.z <= r.bound * (1.0 + 1e-12);
  return r;
}

RepresentationReport verify_representation(double lambda, const Cutoff& cutoff, const SamplerSpec& sampler) {
  RepresentationReport r;
  r.lambda = lambda;
  r.cutoff = cutoff.lambda_max;
  r.direct = z_direct_quadrature(lambda, cutoff);
  r.intermediate = z_intermediate_field(Coupling(lambda), cutoff, sampler);
  r.abs_difference = std::abs(r.direct.value - r.intermediate.value);
  r.combined_std_error = std::hypot(r.direct.std_error, r.intermediate.std_error);
  double tol = 3.0 * r.combined_std_error + r.direct.quadrature_error + 1e-12;
  r.intermediate_quadrature = z_intermediate_quadrature(Coupling(lambda), cutoff);
  r.quadrature_difference = std::abs(r.direct.value - r.intermediate_quadrature.value);
  r.passed = r.abs_difference <= tol && r.quadrature_difference < 1e-6;
  return r;
}

}  // namespace gw
