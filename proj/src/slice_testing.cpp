#include "gw/slice_testing.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "gw/direct.hpp"
#include "gw/errors.hpp"

namespace gw {

namespace {

const cplx I(0.0, 1.0);

// Vertex pieces at fixed (sigma, t), using the precomputed eigenproblem
// inputs: sq = entrywise sqrt of C(t), tv = T(t).
cplx vertex(const Eigen::MatrixXcd& hat, const Eigen::MatrixXd& prop, const Eigen::VectorXd& tv,
            const Eigen::MatrixXcd& sigma, cplx c) {
  Eigen::VectorXd sq = propagator_diagonal(prop).cwiseMax(0.0).cwiseSqrt();
  Eigen::MatrixXcd h = sq.cast<cplx>().asDiagonal() * hat * sq.cast<cplx>().asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  cplx tl2 = 0.0;
  for (int k = 0; k < es.eigenvalues().size(); ++k) {
    cplx x = I * c * es.eigenvalues()(k);
    tl2 += std::log(1.0 + x) - x;
  }
  double tsig = 0.0;
  for (int m = 0; m < tv.size(); ++m) tsig += tv(m) * sigma(m, m).real();
  cplx v = -0.5 * tl2 + I * c * tsig + c * c * tv.squaredNorm();
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw NumericalFailure("non-finite vertex");
  return v;
}

void check_omega(int omega, const Cutoff& cutoff) {
  if (omega < 0 || omega > 2 * cutoff.lambda_max) throw RangeError("slice index outside 0..2*cutoff");
}

Amplitude remap(const Amplitude& amp, const std::vector<int>& marks) {
  Amplitude r = amp;
  for (auto& t : r.terms)
    for (auto& tr : t.traces)
      for (auto& f : tr)
        if (f.kind != FactorKind::hook && f.kind != FactorKind::resolvent &&
            f.kind != FactorKind::resolvent_minus_one && f.mark >= 0)
          f.mark = marks.at(f.mark);
  return r;
}

// Everything needed per sample for one base point.
struct SampleData {
  Eigen::MatrixXcd hat;
  cplx v;
  cplx ev;
  GraphContext ctx;
};

std::vector<Eigen::MatrixXd> all_marked(const Cutoff& cutoff) {
  std::vector<Eigen::MatrixXd> m;
  for (int w = 0; w <= 2 * cutoff.lambda_max; ++w) m.push_back(marked_propagator(w, cutoff));
  return m;
}

cplx first_derivative_vertex(const SampleData& s, int omega, const Eigen::VectorXd& tv,
                             const Eigen::VectorXd& tw, const Eigen::MatrixXcd& sigma) {
  const cplx c = s.ctx.c;
  cplx tr = (s.ctx.Rm1 * s.ctx.prop[omega + 1] * s.hat).trace();
  double tsig = 0.0;
  for (int m = 0; m < tw.size(); ++m) tsig += tw(m) * sigma(m, m).real();
  return -0.5 * I * c * tr + I * c * tsig + 2.0 * c * c * tw.dot(tv);
}

cplx second_derivative_vertex(const SampleData& s, int w1, int w2, const Eigen::VectorXd& t1,
                              const Eigen::VectorXd& t2) {
  const cplx c = s.ctx.c;
  cplx tr = (s.ctx.R * s.ctx.prop[w2 + 1] * s.hat * s.ctx.R * s.ctx.prop[w1 + 1] * s.hat).trace();
  return -0.5 * c * c * tr + 2.0 * c * c * t1.dot(t2);
}

cplx exp_vertex_shifted(const Eigen::MatrixXcd& hat, const Eigen::MatrixXcd& sigma, const InterpolationVector& base,
                        const std::vector<std::pair<int, double>>& shifts, cplx c) {
  InterpolationVector t = base;
  for (auto [w, d] : shifts) t.t[w] += d;
  return std::exp(vertex(hat, t.propagator(), t.tadpole(), sigma, c));
}

double relative(cplx a, cplx b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

}  // namespace

InterpolationVector::InterpolationVector(const Cutoff& cutoff_, double value)
    : cutoff(cutoff_), t(2 * cutoff_.lambda_max + 1, value) {}

Eigen::MatrixXd marked_propagator(int omega, const Cutoff& cutoff) {
  check_omega(omega, cutoff);
  return sliced_propagator(omega, cutoff).dense();
}

Eigen::MatrixXd InterpolationVector::propagator() const {
  const int n = cutoff.dim();
  Eigen::MatrixXd m(n, n);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) m(p, q) = t[p + q] / (p + q + 1.0);
  return m;
}

Eigen::VectorXd InterpolationVector::tadpole() const { return propagator().rowwise().sum(); }

cplx interpolated_vertex(const Eigen::MatrixXcd& sigma, const InterpolationVector& t, const Coupling& coupling) {
  coupling.require_off_cut();
  if (sigma.rows() != t.cutoff.dim()) throw ArgumentError("sigma dimension does not match cutoff");
  for (double x : t.t)
    if (!(x >= 0.0)) throw DomainError("interpolation parameters must be non-negative");
  return vertex(hat_operator(sigma), t.propagator(), t.tadpole(), sigma, coupling.field_coefficient());
}

DerivativeEstimate d2Z_dt2_numeric(int w1, int w2, const Coupling& coupling, const Cutoff& cutoff,
                                   const SamplerSpec& sampler, const InterpolationVector* base, double h) {
  check_omega(w1, cutoff);
  check_omega(w2, cutoff);
  coupling.require_off_cut();
  InterpolationVector b = base ? *base : InterpolationVector(cutoff);
  if (b.t[w1] < h || b.t[w2] < h) throw DomainError("base point too close to t = 0 for a central difference");
  const cplx c = coupling.field_coefficient();
  auto f = [&](const Eigen::MatrixXcd& s, cplx* out) {
    Eigen::MatrixXcd hat = hat_operator(s);
    if (w1 == w2) {
      out[0] = (exp_vertex_shifted(hat, s, b, {{w1, h}}, c) - 2.0 * exp_vertex_shifted(hat, s, b, {}, c) +
                exp_vertex_shifted(hat, s, b, {{w1, -h}}, c)) /
               (h * h);
    } else {
      out[0] = (exp_vertex_shifted(hat, s, b, {{w1, h}, {w2, h}}, c) -
                exp_vertex_shifted(hat, s, b, {{w1, h}, {w2, -h}}, c) -
                exp_vertex_shifted(hat, s, b, {{w1, -h}, {w2, h}}, c) +
                exp_vertex_shifted(hat, s, b, {{w1, -h}, {w2, -h}}, c)) /
               (4.0 * h * h);
    }
  };
  MultiEstimate e = mc_estimate(sampler, cutoff.dim(), 1, f);
  return {e.mean[0], e.std_error[0], h, e.samples};
}

DerivativeEstimate dZ_dt_numeric(int omega, const Coupling& coupling, const Cutoff& cutoff,
                                 const SamplerSpec& sampler, const InterpolationVector* base, double h) {
  check_omega(omega, cutoff);
  coupling.require_off_cut();
  InterpolationVector b = base ? *base : InterpolationVector(cutoff);
  if (b.t[omega] < h) throw DomainError("base point too close to t = 0 for a central difference");
  const cplx c = coupling.field_coefficient();
  auto f = [&](const Eigen::MatrixXcd& s, cplx* out) {
    Eigen::MatrixXcd hat = hat_operator(s);
    out[0] = (exp_vertex_shifted(hat, s, b, {{omega, h}}, c) - exp_vertex_shifted(hat, s, b, {{omega, -h}}, c)) /
             (2.0 * h);
  };
  MultiEstimate e = mc_estimate(sampler, cutoff.dim(), 1, f);
  return {e.mean[0], e.std_error[0], h, e.samples};
}

DerivativeEstimate dZ_ds_numeric(const Coupling& coupling, const Cutoff& cutoff, const SamplerSpec& sampler,
                                 double h) {
  coupling.require_off_cut();
  const cplx c = coupling.field_coefficient();
  auto f = [&](const Eigen::MatrixXcd& s, cplx* out) {
    Eigen::MatrixXcd hat = hat_operator(s);
    InterpolationVector up(cutoff, 1.0 + h), down(cutoff, 1.0 - h);
    out[0] = (std::exp(vertex(hat, up.propagator(), up.tadpole(), s, c)) -
              std::exp(vertex(hat, down.propagator(), down.tadpole(), s, c))) /
             (2.0 * h);
  };
  MultiEstimate e = mc_estimate(sampler, cutoff.dim(), 1, f);
  return {e.mean[0], e.std_error[0], h, e.samples};
}

Order1Value order1_amplitude(int omega, const Eigen::MatrixXcd& sigma, const InterpolationVector& t,
                             const Coupling& coupling) {
  coupling.require_off_cut();
  check_omega(omega, t.cutoff);
  GraphContext ctx(sigma, t.propagator(), {marked_propagator(omega, t.cutoff)}, coupling.field_coefficient());
  Order1Value v{};
  for (const auto& term : order1_sided_terms(0).terms) {
    cplx x = evaluate(term, ctx);
    (term.group == "non_planar" ? v.non_planar : v.planar_renormalized) += x;
  }
  for (const auto& term : order1_terms(0).terms) v.graphs[term.group] += evaluate(term, ctx);
  v.total = v.planar_renormalized + v.non_planar;
  return v;
}

Order2Value order2_amplitude(int w1, int w2, const Eigen::MatrixXcd& sigma, const InterpolationVector& t,
                             const Coupling& coupling) {
  coupling.require_off_cut();
  check_omega(w1, t.cutoff);
  check_omega(w2, t.cutoff);
  GraphContext ctx(sigma, t.propagator(), {marked_propagator(w1, t.cutoff), marked_propagator(w2, t.cutoff)},
                   coupling.field_coefficient());
  static const Amplitude amp = order2_terms();
  Order2Value v{};
  for (const auto& term : amp.terms) {
    cplx x = evaluate(term, ctx);
    v.groups[term.group] += x;
    v.total += x;
  }
  return v;
}

SymbolicIdentityReport single_site_identity(int order, int K) {
  if (order != 1 && order != 2) throw RangeError("order must be 1 or 2");
  if (K < 2) throw RangeError("series order too small");
  // V = -1/2 (log(1+x) - x) + i c s + c^2 with x = 2 i c s.
  BiSeries V(K);
  GaussRational xp(1);
  for (int k = 1; k <= K; ++k) {
    xp = xp * GaussRational(0, 2);
    if (k >= 2) {
      Rational coeff = (k % 2 == 0 ? Rational(1, 2 * k) : Rational(-1, 2 * k));
      V.at(k, k) = V.at(k, k) + xp * GaussRational(coeff);
    }
  }
  V.at(1, 1) = V.at(1, 1) + GaussRational(0, 1);
  V.at(2, 0) = V.at(2, 0) + GaussRational(1);
  BiSeries E = V.exp();
  auto Z = E.gaussian_average();
  const Amplitude ren = order == 1 ? order1_terms(0) : order2_terms();
  const Amplitude raw = order == 1 ? order1_unrenormalized_terms(0) : order2_unrenormalized_terms();
  BiSeries ren_s = evaluate_single_site(ren, K);
  auto lhs = (E * ren_s).gaussian_average();
  SymbolicIdentityReport r{order, K, true, ren_s == evaluate_single_site(raw, K)};
  for (int k = 0; k <= K; ++k) {
    Rational falling = 1;
    for (int j = 0; j < order; ++j) falling *= (k - j);
    if (!(lhs[k] == Z[k] * GaussRational(falling))) r.derivative_identity = false;
  }
  return r;
}

CancellationReport counterterm_cancellation_check(int order, const Cutoff& cutoff, const Coupling& coupling,
                                                  const SamplerSpec& sampler, int series_order) {
  if (order != 1 && order != 2) throw RangeError("order must be 1 or 2");
  coupling.require_off_cut();
  CancellationReport rep{};
  rep.order = order;
  rep.cutoff = cutoff.lambda_max;
  rep.coupling = coupling.value();
  rep.passed = true;

  if (cutoff.lambda_max == 0) {
    SymbolicIdentityReport s = single_site_identity(order, series_order);
    rep.symbolic = true;
    rep.series_order = series_order;
    if (!s.pointwise_identity || !s.derivative_identity)
      throw InvariantViolation("single-site cancellation identity failed");
  }

  const int nw = 2 * cutoff.lambda_max + 1;
  std::vector<std::vector<int>> combos;
  for (int a = 0; a < nw; ++a) {
    if (order == 1) {
      combos.push_back({a});
    } else {
      for (int b = a; b < nw; ++b) combos.push_back({a, b});
    }
  }
  std::vector<Amplitude> ren, raw;
  for (const auto& w : combos) {
    if (order == 1) {
      ren.push_back(remap(order1_terms(0), {w[0]}));
      raw.push_back(remap(order1_unrenormalized_terms(0), {w[0]}));
    } else {
      ren.push_back(remap(order2_terms(), w));
      raw.push_back(remap(order2_unrenormalized_terms(), w));
    }
  }

  const InterpolationVector base(cutoff);
  const Eigen::MatrixXd prop = base.propagator();
  const Eigen::VectorXd tv = base.tadpole();
  const auto marked = all_marked(cutoff);
  std::vector<Eigen::VectorXd> tw;
  for (const auto& m : marked) tw.push_back(m.rowwise().sum());
  const cplx c = coupling.field_coefficient();
  const double h = 1e-3;

  auto sample_data = [&](const Eigen::MatrixXcd& s) {
    Eigen::MatrixXcd hat = hat_operator(s);
    cplx v = vertex(hat, prop, tv, s, c);
    return SampleData{hat, v, std::exp(v), GraphContext(s, prop, marked, c)};
  };

  // Deterministic identities on a modest fixed set of draws.
  {
    std::mt19937_64 rng(splitmix64(sampler.seed ^ 0x5bd1e995ULL));
    const Amplitude base2 = order == 2 ? order2_terms() : Amplitude{};
    const Amplitude swapped = order == 2 ? remap(base2, {1, 0}) : Amplitude{};
    for (int k = 0; k < 64; ++k) {
      Eigen::MatrixXcd s = sample_unit_hermitian(rng, cutoff.dim());
      SampleData d = sample_data(s);
      for (size_t i = 0; i < combos.size(); ++i) {
        double dev = relative(evaluate(ren[i], d.ctx), evaluate(raw[i], d.ctx));
        if (k == 0) {
          CancellationEntry e;
          e.omegas = combos[i];
          rep.entries.push_back(e);
        }
        rep.entries[i].pointwise_deviation = std::max(rep.entries[i].pointwise_deviation, dev);
      }
      if (order == 2)
        for (int a = 0; a < nw; ++a)
          for (int b = 0; b < nw; ++b) {
            cplx x = evaluate(remap(base2, {a, b}), d.ctx);
            cplx y = evaluate(remap(swapped, {a, b}), d.ctx);
            rep.max_symmetry_deviation = std::max(rep.max_symmetry_deviation, relative(x, y));
          }
    }
  }
  for (const auto& e : rep.entries)
    if (e.pointwise_deviation > 1e-9) throw InvariantViolation("renormalized and tadpole forms differ pointwise");

  if (std::abs(coupling.value()) == 0.0) {
    for (auto& e : rep.entries) e.passed = true;
    return rep;
  }

  // Per combination: renormalized, unrenormalized derivative of V, finite
  // difference, and the two paired differences.
  const int per = 5;
  auto f = [&](const Eigen::MatrixXcd& s, cplx* out) {
    SampleData d = sample_data(s);
    for (size_t i = 0; i < combos.size(); ++i) {
      cplx ar = evaluate(ren[i], d.ctx);
      cplx pre, fd;
      if (order == 1) {
        int w = combos[i][0];
        pre = first_derivative_vertex(d, w, tv, tw[w], s);
        fd = (exp_vertex_shifted(d.hat, s, base, {{w, h}}, c) - exp_vertex_shifted(d.hat, s, base, {{w, -h}}, c)) /
             (2.0 * h);
      } else {
        int w1 = combos[i][0], w2 = combos[i][1];
        pre = first_derivative_vertex(d, w1, tv, tw[w1], s) * first_derivative_vertex(d, w2, tv, tw[w2], s) +
              second_derivative_vertex(d, w1, w2, tw[w1], tw[w2]);
        if (w1 == w2) {
          fd = (exp_vertex_shifted(d.hat, s, base, {{w1, h}}, c) - 2.0 * d.ev +
                exp_vertex_shifted(d.hat, s, base, {{w1, -h}}, c)) /
               (h * h);
        } else {
          fd = (exp_vertex_shifted(d.hat, s, base, {{w1, h}, {w2, h}}, c) -
                exp_vertex_shifted(d.hat, s, base, {{w1, h}, {w2, -h}}, c) -
                exp_vertex_shifted(d.hat, s, base, {{w1, -h}, {w2, h}}, c) +
                exp_vertex_shifted(d.hat, s, base, {{w1, -h}, {w2, -h}}, c)) /
               (4.0 * h * h);
        }
      }
      cplx* o = out + per * i;
      o[0] = d.ev * ar;
      o[1] = d.ev * pre;
      o[2] = fd;
      o[3] = d.ev * ar - fd;
      o[4] = d.ev * (ar - pre);
    }
  };
  MultiEstimate e = mc_estimate(sampler, cutoff.dim(), per * static_cast<int>(combos.size()), f);
  rep.samples = e.samples;
  for (size_t i = 0; i < combos.size(); ++i) {
    auto& en = rep.entries[i];
    const size_t o = per * i;
    en.renormalized = e.mean[o];
    en.unrenormalized = e.mean[o + 1];
    en.numeric = e.mean[o + 2];
    en.diff_numeric = e.mean[o + 3];
    en.diff_numeric_se = e.std_error[o + 3];
    en.diff_unrenormalized = e.mean[o + 4];
    en.diff_unrenormalized_se = e.std_error[o + 4];
    // A small absolute floor covers the O(h^2) difference bias.
    const double floor = 1e-9;
    en.passed = std::abs(en.diff_numeric) <= 3.0 * en.diff_numeric_se + floor &&
                std::abs(en.diff_unrenormalized) <= 3.0 * en.diff_unrenormalized_se + floor;
    rep.passed = rep.passed && en.passed;
  }
  if (order == 2 && rep.max_symmetry_deviation > 1e-9) rep.passed = false;
  return rep;
}

StoppingSchedule stopping_rule_schedule(const ScalePartition& partition, double a) {
  if (!(a > 0.0 && a < std::exp(1.0) / 4.0)) throw DomainError("stopping constant must lie in (0, e/4)");
  StoppingSchedule s{a, partition.M, {}, {}};
  for (int j = partition.j_max; j >= 0; --j) {
    s.scales.push_back(j);
    s.quotas.push_back(static_cast<long>(std::ceil(a * std::pow(static_cast<double>(partition.M), j) - 1e-12)));
  }
  return s;
}

BigInt resolvent_graph_count_bound(int N) {
  if (N < 0 || N > 12) throw RangeError("graph order must be in 0..12");
  BigInt r = 1;
  for (int k = 0; k < N + 1; ++k) r *= 4;
  for (int k = 2; k <= N; ++k) r *= k;
  return r;
}

TermCounts enumerated_term_counts() {
  return {order1_terms(0).distinct_term_count(), order1_sided_terms(0).distinct_term_count(),
          order2_terms().distinct_term_count()};
}

}  // namespace gw
