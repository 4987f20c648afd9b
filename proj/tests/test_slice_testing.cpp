#include <cmath>
#include <random>

#include "doctest.h"
#include "gw/direct.hpp"
#include "gw/errors.hpp"
#include "gw/montecarlo.hpp"
#include "gw/resolvent_graph.hpp"
#include "gw/slice_testing.hpp"

using namespace gw;

namespace {

bool contains_tadpole(const Amplitude& a) {
  for (const auto& t : a.terms)
    for (const auto& chain : t.traces)
      for (const auto& f : chain)
        if (f.kind == FactorKind::tadpole) return true;
  return false;
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(1e-300, std::max(std::abs(a), std::abs(b))); }

}  // namespace

TEST_SUITE("slice-testing") {
  TEST_CASE("renormalized amplitudes carry no tadpole factors") {
    for (int k : {-1, 0, 1}) {
      CHECK_FALSE(contains_tadpole(order1_terms(k)));
      CHECK_FALSE(order1_terms(k).has_tadpole_factors());
      CHECK_FALSE(contains_tadpole(order1_sided_terms(k)));
      CHECK(contains_tadpole(order1_unrenormalized_terms(k)));
    }
    CHECK_FALSE(contains_tadpole(order2_terms()));
    CHECK(order2_unrenormalized_terms().has_tadpole_factors());
  }

  TEST_CASE("term counts respect the combinatorial bound") {
    auto c = enumerated_term_counts();
    CHECK(c.order1 == 5);
    CHECK(c.order1_sided == 8);
    CHECK(c.order2 == 70);
    CHECK(resolvent_graph_count_bound(1) == 16);
    CHECK(resolvent_graph_count_bound(2) == 128);
    CHECK(c.order1 <= resolvent_graph_count_bound(1));
    CHECK(c.order2 <= resolvent_graph_count_bound(2));
  }

  TEST_CASE("single-site identities hold exactly") {
    for (int order : {1, 2}) {
      auto r = single_site_identity(order, 8);
      CHECK(r.derivative_identity);
      CHECK(r.pointwise_identity);
    }
  }

  TEST_CASE("hook sum splits into tadpole and crossing") {
    std::mt19937_64 rng(2);
    Cutoff cu(1);
    const int n = cu.dim();
    InterpolationVector t(cu);
    std::vector<Eigen::MatrixXd> marks;
    for (int w = 0; w <= 2; ++w) marks.push_back(marked_propagator(w, cu));
    GraphContext ctx(sample_unit_hermitian(rng, n), t.propagator(), marks, Coupling(0.1).field_coefficient());
    for (int m = -1; m <= 2; ++m) {
      Eigen::MatrixXcd x = ctx.prop[static_cast<size_t>(m + 1)];
      Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(n * n, n * n);
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          s += hook_operator(n, b, a).cast<cplx>() * x * hook_operator(n, a, b).cast<cplx>();
      Eigen::MatrixXcd split = ctx.tadpole[static_cast<size_t>(m + 1)] + ctx.crossing[static_cast<size_t>(m + 1)];
      CHECK((s - split).norm() < 1e-12);
    }
  }

  TEST_CASE("term evaluation matches a dense contraction") {
    std::mt19937_64 rng(9);
    Cutoff cu(1);
    const int n = cu.dim();
    InterpolationVector t(cu);
    GraphContext ctx(sample_unit_hermitian(rng, n), t.propagator(), {marked_propagator(1, cu)},
                     Coupling(0.2).field_coefficient());
    Factor R{FactorKind::resolvent}, C{FactorKind::propagator, -1}, C1{FactorKind::propagator, 0};
    Factor h1{FactorKind::hook, -1, 0, 1}, h0{FactorKind::hook, -1, 0, 0};
    Term term;
    term.coefficient = 1;
    term.traces = {{R, C, h1, R, C1, h0, R}};
    term.lines = 1;
    Eigen::MatrixXcd dense = Eigen::MatrixXcd::Zero(n * n, n * n);
    Eigen::MatrixXcd r = ctx.R, p = ctx.prop[0], p1 = ctx.prop[1];
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        dense += r * p * hook_operator(n, b, a).cast<cplx>() * r * p1 * hook_operator(n, a, b).cast<cplx>() * r;
    CHECK(rel(evaluate(term, ctx), dense.trace()) < 1e-12);
  }

  TEST_CASE("renormalized and tadpole forms agree pointwise") {
    std::mt19937_64 rng(17);
    Cutoff cu(1);
    InterpolationVector t(cu);
    std::vector<Eigen::MatrixXd> marks;
    for (int w = 0; w <= 2; ++w) marks.push_back(marked_propagator(w, cu));
    for (int i = 0; i < 5; ++i) {
      Eigen::MatrixXcd s = sample_unit_hermitian(rng, cu.dim());
      GraphContext ctx(s, t.propagator(), marks, Coupling(0.1).field_coefficient());
      for (int w = 0; w <= 2; ++w)
        CHECK(rel(evaluate(order1_terms(w), ctx), evaluate(order1_unrenormalized_terms(w), ctx)) < 1e-10);
      GraphContext ctx2(s, t.propagator(), {marks[0], marks[2]}, Coupling(0.1).field_coefficient());
      CHECK(rel(evaluate(order2_terms(), ctx2), evaluate(order2_unrenormalized_terms(), ctx2)) < 1e-10);
    }
  }

  TEST_CASE("amplitude decompositions and symmetry") {
    std::mt19937_64 rng(23);
    Cutoff cu(1);
    InterpolationVector t(cu, 0.7);
    Coupling g = Coupling::polar(0.1, 0.4);
    for (int i = 0; i < 5; ++i) {
      Eigen::MatrixXcd s = sample_unit_hermitian(rng, cu.dim());
      for (int w = 0; w <= 2; ++w) {
        auto o = order1_amplitude(w, s, t, g);
        cplx sum = 0;
        for (const auto& [name, v] : o.graphs) sum += v;
        CHECK(rel(sum, o.total) < 1e-12);
        CHECK(rel(o.planar_renormalized + o.non_planar, o.total) < 1e-12);
      }
      for (int a = 0; a <= 2; ++a)
        for (int b = 0; b <= 2; ++b)
          CHECK(rel(order2_amplitude(a, b, s, t, g).total, order2_amplitude(b, a, s, t, g).total) < 1e-12);
    }
  }

  TEST_CASE("interpolated vertex reduces to the loop vertex at t = 1") {
    std::mt19937_64 rng(6);
    for (int L : {0, 1, 2}) {
      Cutoff cu(L);
      InterpolationVector t(cu);
      for (int i = 0; i < 5; ++i) {
        Eigen::MatrixXcd s = sample_unit_hermitian(rng, cu.dim());
        CHECK(std::abs(interpolated_vertex(s, t, Coupling(0.2)) - loop_vertex_value(s, Coupling(0.2), cu)) < 1e-12);
      }
    }
  }

  TEST_CASE("Monte Carlo cancellation check at small sample size") {
    SamplerSpec spec;
    spec.samples = 3000;
    spec.seed = 5;
    auto r1 = counterterm_cancellation_check(1, Cutoff(1), Coupling(0.1), spec);
    CHECK(r1.entries.size() == 3);
    for (const auto& e : r1.entries) {
      CHECK(std::abs(e.diff_numeric) <= 4.0 * e.diff_numeric_se + 1e-9);
      CHECK(e.pointwise_deviation < 1e-9);
    }
    spec.samples = 500;
    auto r0 = counterterm_cancellation_check(2, Cutoff(0), Coupling(0.1), spec);
    CHECK(r0.symbolic);
    CHECK(r0.max_symmetry_deviation < 1e-9);
  }

  TEST_CASE("stopping schedule") {
    ScalePartition p(2, 40);
    auto s = stopping_rule_schedule(p, 0.5);
    REQUIRE(s.scales.size() == s.quotas.size());
    CHECK(s.scales.front() == p.j_max);
    CHECK(s.scales.back() == 0);
    for (size_t i = 0; i < s.scales.size(); ++i)
      CHECK(s.quotas[i] == static_cast<long>(std::ceil(0.5 * std::pow(2.0, s.scales[i]))));
    CHECK_THROWS_AS(stopping_rule_schedule(p, 0.7), DomainError);
  }

  TEST_CASE("graph evaluation guards the matrix size") {
    Cutoff cu(4);
    InterpolationVector t(cu);
    Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(5, 5);
    CHECK_THROWS_AS(GraphContext(s, t.propagator(), {}, 0.1), UnsupportedDimension);
  }
}
