#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <random>

#include "doctest.h"
#include "gw/direct.hpp"
#include "gw/errors.hpp"
#include "gw/montecarlo.hpp"

using namespace gw;

namespace {

// E exp(-(lambda/4)(x^4 - 4x^2 + 2)) for x ~ N(0,1): the cutoff-0 model.
double single_site_z(double lambda) {
  auto f = [lambda](double x) {
    return std::exp(-0.5 * x * x - 0.25 * lambda * (x * x * x * x - 4.0 * x * x + 2.0)) / std::sqrt(2.0 * M_PI);
  };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, -14.0, 14.0, 15, 1e-14);
}

Eigen::MatrixXcd random_hermitian(std::mt19937_64& rng, int n) { return sample_unit_hermitian(rng, n); }

}  // namespace

TEST_SUITE("direct") {
  TEST_CASE("cutoff-0 quadrature matches a one-dimensional integral") {
    for (double l : {0.0, 0.05, 0.1, 0.2, 1.0}) {
      auto z = z_direct_quadrature(l, Cutoff(0));
      CHECK(std::abs(z.value.real() - single_site_z(l)) < 1e-10);
      CHECK(z.method == "quadrature");
    }
  }

  TEST_CASE("both quadratures agree") {
    for (int L : {0, 1})
      for (double l : {0.05, 0.2}) {
        auto a = z_direct_quadrature(l, Cutoff(L));
        auto b = z_intermediate_quadrature(Coupling(l), Cutoff(L));
        CHECK(std::abs(a.value - b.value) < 1e-6);
      }
    CHECK_THROWS_AS(z_direct_quadrature(0.1, Cutoff(2)), UnsupportedDimension);
    CHECK_THROWS_AS(z_direct_quadrature(-0.1, Cutoff(0)), DomainError);
  }

  TEST_CASE("intermediate field Monte Carlo is conjugation covariant") {
    SamplerSpec a;
    a.samples = 4000;
    a.seed = 11;
    SamplerSpec b = a;
    b.mirrored = true;
    Coupling g = Coupling::polar(0.2, 0.7);
    Coupling gbar(std::conj(g.value()));
    for (int L : {0, 1, 2}) {
      auto z = z_intermediate_field(g, Cutoff(L), a);
      auto zc = z_intermediate_field(gbar, Cutoff(L), b);
      CHECK(std::abs(zc.value - std::conj(z.value)) < 1e-12);
    }
  }

  TEST_CASE("hat operator acts as sigma X + X sigma") {
    std::mt19937_64 rng(3);
    const int n = 3;
    Eigen::MatrixXcd s = random_hermitian(rng, n);
    Eigen::MatrixXcd x = Eigen::MatrixXcd::Random(n, n);
    Eigen::MatrixXcd h = hat_operator(s);
    Eigen::VectorXcd vx(n * n);
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q) vx(p * n + q) = x(p, q);
    Eigen::VectorXcd out = h * vx;
    Eigen::MatrixXcd expect = s * x + x * s;
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q) CHECK(std::abs(out(p * n + q) - expect(p, q)) < 1e-12);
  }

  TEST_CASE("loop vertex decomposition") {
    std::mt19937_64 rng(8);
    Cutoff c(2);
    for (int i = 0; i < 10; ++i) {
      Eigen::MatrixXcd s = random_hermitian(rng, c.dim());
      auto parts = loop_vertex_parts(s, Coupling(0.3), c);
      CHECK(parts.decomposition_error < 1e-12);
      CHECK(std::abs(parts.linear - 2.0 * parts.counterterm) < 1e-10);
      CHECK(std::abs(parts.value - loop_vertex_value(s, Coupling(0.3), c)) < 1e-14);
    }
  }

  TEST_CASE("resolvent norm bound on random fields") {
    std::mt19937_64 rng(21);
    for (int L = 0; L <= 3; ++L) {
      Cutoff c(L);
      for (int i = 0; i < 50; ++i) {
        Eigen::MatrixXcd s = 3.0 * random_hermitian(rng, c.dim());
        for (double phase : {-2.5, -1.0, 0.0, 1.0, 2.5}) {
          Coupling g = Coupling::polar(0.7, phase);
          Eigen::MatrixXcd r = build_resolvent(s, g, c, ResolventKind::symmetric);
          Eigen::JacobiSVD<Eigen::MatrixXcd> svd(r);
          CHECK(svd.singularValues()(0) * std::cos(phase / 2.0) <= 1.0 + 1e-12);
        }
      }
    }
    SamplerSpec spec;
    spec.samples = 500;
    auto rep = resolvent_norm_check(spec, {Coupling(0.1), Coupling::polar(0.1, 2.0)}, Cutoff(1));
    CHECK(rep.passed());
  }

  TEST_CASE("resolvent derivative identity") {
    std::mt19937_64 rng(4);
    Cutoff c(1);
    Eigen::MatrixXcd s = random_hermitian(rng, c.dim());
    for (auto kind : {ResolventKind::plain, ResolventKind::symmetric})
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) CHECK(resolvent_derivative_check(s, Coupling(0.3), c, a, b, 1e-5, kind) < 1e-8);
    CHECK_THROWS_AS(resolvent_derivative_check(s, Coupling(0.3), c, 0, 0, 1.0), DomainError);
  }

  TEST_CASE("Nelson bound") {
    for (int L : {0, 1})
      for (double l : {0.1, 1.0}) CHECK(nelson_bound_check(l, Cutoff(L)).holds);
  }
}
