#include <boost/math/quadrature/exp_sinh.hpp>
#include <cmath>
#include <random>

#include "doctest.h"
#include "gw/direct.hpp"
#include "gw/errors.hpp"
#include "gw/perturbation.hpp"
#include "gw/resummation.hpp"

using namespace gw;

namespace {

std::vector<Rational> euler_series(int n) {
  std::vector<Rational> a;
  Rational f = 1;
  for (int k = 0; k <= n; ++k) {
    if (k > 0) f *= k;
    a.push_back(k % 2 == 0 ? f : -f);
  }
  return a;
}

double euler_integral(double lam) {
  boost::math::quadrature::exp_sinh<double> q;
  return q.integrate([lam](double t) { return std::exp(-t) / (1.0 + lam * t); });
}

}  // namespace

TEST_SUITE("resummation") {
  TEST_CASE("cardioid membership") {
    CHECK(cardioid_contains(Coupling(std::polar(0.05, M_PI / 3)), 0.1));
    CHECK_FALSE(cardioid_contains(Coupling(-0.01), 0.1));
    CHECK(cardioid_contains(Coupling(0.08), 0.1));
    CHECK_FALSE(cardioid_contains(Coupling(0.12), 0.1));
    CHECK_THROWS_AS(CardioidDomain(1.5), DomainError);
  }

  TEST_CASE("cardioid membership is conjugation invariant") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> r(0.0, 0.12), p(-M_PI, M_PI);
    for (int i = 0; i < 2000; ++i) {
      cplx l = std::polar(r(rng), p(rng));
      CHECK(cardioid_contains(Coupling(l), 0.1) == cardioid_contains(Coupling(std::conj(l)), 0.1));
    }
    CardioidDomain d(0.1);
    for (cplx l : d.grid({0.2, 0.9}, {-3.0, -1.0, 0.0, 2.0})) CHECK(d.contains(Coupling(l)));
  }

  TEST_CASE("Pade reproduces a rational function") {
    // (1 + 2x) / (1 - x/3)
    std::vector<Rational> b{1};
    Rational geo = 1;
    for (int n = 1; n <= 6; ++n) {
      geo /= 3;
      b.push_back(geo + 2 * geo * 3);
    }
    auto p = pade(b, 1, 1);
    CHECK(p.numerator[0] == 1);
    CHECK(p.numerator[1] == 2);
    CHECK(p.denominator[1] == Rational(-1, 3));
    REQUIRE(p.poles.size() == 1);
    CHECK(std::abs(p.poles[0] - cplx(3.0, 0.0)) < 1e-12);
    CHECK(std::abs(p(cplx(0.5, 0.2)) - (1.0 + 2.0 * cplx(0.5, 0.2)) / (1.0 - cplx(0.5, 0.2) / 3.0)) < 1e-14);
    CHECK(default_pade_order(4) == std::make_pair(2, 1));
    CHECK_THROWS_AS(pade(b, 4, 4), ArgumentError);
  }

  TEST_CASE("exponential series") {
    std::vector<Rational> a;
    Rational f = 1;
    for (int n = 0; n <= 9; ++n) {
      if (n > 0) f *= n;
      a.push_back(Rational(1) / f);
    }
    auto r = borel_pade_evaluate(BorelSeries(a), 0.3, 5, 4);
    CHECK(std::abs(r.value - std::exp(0.3)) < 1e-8);
  }

  TEST_CASE("Euler series matches its Borel integral") {
    for (double lam = 0.01; lam <= 0.3 + 1e-12; lam += 0.029) {
      auto r = borel_pade_evaluate(BorelSeries(euler_series(4)), lam, 2, 1);
      CHECK(std::abs(r.value.real() - euler_integral(lam)) < 1e-6);
      CHECK(std::abs(r.value.imag()) < 1e-14);
    }
  }

  TEST_CASE("pole on the integration ray") {
    try {
      borel_pade_evaluate(BorelSeries(euler_series(4)), -0.1, 2, 1);
      FAIL("expected a pole obstruction");
    } catch (const PoleObstruction& p) {
      CHECK(p.pole_re == doctest::Approx(-1.0));
      CHECK(p.pole_im == doctest::Approx(0.0));
    }
  }

  TEST_CASE("model series resums to log Z") {
    auto s = log_z_coefficients(Cutoff(0), 4);
    auto r = borel_pade_evaluate(s, 0.05);
    CHECK(r.L == 2);
    CHECK(r.M == 1);
    double ref = std::log(z_direct_quadrature(0.05, Cutoff(0)).value.real());
    CHECK(std::abs(r.value - ref) < 1e-4);
    cplx l = std::polar(0.04, 1.2);
    cplx zref = std::log(z_intermediate_quadrature(Coupling(l), Cutoff(0)).value);
    CHECK(std::abs(borel_pade_evaluate(s, l).value - zref) < 1e-4);
  }

  TEST_CASE("remainder diagnostic") {
    auto s = log_z_coefficients(Cutoff(0), 4);
    std::vector<cplx> lams{0.0, 0.05, 0.2};
    std::vector<cplx> refs{0.0};
    for (double l : {0.05, 0.2}) refs.push_back(std::log(z_direct_quadrature(l, Cutoff(0)).value.real()));
    auto rep = remainder_growth_diagnostic(s, lams, {1, 2, 3, 4}, refs);
    CHECK(rep.passed);
    for (const auto& row : rep.rows)
      if (row.lambda == 0.0) CHECK(std::abs(row.remainder) == 0.0);
    for (size_t i = 1; i < lams.size(); ++i) {
      CHECK(std::isfinite(rep.k_estimate[i]));
      CHECK(rep.max_step[i] < 10.0);
    }
    CHECK_THROWS_AS(remainder_growth_diagnostic(s, lams, {1}, {0.0}), DependencyError);
  }
}
