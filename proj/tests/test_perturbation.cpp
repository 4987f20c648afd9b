#include <cmath>

#include "doctest.h"
#include "gw/direct.hpp"
#include "gw/errors.hpp"
#include "gw/perturbation.hpp"

using namespace gw;

TEST_SUITE("perturbation") {
  TEST_CASE("pairing counts are (4n-1)!!") {
    const long expect[] = {3, 105, 10395, 2027025};
    for (int n = 1; n <= 4; ++n) {
      long visited = 0;
      long total = enumerate_pairings(n, [&](const PairingDiagram&) { ++visited; });
      CHECK(total == expect[n - 1]);
      CHECK(visited == expect[n - 1]);
    }
    CHECK_THROWS_AS(enumerate_pairings(5, [](const PairingDiagram&) {}), ComplexityGuard);
  }

  TEST_CASE("first-order Wick-admissible set is the crossing pairing") {
    int admissible = 0;
    enumerate_pairings(1, [&](const PairingDiagram& d) {
      if (!d.wick_admissible) return;
      ++admissible;
      CHECK(d.partner[0] == 2);
      CHECK(d.partner[1] == 3);
    });
    CHECK(admissible == 1);
  }

  TEST_CASE("diagram sum equals the single-site moment oracle") {
    auto a = log_z_coefficients(Cutoff(0), 4);
    auto b = coefficient_oracle(Cutoff(0), 4);
    REQUIRE(a.coefficients.size() == 4);
    for (int i = 0; i < 4; ++i) CHECK(a.coefficients[i] == b.coefficients[i]);
    CHECK(a.coefficients[0] == Rational(-1, 4));
  }

  TEST_CASE("first coefficient closed form") {
    for (int L = 0; L <= 16; ++L) {
      Rational s = 0;
      for (int m = 0; m <= L; ++m) s += Rational(1, (2 * m + 1) * (2 * m + 1));
      CHECK(log_z_coefficients(Cutoff(L), 1).coefficients[0] == -s / 4);
    }
    CHECK(log_z_coefficients(Cutoff(1), 3).coefficients[0] == Rational(-5, 18));
  }

  TEST_CASE("Wick ordering equals explicit counterterm vertices") {
    for (int L = 0; L <= 2; ++L) {
      auto a = z_coefficients(Cutoff(L), 3);
      auto b = z_coefficients_counterterm_species(Cutoff(L), 3);
      for (int i = 0; i < 3; ++i) CHECK(a[i] == b[i]);
    }
  }

  TEST_CASE("series logarithm inverts the exponential") {
    // exp(x/2) = 1 + x/2 + x^2/8 + x^3/48
    std::vector<Rational> z{Rational(1, 2), Rational(1, 8), Rational(1, 48)};
    auto l = series_log(z);
    CHECK(l[0] == Rational(1, 2));
    CHECK(l[1] == 0);
    CHECK(l[2] == 0);
  }

  TEST_CASE("partial sums approach log Z before diverging") {
    auto s = log_z_coefficients(Cutoff(0), 4);
    const double lam = 0.05;
    double ref = std::log(z_direct_quadrature(lam, Cutoff(0)).value.real());
    double partial = 0.0, prev = std::abs(ref);
    for (int n = 1; n <= 3; ++n) {
      partial += to_double(s.coefficients[n - 1]) * std::pow(lam, n);
      double err = std::abs(ref - partial);
      CHECK(err < prev);
      prev = err;
    }
  }

  TEST_CASE("tadpole cancellation leaves the diagonal survivor") {
    for (int L = 0; L <= 8; ++L) {
      auto r = tadpole_cancellation_check(Cutoff(L));
      CHECK(r.passed());
      Rational s = 0;
      for (int m = 0; m <= L; ++m) s += Rational(1, (2 * m + 1) * (2 * m + 1));
      CHECK(r.survivor == s);
      CHECK(renormalized_first_order_amplitude(Cutoff(L)) == s);
    }
  }
}
