#include <cmath>
#include <random>

#include "doctest.h"
#include "gw/errors.hpp"
#include "gw/forests.hpp"
#include "gw/grassmann.hpp"

using namespace gw;

namespace {

BlockSliceSets disjoint_sets(int blocks) {
  BlockSliceSets s(static_cast<size_t>(blocks));
  for (int b = 0; b < blocks; ++b) s[static_cast<size_t>(b)] = {{2 * b}, {2 * b + 1}};
  return s;
}

// Determinant by Laplace expansion, independent of the library's LU path.
double laplace_det(const Eigen::MatrixXd& m) {
  const int n = static_cast<int>(m.rows());
  if (n == 0) return 1.0;
  if (n == 1) return m(0, 0);
  double s = 0.0;
  for (int c = 0; c < n; ++c) {
    Eigen::MatrixXd sub(n - 1, n - 1);
    for (int i = 1; i < n; ++i)
      for (int j = 0, jj = 0; j < n; ++j)
        if (j != c) sub(i - 1, jj++) = m(i, j);
    s += (c % 2 == 0 ? 1.0 : -1.0) * m(0, c) * laplace_det(sub);
  }
  return s;
}

}  // namespace

TEST_SUITE("grassmann") {
  TEST_CASE("minors") {
    FermionicBlockMatrix id(Eigen::MatrixXd::Identity(3, 3));
    CHECK(grassmann_minor(id, {}, {}) == doctest::Approx(1.0));
    CHECK(grassmann_minor(id, {1}, {1}) == doctest::Approx(1.0));
    CHECK(grassmann_minor(id, {0}, {1}) == doctest::Approx(0.0));
    CHECK_THROWS_AS(grassmann_minor(id, {1, 1}, {0, 2}), ArgumentError);
    CHECK_THROWS_AS(grassmann_minor(id, {1}, {0, 2}), ArgumentError);

    std::mt19937_64 rng(31);
    for (int t = 0; t < 30; ++t) {
      FermionicBlockMatrix y(random_unit_gram(4, rng));
      CHECK(grassmann_minor(y, {}, {}) == doctest::Approx(laplace_det(y.Y)).epsilon(1e-12));
      CHECK(grassmann_minor(y, {0, 2}, {1, 3}) ==
            doctest::Approx(laplace_det((Eigen::MatrixXd(2, 2) << y.Y(1, 0), y.Y(1, 2), y.Y(3, 0), y.Y(3, 2)).finished()))
                .epsilon(1e-12));
    }
  }

  TEST_CASE("all minors of sampled unit-diagonal PSD matrices are bounded") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 100; ++t) {
      const int n = 1 + t % 4;
      FermionicBlockMatrix y(random_unit_gram(n, rng));
      for (int rm = 0; rm < (1 << n); ++rm)
        for (int cm = 0; cm < (1 << n); ++cm) {
          if (__builtin_popcount(static_cast<unsigned>(rm)) != __builtin_popcount(static_cast<unsigned>(cm))) continue;
          std::vector<int> r, c;
          for (int i = 0; i < n; ++i) {
            if (rm & (1 << i)) r.push_back(i);
            if (cm & (1 << i)) c.push_back(i);
          }
          if (static_cast<int>(r.size()) == n) continue;
          CHECK(std::abs(grassmann_minor(y, r, c)) <= 1.0 + 1e-10);
        }
    }
  }

  TEST_CASE("block matrices from forests are valid") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    enumerate_forests(4, [&](const Forest& f) {
      std::vector<double> w(f.edges.size());
      for (auto& x : w) x = u(rng);
      FermionicBlockMatrix y = block_matrix(f, w);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(y.Y);
      CHECK(es.eigenvalues().minCoeff() >= -1e-12);
    });
    Eigen::MatrixXd bad = Eigen::MatrixXd::Identity(2, 2);
    bad(0, 1) = bad(1, 0) = 1.5;
    CHECK_THROWS_AS(FermionicBlockMatrix{bad}, DomainError);
  }

  TEST_CASE("closed-form moments match the exterior-algebra expansion") {
    std::mt19937_64 rng(19);
    std::uniform_int_distribution<int> pick(0, 3);
    for (int t = 0; t < 200; ++t) {
      Eigen::MatrixXd y = random_unit_gram(4, rng);
      const int k = t % 4;
      std::vector<int> a, b;
      for (int i = 0; i < k; ++i) {
        a.push_back(pick(rng));
        b.push_back(pick(rng));
      }
      CHECK(std::abs(grassmann_moment(y, a, b) - grassmann_moment_oracle(y, a, b)) < 1e-12);
    }
    Eigen::MatrixXd y = random_unit_gram(3, rng);
    CHECK(grassmann_moment(y, {}, {}) == doctest::Approx(y.determinant()).epsilon(1e-12));
    CHECK(grassmann_moment(y, {0, 0}, {1, 2}) == 0.0);
  }

  TEST_CASE("forest integrals") {
    FermionicBlockMatrix id(Eigen::MatrixXd::Identity(1, 1));
    Forest empty;
    empty.n = 1;
    CHECK(fermionic_forest_integral(empty, id, disjoint_sets(1)) == doctest::Approx(1.0));
    BlockSliceSets overlap{{{1, 2}, {2, 5}}};
    CHECK(fermionic_forest_integral(empty, id, overlap) == 0.0);
    CHECK_FALSE(hardcore_indicator(overlap));

    // One edge between two blocks: two single-insertion minors, each the
    // off-diagonal entry up to the common sign.
    Forest edge;
    edge.n = 2;
    edge.edges = {{0, 1}};
    for (double yv : {0.0, 0.3, 0.9}) {
      FermionicBlockMatrix y((Eigen::MatrixXd(2, 2) << 1.0, yv, yv, 1.0).finished());
      double v = fermionic_forest_integral(edge, y, disjoint_sets(2));
      CHECK(std::abs(std::abs(v) - 2.0 * yv) < 1e-14);
      CHECK(std::abs(v - fermionic_forest_integral_oracle(edge, y, disjoint_sets(2))) < 1e-14);
    }

    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int blocks = 1; blocks <= 4; ++blocks)
      enumerate_forests(blocks, [&](const Forest& f) {
        std::vector<double> w(f.edges.size());
        for (auto& x : w) x = u(rng);
        FermionicBlockMatrix y = block_matrix(f, w);
        auto sets = disjoint_sets(blocks);
        CHECK(std::abs(fermionic_forest_integral(f, y, sets) - fermionic_forest_integral_oracle(f, y, sets)) < 1e-12);
      });
    CHECK_THROWS_AS(fermionic_forest_integral(edge, id, disjoint_sets(1)), ArgumentError);
  }
}
