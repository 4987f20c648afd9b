#include "gw/grassmann.hpp"

#include <algorithm>
#include <cmath>

#include "gw/errors.hpp"

namespace gw {

namespace {

void check_distinct(const std::vector<int>& v, int size, const char* what) {
  std::vector<int> s = v;
  std::sort(s.begin(), s.end());
  if (std::adjacent_find(s.begin(), s.end()) != s.end()) throw ArgumentError(what);
  for (int x : s)
    if (x < 0 || x >= size) throw RangeError("index outside the block matrix");
}

// Sign of the permutation sorting v (entries distinct).
int sort_sign(std::vector<int> v) {
  int sign = 1;
  for (size_t i = 0; i < v.size(); ++i)
    for (size_t j = i + 1; j < v.size(); ++j)
      if (v[i] > v[j]) sign = -sign;
  return sign;
}

double det_without(const Eigen::MatrixXd& Y, const std::vector<int>& rows, const std::vector<int>& cols) {
  const int n = static_cast<int>(Y.rows());
  std::vector<int> keep_r, keep_c;
  for (int i = 0; i < n; ++i) {
    if (std::find(rows.begin(), rows.end(), i) == rows.end()) keep_r.push_back(i);
    if (std::find(cols.begin(), cols.end(), i) == cols.end()) keep_c.push_back(i);
  }
  const int m = static_cast<int>(keep_r.size());
  if (m == 0) return 1.0;
  Eigen::MatrixXd s(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) s(i, j) = Y(keep_r[i], keep_c[j]);
  return s.determinant();
}

// Exterior algebra on 2 * blocks generators; generator 2B is chi-bar_B and
// 2B+1 is chi_B. Elements are coefficient vectors over bitmasks.
class Exterior {
 public:
  explicit Exterior(int generators) : g_(generators), c_(std::size_t(1) << generators, 0.0) {}
  static Exterior unit(int generators) {
    Exterior e(generators);
    e.c_[0] = 1.0;
    return e;
  }
  static Exterior generator(int generators, int k) {
    Exterior e(generators);
    e.c_[std::size_t(1) << k] = 1.0;
    return e;
  }
  Exterior operator*(const Exterior& o) const {
    Exterior r(g_);
    for (std::size_t a = 0; a < c_.size(); ++a) {
      if (c_[a] == 0.0) continue;
      for (std::size_t b = 0; b < o.c_.size(); ++b) {
        if (o.c_[b] == 0.0 || (a & b)) continue;
        // Moving each generator of b past the larger generators of a.
        int swaps = 0;
        for (int k = 0; k < g_; ++k)
          if (b >> k & 1) swaps += __builtin_popcountll(a >> (k + 1));
        r.c_[a | b] += (swaps % 2 ? -1.0 : 1.0) * c_[a] * o.c_[b];
      }
    }
    return r;
  }
  Exterior operator+(const Exterior& o) const {
    Exterior r(g_);
    for (std::size_t i = 0; i < c_.size(); ++i) r.c_[i] = c_[i] + o.c_[i];
    return r;
  }
  Exterior scaled(double f) const {
    Exterior r = *this;
    for (auto& x : r.c_) x *= f;
    return r;
  }
  double top() const { return c_.back(); }

 private:
  int g_;
  std::vector<double> c_;
};

Exterior exp_action(const Eigen::MatrixXd& Y) {
  const int n = static_cast<int>(Y.rows());
  const int g = 2 * n;
  Exterior q(g);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (Y(a, b) != 0.0)
        q = q + (Exterior::generator(g, 2 * a) * Exterior::generator(g, 2 * b + 1)).scaled(-Y(a, b));
  Exterior result = Exterior::unit(g), power = Exterior::unit(g);
  for (int k = 1; k <= n; ++k) {
    power = (power * q).scaled(1.0 / k);
    result = result + power;
  }
  return result;
}

// Berezin integral: top coefficient in the order chi_0 chi-bar_0 chi_1 ...,
// which differs from the canonical mask order by (-1)^n.
double berezin(const Exterior& e, int n) { return (n % 2 ? -1.0 : 1.0) * e.top(); }

void validate_sets(const Forest& fermionic, const FermionicBlockMatrix& Y, const BlockSliceSets& sets) {
  if (fermionic.n != Y.size()) throw ArgumentError("fermionic forest and block matrix sizes differ");
  if (static_cast<int>(sets.size()) != Y.size()) throw ArgumentError("one slice-set group per block");
  if (!fermionic.is_acyclic()) throw ArgumentError("fermionic edges do not form a forest");
}

}  // namespace

FermionicBlockMatrix::FermionicBlockMatrix(Eigen::MatrixXd y) : Y(std::move(y)) {
  if (Y.rows() != Y.cols()) throw ArgumentError("block matrix must be square");
  const int n = static_cast<int>(Y.rows());
  for (int i = 0; i < n; ++i) {
    if (std::abs(Y(i, i) - 1.0) > 1e-12) throw DomainError("block matrix needs a unit diagonal");
    for (int j = 0; j < n; ++j) {
      if (Y(i, j) < -1e-12 || Y(i, j) > 1.0 + 1e-12) throw DomainError("block matrix entries must lie in [0, 1]");
      if (std::abs(Y(i, j) - Y(j, i)) > 1e-12) throw DomainError("block matrix must be symmetric");
    }
  }
  if (n > 0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Y, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-12) throw DomainError("block matrix must be positive semi-definite");
  }
}

FermionicBlockMatrix block_matrix(const Forest& fermionic, const std::vector<double>& w) {
  return FermionicBlockMatrix(replica_covariance(fermionic, w));
}

Eigen::MatrixXd random_unit_gram(int size, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd v(size, size);
  for (int j = 0; j < size; ++j) {
    for (int i = 0; i < size; ++i) v(i, j) = u(rng);
    v.col(j).normalize();
  }
  Eigen::MatrixXd g = v.transpose() * v;
  for (int i = 0; i < size; ++i) g(i, i) = 1.0;
  return g.cwiseMin(1.0);
}

double grassmann_minor(const FermionicBlockMatrix& Y, const std::vector<int>& rows, const std::vector<int>& cols) {
  if (rows.size() != cols.size()) throw ArgumentError("row and column lists must have equal length");
  check_distinct(rows, Y.size(), "duplicate row index");
  check_distinct(cols, Y.size(), "duplicate column index");
  return det_without(Y.Y, rows, cols);
}

double grassmann_moment(const Eigen::MatrixXd& Y, const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) throw ArgumentError("need as many chi-bar as chi factors");
  const int n = static_cast<int>(Y.rows());
  for (int x : a)
    if (x < 0 || x >= n) throw RangeError("index outside the block matrix");
  for (int x : b)
    if (x < 0 || x >= n) throw RangeError("index outside the block matrix");
  std::vector<int> sa = a, sb = b;
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  if (std::adjacent_find(sa.begin(), sa.end()) != sa.end() || std::adjacent_find(sb.begin(), sb.end()) != sb.end())
    return 0.0;
  // Wick's rule and Jacobi's complementary-minor identity.
  const int k = static_cast<int>(a.size());
  long index_sum = 0;
  for (int i = 0; i < k; ++i) index_sum += a[i] + b[i];
  int sign = sort_sign(a) * sort_sign(b) * ((k + index_sum) % 2 ? -1 : 1);
  return sign * det_without(Y, a, b);
}

double grassmann_moment_oracle(const Eigen::MatrixXd& Y, const std::vector<int>& a, const std::vector<int>& b) {
  const int n = static_cast<int>(Y.rows());
  if (n > 4) throw ComplexityGuard("exterior-algebra oracle limited to 4 blocks");
  const int g = 2 * n;
  Exterior e = exp_action(Y);
  for (size_t i = 0; i < a.size(); ++i)
    e = e * (Exterior::generator(g, 2 * a[i]) * Exterior::generator(g, 2 * b[i] + 1));
  return berezin(e, n);
}

bool hardcore_indicator(const BlockSliceSets& sets) {
  for (const auto& block : sets)
    for (size_t i = 0; i < block.size(); ++i)
      for (size_t j = i + 1; j < block.size(); ++j)
        for (int x : block[i])
          if (block[j].count(x)) return false;
  return true;
}

double fermionic_forest_integral(const Forest& fermionic, const FermionicBlockMatrix& Y, const BlockSliceSets& sets) {
  validate_sets(fermionic, Y, sets);
  if (!hardcore_indicator(sets)) return 0.0;
  const int k = static_cast<int>(fermionic.edges.size());
  double total = 0.0;
  for (int mask = 0; mask < (1 << k); ++mask) {
    std::vector<int> a, b;
    for (int e = 0; e < k; ++e) {
      auto [x, y] = fermionic.edges[e];
      if (mask >> e & 1) std::swap(x, y);
      a.push_back(x);
      b.push_back(y);
    }
    total += grassmann_moment(Y.Y, a, b);
  }
  return total;
}

double fermionic_forest_integral_oracle(const Forest& fermionic, const FermionicBlockMatrix& Y,
                                        const BlockSliceSets& sets) {
  validate_sets(fermionic, Y, sets);
  const int n = Y.size();
  if (n > 4) throw ComplexityGuard("exterior-algebra oracle limited to 4 blocks");
  const int g = 2 * n;
  Exterior e = exp_action(Y.Y);
  for (const auto& [x, y] : fermionic.edges) {
    Exterior edge = Exterior::generator(g, 2 * x) * Exterior::generator(g, 2 * y + 1) +
                    Exterior::generator(g, 2 * y) * Exterior::generator(g, 2 * x + 1);
    e = e * edge;
  }
  // Hardcore constraint by direct pairwise comparison of slice sets.
  for (const auto& block : sets)
    for (size_t i = 0; i < block.size(); ++i)
      for (size_t j = 0; j < block.size(); ++j) {
        if (i == j) continue;
        std::vector<int> common;
        std::set_intersection(block[i].begin(), block[i].end(), block[j].begin(), block[j].end(),
                              std::back_inserter(common));
        if (!common.empty()) return 0.0;
      }
  return berezin(e, n);
}

}  // namespace gw
