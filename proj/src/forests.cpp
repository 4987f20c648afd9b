#include "gw/forests.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/quadrature/gauss.hpp>

#include "gw/errors.hpp"

namespace gw {

namespace {

struct UnionFind {
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[a] = b;
    return true;
  }
  std::vector<int> parent;
};

void check_size(int n, int limit, const char* what) {
  if (n < 1) throw ArgumentError("vertex count must be positive");
  if (n > limit) throw ComplexityGuard(what);
}

// For every pair (i<j): the forest edge indices on its path, or a flag for
// disconnected pairs.
struct PathTable {
  std::vector<std::vector<int>> paths;
  std::vector<bool> connected;
};

PathTable path_table(const Forest& f) {
  PathTable t;
  for (const auto& [i, j] : all_pairs(f.n)) {
    std::vector<int> p;
    bool ok = f.path(i, j, p);
    t.paths.push_back(p);
    t.connected.push_back(ok);
  }
  return t;
}

std::vector<int> forest_pairs(const Forest& f) {
  std::vector<int> out;
  for (const auto& [a, b] : f.edges) out.push_back(pair_index(a, b, f.n));
  return out;
}

}  // namespace

int pair_index(int i, int j, int n) {
  if (i > j) std::swap(i, j);
  if (i == j || i < 0 || j >= n) throw ArgumentError("invalid vertex pair");
  return i * n - i * (i + 1) / 2 + (j - i - 1);
}

std::vector<Edge> all_pairs(int n) {
  std::vector<Edge> out;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) out.emplace_back(i, j);
  return out;
}

bool Forest::is_acyclic() const {
  UnionFind uf(n);
  for (const auto& [a, b] : edges)
    if (!uf.unite(a, b)) return false;
  return true;
}

bool Forest::path(int i, int j, std::vector<int>& out) const {
  out.clear();
  if (i == j) return true;
  // Depth-first search recording the edge used to reach each vertex.
  std::vector<int> via(n, -1), prev(n, -1);
  std::vector<bool> seen(n, false);
  std::vector<int> stack{i};
  seen[i] = true;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int e = 0; e < static_cast<int>(edges.size()); ++e) {
      auto [a, b] = edges[e];
      int u = a == v ? b : (b == v ? a : -1);
      if (u < 0 || seen[u]) continue;
      seen[u] = true;
      via[u] = e;
      prev[u] = v;
      stack.push_back(u);
    }
  }
  if (!seen[j]) return false;
  for (int v = j; v != i; v = prev[v]) out.push_back(via[v]);
  std::reverse(out.begin(), out.end());
  return true;
}

std::vector<int> Forest::component_labels() const {
  UnionFind uf(n);
  for (const auto& [a, b] : edges) uf.unite(a, b);
  std::vector<int> label(n, -1);
  int next = 0;
  std::vector<int> out(n);
  for (int v = 0; v < n; ++v) {
    int r = uf.find(v);
    if (label[r] < 0) label[r] = next++;
    out[v] = label[r];
  }
  return out;
}

void enumerate_forests(int n, const std::function<void(const Forest&)>& visit) {
  check_size(n, 6, "forest enumeration limited to 6 vertices");
  const auto pairs = all_pairs(n);
  const int m = static_cast<int>(pairs.size());
  for (long mask = 0; mask < (1L << m); ++mask) {
    Forest f;
    f.n = n;
    UnionFind uf(n);
    bool ok = true;
    for (int e = 0; e < m && ok; ++e)
      if (mask >> e & 1) {
        f.edges.push_back(pairs[e]);
        ok = uf.unite(pairs[e].first, pairs[e].second);
      }
    if (ok) visit(f);
  }
}

long count_forests(int n) {
  long c = 0;
  enumerate_forests(n, [&](const Forest&) { ++c; });
  return c;
}

EdgePolynomial EdgePolynomial::monomial(int n, const std::vector<int>& exponents, Rational coeff) {
  if (static_cast<int>(exponents.size()) != n * (n - 1) / 2) throw ArgumentError("one exponent per vertex pair");
  EdgePolynomial p;
  p.n = n;
  if (coeff != 0) p.terms[exponents] = coeff;
  return p;
}

EdgePolynomial EdgePolynomial::derivative(int pair) const {
  EdgePolynomial d;
  d.n = n;
  for (const auto& [e, c] : terms) {
    if (e[pair] == 0) continue;
    auto f = e;
    f[pair] -= 1;
    d.terms[f] += c * e[pair];
  }
  for (auto it = d.terms.begin(); it != d.terms.end();) it = it->second == 0 ? d.terms.erase(it) : std::next(it);
  return d;
}

Rational EdgePolynomial::at_ones() const {
  Rational s = 0;
  for (const auto& [e, c] : terms) s += c;
  return s;
}

int EdgePolynomial::degree() const {
  int d = 0;
  for (const auto& [e, c] : terms) d = std::max(d, std::accumulate(e.begin(), e.end(), 0));
  return d;
}

Rational bkar_forest_term(const EdgePolynomial& f, const Forest& forest) {
  if (forest.n != f.n) throw ArgumentError("forest and polynomial vertex counts differ");
  EdgePolynomial g = f;
  for (int p : forest_pairs(forest)) g = g.derivative(p);
  const int k = static_cast<int>(forest.edges.size());
  const PathTable table = path_table(forest);
  std::vector<int> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::vector<int> rank(k);
  Rational total = 0;
  do {
    // order[r] is the edge of rank r; rank 0 carries the smallest w.
    for (int r = 0; r < k; ++r) rank[order[r]] = r;
    for (const auto& [e, c] : g.terms) {
      std::vector<int> power(k, 0);
      bool vanishes = false;
      for (size_t p = 0; p < e.size() && !vanishes; ++p) {
        if (e[p] == 0) continue;
        if (!table.connected[p]) {
          vanishes = true;
          break;
        }
        int lowest = k;
        for (int edge : table.paths[p]) lowest = std::min(lowest, rank[edge]);
        power[lowest] += e[p];
      }
      if (vanishes) continue;
      // Integral of prod u_r^{power_r} over 0 < u_0 < ... < u_{k-1} < 1.
      Rational value = c;
      int acc = 0;
      for (int r = 0; r < k; ++r) {
        acc += power[r] + 1;
        value /= acc;
      }
      total += value;
    }
  } while (std::next_permutation(order.begin(), order.end()));
  return total;
}

Rational bkar_evaluate(const EdgePolynomial& f) {
  check_size(f.n, 4, "exact interpolation formula limited to 4 vertices");
  Rational total = 0;
  enumerate_forests(f.n, [&](const Forest& forest) { total += bkar_forest_term(f, forest); });
  return total;
}

double bkar_evaluate_smooth(int n, const SmoothEdgeFunction& f) {
  check_size(n, 4, "smooth interpolation formula limited to 4 vertices");
  using GL = boost::math::quadrature::gauss<double, 15>;
  double total = 0.0;
  enumerate_forests(n, [&](const Forest& forest) {
    const int k = static_cast<int>(forest.edges.size());
    const PathTable table = path_table(forest);
    const std::vector<int> vars = forest_pairs(forest);
    std::vector<double> w(k, 0.0), x(table.paths.size(), 0.0);
    auto integrand = [&]() {
      for (size_t p = 0; p < table.paths.size(); ++p) {
        if (!table.connected[p]) {
          x[p] = 0.0;
          continue;
        }
        double m = 1.0;
        for (int e : table.paths[p]) m = std::min(m, w[e]);
        x[p] = m;
      }
      return f(x, vars);
    };
    std::vector<int> order(k);
    std::iota(order.begin(), order.end(), 0);
    do {
      // Nested integration over u_{k-1} in [0,1], u_{r} in [0, u_{r+1}].
      std::function<double(int, double)> level = [&](int r, double upper) -> double {
        if (r < 0) return integrand();
        return GL::integrate(
            [&](double u) {
              w[order[r]] = u;
              return level(r - 1, u);
            },
            0.0, upper);
      };
      total += level(k - 1, 1.0);
    } while (std::next_permutation(order.begin(), order.end()));
  });
  if (!std::isfinite(total)) throw NumericalFailure("interpolation quadrature produced a non-finite value");
  return total;
}

Eigen::MatrixXd replica_covariance(const Forest& forest, const std::vector<double>& w) {
  if (w.size() != forest.edges.size()) throw ArgumentError("one weight per forest edge");
  for (double x : w)
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("weights must lie in [0, 1]");
  if (!forest.is_acyclic()) throw ArgumentError("edge set is not a forest");
  const int n = forest.n;
  Eigen::MatrixXd X = Eigen::MatrixXd::Identity(n, n);
  std::vector<int> p;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double v = 0.0;
      if (forest.path(i, j, p)) {
        v = 1.0;
        for (int e : p) v = std::min(v, w[e]);
      }
      X(i, j) = X(j, i) = v;
    }
  if (n > 0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(X, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-12) throw InvariantViolation("replica covariance is not positive semi-definite");
  }
  return X;
}

void enumerate_spanning_trees(int n, const std::function<void(const Forest&)>& visit) {
  check_size(n, 6, "tree enumeration limited to 6 vertices");
  enumerate_forests(n, [&](const Forest& f) {
    if (static_cast<int>(f.edges.size()) == n - 1) visit(f);
  });
}

void enumerate_two_level_trees(int n, const std::function<void(const ColoredTree&)>& visit) {
  enumerate_spanning_trees(n, [&](const Forest& tree) {
    const int k = n - 1;
    for (int mask = 0; mask < (1 << k); ++mask) {
      ColoredTree t{tree, std::vector<int>(k)};
      for (int e = 0; e < k; ++e) t.colors[e] = mask >> e & 1;
      visit(t);
    }
  });
}

Jungle jungle_of(const ColoredTree& t) {
  Jungle j;
  j.bosonic.n = t.tree.n;
  for (size_t e = 0; e < t.tree.edges.size(); ++e)
    if (t.colors[e] == 0) j.bosonic.edges.push_back(t.tree.edges[e]);
  j.block_of = j.bosonic.component_labels();
  j.blocks = j.block_of.empty() ? 0 : *std::max_element(j.block_of.begin(), j.block_of.end()) + 1;
  j.fermionic.n = j.blocks;
  for (size_t e = 0; e < t.tree.edges.size(); ++e)
    if (t.colors[e] == 1) {
      int a = j.block_of[t.tree.edges[e].first], b = j.block_of[t.tree.edges[e].second];
      if (a == b) throw InvariantViolation("fermionic edge inside a bosonic block");
      j.fermionic.edges.emplace_back(std::min(a, b), std::max(a, b));
    }
  if (!j.fermionic.is_acyclic()) throw InvariantViolation("fermionic edges do not form a forest over blocks");
  return j;
}

BigInt count_multi_level_trees(int m, int n) {
  if (n < 1 || m < 1) throw ArgumentError("counts need n >= 1 and m >= 1");
  if (n == 1) return 1;
  BigInt r = 1;
  for (int k = 0; k < n - 1; ++k) r *= m;
  for (int k = 0; k < n - 2; ++k) r *= n;
  return r;
}

BigInt count_two_level_trees(int n) { return count_multi_level_trees(2, n); }

long enumerated_multi_level_trees(int m, int n) {
  if (m < 1) throw ArgumentError("need at least one level");
  long count = 0;
  enumerate_spanning_trees(n, [&](const Forest& tree) {
    // Odometer over edge colours 0..m-1.
    std::vector<int> colors(tree.edges.size(), 0);
    while (true) {
      ++count;
      size_t e = 0;
      while (e < colors.size() && ++colors[e] == m) colors[e++] = 0;
      if (e == colors.size()) break;
    }
  });
  return count;
}

}  // namespace gw
