#include "gw/perturbation.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "gw/errors.hpp"

namespace gw {

namespace {

struct Slot {
  int row;
  int col;
  int vertex;
  int position;
  int vertex_size;
};

// Face structure of a contracted diagram, relabelled by first occurrence so
// that equal structures compare equal.
using FaceKey = std::vector<int>;

int find(std::vector<int>& p, int x) {
  while (p[x] != x) x = p[x] = p[p[x]];
  return x;
}

FaceKey face_key(const std::vector<Slot>& slots, int corners, const std::vector<int>& partner,
                 const std::vector<int>& t_corners) {
  std::vector<int> uf(corners);
  std::iota(uf.begin(), uf.end(), 0);
  for (size_t a = 0; a < slots.size(); ++a) {
    int b = partner[a];
    if (b < static_cast<int>(a)) continue;
    uf[find(uf, slots[a].row)] = find(uf, slots[b].col);
    uf[find(uf, slots[a].col)] = find(uf, slots[b].row);
  }
  std::vector<int> label(corners, -1);
  int faces = 0;
  auto lab = [&](int c) {
    int r = find(uf, c);
    if (label[r] < 0) label[r] = faces++;
    return label[r];
  };
  std::vector<std::pair<int, int>> edges;
  for (size_t a = 0; a < slots.size(); ++a) {
    if (partner[a] < static_cast<int>(a)) continue;
    int x = lab(slots[a].row), y = lab(slots[a].col);
    edges.emplace_back(std::min(x, y), std::max(x, y));
  }
  std::vector<int> tf;
  for (int c : t_corners) tf.push_back(lab(c));
  std::sort(edges.begin(), edges.end());
  std::sort(tf.begin(), tf.end());
  FaceKey key{faces};
  for (auto& e : edges) {
    key.push_back(e.first);
    key.push_back(e.second);
  }
  key.push_back(-1);
  key.insert(key.end(), tf.begin(), tf.end());
  return key;
}

Rational face_amplitude(const FaceKey& key, const Cutoff& cutoff, const std::vector<Rational>& tad) {
  int faces = key[0];
  size_t sep = std::find(key.begin() + 1, key.end(), -1) - key.begin();
  std::vector<std::pair<int, int>> edges;
  for (size_t i = 1; i < sep; i += 2) edges.emplace_back(key[i], key[i + 1]);
  int d = cutoff.dim();
  // Per-face weights; self-loops and T insertions fold into them, leaves get
  // summed into their neighbour, the remaining core is summed directly.
  std::vector<std::vector<Rational>> unary(faces, std::vector<Rational>(d, Rational(1)));
  for (size_t i = sep + 1; i < key.size(); ++i)
    for (int l = 0; l < d; ++l) unary[key[i]][l] *= tad[l];
  std::vector<bool> alive_edge(edges.size(), true), alive_face(faces, true);
  for (size_t e = 0; e < edges.size(); ++e)
    if (edges[e].first == edges[e].second) {
      for (int l = 0; l < d; ++l) unary[edges[e].first][l] *= Rational(1, 2 * l + 1);
      alive_edge[e] = false;
    }
  Rational constant = 1;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int f = 0; f < faces; ++f) {
      if (!alive_face[f]) continue;
      int deg = 0, last = -1;
      for (size_t e = 0; e < edges.size(); ++e)
        if (alive_edge[e] && (edges[e].first == f || edges[e].second == f)) {
          ++deg;
          last = static_cast<int>(e);
        }
      if (deg == 0) {
        Rational s = 0;
        for (int l = 0; l < d; ++l) s += unary[f][l];
        constant *= s;
        alive_face[f] = false;
        changed = true;
      } else if (deg == 1) {
        int x = edges[last].first == f ? edges[last].second : edges[last].first;
        for (int l = 0; l < d; ++l) {
          Rational s = 0;
          for (int k = 0; k < d; ++k) s += unary[f][k] / (l + k + 1);
          unary[x][l] *= s;
        }
        alive_edge[last] = false;
        alive_face[f] = false;
        changed = true;
      }
    }
  }
  std::vector<int> core;
  std::vector<int> pos(faces, -1);
  for (int f = 0; f < faces; ++f)
    if (alive_face[f]) {
      pos[f] = static_cast<int>(core.size());
      core.push_back(f);
    }
  if (core.empty()) return constant;
  std::vector<std::pair<int, int>> ce;
  for (size_t e = 0; e < edges.size(); ++e)
    if (alive_edge[e]) ce.emplace_back(pos[edges[e].first], pos[edges[e].second]);
  int nc = static_cast<int>(core.size());
  std::vector<int> lab(nc, 0);
  Rational total = 0;
  while (true) {
    BigInt den = 1;
    for (auto& e : ce) den *= lab[e.first] + lab[e.second] + 1;
    Rational term(BigInt(1), den);
    for (int i = 0; i < nc; ++i) term *= unary[core[i]][lab[i]];
    total += term;
    int p = 0;
    while (p < nc && ++lab[p] == d) lab[p++] = 0;
    if (p == nc) break;
  }
  return constant * total;
}

std::vector<Slot> quartic_slots(int order) {
  std::vector<Slot> s;
  for (int v = 0; v < order; ++v)
    for (int k = 0; k < 4; ++k) s.push_back({4 * v + k, 4 * v + (k + 1) % 4, v, k, 4});
  return s;
}

bool adjacent_self(const std::vector<Slot>& slots, int a, int b) {
  if (slots[a].vertex != slots[b].vertex || slots[a].vertex_size != 4) return false;
  int d = (slots[a].position - slots[b].position + 4) % 4;
  return d == 1 || d == 3;
}

void match(const std::vector<Slot>& slots, std::vector<int>& partner, bool admissible_only,
           const std::function<void(const std::vector<int>&)>& visit) {
  int first = -1;
  for (size_t i = 0; i < partner.size(); ++i)
    if (partner[i] < 0) {
      first = static_cast<int>(i);
      break;
    }
  if (first < 0) {
    visit(partner);
    return;
  }
  for (size_t j = first + 1; j < partner.size(); ++j) {
    if (partner[j] >= 0) continue;
    if (admissible_only && adjacent_self(slots, first, static_cast<int>(j))) continue;
    partner[first] = static_cast<int>(j);
    partner[j] = first;
    match(slots, partner, admissible_only, visit);
    partner[first] = partner[j] = -1;
  }
}

bool vertices_connected(const std::vector<Slot>& slots, const std::vector<int>& partner, int vertices) {
  std::vector<int> uf(vertices);
  std::iota(uf.begin(), uf.end(), 0);
  for (size_t a = 0; a < slots.size(); ++a) uf[find(uf, slots[a].vertex)] = find(uf, slots[partner[a]].vertex);
  int root = find(uf, 0);
  for (int v = 1; v < vertices; ++v)
    if (find(uf, v) != root) return false;
  return true;
}

Rational factorial(int n) {
  Rational f = 1;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

Rational prefactor(int n) {
  Rational p = 1;
  for (int k = 0; k < n; ++k) p *= Rational(-1, 4);
  return p / factorial(n);
}

void guard(int order, bool allow_large) {
  if (order < 1) throw ArgumentError("order must be at least 1");
  if (order > kMaxPairingOrder && !allow_large)
    throw ComplexityGuard("pairing enumeration above order 4 requires the override flag");
}

struct OrderSums {
  Rational connected = 0;
  Rational all = 0;
};

OrderSums admissible_sums(const Cutoff& cutoff, int order) {
  auto slots = quartic_slots(order);
  std::map<FaceKey, long> conn, disc;
  std::vector<int> partner(slots.size(), -1);
  match(slots, partner, true, [&](const std::vector<int>& p) {
    FaceKey k = face_key(slots, 4 * order, p, {});
    if (vertices_connected(slots, p, order))
      ++conn[k];
    else
      ++disc[k];
  });
  std::vector<Rational> none;
  OrderSums s;
  for (auto& [k, c] : conn) s.connected += Rational(c) * face_amplitude(k, cutoff, none);
  s.all = s.connected;
  for (auto& [k, c] : disc) s.all += Rational(c) * face_amplitude(k, cutoff, none);
  return s;
}

}  // namespace

std::vector<Rational> PowerSeries::with_constant() const {
  std::vector<Rational> v{0};
  v.insert(v.end(), coefficients.begin(), coefficients.end());
  return v;
}

long enumerate_pairings(int order, const std::function<void(const PairingDiagram&)>& visit, bool allow_large) {
  guard(order, allow_large);
  auto slots = quartic_slots(order);
  std::vector<int> partner(slots.size(), -1);
  long count = 0;
  PairingDiagram d;
  d.order = order;
  match(slots, partner, false, [&](const std::vector<int>& p) {
    d.partner = p;
    d.connected = vertices_connected(slots, p, order);
    d.wick_admissible = true;
    for (size_t a = 0; a < p.size(); ++a)
      if (adjacent_self(slots, static_cast<int>(a), p[a])) d.wick_admissible = false;
    ++count;
    visit(d);
  });
  return count;
}

Rational diagram_amplitude(const PairingDiagram& diagram, const Cutoff& cutoff) {
  auto slots = quartic_slots(diagram.order);
  if (diagram.partner.size() != slots.size()) throw ArgumentError("pairing size does not match order");
  return face_amplitude(face_key(slots, 4 * diagram.order, diagram.partner, {}), cutoff, {});
}

PowerSeries log_z_coefficients(const Cutoff& cutoff, int n_max, bool allow_large) {
  guard(n_max, allow_large);
  PowerSeries ps;
  ps.cutoff = cutoff.lambda_max;
  for (int n = 1; n <= n_max; ++n) ps.coefficients.push_back(prefactor(n) * admissible_sums(cutoff, n).connected);
  return ps;
}

std::vector<Rational> z_coefficients(const Cutoff& cutoff, int n_max, bool allow_large) {
  guard(n_max, allow_large);
  std::vector<Rational> z;
  for (int n = 1; n <= n_max; ++n) z.push_back(prefactor(n) * admissible_sums(cutoff, n).all);
  return z;
}

std::vector<Rational> z_coefficients_counterterm_species(const Cutoff& cutoff, int n_max) {
  guard(n_max, false);
  TadpoleTable tt(cutoff);
  const auto& tad = tt.t_values();
  std::vector<Rational> z;
  for (int n = 1; n <= n_max; ++n) {
    Rational sum = 0;
    int assignments = 1;
    for (int k = 0; k < n; ++k) assignments *= 3;
    for (int code = 0; code < assignments; ++code) {
      std::vector<Slot> slots;
      std::vector<int> tcorners;
      Rational weight = 1;
      int corners = 0;
      int c = code;
      for (int v = 0; v < n; ++v, c /= 3) {
        int species = c % 3;
        if (species == 0) {
          for (int k = 0; k < 4; ++k) slots.push_back({corners + k, corners + (k + 1) % 4, v, k, 4});
          corners += 4;
        } else if (species == 1) {
          // Tr(phi^2 T) = sum_{m,p} phi_mp phi_pm T_m
          slots.push_back({corners, corners + 1, v, 0, 2});
          slots.push_back({corners + 1, corners, v, 1, 2});
          tcorners.push_back(corners);
          corners += 2;
          weight *= -4;
        } else {
          weight *= 2 * tt.pi_value();
        }
      }
      if (slots.empty()) {
        sum += weight;
        continue;
      }
      std::map<FaceKey, long> keys;
      std::vector<int> partner(slots.size(), -1);
      match(slots, partner, false, [&](const std::vector<int>& p) { ++keys[face_key(slots, corners, p, tcorners)]; });
      Rational s = 0;
      for (auto& [k, cnt] : keys) s += Rational(cnt) * face_amplitude(k, cutoff, tad);
      sum += weight * s;
    }
    z.push_back(prefactor(n) * sum);
  }
  return z;
}

std::vector<Rational> series_log(const std::vector<Rational>& z) {
  size_t n_max = z.size();
  std::vector<Rational> l(n_max + 1, Rational(0)), zz(n_max + 1, Rational(0));
  for (size_t i = 0; i < n_max; ++i) zz[i + 1] = z[i];
  for (size_t n = 1; n <= n_max; ++n) {
    Rational s = zz[n];
    for (size_t k = 1; k < n; ++k) s -= Rational(static_cast<long>(k), static_cast<long>(n)) * l[k] * zz[n - k];
    l[n] = s;
  }
  return std::vector<Rational>(l.begin() + 1, l.end());
}

PowerSeries coefficient_oracle(const Cutoff& cutoff, int n_max) {
  if (cutoff.lambda_max != 0) throw ArgumentError("the moment oracle only covers cutoff 0");
  if (n_max < 1) throw ArgumentError("order must be at least 1");
  // <x^{2j}> = (2j-1)!!
  auto moment = [](int p) {
    if (p % 2) return Rational(0);
    Rational m = 1;
    for (int i = p - 1; i > 0; i -= 2) m *= i;
    return m;
  };
  std::vector<Rational> base{2, 0, -4, 0, 1};  // x^4 - 4x^2 + 2
  std::vector<Rational> power{1};
  std::vector<Rational> z;
  for (int k = 1; k <= n_max; ++k) {
    std::vector<Rational> next(power.size() + 4, Rational(0));
    for (size_t i = 0; i < power.size(); ++i)
      for (size_t j = 0; j < base.size(); ++j) next[i + j] += power[i] * base[j];
    power.swap(next);
    Rational e = 0;
    for (size_t i = 0; i < power.size(); ++i) e += power[i] * moment(static_cast<int>(i));
    z.push_back(prefactor(k) * e);
  }
  PowerSeries ps;
  ps.cutoff = 0;
  ps.coefficients = series_log(z);
  return ps;
}

TadpoleCancellationReport tadpole_cancellation_check(const Cutoff& cutoff) {
  TadpoleCancellationReport r;
  r.cutoff = cutoff.lambda_max;
  TadpoleTable tt(cutoff);
  r.planar_bare = 0;
  r.nonplanar_bare = 0;
  int admissible = 0;
  bool admissible_is_crossing = true;
  enumerate_pairings(1, [&](const PairingDiagram& d) {
    Rational a = diagram_amplitude(d, cutoff);
    bool crossing = d.partner[0] == 2;
    if (crossing)
      r.nonplanar_bare += a;
    else
      r.planar_bare += a;
    if (d.wick_admissible) {
      ++admissible;
      admissible_is_crossing = admissible_is_crossing && crossing;
    }
  });
  // <Tr(phi^2 T)> = sum_{m,p} C_mp T_m = Pi
  Rational tr2t = 0;
  for (int m = 0; m < cutoff.dim(); ++m)
    for (int p = 0; p < cutoff.dim(); ++p) tr2t += Rational(1, m + p + 1) * tt.t_values()[m];
  r.quadratic_counterterm = -4 * tr2t;
  r.constant_counterterm = 2 * tt.pi_value();
  r.cancelled_mass = r.planar_bare;
  r.survivor = r.planar_bare + r.nonplanar_bare + r.quadratic_counterterm + r.constant_counterterm;
  Rational diag = 0;
  for (int m = 0; m < cutoff.dim(); ++m) diag += Rational(1, (2 * m + 1) * (2 * m + 1));
  // The admissible route never attaches T weights, so a single crossing
  // diagram carrying sum_m C_mm^2 is the whole renormalized first order.
  r.structural = admissible == 1 && admissible_is_crossing && r.planar_bare + r.quadratic_counterterm + r.constant_counterterm == 0;
  r.survivor_matches = r.survivor == diag && r.nonplanar_bare == diag;
  r.bounded = to_double(r.survivor) / 4.0 < 0.30842513753404244;  // pi^2/32
  return r;
}

Rational renormalized_first_order_amplitude(const Cutoff& cutoff) {
  Rational total = 0;
  enumerate_pairings(1, [&](const PairingDiagram& d) {
    if (d.wick_admissible) total += diagram_amplitude(d, cutoff);
  });
  return total;
}

}  // namespace gw
