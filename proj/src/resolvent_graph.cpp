#include "gw/resolvent_graph.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <sstream>

#include "gw/direct.hpp"
#include "gw/errors.hpp"

namespace gw {

namespace {

Factor res() { return {FactorKind::resolvent}; }
Factor rm1() { return {FactorKind::resolvent_minus_one}; }
Factor prop(int mark) { return {FactorKind::propagator, mark}; }
Factor cross(int mark) { return {FactorKind::crossing, mark}; }
Factor tad(int mark) { return {FactorKind::tadpole, mark}; }
Factor hk(int line, int end, HookSide side = HookSide::both) {
  return {FactorKind::hook, -1, line, end, side};
}

Term make(Rational coeff, std::vector<ResolventChain> traces, int lines, std::string group) {
  Term t;
  t.coefficient = std::move(coeff);
  t.coupling_power = 1;
  t.traces = std::move(traces);
  t.lines = lines;
  t.group = std::move(group);
  return t;
}

bool is_resolvent(const Factor& f) {
  return f.kind == FactorKind::resolvent || f.kind == FactorKind::resolvent_minus_one;
}

Term shifted(const Term& t, int line_offset) {
  Term r = t;
  for (auto& tr : r.traces)
    for (auto& f : tr)
      if (f.kind == FactorKind::hook) f.line += line_offset;
  return r;
}

Term product(const Term& f, const Term& g, std::string group) {
  Term h = shifted(g, f.lines);
  Term r = f;
  r.coefficient *= g.coefficient;
  r.coupling_power += g.coupling_power;
  r.traces.insert(r.traces.end(), h.traces.begin(), h.traces.end());
  r.lines = f.lines + g.lines;
  r.group = std::move(group);
  return r;
}

// Replace the factor at (trace, pos) by a sequence.
Term splice(const Term& t, int tr, int pos, const ResolventChain& with) {
  Term r = t;
  auto& chain = r.traces[tr];
  chain.erase(chain.begin() + pos);
  chain.insert(chain.begin() + pos, with.begin(), with.end());
  return r;
}

struct Slot {
  int trace;
  int pos;
};

std::vector<Slot> resolvent_slots(const Term& t) {
  std::vector<Slot> out;
  for (int i = 0; i < static_cast<int>(t.traces.size()); ++i)
    for (int j = 0; j < static_cast<int>(t.traces[i].size()); ++j)
      if (is_resolvent(t.traces[i][j])) out.push_back({i, j});
  return out;
}

// Derivative in the parameter of a new marked slice (mark 1), after
// integration by parts against the Gaussian measure.
void derive(const Term& f, bool renormalized, std::vector<Term>& out) {
  const int nl = f.lines;
  const int lines = nl + 1;
  const Rational half(1, 2);

  Amplitude first = renormalized ? order1_terms(1) : order1_unrenormalized_terms(1);
  for (const auto& g : first.terms) out.push_back(product(f, g, "G2_disconnected"));

  auto with_new_trace = [&](const Term& base, const ResolventChain& extra, Rational coeff,
                            const std::string& group) {
    Term r = base;
    r.traces.push_back(extra);
    r.coefficient = f.coefficient * coeff;
    r.coupling_power = f.coupling_power + 1;
    r.lines = lines;
    r.group = group;
    return r;
  };
  // Crossing and tadpole insertions consume the new line internally.
  auto rescaled = [&](Term r, Rational coeff, const std::string& group, bool uses_line = true) {
    r.coefficient = f.coefficient * coeff;
    r.coupling_power = f.coupling_power + 1;
    r.lines = uses_line ? lines : nl;
    r.group = group;
    return r;
  };

  const auto slots = resolvent_slots(f);
  for (const auto& s : slots) {
    out.push_back(with_new_trace(splice(f, s.trace, s.pos, {res(), prop(-1), hk(nl, 1), res()}),
                                 {rm1(), prop(1), hk(nl, 0)}, -half, "chain_marked_vertex"));
    out.push_back(with_new_trace(splice(f, s.trace, s.pos, {res(), prop(1), hk(nl, 0), res()}),
                                 {rm1(), prop(-1), hk(nl, 1)}, -half, "chain_insertion_vertex"));
    Factor inner = renormalized ? rm1() : res();
    out.push_back(rescaled(
        splice(f, s.trace, s.pos, {res(), prop(-1), hk(nl, 1), inner, prop(1), hk(nl, 0), res()}), -1,
        "full_trace_adjacent"));
    out.push_back(rescaled(
        splice(f, s.trace, s.pos, {res(), prop(1), hk(nl, 0), inner, prop(-1), hk(nl, 1), res()}), -1,
        "full_trace_adjacent"));
    if (renormalized) {
      out.push_back(rescaled(splice(f, s.trace, s.pos, {res(), prop(-1), cross(1), res()}), -1,
                             "nonplanar_crossing", false));
      out.push_back(rescaled(splice(f, s.trace, s.pos, {res(), prop(1), cross(-1), res()}), -1,
                             "nonplanar_crossing", false));
    } else {
      out.push_back(rescaled(splice(f, s.trace, s.pos, {res(), prop(-1), tad(1), res()}), 1,
                             "tadpole_insertion", false));
      out.push_back(rescaled(splice(f, s.trace, s.pos, {res(), prop(1), tad(-1), res()}), 1,
                             "tadpole_insertion", false));
    }
    for (const auto& s2 : slots) {
      if (s2.trace == s.trace && s2.pos == s.pos) continue;
      // Splice the later position first so indices stay valid.
      Term r = f;
      if (s2.trace == s.trace && s2.pos > s.pos) {
        r = splice(r, s2.trace, s2.pos, {res(), prop(-1), hk(nl, 1), res()});
        r = splice(r, s.trace, s.pos, {res(), prop(1), hk(nl, 0), res()});
      } else {
        r = splice(r, s.trace, s.pos, {res(), prop(1), hk(nl, 0), res()});
        r = splice(r, s2.trace, s2.pos, {res(), prop(-1), hk(nl, 1), res()});
      }
      out.push_back(rescaled(r, -1, "slot_pair"));
    }
  }

  for (int i = 0; i < static_cast<int>(f.traces.size()); ++i)
    for (int j = 0; j < static_cast<int>(f.traces[i].size()); ++j) {
      const Factor& x = f.traces[i][j];
      bool marks_t = (x.kind == FactorKind::propagator || x.kind == FactorKind::crossing ||
                      x.kind == FactorKind::tadpole) &&
                     x.mark == -1;
      if (!marks_t) continue;
      Term r = f;
      r.traces[i][j].mark = 1;
      r.group = "G1_marking";
      out.push_back(r);
    }
}

std::string token(const Factor& f, const std::vector<int>& relabel, const std::vector<int>& flip) {
  std::ostringstream os;
  switch (f.kind) {
    case FactorKind::resolvent: os << "R"; break;
    case FactorKind::resolvent_minus_one: os << "Q"; break;
    case FactorKind::propagator: os << "C" << f.mark; break;
    case FactorKind::crossing: os << "X" << f.mark; break;
    case FactorKind::tadpole: os << "T" << f.mark; break;
    case FactorKind::hook:
      os << "H" << relabel[f.line] << (f.end ^ flip[f.line]) << static_cast<int>(f.side);
      break;
  }
  os << ".";
  return os.str();
}

std::string canonical_key(const Term& t) {
  std::vector<int> perm(t.lines);
  for (int i = 0; i < t.lines; ++i) perm[i] = i;
  std::string best;
  bool first = true;
  do {
    for (int mask = 0; mask < (1 << t.lines); ++mask) {
      std::vector<int> flip(t.lines);
      for (int i = 0; i < t.lines; ++i) flip[i] = (mask >> i) & 1;
      std::vector<std::string> traces;
      for (const auto& tr : t.traces) {
        std::vector<std::string> toks;
        for (const auto& f : tr) toks.push_back(token(f, perm, flip));
        std::string m;
        for (size_t r = 0; r < toks.size(); ++r) {
          std::string s;
          for (size_t k = 0; k < toks.size(); ++k) s += toks[(r + k) % toks.size()];
          if (r == 0 || s < m) m = s;
        }
        traces.push_back("[" + m + "]");
      }
      std::sort(traces.begin(), traces.end());
      std::string key = std::to_string(t.coupling_power) + ":";
      for (const auto& s : traces) key += s;
      if (first || key < best) best = key;
      first = false;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Generic evaluation: per trace, cache products of the hook-free segments and
// sum over the sigma-line assignments.
template <class Alg>
typename Alg::Scalar evaluate_generic(const Term& term, const Alg& alg) {
  using Op = typename Alg::Op;
  using Scalar = typename Alg::Scalar;
  const int n = alg.n();
  const int pairs = n * n;
  const int L = term.lines;

  struct Prepared {
    std::vector<int> lines;
    std::vector<Factor> hooks;
    std::vector<Op> segments;  // segment after each hook
    std::optional<Scalar> closed;  // value when there is no hook
    bool has_hooks = false;
  };
  std::vector<Prepared> prepared;
  for (const auto& chain : term.traces) {
    Prepared p{};
    int start = -1;
    for (int i = 0; i < static_cast<int>(chain.size()); ++i)
      if (chain[i].kind == FactorKind::hook) {
        start = i;
        break;
      }
    if (start < 0) {
      Op acc = alg.identity();
      for (const auto& f : chain) acc = alg.mul(acc, alg.factor(f));
      p.closed = alg.trace(acc);
      prepared.push_back(std::move(p));
      continue;
    }
    p.has_hooks = true;
    const int len = static_cast<int>(chain.size());
    Op acc = alg.identity();
    bool open = false;
    for (int k = 0; k < len; ++k) {
      const Factor& f = chain[(start + k) % len];
      if (f.kind == FactorKind::hook) {
        if (open) p.segments.push_back(acc);
        p.hooks.push_back(f);
        acc = alg.identity();
        open = true;
        if (std::find(p.lines.begin(), p.lines.end(), f.line) == p.lines.end()) p.lines.push_back(f.line);
      } else {
        acc = alg.mul(acc, alg.factor(f));
      }
    }
    p.segments.push_back(acc);
    prepared.push_back(std::move(p));
  }

  // Tabulate each trace over the assignments of its own lines.
  std::vector<std::vector<Scalar>> tables(prepared.size());
  for (size_t ti = 0; ti < prepared.size(); ++ti) {
    auto& p = prepared[ti];
    if (!p.has_hooks) continue;
    int size = 1;
    for (size_t k = 0; k < p.lines.size(); ++k) size *= pairs;
    tables[ti].reserve(size);
    std::vector<int> assign(L, 0);
    for (int idx = 0; idx < size; ++idx) {
      int rest = idx;
      for (size_t k = 0; k < p.lines.size(); ++k) {
        assign[p.lines[k]] = rest % pairs;
        rest /= pairs;
      }
      Op acc = alg.identity();
      for (size_t h = 0; h < p.hooks.size(); ++h) {
        int ab = assign[p.hooks[h].line];
        int a = ab / n, b = ab % n;
        if (p.hooks[h].end == 1) std::swap(a, b);
        acc = alg.mul_hook(acc, p.hooks[h].side, a, b);
        acc = alg.mul(acc, p.segments[h]);
      }
      tables[ti].push_back(alg.trace(acc));
    }
  }

  int total = 1;
  for (int k = 0; k < L; ++k) total *= pairs;
  Scalar sum = alg.zero();
  std::vector<int> assign(L, 0);
  for (int g = 0; g < total; ++g) {
    int rest = g;
    for (int k = 0; k < L; ++k) {
      assign[k] = rest % pairs;
      rest /= pairs;
    }
    Scalar prod = alg.one();
    for (size_t ti = 0; ti < prepared.size(); ++ti) {
      const auto& p = prepared[ti];
      if (!p.has_hooks) {
        prod = prod * *p.closed;
        continue;
      }
      int idx = 0;
      for (size_t k = p.lines.size(); k-- > 0;) idx = idx * pairs + assign[p.lines[k]];
      prod = prod * tables[ti][idx];
    }
    sum = sum + prod;
  }
  return alg.coefficient(term) * sum;
}

struct NumericAlgebra {
  using Op = GraphOp;
  using Scalar = cplx;
  const GraphContext& ctx;
  int n() const { return ctx.n; }
  Op identity() const { return Op::Identity(ctx.n * ctx.n, ctx.n * ctx.n); }
  Op mul(const Op& x, const Op& y) const { return x * y; }
  Scalar trace(const Op& x) const { return x.trace(); }
  Scalar zero() const { return 0.0; }
  Scalar one() const { return 1.0; }
  Op factor(const Factor& f) const {
    switch (f.kind) {
      case FactorKind::resolvent: return ctx.R;
      case FactorKind::resolvent_minus_one: return ctx.Rm1;
      case FactorKind::propagator: return ctx.prop.at(f.mark + 1);
      case FactorKind::crossing: return ctx.crossing.at(f.mark + 1);
      case FactorKind::tadpole: return ctx.tadpole.at(f.mark + 1);
      case FactorKind::hook: break;
    }
    throw InvariantViolation("hook evaluated as a plain factor");
  }
  // x * e_ab restricted to the requested border; e_ab E_pq = d_bp E_aq + d_qa E_pb.
  Op mul_hook(const Op& x, HookSide side, int a, int b) const {
    const int n = ctx.n;
    Op r = Op::Zero(x.rows(), x.cols());
    if (side != HookSide::right)
      for (int q = 0; q < n; ++q) r.col(b * n + q) += x.col(a * n + q);
    if (side != HookSide::left)
      for (int p = 0; p < n; ++p) r.col(p * n + a) += x.col(p * n + b);
    return r;
  }
  Scalar coefficient(const Term& t) const {
    return to_double(t.coefficient) * std::pow(ctx.c * ctx.c, t.coupling_power);
  }
};

struct SingleSiteAlgebra {
  using Op = BiSeries;
  using Scalar = BiSeries;
  int order;
  BiSeries resolvent;
  int n() const { return 1; }
  Op identity() const { return BiSeries::constant(order, GaussRational(1)); }
  Op mul(const Op& x, const Op& y) const { return x * y; }
  Scalar trace(const Op& x) const { return x; }
  Scalar zero() const { return BiSeries(order); }
  Scalar one() const { return identity(); }
  Op factor(const Factor& f) const {
    switch (f.kind) {
      case FactorKind::resolvent: return resolvent;
      case FactorKind::resolvent_minus_one: return resolvent - identity();
      case FactorKind::propagator: return identity();
      case FactorKind::crossing:
      case FactorKind::tadpole: return BiSeries::constant(order, GaussRational(2));
      case FactorKind::hook: break;
    }
    throw InvariantViolation("hook evaluated as a plain factor");
  }
  Op mul_hook(const Op& x, HookSide side, int, int) const {
    return x.scaled(GaussRational(side == HookSide::both ? 2 : 1));
  }
  Scalar coefficient(const Term& t) const {
    // c^2 power with coefficient.
    return BiSeries::monomial(order, 2 * t.coupling_power, 0, GaussRational(t.coefficient));
  }
};

}  // namespace

bool Amplitude::has_tadpole_factors() const {
  for (const auto& t : terms)
    for (const auto& tr : t.traces)
      for (const auto& f : tr)
        if (f.kind == FactorKind::tadpole) return true;
  return false;
}

int Amplitude::distinct_term_count() const {
  std::map<std::string, Rational> merged;
  for (const auto& t : terms) merged[canonical_key(t)] += t.coefficient;
  int count = 0;
  for (const auto& [k, v] : merged)
    if (v != 0) ++count;
  return count;
}

Amplitude order1_terms(int k) {
  const Rational half(1, 2), quarter(1, 4);
  Amplitude a;
  a.terms.push_back(make(-half, {{rm1(), prop(-1), hk(0, 1), rm1(), prop(k), hk(0, 0)}}, 1, "A"));
  a.terms.push_back(make(-quarter, {{rm1(), prop(k), hk(0, 0)}, {rm1(), prop(-1), hk(0, 1)}}, 1, "B"));
  a.terms.push_back(make(-half, {{rm1(), prop(-1), cross(k)}}, 0, "C"));
  a.terms.push_back(make(-half, {{rm1(), prop(k), cross(-1)}}, 0, "D"));
  a.terms.push_back(make(-half, {{prop(-1), cross(k)}}, 0, "E"));
  return a;
}

Amplitude order1_sided_terms(int k) {
  const Rational half(1, 2), quarter(1, 4);
  const HookSide L = HookSide::left, R = HookSide::right;
  Amplitude a;
  for (HookSide s : {L, R})
    a.terms.push_back(make(-half, {{rm1(), prop(-1), hk(0, 1, s), rm1(), prop(k), hk(0, 0, s)}}, 1,
                           "planar_renormalized"));
  for (HookSide s1 : {L, R})
    for (HookSide s2 : {L, R})
      a.terms.push_back(make(-quarter, {{rm1(), prop(k), hk(0, 0, s1)}, {rm1(), prop(-1), hk(0, 1, s2)}}, 1,
                             "planar_renormalized"));
  a.terms.push_back(make(-half, {{res(), prop(-1), hk(0, 1, L), res(), prop(k), hk(0, 0, R)}}, 1, "non_planar"));
  a.terms.push_back(make(-half, {{res(), prop(-1), hk(0, 1, R), res(), prop(k), hk(0, 0, L)}}, 1, "non_planar"));
  return a;
}

Amplitude order1_unrenormalized_terms(int k) {
  const Rational half(1, 2), quarter(1, 4);
  Amplitude a;
  a.terms.push_back(make(-half, {{res(), prop(-1), hk(0, 1), res(), prop(k), hk(0, 0)}}, 1, "A"));
  a.terms.push_back(make(-quarter, {{rm1(), prop(k), hk(0, 0)}, {rm1(), prop(-1), hk(0, 1)}}, 1, "B"));
  a.terms.push_back(make(half, {{rm1(), prop(k), tad(-1)}}, 0, "tadpole_insertion"));
  a.terms.push_back(make(half, {{rm1(), prop(-1), tad(k)}}, 0, "tadpole_insertion"));
  a.terms.push_back(make(half, {{prop(k), tad(-1)}}, 0, "counterterm_square"));
  return a;
}

Amplitude order2_terms() {
  Amplitude a;
  for (const auto& f : order1_terms(0).terms) derive(f, true, a.terms);
  return a;
}

Amplitude order2_unrenormalized_terms() {
  Amplitude a;
  for (const auto& f : order1_terms(0).terms) derive(f, false, a.terms);
  return a;
}

GraphContext::GraphContext(const Eigen::MatrixXcd& sigma, const Eigen::MatrixXd& propagator_t,
                           const std::vector<Eigen::MatrixXd>& marked, cplx c_)
    : n(static_cast<int>(sigma.rows())), c(c_) {
  const int d = n * n;
  if (d > kMaxGraphDim) throw UnsupportedDimension("graph amplitudes support matrix size up to 4");
  std::vector<Eigen::MatrixXd> props;
  props.push_back(propagator_t);
  props.insert(props.end(), marked.begin(), marked.end());
  for (const auto& x : props) {
    if (x.rows() != n || x.cols() != n) throw ArgumentError("propagator dimension mismatch");
    Eigen::VectorXd diag = propagator_diagonal(x);
    GraphOp pd = GraphOp::Zero(d, d);
    for (int k = 0; k < d; ++k) pd(k, k) = diag(k);
    prop.push_back(pd);
    GraphOp cr = GraphOp::Zero(d, d);
    for (int p = 0; p < n; ++p)
      for (int b = 0; b < n; ++b) cr(b * n + b, p * n + p) += 2.0 * x(p, b);
    crossing.push_back(cr);
    Eigen::VectorXd rows = x.rowwise().sum();
    GraphOp td = GraphOp::Zero(d, d);
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q) td(p * n + q, p * n + q) = rows(p) + rows(q);
    tadpole.push_back(td);
  }
  Eigen::MatrixXcd op = cplx(0.0, 1.0) * c * (Eigen::MatrixXcd(prop[0]) * hat_operator(sigma));
  op.diagonal().array() += 1.0;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(op);
  Eigen::MatrixXcd r = lu.inverse();
  if (!r.allFinite()) throw NumericalFailure("resolvent inversion failed");
  R = r;
  Rm1 = R - GraphOp::Identity(d, d);
}

cplx evaluate(const Term& term, const GraphContext& ctx) {
  return evaluate_generic(term, NumericAlgebra{ctx});
}

cplx evaluate(const Amplitude& amp, const GraphContext& ctx) {
  cplx sum = 0.0;
  for (const auto& t : amp.terms) sum += evaluate(t, ctx);
  return sum;
}

BiSeries evaluate_single_site(const Amplitude& amp, int order) {
  // 1/(1 + 2ics) = sum_k (-2i)^k c^k s^k
  BiSeries r(order);
  GaussRational pw(1);
  for (int k = 0; k <= order; ++k) {
    r.at(k, k) = pw;
    pw = pw * GaussRational(0, -2);
  }
  SingleSiteAlgebra alg{order, r};
  BiSeries sum(order);
  for (const auto& t : amp.terms) sum = sum + evaluate_generic(t, alg);
  return sum;
}

std::string describe(const Term& term) {
  std::ostringstream os;
  os << to_fraction_string(term.coefficient) << " c^" << 2 * term.coupling_power;
  std::vector<int> id(term.lines), none(term.lines, 0);
  for (int i = 0; i < term.lines; ++i) id[i] = i;
  for (const auto& tr : term.traces) {
    os << " tr[";
    for (const auto& f : tr) os << token(f, id, none);
    os << "]";
  }
  return os.str();
}

}  // namespace gw
