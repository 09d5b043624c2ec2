#pragma once

#include <string>
#include <utility>
#include <vector>

#include "rwsa/jet_poly.hpp"
#include "rwsa/parametrix.hpp"

namespace rwsa {

/// prod_k Gamma((alpha_k + 1)/2) over even components; zero if any is odd.
inline Scalar moment(const Alpha& a) {
  Scalar m(1);
  for (int x : a) {
    if (x < 0) throw std::invalid_argument("moment: negative index");
    if (x % 2) return Scalar();
    m = m * gamma_half(static_cast<unsigned>(x / 2));
  }
  return m;
}

/// prod_k (g^kk)^(-alpha_k/2) for even alpha.
inline SymExpr metric_weight(const SymbolTable& s, const Alpha& a) {
  SymExpr w = sym::one();
  for (int k = 0; k < 4; ++k) {
    if (a[k] % 2) throw std::invalid_argument("metric_weight: odd index");
    if (a[k]) w = w * s.g_inv[k].monomial_pow(-a[k] / 2);
  }
  return w;
}

/// Sums moment(alpha)/(j-1)! tr(r_{n,j,alpha}) times the metric weight.
/// Accepts full nodes or their unit-blade parts.
class TraceDensityBuilder {
 public:
  explicit TraceDensityBuilder(const SymbolTable& s) : table_(s) {}

  void add(const NodeKey& k, const SymExpr& r) {
    if (!k.alpha_even() || r.is_zero()) return;
    const SymExpr unit = r.blade_part(kUnitBlade);
    if (unit.is_zero()) return;
    const Scalar c = moment(k.alpha);
    if (c.sqrt_pi_exp() != kMomentSqrtPiExp) throw invariant_violation("moment with unexpected power of pi");
    // Trace of the unit blade is 4.
    const Gaussian scale = c.value() * Gaussian(Rational(Integer(4), factorial(static_cast<unsigned>(k.j - 1))));
    acc_.add_product(metric_weight(table_, k.alpha), unit, scale);
  }

  SymExpr finish() { return Scalar(Gaussian(1), kMomentSqrtPiExp) * acc_.finish(); }

  static constexpr int kMomentSqrtPiExp = 4;

 private:
  const SymbolTable& table_;
  TermAccumulator acc_;
};

inline SymExpr trace_density(const SymbolTable& s, const MemoTable& memo, int n) {
  TraceDensityBuilder b(s);
  const auto& lv = memo.level(n);
  for (std::size_t i = 0; i < lv.keys.size(); ++i) b.add(lv.keys[i], lv.values[i]);
  return b.finish();
}

inline SymExpr trace_density(const SymbolTable& s, const std::vector<std::pair<NodeKey, SymExpr>>& nodes) {
  TraceDensityBuilder b(s);
  for (const auto& [k, v] : nodes) b.add(k, v);
  return b.finish();
}

inline std::string jet_key_string(const TermKey& k) {
  std::string s = "[";
  int last = 0;
  for (int i = 0; i < kJetSlots; ++i)
    if (k.jet(i)) last = i + 1;
  for (int i = 0; i < last; ++i) s += (i ? "," : "") + std::to_string(k.jet(i));
  return s + "]";
}

/// Density evaluated at an exact angle point. The sqrt(d) part must cancel.
inline SymExpr evaluate_density(const SymExpr& density, const AnglePoint& p) {
  SurdExpr v = eval_angles(density, p);
  if (!v.surd.is_zero())
    throw invariant_violation("trace density keeps a sqrt(" + std::to_string(p.d) + ") part at " + p.label +
                              ", first at jets " + jet_key_string(v.surd.terms().front().key));
  return std::move(v.rational);
}

inline SymExpr assemble_trace_en(int n, const SymbolTable& s, const MemoTable& memo, const AnglePoint& p) {
  return evaluate_density(trace_density(s, memo, n), p);
}

struct EtaCheck {
  bool ok = false;
  std::string detail;
  SymExpr at_a;
};

/// Compares the density at the table's two exact angle points.
inline EtaCheck eta_independence(const SymExpr& density, const SymbolTable& s) {
  EtaCheck r;
  const SurdExpr a = eval_angles(density, s.point_a);
  const SurdExpr b = eval_angles(density, s.point_b);
  r.at_a = a.rational;
  if (!a.surd.is_zero()) {
    r.detail = "sqrt part at " + s.point_a.label + ", jets " + jet_key_string(a.surd.terms().front().key);
    return r;
  }
  if (!b.surd.is_zero()) {
    r.detail = "sqrt part at " + s.point_b.label + ", jets " + jet_key_string(b.surd.terms().front().key);
    return r;
  }
  const SymExpr diff = a.rational - b.rational;
  if (!diff.is_zero()) {
    const auto& t = diff.terms().front();
    r.detail = s.point_a.label + " and " + s.point_b.label + " differ at jets " + jet_key_string(t.key) + ": " +
               a.rational.coeff(t.key).str() + " vs " + b.rational.coeff(t.key).str();
    return r;
  }
  r.ok = true;
  r.detail = "equal at " + s.point_a.label + " and " + s.point_b.label;
  return r;
}

inline bool eta_independence_check(int n, const SymbolTable& s, const MemoTable& memo) {
  return eta_independence(trace_density(s, memo, n), s).ok;
}

/// a_n = tr(e_n) a^3 V / (16 pi^4) with V the angular volume; the pi powers
/// must cancel and the result must be real rational.
inline JetRationalPoly normalize_heat_coefficient(const SymExpr& tr_en, const SymbolTable& s, int n) {
  if (tr_en.is_zero()) return {};
  const Scalar factor(Gaussian(s.angular_volume.coeff / Rational(16)), 2 * s.angular_volume.pi_power - 8);
  Mono a3;
  a3.jets = {3};
  const SymExpr v = factor * (SymExpr::monomial(Scalar(1), a3) * tr_en);
  JetRationalPoly p = JetRationalPoly::from_sym_expr(v, "a_" + std::to_string(n));
  if (n % 2 && !p.is_zero()) throw invariant_violation("odd heat coefficient a_" + std::to_string(n) + " is nonzero");
  return p;
}

inline JetRationalPoly a_term(int n, const SymbolTable& s, const MemoTable& memo) {
  return normalize_heat_coefficient(assemble_trace_en(n, s, memo, s.point_a), s, n);
}

struct LevelAssembly {
  int n = 0;
  EtaCheck eta;
  JetRationalPoly a;
};

/// Eta check plus normalization; throws if the check fails.
inline LevelAssembly assemble_level(int n, const SymExpr& density, const SymbolTable& s) {
  LevelAssembly r;
  r.n = n;
  r.eta = eta_independence(density, s);
  if (!r.eta.ok) throw invariant_violation("a_" + std::to_string(n) + " (" + s.name + "): " + r.eta.detail);
  r.a = normalize_heat_coefficient(r.eta.at_a, s, n);
  return r;
}

/// Conventional denominator a^(n-3) (the Q-form); a_0 needs a^-3, i.e. Q = 1/2.
inline int q_form_power(int n) { return n - 3; }

}  // namespace rwsa
