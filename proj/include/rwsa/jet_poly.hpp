#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "rwsa/sym_expr.hpp"

namespace rwsa {

/// Exponents of a, a', a'', ...; trailing zeros trimmed. Only entry 0 may be
/// negative.
using JetExponents = std::vector<int>;

inline JetExponents trim(JetExponents e) {
  while (!e.empty() && e.back() == 0) e.pop_back();
  return e;
}

/// Real-rational polynomial in the jets of a(t), Laurent in a itself. The
/// printing denominator a^aPower is a presentation choice; equality is on
/// the function.
class JetRationalPoly {
 public:
  JetRationalPoly() = default;

  /// Angle-free, blade-free SymExpr with real rational coefficients and no
  /// sqrt(pi) factor; anything else is a rationality violation.
  static JetRationalPoly from_sym_expr(const SymExpr& x, const std::string& what = "expression") {
    JetRationalPoly p;
    if (x.is_zero()) return p;
    if (x.sqrt_pi_exp() != 0)
      throw rationality_violation(what + ": residual sqrt(pi)^" + std::to_string(x.sqrt_pi_exp()));
    for (const auto& t : x.terms()) {
      if (t.key.blade() != kUnitBlade) throw invariant_violation(what + ": Clifford part left over");
      if (!t.key.angle_free()) throw invariant_violation(what + ": angle dependence left over");
      if (!t.coeff.is_real()) throw rationality_violation(what + ": imaginary coefficient " + t.coeff.str());
      JetExponents e(kJetSlots);
      for (int k = 0; k < kJetSlots; ++k) e[k] = t.key.jet(k);
      p.add(trim(std::move(e)), t.coeff.re);
    }
    return p;
  }

  void add(const JetExponents& e, const Rational& c) {
    if (c.is_zero()) return;
    for (std::size_t k = 1; k < e.size(); ++k)
      if (e[k] < 0) throw invariant_violation("negative power of a derivative of a(t)");
    JetExponents key = trim(e);
    auto it = terms_.find(key);
    if (it == terms_.end()) {
      terms_.emplace(std::move(key), c);
      return;
    }
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }

  const std::map<JetExponents, Rational>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  Rational coeff(const JetExponents& e) const {
    auto it = terms_.find(trim(e));
    return it == terms_.end() ? Rational(0) : it->second;
  }

  /// Smallest d with f * a^d polynomial (never below 0).
  int min_denominator_power() const {
    int d = 0;
    for (const auto& [e, c] : terms_)
      if (!e.empty()) d = std::max(d, -e[0]);
    return d;
  }

  /// Numerator Q with f = Q / a^d. Throws if Q would not be a polynomial.
  std::map<JetExponents, Rational> numerator(int d) const {
    std::map<JetExponents, Rational> q;
    for (const auto& [e, c] : terms_) {
      JetExponents s = e;
      if (s.empty()) s.push_back(0);
      s[0] += d;
      if (s[0] < 0) throw invariant_violation("denominator a^" + std::to_string(d) + " too small");
      q.emplace(trim(std::move(s)), c);
    }
    return q;
  }

  JetRationalPoly operator-(const JetRationalPoly& o) const {
    JetRationalPoly r = *this;
    for (const auto& [e, c] : o.terms_) r.add(e, -c);
    return r;
  }
  JetRationalPoly scaled(const Rational& s) const {
    JetRationalPoly r;
    for (const auto& [e, c] : terms_) r.add(e, c * s);
    return r;
  }
  /// Multiplies by a^k.
  JetRationalPoly shifted(int k) const {
    JetRationalPoly r;
    for (const auto& [e, c] : terms_) {
      JetExponents s = e;
      if (s.empty()) s.push_back(0);
      s[0] += k;
      r.add(s, c);
    }
    return r;
  }

  friend bool operator==(const JetRationalPoly&, const JetRationalPoly&) = default;

  double eval_numeric(const std::vector<double>& jets) const {
    double total = 0;
    for (const auto& [e, c] : terms_) {
      double m = c.to_double();
      for (std::size_t k = 0; k < e.size(); ++k) m *= std::pow(jets.at(k), e[k]);
      total += m;
    }
    return total;
  }

 private:
  std::map<JetExponents, Rational> terms_;
};

/// "a(t)", "a'(t)^2", "a^(4)(t)^3", ...
inline std::string jet_factor_name(int k, int e, bool latex) {
  std::string base;
  if (k == 0) base = "a(t)";
  else if (k <= 2) base = "a" + std::string(static_cast<std::size_t>(k), '\'') + "(t)";
  else base = latex ? "a^{(" + std::to_string(k) + ")}(t)" : "a^(" + std::to_string(k) + ")(t)";
  if (e == 1) return base;
  if (latex) return base + "^{" + std::to_string(e) + "}";
  return base + "^" + std::to_string(e);
}

/// Monomial as a product; highest derivatives first, a(t) last, as in
/// hand-written formulas.
inline std::string monomial_string(const JetExponents& e, bool latex) {
  std::string s;
  for (int k = static_cast<int>(e.size()) - 1; k >= 0; --k) {
    if (e[k] == 0) continue;
    if (!s.empty()) s += latex ? " " : "*";
    s += jet_factor_name(k, e[k], latex);
  }
  return s;
}

/// Terms of Q ordered by decreasing highest derivative order, then
/// decreasing exponents, then coefficient. Deterministic.
inline std::vector<std::pair<JetExponents, Rational>> display_order(const std::map<JetExponents, Rational>& q) {
  std::vector<std::pair<JetExponents, Rational>> v(q.begin(), q.end());
  std::stable_sort(v.begin(), v.end(), [](const auto& x, const auto& y) {
    const auto& a = x.first;
    const auto& b = y.first;
    if (a.size() != b.size()) return a.size() > b.size();
    for (int k = static_cast<int>(a.size()) - 1; k >= 0; --k)
      if (a[k] != b[k]) return a[k] > b[k];
    return false;
  });
  return v;
}

/// Integer numerator polynomial with a common denominator: f = (1/den) * sum c_i m_i / a^d.
struct CommonDenominatorForm {
  Integer den;
  int a_power = 0;
  std::vector<std::pair<JetExponents, Integer>> terms;
};

inline CommonDenominatorForm common_denominator_form(const JetRationalPoly& p, int d) {
  CommonDenominatorForm f;
  f.a_power = d;
  f.den = 1;
  const auto q = p.numerator(d);
  for (const auto& [e, c] : q) f.den = lcm(f.den, c.denominator());
  // Sign convention: make the leading displayed term positive.
  const auto ordered = display_order(q);
  Integer sign = 1;
  if (!ordered.empty() && ordered.front().second.sign() < 0) sign = -1;
  for (const auto& [e, c] : ordered) {
    const Rational scaled = c * Rational(Integer(f.den * sign));
    f.terms.emplace_back(e, scaled.numerator());
  }
  if (sign < 0) f.den = -f.den;
  return f;
}

inline std::string to_text(const JetRationalPoly& p, int d) {
  if (p.is_zero()) return "0";
  const auto f = common_denominator_form(p, d);
  std::string body;
  for (const auto& [e, c] : f.terms) {
    const std::string m = monomial_string(e, false);
    Integer mag = abs(c);
    std::string t;
    if (m.empty()) t = mag.get_str();
    else if (mag == 1) t = m;
    else t = mag.get_str() + "*" + m;
    if (body.empty()) body = (c < 0 ? "-" : "") + t;
    else body += (c < 0 ? " - " : " + ") + t;
  }
  const bool single = f.terms.size() == 1;
  std::string denom;
  Integer den = f.den;
  std::string sign;
  if (den < 0) {
    sign = "-";
    den = -den;
  }
  if (den != 1 || f.a_power > 0) {
    denom = den.get_str();
    if (f.a_power > 0) denom = (den == 1 ? "" : denom + "*") + jet_factor_name(0, f.a_power, false);
    if (den != 1 && f.a_power > 0) denom = "(" + denom + ")";
  }
  std::string num = single ? body : (denom.empty() && sign.empty() ? body : "(" + body + ")");
  std::string out = sign + num;
  if (!denom.empty()) out += "/" + denom;
  return out;
}

inline std::string to_latex(const JetRationalPoly& p, int d) {
  if (p.is_zero()) return "0";
  const auto f = common_denominator_form(p, d);
  std::string body;
  for (const auto& [e, c] : f.terms) {
    const std::string m = monomial_string(e, true);
    Integer mag = abs(c);
    std::string t = m.empty() ? mag.get_str() : (mag == 1 ? m : mag.get_str() + " " + m);
    if (body.empty()) body = (c < 0 ? "-" : "") + t;
    else body += (c < 0 ? "-" : "+") + t;
  }
  Integer den = f.den;
  std::string sign;
  if (den < 0) {
    sign = "-";
    den = -den;
  }
  std::string denom = den.get_str();
  if (f.a_power > 0) denom += " " + jet_factor_name(0, f.a_power, true);
  return sign + "\\frac{1}{" + denom + "}\\Big(" + body + "\\Big)";
}

inline nlohmann::json terms_json(const JetRationalPoly& p, int d) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& [e, c] : display_order(p.numerator(d))) {
    nlohmann::json jets = nlohmann::json::array();
    for (int x : e) jets.push_back(x);
    arr.push_back({{"coeff", c.str()}, {"jets", jets}});
  }
  return arr;
}

inline JetRationalPoly poly_from_terms_json(const nlohmann::json& terms, const Rational& prefactor, int a_power) {
  JetRationalPoly p;
  for (const auto& t : terms) {
    JetExponents e = t.at("jets").get<std::vector<int>>();
    if (e.empty()) e.push_back(0);
    e[0] -= a_power;
    p.add(e, prefactor * Rational::parse(t.at("coeff").get<std::string>()));
  }
  return p;
}

}  // namespace rwsa
