#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <initializer_list>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "rwsa/clifford.hpp"
#include "rwsa/errors.hpp"
#include "rwsa/scalar.hpp"

namespace rwsa {

/// Angular generators: slots 0/1 are sin/cos of the first angle, 2/3 of the
/// second. Hopf uses only the first angle (eta).
inline constexpr int kAngleVars = 2;
inline constexpr int kAngleSlots = 2 * kAngleVars;
/// Jet variables a, a', ..., a^(26).
inline constexpr int kJetSlots = 27;
inline constexpr int kKeyBytes = 1 + kAngleSlots + kJetSlots;
static_assert(kKeyBytes == 32);

constexpr int sin_slot(int var) { return 2 * var; }
constexpr int cos_slot(int var) { return 2 * var + 1; }

/// Packed monomial: blade, angle exponents, jet exponents. Exponents are
/// stored biased by 128 so that memcmp order is the signed lexicographic
/// order (blade first, then angles, then jets).
struct TermKey {
  static constexpr std::uint8_t kBias = 128;
  std::array<std::uint8_t, kKeyBytes> bytes;

  TermKey() {
    bytes.fill(kBias);
    bytes[0] = kUnitBlade;
  }

  Blade blade() const { return bytes[0]; }
  void set_blade(Blade b) { bytes[0] = b; }
  int angle(int slot) const { return int(bytes[1 + slot]) - kBias; }
  void set_angle(int slot, int e) { bytes[1 + slot] = checked(e); }
  int jet(int k) const { return int(bytes[1 + kAngleSlots + k]) - kBias; }
  void set_jet(int k, int e) { bytes[1 + kAngleSlots + k] = checked(e); }

  bool angle_free() const {
    for (int s = 0; s < kAngleSlots; ++s)
      if (angle(s) != 0) return false;
    return true;
  }
  /// Highest k with a nonzero exponent on a^(k), or -1.
  int max_jet_order() const {
    for (int k = kJetSlots - 1; k >= 0; --k)
      if (jet(k) != 0) return k;
    return -1;
  }

  friend bool operator==(const TermKey& a, const TermKey& b) {
    return std::memcmp(a.bytes.data(), b.bytes.data(), kKeyBytes) == 0;
  }
  friend bool operator<(const TermKey& a, const TermKey& b) {
    return std::memcmp(a.bytes.data(), b.bytes.data(), kKeyBytes) < 0;
  }

 private:
  static std::uint8_t checked(int e) {
    if (e < -kBias || e > 127) throw invariant_violation("monomial exponent out of range");
    return static_cast<std::uint8_t>(e + kBias);
  }
};

/// Multiplies monomials; returns the Clifford sign.
inline int key_mul(const TermKey& a, const TermKey& b, TermKey& out) {
  const SignedBlade p = kBladeTable[a.bytes[0]][b.bytes[0]];
  out.bytes[0] = p.blade;
  int bad = 0;
  for (int i = 1; i < kKeyBytes; ++i) {
    const int v = int(a.bytes[i]) + int(b.bytes[i]) - TermKey::kBias;
    bad |= v & ~0xff;
    out.bytes[i] = static_cast<std::uint8_t>(v);
  }
  if (bad) throw invariant_violation("monomial exponent out of range");
  return p.sign;
}

struct Term {
  TermKey key;
  Gaussian coeff;

  Term() = default;
  Term(TermKey k, Gaussian c) : key(k), coeff(std::move(c)) {}
  Term(const Term&) = default;
  Term(Term&&) noexcept = default;
  Term& operator=(const Term&) = default;
  Term& operator=(Term&&) noexcept = default;
  friend bool operator==(const Term&, const Term&) = default;
};

/// Exponents for building monomials by hand.
struct Mono {
  Blade blade = kUnitBlade;
  std::array<int, kAngleSlots> angles{};
  std::vector<int> jets;  // jets[k] = exponent of a^(k)

  TermKey key() const {
    TermKey k;
    k.set_blade(blade);
    for (int s = 0; s < kAngleSlots; ++s) k.set_angle(s, angles[s]);
    if (static_cast<int>(jets.size()) > kJetSlots) throw invariant_violation("jet order too high");
    for (std::size_t j = 0; j < jets.size(); ++j) k.set_jet(static_cast<int>(j), jets[j]);
    return k;
  }
};

class SymExpr;

/// Collects unsorted terms and canonicalizes them in one sort-and-merge pass.
/// Reuses its coefficient storage across calls to avoid allocator churn in
/// the recursion's inner loop.
class TermAccumulator {
 public:
  void reset() {
    count_ = 0;
    order_.clear();
    exp_set_ = false;
  }

  void set_sqrt_pi_exp(int e) {
    if (exp_set_ && exp_ != e) throw exponent_mismatch("TermAccumulator: mixed sqrt(pi) exponents");
    exp_ = e;
    exp_set_ = true;
  }

  Gaussian& push(const TermKey& k) {
    if (count_ == coeffs_.size()) coeffs_.emplace_back();
    order_.emplace_back(k, static_cast<std::uint32_t>(count_));
    return coeffs_[count_++];
  }

  void add(const TermKey& k, const Gaussian& c) {
    if (!c.is_zero()) push(k) = c;
  }

  /// Adds scale * x.
  inline void add(const SymExpr& x, const Gaussian& scale = Gaussian(1));

  /// Adds scale * f * x. With unit_blade_only, products landing outside the
  /// unit blade are skipped (enough for traces).
  inline void add_product(const SymExpr& f, const SymExpr& x, const Gaussian& scale = Gaussian(1),
                          bool unit_blade_only = false);

  inline SymExpr finish();

  std::size_t pending() const { return count_; }

 private:
  std::vector<Gaussian> coeffs_;
  std::size_t count_ = 0;
  std::vector<std::pair<TermKey, std::uint32_t>> order_;
  int exp_ = 0;
  bool exp_set_ = false;
};

/// Canonical sum of Scalar * blade * angle monomial * jet monomial. Terms are
/// sorted by key with no zero coefficients; all coefficients share one power
/// of sqrt(pi).
class SymExpr {
 public:
  SymExpr() = default;

  static SymExpr constant(const Scalar& c) { return monomial(c, Mono{}); }
  static SymExpr monomial(const Scalar& c, const Mono& m) {
    SymExpr r;
    r.exp_ = c.sqrt_pi_exp();
    if (!c.is_zero()) r.terms_.emplace_back(m.key(), c.value());
    r.check_jet_policy();
    return r;
  }
  static SymExpr monomial(const Scalar& c, const TermKey& k) {
    SymExpr r;
    r.exp_ = c.sqrt_pi_exp();
    if (!c.is_zero()) r.terms_.emplace_back(k, c.value());
    return r;
  }
  /// Builds from already sorted, merged, nonzero terms.
  static SymExpr from_canonical(std::vector<Term> terms, int sqrt_pi_exp) {
    SymExpr r;
    r.terms_ = std::move(terms);
    r.exp_ = r.terms_.empty() ? 0 : sqrt_pi_exp;
    return r;
  }
  /// Builds from arbitrary terms (sorted and merged here).
  static SymExpr from_terms(const std::vector<Term>& terms, int sqrt_pi_exp = 0) {
    TermAccumulator acc;
    acc.set_sqrt_pi_exp(sqrt_pi_exp);
    for (const auto& t : terms) acc.add(t.key, t.coeff);
    return acc.finish();
  }

  const std::vector<Term>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  int sqrt_pi_exp() const { return exp_; }

  Scalar coeff(const TermKey& k) const {
    auto it = std::lower_bound(terms_.begin(), terms_.end(), k,
                               [](const Term& t, const TermKey& key) { return t.key < key; });
    if (it == terms_.end() || !(it->key == k)) return Scalar();
    return Scalar(it->coeff, exp_);
  }

  /// Blades present, as a 16-bit mask.
  std::uint16_t blade_set() const {
    std::uint16_t m = 0;
    for (const auto& t : terms_) m |= static_cast<std::uint16_t>(1u << t.key.blade());
    return m;
  }

  /// Part of the expression carried by one blade (kept as that blade).
  SymExpr blade_part(Blade b) const {
    std::vector<Term> out;
    for (const auto& t : terms_)
      if (t.key.blade() == b) out.push_back(t);
    return from_canonical(std::move(out), exp_);
  }

  SymExpr operator-() const {
    SymExpr r = *this;
    for (auto& t : r.terms_) t.coeff = -t.coeff;
    return r;
  }
  friend SymExpr operator+(const SymExpr& a, const SymExpr& b) { return merge(a, b, false); }
  friend SymExpr operator-(const SymExpr& a, const SymExpr& b) { return merge(a, b, true); }
  SymExpr& operator+=(const SymExpr& o) { return *this = *this + o; }
  SymExpr& operator-=(const SymExpr& o) { return *this = *this - o; }

  friend SymExpr operator*(const SymExpr& a, const SymExpr& b) {
    TermAccumulator acc;
    acc.add_product(a, b);
    return acc.finish();
  }
  friend SymExpr operator*(const Scalar& s, const SymExpr& x) {
    if (s.is_zero()) return SymExpr();
    SymExpr r = x;
    for (auto& t : r.terms_) t.coeff = s.value() * t.coeff;
    r.exp_ += s.sqrt_pi_exp();
    if (r.terms_.empty()) r.exp_ = 0;
    return r;
  }

  friend bool operator==(const SymExpr& a, const SymExpr& b) {
    if (a.terms_.empty() || b.terms_.empty()) return a.terms_.empty() && b.terms_.empty();
    return a.exp_ == b.exp_ && a.terms_ == b.terms_;
  }

  /// Total derivative in t: a^(k) -> a^(k+1) by the chain rule. Optionally
  /// only terms whose blade is in blade_filter are differentiated.
  SymExpr d_dt(std::uint16_t blade_filter = 0xffff) const {
    TermAccumulator acc;
    acc.set_sqrt_pi_exp(exp_);
    for (const auto& t : terms_) {
      if (!((blade_filter >> t.key.blade()) & 1u)) continue;
      for (int k = 0; k < kJetSlots; ++k) {
        const int e = t.key.jet(k);
        if (e == 0) continue;
        if (k > 0 && e < 0) throw invariant_violation("negative power of a derivative of a(t)");
        if (k + 1 >= kJetSlots) throw invariant_violation("jet order exceeds storage");
        TermKey nk = t.key;
        nk.set_jet(k, e - 1);
        nk.set_jet(k + 1, nk.jet(k + 1) + 1);
        Gaussian& c = acc.push(nk);
        Gaussian::mul_into(c, t.coeff, Gaussian(e));
      }
    }
    return acc.finish();
  }

  /// Derivative in an angle: d(s^p c^q) = p s^(p-1) c^(q+1) - q s^(p+1) c^(q-1).
  SymExpr d_angle(int var, std::uint16_t blade_filter = 0xffff) const {
    const int ss = sin_slot(var);
    const int cs = cos_slot(var);
    TermAccumulator acc;
    acc.set_sqrt_pi_exp(exp_);
    for (const auto& t : terms_) {
      if (!((blade_filter >> t.key.blade()) & 1u)) continue;
      const int p = t.key.angle(ss);
      const int q = t.key.angle(cs);
      if (p != 0) {
        TermKey nk = t.key;
        nk.set_angle(ss, p - 1);
        nk.set_angle(cs, q + 1);
        Gaussian::mul_into(acc.push(nk), t.coeff, Gaussian(p));
      }
      if (q != 0) {
        TermKey nk = t.key;
        nk.set_angle(ss, p + 1);
        nk.set_angle(cs, q - 1);
        Gaussian::mul_into(acc.push(nk), t.coeff, Gaussian(-q));
      }
    }
    return acc.finish();
  }

  /// Integer power of a blade-free single-term expression.
  SymExpr monomial_pow(int e) const {
    if (terms_.size() != 1 || terms_.front().key.blade() != kUnitBlade)
      throw invariant_violation("monomial_pow: not a blade-free monomial");
    const Term& t = terms_.front();
    Gaussian c = e < 0 ? Gaussian(1) / t.coeff : t.coeff;
    Gaussian cp(1);
    for (int i = 0; i < std::abs(e); ++i) cp = cp * c;
    TermKey k;
    for (int s = 0; s < kAngleSlots; ++s) k.set_angle(s, t.key.angle(s) * e);
    for (int j = 0; j < kJetSlots; ++j) k.set_jet(j, t.key.jet(j) * e);
    return monomial(Scalar(cp, exp_ * e), k);
  }

  /// Throws if any a^(k), k >= 1, carries a negative exponent.
  void check_jet_policy() const {
    for (const auto& t : terms_)
      for (int k = 1; k < kJetSlots; ++k)
        if (t.key.jet(k) < 0) throw invariant_violation("negative power of a derivative of a(t)");
  }

  /// Most negative exponent of a(t) over all terms (0 if none negative).
  int min_a_power() const {
    int m = 0;
    for (const auto& t : terms_) m = std::min(m, t.key.jet(0));
    return m;
  }

  /// Numerical value per blade at an angle/jet point, for tests only.
  std::array<std::complex<double>, kBladeCount> eval_numeric(const std::array<double, kAngleVars>& angles,
                                                             const std::vector<double>& jets) const {
    std::array<std::complex<double>, kBladeCount> out{};
    const double pi_factor = std::pow(std::sqrt(M_PI), exp_);
    for (const auto& t : terms_) {
      double m = pi_factor;
      for (int v = 0; v < kAngleVars; ++v) {
        m *= std::pow(std::sin(angles[v]), t.key.angle(sin_slot(v)));
        m *= std::pow(std::cos(angles[v]), t.key.angle(cos_slot(v)));
      }
      for (int k = 0; k < kJetSlots; ++k) {
        const int e = t.key.jet(k);
        if (e == 0) continue;
        if (k >= static_cast<int>(jets.size())) throw std::out_of_range("eval_numeric: jet value missing");
        m *= std::pow(jets[k], e);
      }
      out[t.key.blade()] += std::complex<double>(t.coeff.re.to_double(), t.coeff.im.to_double()) * m;
    }
    return out;
  }

 private:
  static SymExpr merge(const SymExpr& a, const SymExpr& b, bool subtract) {
    if (b.is_zero()) return a;
    if (a.is_zero()) return subtract ? -b : b;
    if (a.exp_ != b.exp_) throw exponent_mismatch("SymExpr: adding different sqrt(pi) powers");
    std::vector<Term> out;
    out.reserve(a.terms_.size() + b.terms_.size());
    auto i = a.terms_.begin();
    auto j = b.terms_.begin();
    while (i != a.terms_.end() || j != b.terms_.end()) {
      if (j == b.terms_.end() || (i != a.terms_.end() && i->key < j->key)) {
        out.push_back(*i++);
      } else if (i == a.terms_.end() || j->key < i->key) {
        out.emplace_back(j->key, subtract ? -j->coeff : j->coeff);
        ++j;
      } else {
        Gaussian c = subtract ? i->coeff - j->coeff : i->coeff + j->coeff;
        if (!c.is_zero()) out.emplace_back(i->key, std::move(c));
        ++i;
        ++j;
      }
    }
    return from_canonical(std::move(out), a.exp_);
  }

  std::vector<Term> terms_;
  int exp_ = 0;
};

inline void TermAccumulator::add(const SymExpr& x, const Gaussian& scale) {
  if (x.is_zero() || scale.is_zero()) return;
  set_sqrt_pi_exp(x.sqrt_pi_exp());
  const bool unit = scale == Gaussian(1);
  for (const auto& t : x.terms()) {
    Gaussian& c = push(t.key);
    if (unit) c = t.coeff;
    else Gaussian::mul_into(c, t.coeff, scale);
  }
}

inline void TermAccumulator::add_product(const SymExpr& f, const SymExpr& x, const Gaussian& scale,
                                         bool unit_blade_only) {
  if (f.is_zero() || x.is_zero() || scale.is_zero()) return;
  set_sqrt_pi_exp(f.sqrt_pi_exp() + x.sqrt_pi_exp());
  // Fold the scale into the (short) left factor once.
  std::vector<Gaussian> fc;
  fc.reserve(f.size());
  const bool unit = scale == Gaussian(1);
  for (const auto& t : f.terms()) fc.push_back(unit ? t.coeff : t.coeff * scale);
  const auto& ft = f.terms();
  TermKey k;
  for (std::size_t a = 0; a < ft.size(); ++a) {
    const Blade fb = ft[a].key.blade();
    for (const auto& xt : x.terms()) {
      if (unit_blade_only && xt.key.blade() != fb) continue;
      const int sign = key_mul(ft[a].key, xt.key, k);
      Gaussian& c = push(k);
      Gaussian::mul_into(c, fc[a], xt.coeff);
      if (sign < 0) {
        mpq_neg(c.re.mpq().get_mpq_t(), c.re.mpq().get_mpq_t());
        mpq_neg(c.im.mpq().get_mpq_t(), c.im.mpq().get_mpq_t());
      }
    }
  }
}

inline SymExpr TermAccumulator::finish() {
  std::sort(order_.begin(), order_.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<Term> out;
  std::size_t i = 0;
  const std::size_t n = order_.size();
  while (i < n) {
    std::size_t j = i + 1;
    Gaussian& sum = coeffs_[order_[i].second];
    while (j < n && order_[j].first == order_[i].first) {
      const Gaussian& c = coeffs_[order_[j].second];
      sum.re.mpq() += c.re.mpq();
      sum.im.mpq() += c.im.mpq();
      ++j;
    }
    if (!sum.is_zero()) out.emplace_back(order_[i].first, std::move(sum));
    i = j;
  }
  const int e = exp_;
  reset();
  return SymExpr::from_canonical(std::move(out), e);
}

/// Angle-free expression plus sqrt(d) times another one.
struct SurdExpr {
  SymExpr rational;
  SymExpr surd;
  int d = 2;
};

/// Exact sine/cosine values for each angle generator.
struct AnglePoint {
  std::string label;
  int d = 2;
  std::array<QuadExt, kAngleSlots> values;
};

/// Substitutes exact sine/cosine values. Angle generators the point does not
/// assign must have zero exponent.
inline SurdExpr eval_angles(const SymExpr& x, const AnglePoint& p) {
  std::map<std::pair<int, int>, QuadExt> cache;
  auto power = [&](int slot, int e) -> const QuadExt& {
    auto key = std::make_pair(slot, e);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, p.values[slot].pow(e)).first;
    return it->second;
  };
  TermAccumulator rat;
  TermAccumulator sur;
  rat.set_sqrt_pi_exp(x.sqrt_pi_exp());
  sur.set_sqrt_pi_exp(x.sqrt_pi_exp());
  for (const auto& t : x.terms()) {
    QuadExt v = QuadExt::rational(Scalar(1), p.d);
    for (int s = 0; s < kAngleSlots; ++s) {
      const int e = t.key.angle(s);
      if (e != 0) v = v * power(s, e);
    }
    TermKey k = t.key;
    for (int s = 0; s < kAngleSlots; ++s) k.set_angle(s, 0);
    if (v.a().sqrt_pi_exp() != 0 || v.b().sqrt_pi_exp() != 0)
      throw invariant_violation("eval_angles: angle values must be free of sqrt(pi)");
    rat.add(k, t.coeff * v.a().value());
    sur.add(k, t.coeff * v.b().value());
  }
  return {rat.finish(), sur.finish(), p.d};
}

/// Multiplies out negative angle powers and rewrites c^2 = 1 - s^2 per
/// angle, giving a canonical representative modulo sin^2 + cos^2 = 1 (up to
/// the overall monomial factor). Used only to compare expressions that are
/// equal as functions.
inline SymExpr pythagorean_normal_form(const SymExpr& x) {
  if (x.is_zero()) return x;
  Mono shift;
  for (int s = 0; s < kAngleSlots; ++s) {
    int m = 0;
    for (const auto& t : x.terms()) m = std::min(m, t.key.angle(s));
    shift.angles[s] = -m;
  }
  SymExpr cur = SymExpr::monomial(Scalar(1), shift) * x;
  for (int var = 0; var < kAngleVars; ++var) {
    const int cs = cos_slot(var);
    const int ss = sin_slot(var);
    for (;;) {
      bool changed = false;
      TermAccumulator acc;
      acc.set_sqrt_pi_exp(cur.sqrt_pi_exp());
      for (const auto& t : cur.terms()) {
        const int q = t.key.angle(cs);
        if (q >= 2) {
          changed = true;
          TermKey k = t.key;
          k.set_angle(cs, q - 2);
          acc.add(k, t.coeff);
          k.set_angle(ss, k.angle(ss) + 2);
          acc.add(k, -t.coeff);
        } else {
          acc.add(t.key, t.coeff);
        }
      }
      cur = acc.finish();
      if (!changed) break;
    }
  }
  return cur;
}

inline bool equal_mod_pythagoras(const SymExpr& a, const SymExpr& b) {
  return pythagorean_normal_form(a - b).is_zero();
}

/// Compact helpers for transcribing symbol tables.
namespace sym {

/// a^(k) exponent list from (order, exponent) pairs.
inline std::vector<int> jets(std::initializer_list<std::pair<int, int>> pows) {
  std::vector<int> v;
  for (auto [k, e] : pows) {
    if (static_cast<int>(v.size()) <= k) v.resize(k + 1, 0);
    v[k] += e;
  }
  return v;
}

inline SymExpr term(const Gaussian& c, Blade b, std::array<int, kAngleSlots> angles,
                    std::initializer_list<std::pair<int, int>> jet_pows) {
  Mono m;
  m.blade = b;
  m.angles = angles;
  m.jets = jets(jet_pows);
  return SymExpr::monomial(Scalar(c), m);
}

inline SymExpr one() { return SymExpr::constant(Scalar(1)); }

}  // namespace sym

}  // namespace rwsa
