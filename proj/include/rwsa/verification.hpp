#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "rwsa/assembly.hpp"

namespace rwsa {

// ---------------------------------------------------------------- oracles

struct ClosedFormOracle {
  int order = 0;
  Rational prefactor;
  int a_power = 0;
  JetRationalPoly expr;
};

inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

/// Checksum over the oracle entries in file order, independent of JSON
/// whitespace.
inline std::string oracle_checksum(const nlohmann::json& oracles) {
  std::string canon;
  for (const auto& o : oracles) {
    canon += std::to_string(o.at("order").get<int>()) + ";" + o.at("prefactor").get<std::string>() + ";" +
             std::to_string(o.at("aPower").get<int>()) + ";";
    for (const auto& t : o.at("terms")) {
      canon += t.at("coeff").get<std::string>() + "@";
      bool first = true;
      for (int e : t.at("jets")) {
        if (!first) canon += ",";
        canon += std::to_string(e);
        first = false;
      }
      canon += ";";
    }
    canon += "\n";
  }
  return hex64(fnv1a64(canon));
}

inline std::string default_oracle_path() {
#ifdef RWSA_DEFAULT_ORACLE_FILE
  return RWSA_DEFAULT_ORACLE_FILE;
#else
  return "data/closed_forms.json";
#endif
}

/// Loads the closed forms; a checksum mismatch means the file was edited.
inline std::map<int, ClosedFormOracle> load_oracles(const std::string& path = default_oracle_path()) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open oracle file " + path);
  const nlohmann::json doc = nlohmann::json::parse(in);
  const std::string expected = doc.at("checksum").get<std::string>();
  const std::string actual = oracle_checksum(doc.at("oracles"));
  if (expected != actual)
    throw std::runtime_error("oracle file " + path + ": checksum " + actual + " does not match recorded " + expected);
  std::map<int, ClosedFormOracle> out;
  for (const auto& o : doc.at("oracles")) {
    ClosedFormOracle p;
    p.order = o.at("order").get<int>();
    p.prefactor = Rational::parse(o.at("prefactor").get<std::string>());
    p.a_power = o.at("aPower").get<int>();
    p.expr = poly_from_terms_json(o.at("terms"), p.prefactor, p.a_power);
    out.emplace(p.order, std::move(p));
  }
  return out;
}

struct DiffReport {
  bool match = false;
  std::size_t differing = 0;
  std::vector<std::string> first_diffs;  // at most 5
};

/// Monomial-by-monomial comparison in the Q-form of the given order.
inline DiffReport diff_polys(const JetRationalPoly& computed, const JetRationalPoly& expected, int order) {
  DiffReport r;
  const JetRationalPoly d = computed - expected;
  r.differing = d.size();
  r.match = d.is_zero();
  const int q = q_form_power(order);
  for (const auto& [e, c] : d.terms()) {
    if (r.first_diffs.size() >= 5) break;
    JetExponents qe = e;
    if (qe.empty()) qe.push_back(0);
    qe[0] += q;
    std::string m = monomial_string(trim(qe), false);
    if (m.empty()) m = "1";
    r.first_diffs.push_back(m + ": computed " + computed.coeff(e).str() + ", expected " + expected.coeff(e).str());
  }
  return r;
}

inline DiffReport compare_to_closed_form(int order, const JetRationalPoly& computed, const std::map<int, ClosedFormOracle>& oracles) {
  auto it = oracles.find(order);
  if (it == oracles.end()) throw std::invalid_argument("no closed form recorded for a_" + std::to_string(order));
  return diff_polys(computed, it->second.expr, order);
}

// ---------------------------------------------------------- round sphere

/// Element of Q[S, 1/S] + C Q[S, 1/S] with S = sin t, C = cos t.
struct RoundPoly {
  std::map<int, Rational> s_part;
  std::map<int, Rational> c_part;

  void add(bool with_c, int s_pow, const Rational& c) {
    if (c.is_zero()) return;
    auto& m = with_c ? c_part : s_part;
    auto [it, fresh] = m.emplace(s_pow, c);
    if (!fresh) {
      it->second += c;
      if (it->second.is_zero()) m.erase(it);
    }
  }
  friend bool operator==(const RoundPoly&, const RoundPoly&) = default;

  double eval(double t) const {
    double v = 0;
    for (const auto& [p, c] : s_part) v += c.to_double() * std::pow(std::sin(t), p);
    for (const auto& [p, c] : c_part) v += c.to_double() * std::cos(t) * std::pow(std::sin(t), p);
    return v;
  }

  std::string str() const {
    std::string s;
    auto piece = [&](const Rational& c, int p, bool with_c) {
      std::string t = "(" + c.str() + ")";
      if (with_c) t += "*C";
      if (p) t += "*S^" + std::to_string(p);
      s += (s.empty() ? "" : " + ") + t;
    };
    for (const auto& [p, c] : s_part) piece(c, p, false);
    for (const auto& [p, c] : c_part) piece(c, p, true);
    return s.empty() ? "0" : s;
  }
};

/// Substitutes a = sin t, so a^(2m) = (-1)^m S and a^(2m+1) = (-1)^m C, then
/// reduces C^2 = 1 - S^2. A negative power of S left over means the value
/// is not regular on the round sphere.
inline RoundPoly round_reduce(const JetRationalPoly& p) {
  RoundPoly r;
  for (const auto& [e, c] : p.terms()) {
    int s_pow = 0, c_pow = 0, sign = 1;
    for (std::size_t k = 0; k < e.size(); ++k) {
      if (e[k] == 0) continue;
      const int m = static_cast<int>(k / 2);
      if (m % 2 && e[k] % 2) sign = -sign;
      if (k % 2) c_pow += e[k];
      else s_pow += e[k];
    }
    // C^(2q + b) = C^b (1 - S^2)^q
    const int q = c_pow / 2;
    const bool odd_c = c_pow % 2;
    Integer binom = 1;
    for (int i = 0; i <= q; ++i) {
      const Integer signed_binom = i % 2 ? Integer(-binom) : binom;
      const Rational coef = c * Rational(sign) * Rational(signed_binom);
      r.add(odd_c, s_pow + 2 * i, coef);
      binom = binom * (q - i) / (i + 1);
    }
  }
  for (const auto* part : {&r.s_part, &r.c_part})
    if (!part->empty() && part->begin()->first < 0)
      throw invariant_violation("round_reduce: S^" + std::to_string(part->begin()->first) + " left after reduction");
  return r;
}

/// a + b*pi.
struct RoundIntegral {
  Rational rational;
  Rational pi;
  bool has_pi() const { return !pi.is_zero(); }
  std::string str() const {
    if (!has_pi()) return rational.str();
    return rational.str() + " + (" + pi.str() + ")*pi";
  }
};

/// Integral over [0, pi] of a polynomial in S alone.
inline RoundIntegral integrate_round(const RoundPoly& q) {
  if (!q.c_part.empty()) throw std::invalid_argument("integrate_round: polynomial has a cos(t) part");
  RoundIntegral r;
  for (const auto& [m, c] : q.s_part) {
    if (m < 0) throw std::invalid_argument("integrate_round: negative power of sin(t)");
    // int_0^pi S^m = (m-1)!!/m!! times 2 (m odd) or pi (m even).
    Rational w(1);
    for (int k = m; k >= 2; k -= 2) w *= Rational(k - 1, k);
    if (m % 2) r.rational += c * w * Rational(2);
    else r.pi += c * w;
  }
  return r;
}

// ------------------------------------------------------- highest derivative

/// Initial values H_{n,j,alpha1} as multiples of 1/sqrt(pi).
inline std::map<std::tuple<int, int, int>, Gaussian> h_initial_values() {
  return {
      {{1, 2, 1}, Gaussian::i(Rational(3, 2))}, {{1, 3, 1}, Gaussian::i(Rational(3, 2))},
      {{2, 4, 2}, Gaussian(-1)},                {{2, 3, 0}, Gaussian(Rational(3, 4))},
      {{2, 2, 0}, Gaussian(Rational(3, 4))},    {{2, 3, 2}, Gaussian(Rational(-3, 2))},
  };
}

/// h_n for 2 <= n <= max_n from the scalar H recursion.
inline std::map<int, Rational> h_recursion(int max_n) {
  if (max_n < 2) throw std::invalid_argument("h_recursion: max_n must be at least 2");
  auto H = h_initial_values();
  auto get = [&](int n, int j, int a) -> Gaussian {
    auto it = H.find({n, j, a});
    return it == H.end() ? Gaussian() : it->second;
  };
  for (int n = 3; n <= max_n; ++n)
    for (int j = 2; j <= 2 * n + 1; ++j)
      for (int a = 0; a <= 3 * n + 1; ++a) {
        const Gaussian v = get(n - 2, j - 1, a) + Gaussian::i(2) * get(n - 1, j - 1, a - 1);
        if (!v.is_zero()) H[{n, j, a}] = v * Gaussian(Rational(1, j - 1));
      }
  std::map<int, Rational> out;
  for (int n = 2; n <= max_n; ++n) {
    Scalar total;
    for (int j = n / 2 + 1; j <= 2 * n + 1; ++j)
      for (int k = 0; 2 * k <= 2 * j - n - 2; ++k) {
        const Gaussian h = get(n, j, 2 * k);
        if (h.is_zero()) continue;
        total += gamma_half(static_cast<unsigned>(k)) * Scalar(h, -1);
      }
    if (!total.is_rational()) throw rationality_violation("h_" + std::to_string(n) + " = " + total.str());
    out.emplace(n, total.re());
  }
  return out;
}

/// Coefficient of a^(n-1) a^(n) in the Q-form of a_n.
inline Rational extract_highest(int n, const JetRationalPoly& a_n) {
  JetExponents e(static_cast<std::size_t>(n) + 1, 0);
  e[0] = n - 1 - q_form_power(n);
  e[static_cast<std::size_t>(n)] += 1;
  const Rational c = a_n.coeff(e);
  if (c.is_zero()) throw invariant_violation("a_" + std::to_string(n) + " has no a^(n-1) a^(n) term");
  return c;
}

inline bool cross_check(const JetRationalPoly& hopf, const JetRationalPoly& spherical) { return hopf == spherical; }

// ---------------------------------------------------------------- grading

/// Monomials of the Q-form whose weights sum_k k_j and sum_k j k_j differ or
/// fall outside {order - 2, order}.
inline std::vector<std::string> q_grading_failures(int order, const JetRationalPoly& a) {
  std::vector<std::string> bad;
  for (const auto& [e, c] : a.numerator(q_form_power(order))) {
    int sum_k = 0, sum_jk = 0;
    for (std::size_t j = 0; j < e.size(); ++j) {
      sum_k += e[j];
      sum_jk += static_cast<int>(j) * e[j];
    }
    const bool in_range = order == 0 ? sum_k == 0 : (sum_k == order || sum_k == order - 2);
    if (sum_k != sum_jk || !in_range) {
      std::string m = monomial_string(e, false);
      bad.push_back((m.empty() ? "1" : m) + " (" + std::to_string(sum_k) + ", " + std::to_string(sum_jk) + ")");
    }
  }
  return bad;
}

/// Keys of a^n e_{n,j,alpha} with a monomial violating sum k_j = sum j k_j.
inline std::vector<std::string> e_grading_failures(int n, const NodeKey& key, const SymExpr& e) {
  std::vector<std::string> bad;
  for (const auto& t : e.terms()) {
    const int a_pow = t.key.jet(0) + n;
    int sum_k = a_pow, sum_jk = 0;
    for (int d = 1; d < kJetSlots; ++d) {
      sum_k += t.key.jet(d);
      sum_jk += d * t.key.jet(d);
    }
    if (a_pow < 0 || sum_k != sum_jk || sum_k > n) {
      bad.push_back(key.str() + " jets " + jet_key_string(t.key));
      break;
    }
  }
  return bad;
}

// ----------------------------------------------------------------- report

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0;
};

class VerificationReport {
 public:
  /// Runs fn, timing it; an exception counts as a failure with its message.
  void run(const std::string& name, const std::function<std::pair<bool, std::string>()>& fn) {
    CheckResult r;
    r.name = name;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      auto [ok, detail] = fn();
      r.pass = ok;
      r.detail = std::move(detail);
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail = std::string("error: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    results_.push_back(std::move(r));
  }

  void add(CheckResult r) { results_.push_back(std::move(r)); }

  const std::vector<CheckResult>& results() const { return results_; }
  bool all_passed() const {
    for (const auto& r : results_)
      if (!r.pass) return false;
    return !results_.empty();
  }

  std::string text() const {
    std::string s;
    for (const auto& r : results_) {
      char t[32];
      std::snprintf(t, sizeof t, "%.2fs", r.seconds);
      s += (r.pass ? "PASS " : "FAIL ") + r.name + " [" + t + "]";
      if (!r.detail.empty()) s += "  " + r.detail;
      s += "\n";
    }
    return s;
  }

  nlohmann::json json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : results_)
      arr.push_back({{"check", r.name}, {"status", r.pass ? "pass" : "fail"}, {"detail", r.detail}, {"seconds", r.seconds}});
    return {{"passed", all_passed()}, {"checks", arr}};
  }

 private:
  std::vector<CheckResult> results_;
};

/// Values printed alongside the highest-derivative proposition.
inline std::map<int, Rational> reference_h_values() {
  return {{2, Rational(1, 4)},
          {4, Rational(1, 40)},
          {6, Rational(1, 560)},
          {8, Rational(1, 10080)},
          {10, Rational(1, 221760)},
          {12, Rational(1, 5765760)},
          {14, Rational(1, 172972800)},
          {16, Rational(Integer(1), Integer("5881075200"))},
          {18, Rational(Integer(1), Integer("223480857600"))},
          {20, Rational(Integer(1), Integer("9386196019200"))}};
}

/// Closed-form round-sphere value of a_12 and its integral over [0, pi].
inline Rational reference_round_a12_coefficient() { return Rational(10331, 8648640); }
inline Rational reference_round_a12_integral() { return Rational(10331, 6486480); }

}  // namespace rwsa
