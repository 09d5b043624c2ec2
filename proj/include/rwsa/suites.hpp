#pragma once

#include <algorithm>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rwsa/hopf_e_recursion.hpp"
#include "rwsa/pipeline.hpp"
#include "rwsa/verification.hpp"

namespace rwsa {

/// Runs each coordinate system at most once per order and keeps the
/// assembled coefficients.
class Session {
 public:
  Session(int jobs, std::optional<std::filesystem::path> cache_root, std::function<void(const std::string&)> log = {})
      : jobs_(jobs), cache_root_(std::move(cache_root)), log_(std::move(log)) {}

  const CoordRun& run(const std::string& coords, int order) {
    auto it = runs_.find(coords);
    if (it != runs_.end() && it->second.assembled.rbegin()->first >= order) return it->second;
    PipelineOptions opt;
    opt.order = order;
    opt.jobs = jobs_;
    opt.cache_root = cache_root_;
    opt.log = log_;
    runs_.insert_or_assign(coords, run_coordinates(symbols_by_name(coords), opt));
    return runs_.at(coords);
  }

  const JetRationalPoly& a(const std::string& coords, int n) { return run(coords, n).assembled.at(n).a; }

  const std::map<int, ClosedFormOracle>& oracles() {
    if (!oracles_) oracles_ = load_oracles();
    return *oracles_;
  }

 private:
  int jobs_;
  std::optional<std::filesystem::path> cache_root_;
  std::function<void(const std::string&)> log_;
  std::map<std::string, CoordRun> runs_;
  std::optional<std::map<int, ClosedFormOracle>> oracles_;
};

inline constexpr int kHighestClosedForm = 12;

inline std::string join(const std::vector<std::string>& v, const std::string& sep) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + v[i];
  return s;
}

/// Runs the pipeline through `order`. Assembly enforces eta independence and
/// rationality at every level, so a pass here covers both.
inline void compute_step(Session& s, const std::string& coords, int order, VerificationReport& rep) {
  rep.run("compute a_0..a_" + std::to_string(order) + " (" + coords + ")", [&] {
    const CoordRun& r = s.run(coords, order);
    std::size_t terms = 0;
    for (const auto& st : r.levels) terms += st.terms;
    return std::make_pair(true, std::to_string(r.levels.size()) + " levels, " + std::to_string(terms) +
                                    " terms; angle-independent and rational at every level");
  });
}

/// Closed-form comparison for every even order up to `order`, plus the
/// vanishing of the odd ones.
inline void closed_form_suite(Session& s, int order, const std::vector<std::string>& coords, VerificationReport& rep) {
  for (const auto& c : coords) {
    compute_step(s, c, order, rep);
    for (int n = 0; n <= std::min(order, kHighestClosedForm); n += 2)
      rep.run("closed form a_" + std::to_string(n) + " (" + c + ")", [&] {
        const DiffReport d = compare_to_closed_form(n, s.a(c, n), s.oracles());
        if (d.match) return std::make_pair(true, std::to_string(s.a(c, n).size()) + " monomials match");
        return std::make_pair(false, std::to_string(d.differing) + " monomials differ: " + join(d.first_diffs, "; "));
      });
    rep.run("odd orders vanish (" + c + ")", [&] {
      std::string seen;
      for (int n = 1; n <= order; n += 2) {
        if (!s.a(c, n).is_zero()) return std::make_pair(false, "a_" + std::to_string(n) + " is nonzero");
        seen += (seen.empty() ? "a_" : ", a_") + std::to_string(n);
      }
      return std::make_pair(true, seen.empty() ? std::string("no odd orders up to ") + std::to_string(order)
                                               : seen + " = 0");
    });
  }
}

/// a_order at a(t) = sin t; the a_12 value is compared with its known
/// closed form, lower orders with the reduction of their closed forms.
inline void round_suite(Session& s, int order, VerificationReport& rep) {
  compute_step(s, "hopf", order, rep);
  rep.run("round sphere a_" + std::to_string(order), [&] {
    const RoundPoly r = round_reduce(s.a("hopf", order));
    if (!r.c_part.empty()) return std::make_pair(false, "cos(t) part left: " + r.str());
    const RoundIntegral in = integrate_round(r);
    std::string detail = "a_" + std::to_string(order) + " -> " + r.str() + ", integral " + in.str();
    bool ok;
    if (order == 12) {
      RoundPoly expected;
      expected.s_part[3] = reference_round_a12_coefficient();
      ok = r == expected && !in.has_pi() && in.rational == reference_round_a12_integral();
    } else {
      const auto it = s.oracles().find(order);
      ok = it != s.oracles().end() && round_reduce(it->second.expr) == r;
    }
    return std::make_pair(ok, detail);
  });
}

inline void hn_suite(Session& s, int order, VerificationReport& rep) {
  const auto h = h_recursion(20);
  for (const auto& [n, v] : reference_h_values())
    rep.run("h_" + std::to_string(n), [&, n = n, v = v] {
      return std::make_pair(h.at(n) == v, "recursion " + h.at(n).str() + ", expected " + v.str());
    });
  if (order >= 2) compute_step(s, "hopf", order, rep);
  for (int n = 2; n <= std::min(order, kHighestClosedForm); n += 2)
    rep.run("highest term of a_" + std::to_string(n), [&, n] {
      const Rational c = extract_highest(n, s.a("hopf", n));
      return std::make_pair(c == h.at(n), "a^(n-1) a^(n) coefficient " + c.str() + ", recursion " + h.at(n).str());
    });
}

inline void cross_suite(Session& s, int order, VerificationReport& rep) {
  compute_step(s, "hopf", order, rep);
  compute_step(s, "spherical", order, rep);
  for (int n = 0; n <= order; n += 2)
    rep.run("hopf = spherical a_" + std::to_string(n), [&, n] {
      const JetRationalPoly d = s.a("hopf", n) - s.a("spherical", n);
      if (d.is_zero()) return std::make_pair(true, std::to_string(s.a("hopf", n).size()) + " monomials");
      return std::make_pair(false, std::to_string(d.size()) + " monomials differ");
    });
}

/// Q-form weights for the assembled coefficients and the e-node grading up
/// to level min(order, 8).
inline void grading_suite(Session& s, int order, int jobs, VerificationReport& rep) {
  compute_step(s, "hopf", order, rep);
  rep.run("Q-form weights a_0..a_" + std::to_string(order), [&] {
    std::vector<std::string> bad;
    for (int n = 0; n <= order; n += 2)
      for (const auto& b : q_grading_failures(n, s.a("hopf", n))) bad.push_back("a_" + std::to_string(n) + ": " + b);
    if (bad.empty()) return std::make_pair(true, std::string("sum k_j = sum j k_j in {2n-2, 2n}"));
    bad.resize(std::min<std::size_t>(bad.size(), 5));
    return std::make_pair(false, join(bad, "; "));
  });
  const int top = std::min(order, 8);
  rep.run("e-node grading n <= " + std::to_string(top), [&] {
    const SymbolTable t = hopf_symbols();
    MemoTable memo(t.fingerprint());
    ParametrixEngine eng(t, memo, jobs);
    eng.ensure_levels(top);
    std::vector<std::string> bad;
    std::size_t nodes = 0;
    for (int n = 0; n <= top; ++n) {
      const auto& lv = memo.level(n);
      for (std::size_t i = 0; i < lv.keys.size(); ++i) {
        if (lv.values[i].is_zero()) continue;
        ++nodes;
        for (auto& b : e_grading_failures(n, lv.keys[i], e_from_r(lv.values[i], lv.keys[i]))) bad.push_back(b);
      }
    }
    if (bad.empty()) return std::make_pair(true, std::to_string(nodes) + " nodes");
    bad.resize(std::min<std::size_t>(bad.size(), 5));
    return std::make_pair(false, join(bad, "; "));
  });
}

}  // namespace rwsa
