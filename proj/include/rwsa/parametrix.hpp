#pragma once

#include <array>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "rwsa/symbols.hpp"

namespace rwsa {

using Alpha = std::array<int, 4>;

/// Index of r_{n,j,alpha}, the coefficient of r0^j xi^alpha in the
/// order -2-n part of the parametrix symbol.
struct NodeKey {
  int n = 0;
  int j = 0;
  Alpha alpha{};

  int alpha_abs() const { return alpha[0] + alpha[1] + alpha[2] + alpha[3]; }
  bool alpha_even() const {
    for (int a : alpha)
      if (a % 2) return false;
    return true;
  }
  friend bool operator==(const NodeKey&, const NodeKey&) = default;
  friend auto operator<=>(const NodeKey&, const NodeKey&) = default;

  std::string str() const {
    return "r[" + std::to_string(n) + "," + std::to_string(j) + ",(" + std::to_string(alpha[0]) + "," +
           std::to_string(alpha[1]) + "," + std::to_string(alpha[2]) + "," + std::to_string(alpha[3]) + ")]";
  }
};

/// Keys that can be nonzero: 2j - 2 - |alpha| = n and n/2 + 1 <= j <= 2n + 1.
inline bool is_valid_key(const NodeKey& k) {
  if (k.n < 0 || k.j < 1) return false;
  for (int a : k.alpha)
    if (a < 0) return false;
  if (2 * k.j - 2 - k.alpha_abs() != k.n) return false;
  return 2 * k.j >= k.n + 2 && k.j <= 2 * k.n + 1;
}

/// All valid keys of level n, ordered by j then alpha.
inline std::vector<NodeKey> valid_keys(int n) {
  std::vector<NodeKey> out;
  for (int j = (n + 3) / 2; j <= 2 * n + 1; ++j) {
    const int m = 2 * j - 2 - n;
    if (m < 0) continue;
    for (int a0 = 0; a0 <= m; ++a0)
      for (int a1 = 0; a0 + a1 <= m; ++a1)
        for (int a2 = 0; a0 + a1 + a2 <= m; ++a2) out.push_back({n, j, {a0, a1, a2, m - a0 - a1 - a2}});
  }
  return out;
}

inline std::uint64_t pack_key(int j, const Alpha& a) {
  return (std::uint64_t(j) << 32) | (std::uint64_t(a[0]) << 24) | (std::uint64_t(a[1]) << 16) |
         (std::uint64_t(a[2]) << 8) | std::uint64_t(a[3]);
}

/// Node values by level. A level is either complete (every valid key has a
/// slot, zero nodes included) or absent.
class MemoTable {
 public:
  struct Level {
    std::vector<NodeKey> keys;
    std::vector<SymExpr> values;
    std::unordered_map<std::uint64_t, std::uint32_t> index;
    bool complete = false;
    bool evicted = false;
  };

  explicit MemoTable(std::uint64_t fingerprint = 0) : fingerprint_(fingerprint) {}

  std::uint64_t fingerprint() const { return fingerprint_; }

  const SymExpr& get(int n, int j, const Alpha& a) const {
    static const SymExpr zero;
    if (n < 0 || j < 1) return zero;
    for (int x : a)
      if (x < 0 || x > 255) return zero;
    if (n >= static_cast<int>(levels_.size())) return zero;
    const Level& lv = levels_[n];
    if (!lv.complete) throw invariant_violation("lookup in incomplete level " + std::to_string(n));
    if (lv.evicted) throw invariant_violation("lookup in evicted level " + std::to_string(n));
    auto it = lv.index.find(pack_key(j, a));
    return it == lv.index.end() ? zero : lv.values[it->second];
  }
  const SymExpr& get(const NodeKey& k) const { return get(k.n, k.j, k.alpha); }

  bool level_complete(int n) const {
    return n >= 0 && n < static_cast<int>(levels_.size()) && levels_[n].complete && !levels_[n].evicted;
  }
  /// Highest n such that levels 0..n are all present.
  int highest_complete() const {
    int n = -1;
    while (level_complete(n + 1)) ++n;
    return n;
  }

  void store_level(int n, std::vector<NodeKey> keys, std::vector<SymExpr> values) {
    if (keys.size() != values.size()) throw invariant_violation("store_level: size mismatch");
    for (const auto& k : keys)
      if (k.n != n || !is_valid_key(k)) throw invariant_violation("store_level: invalid key " + k.str());
    if (static_cast<int>(levels_.size()) <= n) levels_.resize(n + 1);
    Level lv;
    lv.keys = std::move(keys);
    lv.values = std::move(values);
    for (std::uint32_t i = 0; i < lv.keys.size(); ++i) lv.index.emplace(pack_key(lv.keys[i].j, lv.keys[i].alpha), i);
    lv.complete = true;
    levels_[n] = std::move(lv);
  }

  const Level& level(int n) const {
    if (!level_complete(n)) throw invariant_violation("level " + std::to_string(n) + " not available");
    return levels_[n];
  }

  int level_count() const { return static_cast<int>(levels_.size()); }

  /// Frees the node storage of level n; later lookups into it throw.
  void evict(int n) {
    if (n < 0 || n >= static_cast<int>(levels_.size())) return;
    Level& lv = levels_[n];
    std::vector<SymExpr>().swap(lv.values);
    std::vector<NodeKey>().swap(lv.keys);
    lv.index.clear();
    lv.evicted = true;
  }

  std::size_t level_terms(int n) const {
    std::size_t t = 0;
    for (const auto& v : level(n).values) t += v.size();
    return t;
  }
  std::size_t level_nonzero(int n) const {
    std::size_t c = 0;
    for (const auto& v : level(n).values) c += v.is_zero() ? 0 : 1;
    return c;
  }

 private:
  std::uint64_t fingerprint_;
  std::vector<Level> levels_;
};

struct LevelStats {
  int n = 0;
  std::size_t keys = 0;
  std::size_t nonzero = 0;
  std::size_t terms = 0;
  double seconds = 0;
  bool from_cache = false;
  bool trace_only = false;
};

/// Runs fn(i, worker) for i in [0, count) on `jobs` threads.
inline void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t, int)>& fn) {
  if (jobs <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i, 0);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  const int n = static_cast<int>(std::min<std::size_t>(count, static_cast<std::size_t>(jobs)));
  for (int w = 0; w < n; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = next++; i < count; i = next++) fn(i, w);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next = count;
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

/// Evaluates r_{n,j,alpha} by the specialized recursion for a diagonal
/// metric. Every product keeps the Clifford-valued symbol on the left.
class ParametrixEngine {
 public:
  ParametrixEngine(const SymbolTable& table, MemoTable& memo, int jobs = 1)
      : table_(table), memo_(memo), jobs_(jobs < 1 ? 1 : jobs) {
    if (memo.fingerprint() != table.fingerprint())
      throw invariant_violation("memo table belongs to a different symbol table");
    precompute();
  }

  const SymbolTable& table() const { return table_; }
  MemoTable& memo() { return memo_; }
  int jobs() const { return jobs_; }

  /// r_{n,j,alpha}; zero for invalid keys. Levels n-1 and n-2 must be present.
  SymExpr r_node(const NodeKey& k) const {
    if (!is_valid_key(k)) return SymExpr();
    if (memo_.level_complete(k.n)) return memo_.get(k);
    TermAccumulator acc;
    return compute_node(k, acc, false);
  }

  /// Runs the recursion for any (n, j, alpha), valid or not.
  SymExpr compute_node(const NodeKey& k, TermAccumulator& acc, bool unit_blade_only) const {
    const int n = k.n, j = k.j;
    const Alpha& a = k.alpha;
    const bool uo = unit_blade_only;
    auto R = [&](int nn, int jj, Alpha aa) -> const SymExpr& { return memo_.get(nn, jj, aa); };
    auto filter = [&](const SymExpr& f) -> std::uint16_t { return uo ? f.blade_set() : 0xffff; };
    auto minus = [](Alpha aa, int idx, int v) {
      aa[idx] -= v;
      return aa;
    };
    if (n == 0) {
      if (j == 1 && a == Alpha{0, 0, 0, 0}) return sym::one();
      return SymExpr();
    }
    const Gaussian one(1);

    const SymExpr& X = R(n - 2, j - 1, a);
    if (!X.is_zero()) {
      acc.add_product(minus_p0_, X, one, uo);
      for (int kk : dep_) {
        const SymExpr dX = table_.derivative(X, kk, static_cast<std::uint16_t>(filter(i_p1_[kk]) | 1u));
        acc.add_product(i_p1_[kk], dX, one, uo);
        acc.add_product(table_.g_inv[kk], table_.derivative(dX, kk, filter(table_.g_inv[kk])), one, uo);
      }
    }
    for (int kk = 0; kk < 4; ++kk) {
      const SymExpr& Y = R(n - 1, j - 1, minus(a, kk, 1));
      if (Y.is_zero()) continue;
      acc.add_product(minus_p1_[kk], Y, one, uo);
      if (table_.depends_on(kk))
        acc.add_product(two_i_g_[kk], table_.derivative(Y, kk, filter(two_i_g_[kk])), one, uo);
    }
    const Gaussian c2j(2 - j);
    const Gaussian c42j(4 - 2 * j);
    const Gaussian ic42j = Gaussian::i(Rational(4 - 2 * j));
    const Gaussian c32j((3 - j) * (2 - j));
    for (int l = 0; l < 4; ++l) {
      const SymExpr& Z = R(n - 2, j - 2, minus(a, l, 2));
      if (!Z.is_zero()) {
        acc.add_product(b_[l], Z, c2j, uo);
        for (int kk : dep_)
          if (!c_[kk][l].is_zero())
            acc.add_product(c_[kk][l], table_.derivative(Z, kk, filter(c_[kk][l])), c42j, uo);
      }
      for (int kk : dep_) {
        if (c_[kk][l].is_zero()) continue;
        acc.add_product(c_[kk][l], R(n - 1, j - 2, minus(minus(a, l, 2), kk, 1)), ic42j, uo);
      }
      for (int l2 = 0; l2 < 4; ++l2) {
        if (d_[l][l2].is_zero()) continue;
        acc.add_product(d_[l][l2], R(n - 2, j - 3, minus(minus(a, l, 2), l2, 2)), c32j, uo);
      }
    }
    SymExpr r = acc.finish();
    if (uo) r = r.blade_part(kUnitBlade);
    return r;
  }

  /// Computes and stores every valid key of level n (levels below must be
  /// present).
  LevelStats compute_level(int n) {
    require_lower(n);
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<NodeKey> keys = valid_keys(n);
    std::vector<SymExpr> values(keys.size());
    std::vector<TermAccumulator> accs(static_cast<std::size_t>(jobs_));
    parallel_for(keys.size(), jobs_, [&](std::size_t i, int w) { values[i] = compute_node(keys[i], accs[w], false); });
    LevelStats st;
    st.n = n;
    st.keys = keys.size();
    for (const auto& v : values) {
      st.nonzero += v.is_zero() ? 0 : 1;
      st.terms += v.size();
    }
    memo_.store_level(n, std::move(keys), std::move(values));
    st.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return st;
  }

  /// Unit-blade parts of the even-alpha nodes of level n, without storing
  /// the level. Enough for the trace in the heat coefficient.
  std::vector<std::pair<NodeKey, SymExpr>> compute_trace_level(int n, LevelStats* stats = nullptr) {
    require_lower(n);
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<NodeKey> keys;
    for (const auto& k : valid_keys(n))
      if (k.alpha_even()) keys.push_back(k);
    std::vector<SymExpr> values(keys.size());
    std::vector<TermAccumulator> accs(static_cast<std::size_t>(jobs_));
    parallel_for(keys.size(), jobs_, [&](std::size_t i, int w) { values[i] = compute_node(keys[i], accs[w], true); });
    std::vector<std::pair<NodeKey, SymExpr>> out;
    LevelStats st;
    st.n = n;
    st.keys = keys.size();
    st.trace_only = true;
    for (std::size_t i = 0; i < keys.size(); ++i) {
      if (values[i].is_zero()) continue;
      ++st.nonzero;
      st.terms += values[i].size();
      out.emplace_back(keys[i], std::move(values[i]));
    }
    st.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (stats) *stats = st;
    return out;
  }

  /// Computes all missing levels up to n. The callback sees each new level.
  void ensure_levels(int n, const std::function<void(const LevelStats&)>& on_level = {}) {
    for (int m = 0; m <= n; ++m) {
      if (memo_.level_complete(m)) continue;
      LevelStats st = compute_level(m);
      if (on_level) on_level(st);
    }
  }

  /// Keys at level n with nonzero value when the recursion is run on every
  /// (j, alpha) with j <= 2n + 3 and |alpha| <= 2j, ignoring the validity
  /// filter.
  std::vector<NodeKey> brute_force_nonzero(int n) const {
    require_lower(n);
    std::vector<NodeKey> out;
    TermAccumulator acc;
    for (int j = 1; j <= 2 * n + 3; ++j)
      for (int m = 0; m <= 2 * j; ++m)
        for (int a0 = 0; a0 <= m; ++a0)
          for (int a1 = 0; a0 + a1 <= m; ++a1)
            for (int a2 = 0; a0 + a1 + a2 <= m; ++a2) {
              NodeKey k{n, j, {a0, a1, a2, m - a0 - a1 - a2}};
              if (!compute_node(k, acc, false).is_zero()) out.push_back(k);
            }
    return out;
  }

 private:
  void require_lower(int n) const {
    for (int m = std::max(0, n - 2); m < n; ++m)
      if (!memo_.level_complete(m)) throw invariant_violation("level " + std::to_string(m) + " missing");
  }

  void precompute() {
    const auto& g = table_.g_inv;
    const Scalar i(Gaussian::i());
    for (int k = 0; k < 4; ++k)
      if (table_.depends_on(k)) dep_.push_back(k);
    minus_p0_ = -table_.p0;
    for (int k = 0; k < 4; ++k) {
      i_p1_[k] = i * table_.p1[k];
      minus_p1_[k] = -table_.p1[k];
      two_i_g_[k] = Scalar(Gaussian::i(2)) * g[k];
    }
    std::array<std::array<SymExpr, 4>, 4> dg;  // dg[k][l] = d_k g^ll
    for (int k = 0; k < 4; ++k)
      for (int l = 0; l < 4; ++l) dg[k][l] = table_.derivative(g[l], k);
    for (int l = 0; l < 4; ++l) {
      SymExpr b;
      for (int k = 0; k < 4; ++k) {
        b += i * (dg[k][l] * table_.p1[k]);
        b += g[k] * table_.derivative(dg[k][l], k);
      }
      b_[l] = b;
      for (int k = 0; k < 4; ++k) c_[k][l] = g[k] * dg[k][l];
    }
    for (int l = 0; l < 4; ++l)
      for (int l2 = 0; l2 < 4; ++l2) {
        SymExpr d;
        for (int k = 0; k < 4; ++k) d += c_[k][l] * dg[k][l2];
        d_[l][l2] = d;
      }
  }

  const SymbolTable& table_;
  MemoTable& memo_;
  int jobs_;
  std::vector<int> dep_;
  SymExpr minus_p0_;
  std::array<SymExpr, 4> i_p1_, minus_p1_, two_i_g_, b_;
  std::array<std::array<SymExpr, 4>, 4> c_, d_;
};

}  // namespace rwsa
