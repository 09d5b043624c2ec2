#include <gtest/gtest.h>

#include <set>

#include "rwsa/hopf_e_recursion.hpp"
#include "rwsa/parametrix.hpp"
#include "rwsa/slow_oracle.hpp"

using namespace rwsa;
using detail::I;
using detail::T;

namespace {

struct Computed {
  SymbolTable table;
  MemoTable memo;
  explicit Computed(SymbolTable t, int levels, int jobs = 1) : table(std::move(t)), memo(table.fingerprint()) {
    ParametrixEngine eng(table, memo, jobs);
    eng.ensure_levels(levels);
  }
};

const Computed& hopf6() {
  static const Computed c(hopf_symbols(), 6);
  return c;
}

}  // namespace

TEST(NodeKeys, ValidityRule) {
  EXPECT_TRUE(is_valid_key({0, 1, {0, 0, 0, 0}}));
  EXPECT_TRUE(is_valid_key({1, 2, {1, 0, 0, 0}}));
  EXPECT_TRUE(is_valid_key({1, 3, {0, 2, 1, 0}}));
  EXPECT_FALSE(is_valid_key({1, 2, {0, 0, 0, 0}}));
  EXPECT_FALSE(is_valid_key({2, 1, {0, 0, 0, 0}}));
  EXPECT_FALSE(is_valid_key({1, 3, {-1, 2, 1, 1}}));
  for (int n = 0; n <= 8; ++n)
    for (const auto& k : valid_keys(n)) {
      EXPECT_TRUE(is_valid_key(k)) << k.str();
      EXPECT_EQ(k.n, n);
    }
  EXPECT_EQ(valid_keys(0).size(), 1u);
}

TEST(Parametrix, BaseCases) {
  const auto& c = hopf6();
  const MemoTable& m = c.memo;
  EXPECT_EQ(m.get({0, 1, {0, 0, 0, 0}}), sym::one());
  EXPECT_EQ(m.get({1, 2, {1, 0, 0, 0}}), T(I(3), 0, {}, {{0, -1}, {1, 1}}));
  for (int k = 0; k < 4; ++k) {
    Alpha a{};
    a[k] = 1;
    EXPECT_EQ(m.get({1, 2, a}), -c.table.p1[k]) << k;
  }
  for (int l = 0; l < 4; ++l)
    for (int k = 0; k < 4; ++k) {
      Alpha a{};
      a[l] += 2;
      a[k] += 1;
      const SymExpr expected = Scalar(Gaussian::i(-2)) * (c.table.g_inv[k] * c.table.derivative(c.table.g_inv[l], k));
      EXPECT_EQ(m.get({1, 3, a}), expected) << l << k;
    }
  // Invalid and negative-index lookups read as zero.
  EXPECT_TRUE(m.get({1, 2, {0, 0, 0, 0}}).is_zero());
  EXPECT_TRUE(m.get({1, 2, {-1, 0, 0, 2}}).is_zero());
}

TEST(Parametrix, LevelCounts) {
  const auto& m = hopf6().memo;
  EXPECT_EQ(m.level_nonzero(0), 1u);
  // Four first-order nodes plus the five nonzero products g^kk d_k g^ll:
  // k = t with l = eta, phi1, phi2 and k = eta with l = phi1, phi2.
  EXPECT_EQ(m.level_nonzero(1), 9u);
}

TEST(Parametrix, ValidKeyFilterLosesNothing) {
  for (const auto& name : {"hopf", "spherical"}) {
    const SymbolTable table = symbols_by_name(name);
    MemoTable memo(table.fingerprint());
    ParametrixEngine eng(table, memo);
    eng.ensure_levels(2);
    for (int n = 1; n <= 2; ++n) {
      const auto brute = eng.brute_force_nonzero(n);
      std::set<NodeKey> stored;
      for (std::size_t i = 0; i < memo.level(n).keys.size(); ++i)
        if (!memo.level(n).values[i].is_zero()) stored.insert(memo.level(n).keys[i]);
      EXPECT_EQ(std::set<NodeKey>(brute.begin(), brute.end()), stored) << name << " n=" << n;
    }
  }
}

class SlowOracle : public ::testing::TestWithParam<std::string> {};

TEST_P(SlowOracle, AgreesWithRecursionThroughLevelFour) {
  const Computed c(symbols_by_name(GetParam()), 4);
  const auto oracle = slow_oracle_rn(4, c.table);
  std::size_t nonzero = 0;
  for (const auto& [k, v] : oracle) {
    EXPECT_TRUE(is_valid_key(k)) << k.str();
    EXPECT_EQ(c.memo.get(k), v) << k.str();
    ++nonzero;
  }
  for (int n = 0; n <= 4; ++n) {
    for (std::size_t i = 0; i < c.memo.level(n).keys.size(); ++i) {
      const auto& k = c.memo.level(n).keys[i];
      if (!c.memo.level(n).values[i].is_zero()) {
        EXPECT_TRUE(oracle.count(k)) << "missing in oracle: " << k.str();
      }
    }
  }
  EXPECT_GT(nonzero, 100u);
}

INSTANTIATE_TEST_SUITE_P(Coords, SlowOracle, ::testing::Values("hopf", "spherical"));

TEST(SlowOracle, RejectsHighOrders) { EXPECT_THROW(slow_oracle_rn(5, hopf_symbols()), std::invalid_argument); }

TEST(HopfE, InitialValues) {
  HopfERecursion e;
  const Gaussian two_i = Gaussian::i(2);
  EXPECT_EQ(e.get({0, 1, {0, 0, 0, 0}}), sym::one());
  EXPECT_EQ(e.get({1, 3, {1, 2, 0, 0}}), T(two_i, 0, {}, {{0, -1}, {1, 1}}));
  EXPECT_EQ(e.get({1, 2, {0, 1, 0, 0}}),
            T(I(), 0, {-1, 1}, {{0, -1}}) + T(I(-1), 0, {1, -1}, {{0, -1}}) + T(I(), blade(1, 2), {}, {{0, -1}, {1, 1}}));
}

TEST(HopfE, MatchesRecursionThroughLevelSix) {
  const auto& c = hopf6();
  HopfERecursion e;
  e.compute_through(6);
  for (int n = 0; n <= 6; ++n) {
    std::size_t checked = 0;
    for (const auto& k : valid_keys(n)) {
      const SymExpr from_r = e_from_r(c.memo.get(k), k);
      EXPECT_TRUE(equal_mod_pythagoras(e.get(k), from_r)) << k.str();
      checked += from_r.is_zero() ? 0 : 1;
    }
    EXPECT_EQ(checked, c.memo.level_nonzero(n));
  }
}

TEST(Parametrix, SparsityDenominatorAndGrading) {
  const auto& c = hopf6();
  for (int n = 0; n <= 6; ++n) {
    const auto& lv = c.memo.level(n);
    for (std::size_t i = 0; i < lv.keys.size(); ++i) {
      const auto& k = lv.keys[i];
      EXPECT_TRUE(is_valid_key(k));
      if (lv.values[i].is_zero()) continue;
      const SymExpr e = e_from_r(lv.values[i], k);
      for (const auto& t : e.terms()) {
        const int a_pow = t.key.jet(0) + n;
        EXPECT_GE(a_pow, 0) << k.str();
        int sum_k = a_pow, sum_jk = 0;
        for (int d = 1; d < kJetSlots; ++d) {
          sum_k += t.key.jet(d);
          sum_jk += d * t.key.jet(d);
        }
        EXPECT_EQ(sum_k, sum_jk) << k.str();
        EXPECT_LE(sum_k, n) << k.str();
      }
    }
  }
}

TEST(Parametrix, ParallelLevelsAreIdentical) {
  const auto& serial = hopf6();
  const Computed parallel(hopf_symbols(), 6, 4);
  for (int n = 0; n <= 6; ++n) {
    const auto& a = serial.memo.level(n);
    const auto& b = parallel.memo.level(n);
    ASSERT_EQ(a.keys, b.keys);
    for (std::size_t i = 0; i < a.values.size(); ++i) EXPECT_EQ(a.values[i], b.values[i]);
  }
}

TEST(Parametrix, TraceLevelMatchesFullLevel) {
  const auto& c = hopf6();
  MemoTable memo(c.table.fingerprint());
  ParametrixEngine eng(c.table, memo);
  eng.ensure_levels(5);
  const auto trace = eng.compute_trace_level(6);
  std::size_t expected = 0;
  for (const auto& k : valid_keys(6))
    if (k.alpha_even() && !c.memo.get(k).blade_part(kUnitBlade).is_zero()) ++expected;
  EXPECT_EQ(trace.size(), expected);
  for (const auto& [k, v] : trace) EXPECT_EQ(v, c.memo.get(k).blade_part(kUnitBlade)) << k.str();
}

TEST(Parametrix, MemoGuards) {
  const SymbolTable h = hopf_symbols();
  MemoTable wrong(spherical_symbols().fingerprint());
  EXPECT_THROW(ParametrixEngine(h, wrong), invariant_violation);
  MemoTable memo(h.fingerprint());
  ParametrixEngine eng(h, memo);
  EXPECT_THROW(eng.compute_level(3), invariant_violation);
  eng.ensure_levels(3);
  memo.evict(1);
  EXPECT_THROW(memo.get({1, 2, {1, 0, 0, 0}}), invariant_violation);
  EXPECT_THROW(memo.store_level(4, {NodeKey{4, 1, {0, 0, 0, 0}}}, {SymExpr()}), invariant_violation);
}

TEST(Parametrix, CyclicDerivativesVanish) {
  const auto& c = hopf6();
  for (int n = 0; n <= 6; ++n)
    for (const auto& v : c.memo.level(n).values) {
      EXPECT_TRUE(c.table.derivative(v, 2).is_zero());
      EXPECT_TRUE(c.table.derivative(v, 3).is_zero());
    }
}
