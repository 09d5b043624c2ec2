#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "rwsa/symbols.hpp"

using namespace rwsa;
using detail::I;
using detail::T;

namespace {

const Rational half(1, 2);

std::vector<double> some_jets(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-2, 2);
  std::vector<double> v(kJetSlots);
  for (auto& x : v) x = u(rng);
  v[0] = 1.5 + std::abs(v[0]);
  return v;
}

std::vector<const SymExpr*> all_exprs(const SymbolTable& s) {
  std::vector<const SymExpr*> out{&s.p0, &s.volume_density, &s.dirac_zero};
  for (int k = 0; k < 4; ++k) {
    out.push_back(&s.g_inv[k]);
    out.push_back(&s.p1[k]);
    out.push_back(&s.dirac_linear[k]);
  }
  return out;
}

/// Composite Simpson rule.
template <class F>
double simpson(F f, double lo, double hi, int steps = 2000) {
  const double h = (hi - lo) / steps;
  double sum = f(lo) + f(hi);
  for (int i = 1; i < steps; ++i) sum += f(lo + i * h) * (i % 2 ? 4 : 2);
  return sum * h / 3;
}

}  // namespace

TEST(HopfSymbols, PrintedEntries) {
  const SymbolTable s = hopf_symbols();
  EXPECT_EQ(s.p1[0], T(I(-3), 0, {}, {{0, -1}, {1, 1}}));
  EXPECT_EQ(s.g_inv[3], T(1, 0, {0, -2}, {{0, -2}}));
  EXPECT_EQ(s.g_inv[0], sym::one());
  EXPECT_EQ(s.g_inv[1], T(1, 0, {}, {{0, -2}}));
  EXPECT_EQ(s.volume_density, T(1, 0, {1, 1}, {{0, 3}}));
  EXPECT_EQ(s.angular_volume, (PiMultiple{Rational(2), 2}));
}

TEST(HopfSymbols, GammaTwelvePartOfP0HasSignFromSquaredDirac) {
  const SymbolTable s = hopf_symbols();
  const SymExpr expected = T(-half, blade(1, 2), {-1, 1}, {{0, -2}, {1, 1}}) + T(half, blade(1, 2), {1, -1}, {{0, -2}, {1, 1}});
  EXPECT_EQ(s.p0.blade_part(blade(1, 2)), expected);
  EXPECT_TRUE(equal_mod_pythagoras(square_of_dirac(s).p0, s.p0));
  // The opposite sign is not the square of the Dirac symbol.
  SymExpr flipped = s.p0 - Scalar(2) * expected;
  EXPECT_FALSE(equal_mod_pythagoras(square_of_dirac(s).p0, flipped));
}

TEST(SphericalSymbols, PrintedEntries) {
  const SymbolTable s = spherical_symbols();
  EXPECT_EQ(s.g_inv[3], T(1, 0, {-2, 0, -2, 0}, {{0, -2}}));
  EXPECT_EQ(s.p1[2].blade_part(kUnitBlade), T(I(-1), 0, {-2, 0, -1, 1}, {{0, -2}}));
  EXPECT_EQ(s.volume_density, T(1, 0, {2, 0, 1, 0}, {{0, 3}}));
}

TEST(SphericalSymbols, SelfCancellingPairInP0) {
  const SymbolTable s = spherical_symbols();
  for (const auto& t : s.p0.terms()) EXPECT_TRUE(t.coeff.is_real()) << t.coeff.str();
  const SymExpr pair = T(I(Rational(4, 8)), 0, {-2, 1, -1, 1}, {{0, -2}}) + T(I(Rational(-4, 8)), 0, {-2, 1, -1, 1}, {{0, -2}});
  EXPECT_TRUE(pair.is_zero());
}

class BothTables : public ::testing::TestWithParam<std::string> {};

TEST_P(BothTables, TablesAreTheSquareOfTheDiracSymbol) {
  const SymbolTable s = symbols_by_name(GetParam());
  const SquaredSymbol sq = square_of_dirac(s);
  for (int k = 0; k < 4; ++k)
    for (int l = k; l < 4; ++l) {
      if (k == l) EXPECT_EQ(sq.p2[k][l], s.g_inv[k]) << k;
      else EXPECT_TRUE(sq.p2[k][l].is_zero()) << k << l;
    }
  for (int k = 0; k < 4; ++k) EXPECT_TRUE(equal_mod_pythagoras(sq.p1[k], s.p1[k])) << "p1 component " << k;
  EXPECT_TRUE(equal_mod_pythagoras(sq.p0, s.p0));
}

TEST_P(BothTables, MetricIsBladeFreeAndPositive) {
  const SymbolTable s = symbols_by_name(GetParam());
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ang(0.05, M_PI / 2 - 0.05);
  for (int trial = 0; trial < 200; ++trial) {
    const auto jets = some_jets(rng);
    const std::array<double, kAngleVars> angles{ang(rng), ang(rng)};
    std::uniform_real_distribution<double> xi(-3, 3);
    double p2 = 0;
    for (int k = 0; k < 4; ++k) {
      EXPECT_EQ(s.g_inv[k].blade_set(), 1u);
      const auto v = s.g_inv[k].eval_numeric(angles, jets);
      EXPECT_GT(v[0].real(), 0);
      const double x = xi(rng);
      p2 += v[0].real() * x * x;
    }
    EXPECT_GT(p2, 0);
  }
}

TEST_P(BothTables, CyclicCoordinatesDoNotAppear) {
  const SymbolTable s = symbols_by_name(GetParam());
  EXPECT_FALSE(s.depends_on(3));
  for (int k = 0; k < 4; ++k) {
    if (s.kind[k] != CoordKind::cyclic) continue;
    for (const SymExpr* x : all_exprs(s)) EXPECT_TRUE(s.derivative(*x, k).is_zero());
  }
  // Angle generators beyond the table's own never occur.
  for (const SymExpr* x : all_exprs(s))
    for (const auto& t : x->terms())
      for (int v = s.angle_vars; v < kAngleVars; ++v) {
        EXPECT_EQ(t.key.angle(sin_slot(v)), 0);
        EXPECT_EQ(t.key.angle(cos_slot(v)), 0);
      }
}

TEST_P(BothTables, AngularVolumeMatchesNumericIntegral) {
  const SymbolTable s = symbols_by_name(GetParam());
  std::vector<double> jets(kJetSlots, 0.0);
  jets[0] = 1.0;
  double integral;
  if (s.name == "hopf") {
    // eta in [0, pi/2], phi1 and phi2 in [0, 2 pi].
    integral = 4 * M_PI * M_PI * simpson([&](double e) { return s.volume_density.eval_numeric({e, 0}, jets)[0].real(); }, 0, M_PI / 2);
  } else {
    // chi, theta in [0, pi], phi in [0, 2 pi]; the density factorizes.
    const double chi = simpson([&](double c) { return s.volume_density.eval_numeric({c, M_PI / 2}, jets)[0].real(); }, 0, M_PI);
    const double theta = simpson([&](double t) { return s.volume_density.eval_numeric({M_PI / 2, t}, jets)[0].real(); }, 0, M_PI);
    integral = 2 * M_PI * chi * theta;
  }
  const double expected = s.angular_volume.coeff.to_double() * std::pow(M_PI, s.angular_volume.pi_power);
  EXPECT_NEAR(integral, 2 * M_PI * M_PI, 1e-9);
  EXPECT_NEAR(expected, 2 * M_PI * M_PI, 1e-12);
}

TEST_P(BothTables, EvaluationPointsAreExactSinesAndCosines) {
  const SymbolTable s = symbols_by_name(GetParam());
  for (const AnglePoint* p : {&s.point_a, &s.point_b})
    for (int v = 0; v < s.angle_vars; ++v) {
      const QuadExt& sn = p->values[sin_slot(v)];
      const QuadExt& cs = p->values[cos_slot(v)];
      EXPECT_EQ(sn * sn + cs * cs, QuadExt::rational(Scalar(1), p->d)) << p->label;
    }
  EXPECT_NE(s.point_a.d, s.point_b.d);
}

TEST_P(BothTables, FingerprintIsStableAndDistinct) {
  const SymbolTable s = symbols_by_name(GetParam());
  EXPECT_EQ(s.fingerprint(), symbols_by_name(GetParam()).fingerprint());
  SymbolTable t = s;
  t.p0 = t.p0 + sym::one();
  EXPECT_NE(s.fingerprint(), t.fingerprint());
  EXPECT_NE(hopf_symbols().fingerprint(), spherical_symbols().fingerprint());
}

INSTANTIATE_TEST_SUITE_P(Coords, BothTables, ::testing::Values("hopf", "spherical"));
