#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "rwsa/sym_expr.hpp"

namespace rwsa {

enum class CoordKind { time, angle, cyclic };

/// Rational multiple of a power of pi.
struct PiMultiple {
  Rational coeff;
  int pi_power = 0;
  friend bool operator==(const PiMultiple&, const PiMultiple&) = default;
};

/// Symbol of D^2 = p2 + p1 + p0 for one coordinate system, with
/// p2 = sum_k g^kk xi_k^2 and p1 = sum_k p1[k] xi_k.
struct SymbolTable {
  std::string name;
  std::array<std::string, 4> coord_names;
  std::array<CoordKind, 4> kind{};
  std::array<int, 4> angle_var{-1, -1, -1, -1};
  int angle_vars = 0;

  std::array<SymExpr, 4> g_inv;
  std::array<SymExpr, 4> p1;
  SymExpr p0;
  SymExpr volume_density;
  PiMultiple angular_volume;

  /// Dirac symbol sum_k dirac_linear[k] xi_k + dirac_zero, kept so that the
  /// tables can be checked against the square of D.
  std::array<SymExpr, 4> dirac_linear;
  SymExpr dirac_zero;

  /// Two exact angle points used for the angle-independence check.
  AnglePoint point_a;
  AnglePoint point_b;

  bool depends_on(int k) const { return kind[k] != CoordKind::cyclic; }

  SymExpr derivative(const SymExpr& x, int k, std::uint16_t blade_filter = 0xffff) const {
    switch (kind[k]) {
      case CoordKind::time: return x.d_dt(blade_filter);
      case CoordKind::angle: return x.d_angle(angle_var[k], blade_filter);
      case CoordKind::cyclic: return SymExpr();
    }
    return SymExpr();
  }

  /// FNV-1a hash of everything the recursion reads.
  std::uint64_t fingerprint() const {
    std::uint64_t h = 0xcbf29ce484222325ull;
    auto mix_bytes = [&h](const void* p, std::size_t n) {
      const auto* b = static_cast<const unsigned char*>(p);
      for (std::size_t i = 0; i < n; ++i) {
        h ^= b[i];
        h *= 0x100000001b3ull;
      }
    };
    auto mix_str = [&](const std::string& s) {
      mix_bytes(s.data(), s.size());
      mix_bytes("\0", 1);
    };
    auto mix_expr = [&](const SymExpr& x) {
      const std::uint64_t n = x.size();
      mix_bytes(&n, sizeof n);
      const int e = x.sqrt_pi_exp();
      mix_bytes(&e, sizeof e);
      for (const auto& t : x.terms()) {
        mix_bytes(t.key.bytes.data(), t.key.bytes.size());
        mix_str(t.coeff.re.str());
        mix_str(t.coeff.im.str());
      }
    };
    mix_str("rwsa-symbols-v1");
    mix_str(name);
    for (int k = 0; k < 4; ++k) {
      const int kd = static_cast<int>(kind[k]);
      mix_bytes(&kd, sizeof kd);
      mix_bytes(&angle_var[k], sizeof angle_var[k]);
      mix_expr(g_inv[k]);
      mix_expr(p1[k]);
    }
    mix_expr(p0);
    return h;
  }
};

namespace detail {

inline SymExpr T(const Gaussian& c, Blade b, std::array<int, kAngleSlots> ang,
                 std::initializer_list<std::pair<int, int>> jets) {
  return sym::term(c, b, ang, jets);
}

inline Gaussian I(Rational v = 1) { return Gaussian::i(std::move(v)); }

inline QuadExt q_rat(Rational r, int d) { return QuadExt::rational(Scalar(Gaussian(std::move(r))), d); }
inline QuadExt q_surd(Rational r, int d) { return {Scalar(), Scalar(Gaussian(std::move(r))), d}; }

}  // namespace detail

/// D^2 of dt^2 + a(t)^2 (d eta^2 + sin^2 eta d phi1^2 + cos^2 eta d phi2^2).
/// The gamma^12 term of p0 carries the sign fixed by squaring the Dirac
/// symbol below.
inline SymbolTable hopf_symbols() {
  using detail::I;
  using detail::T;
  const Blade g1 = gen(1), g2 = gen(2), g3 = gen(3), g4 = gen(4);
  const Blade g12 = blade(1, 2), g13 = blade(1, 3), g14 = blade(1, 4), g23 = blade(2, 3),
              g24 = blade(2, 4);
  const Rational half(1, 2), quarter(1, 4);

  SymbolTable s;
  s.name = "hopf";
  s.coord_names = {"t", "eta", "phi1", "phi2"};
  s.kind = {CoordKind::time, CoordKind::angle, CoordKind::cyclic, CoordKind::cyclic};
  s.angle_var = {-1, 0, -1, -1};
  s.angle_vars = 1;

  s.g_inv[0] = sym::one();
  s.g_inv[1] = T(1, 0, {}, {{0, -2}});
  s.g_inv[2] = T(1, 0, {-2, 0}, {{0, -2}});
  s.g_inv[3] = T(1, 0, {0, -2}, {{0, -2}});

  s.p1[0] = T(I(-3), 0, {}, {{0, -1}, {1, 1}});
  // -2i cot(2 eta) = -i (c/s - s/c)
  s.p1[1] = T(I(-1), g12, {}, {{0, -2}, {1, 1}}) + T(I(-1), 0, {-1, 1}, {{0, -2}}) +
            T(I(1), 0, {1, -1}, {{0, -2}});
  s.p1[2] = T(I(-1), g13, {-1, 0}, {{0, -2}, {1, 1}}) + T(I(-1), g23, {-2, 1}, {{0, -2}});
  s.p1[3] = T(I(1), g24, {1, -2}, {{0, -2}}) + T(I(-1), g14, {0, -1}, {{0, -2}, {1, 1}});

  s.p0 = T(Rational(-3, 2), 0, {}, {{0, -1}, {2, 1}}) + T(Rational(-3, 4), 0, {}, {{0, -2}, {1, 2}}) +
         T(quarter, 0, {-2, 0}, {{0, -2}}) + T(quarter, 0, {0, -2}, {{0, -2}}) + T(1, 0, {}, {{0, -2}}) +
         T(-half, g12, {-1, 1}, {{0, -2}, {1, 1}}) + T(half, g12, {1, -1}, {{0, -2}, {1, 1}});

  s.volume_density = T(1, 0, {1, 1}, {{0, 3}});
  s.angular_volume = {Rational(2), 2};

  s.dirac_linear[0] = T(I(), g1, {}, {});
  s.dirac_linear[1] = T(I(), g2, {}, {{0, -1}});
  s.dirac_linear[2] = T(I(), g3, {-1, 0}, {{0, -1}});
  s.dirac_linear[3] = T(I(), g4, {0, -1}, {{0, -1}});
  s.dirac_zero = T(Rational(3, 2), g1, {}, {{0, -1}, {1, 1}}) + T(half, g2, {-1, 1}, {{0, -1}}) +
                 T(-half, g2, {1, -1}, {{0, -1}});

  s.point_a = {"eta=pi/4", 2, {detail::q_surd(half, 2), detail::q_surd(half, 2), detail::q_rat(1, 2),
                               detail::q_rat(1, 2)}};
  s.point_b = {"eta=pi/3", 3, {detail::q_surd(half, 3), detail::q_rat(half, 3), detail::q_rat(1, 3),
                               detail::q_rat(1, 3)}};
  return s;
}

/// D^2 of dt^2 + a(t)^2 (d chi^2 + sin^2 chi (d theta^2 + sin^2 theta d phi^2)).
inline SymbolTable spherical_symbols() {
  using detail::I;
  using detail::T;
  const Blade g1 = gen(1), g2 = gen(2), g3 = gen(3), g4 = gen(4);
  const Blade g12 = blade(1, 2), g13 = blade(1, 3), g14 = blade(1, 4), g23 = blade(2, 3),
              g24 = blade(2, 4), g34 = blade(3, 4);
  const Rational half(1, 2);
  // Angle slots: {sin chi, cos chi, sin theta, cos theta}.

  SymbolTable s;
  s.name = "spherical";
  s.coord_names = {"t", "chi", "theta", "phi"};
  s.kind = {CoordKind::time, CoordKind::angle, CoordKind::angle, CoordKind::cyclic};
  s.angle_var = {-1, 0, 1, -1};
  s.angle_vars = 2;

  s.g_inv[0] = sym::one();
  s.g_inv[1] = T(1, 0, {}, {{0, -2}});
  s.g_inv[2] = T(1, 0, {-2, 0, 0, 0}, {{0, -2}});
  s.g_inv[3] = T(1, 0, {-2, 0, -2, 0}, {{0, -2}});

  s.p1[0] = T(I(-3), 0, {}, {{0, -1}, {1, 1}});
  s.p1[1] = T(I(-1), g12, {}, {{0, -2}, {1, 1}}) + T(I(-2), 0, {-1, 1, 0, 0}, {{0, -2}});
  s.p1[2] = T(I(-1), g13, {-1, 0, 0, 0}, {{0, -2}, {1, 1}}) + T(I(-1), 0, {-2, 0, -1, 1}, {{0, -2}}) +
            T(I(-1), g23, {-2, 1, 0, 0}, {{0, -2}});
  s.p1[3] = T(I(-1), g14, {-1, 0, -1, 0}, {{0, -2}, {1, 1}}) + T(I(-1), g34, {-2, 0, -2, 1}, {{0, -2}}) +
            T(I(-1), g24, {-2, 1, -1, 0}, {{0, -2}});

  const Rational e(1, 8);
  s.p0 = T(e * -12, 0, {}, {{0, -1}, {2, 1}}) + T(e * -6, 0, {}, {{0, -2}, {1, 2}}) +
         T(e * 3, 0, {-2, 0, -2, 0}, {{0, -2}}) + T(-e, 0, {-2, 0, -2, 2}, {{0, -2}}) +
         T(I(e * 4), 0, {-2, 1, -1, 1}, {{0, -2}}) + T(I(e * -4), 0, {-2, 1, -1, 1}, {{0, -2}}) +
         T(e * -4, 0, {-2, 2, 0, 0}, {{0, -2}}) + T(e * 5, 0, {-2, 0, 0, 0}, {{0, -2}}) +
         T(e * 4, 0, {}, {{0, -2}}) + T(-half, g13, {-1, 0, -1, 1}, {{0, -2}, {1, 1}}) +
         T(-1, g12, {-1, 1, 0, 0}, {{0, -2}, {1, 1}}) + T(-half, g23, {-2, 1, -1, 1}, {{0, -2}});

  s.volume_density = T(1, 0, {2, 0, 1, 0}, {{0, 3}});
  s.angular_volume = {Rational(2), 2};

  s.dirac_linear[0] = T(I(), g1, {}, {});
  s.dirac_linear[1] = T(I(), g2, {}, {{0, -1}});
  s.dirac_linear[2] = T(I(), g3, {-1, 0, 0, 0}, {{0, -1}});
  s.dirac_linear[3] = T(I(), g4, {-1, 0, -1, 0}, {{0, -1}});
  s.dirac_zero = T(Rational(3, 2), g1, {}, {{0, -1}, {1, 1}}) + T(1, g2, {-1, 1, 0, 0}, {{0, -1}}) +
                 T(half, g3, {-1, 0, -1, 1}, {{0, -1}});

  s.point_a = {"chi=pi/4,theta=pi/4", 2,
               {detail::q_surd(half, 2), detail::q_surd(half, 2), detail::q_surd(half, 2),
                detail::q_surd(half, 2)}};
  s.point_b = {"chi=pi/3,theta=pi/6", 3,
               {detail::q_surd(half, 3), detail::q_rat(half, 3), detail::q_rat(half, 3),
                detail::q_surd(half, 3)}};
  return s;
}

inline SymbolTable symbols_by_name(const std::string& name) {
  if (name == "hopf") return hopf_symbols();
  if (name == "spherical") return spherical_symbols();
  throw std::invalid_argument("unknown coordinate system: " + name);
}

/// Symbol of the composition of the Dirac symbol with itself:
/// sum over |alpha| <= 1 of (-i)^|alpha| d_xi^alpha sigma d_x^alpha sigma.
struct SquaredSymbol {
  std::array<std::array<SymExpr, 4>, 4> p2;  // coefficient of xi_k xi_l (k <= l)
  std::array<SymExpr, 4> p1;
  SymExpr p0;
};

inline SquaredSymbol square_of_dirac(const SymbolTable& s) {
  SquaredSymbol r;
  const Scalar minus_i(Gaussian::i(-1));
  for (int k = 0; k < 4; ++k)
    for (int l = k; l < 4; ++l) {
      r.p2[k][l] = s.dirac_linear[k] * s.dirac_linear[l];
      if (l != k) r.p2[k][l] += s.dirac_linear[l] * s.dirac_linear[k];
    }
  for (int k = 0; k < 4; ++k) {
    SymExpr e = s.dirac_linear[k] * s.dirac_zero + s.dirac_zero * s.dirac_linear[k];
    for (int m = 0; m < 4; ++m) e += minus_i * (s.dirac_linear[m] * s.derivative(s.dirac_linear[k], m));
    r.p1[k] = e;
  }
  r.p0 = s.dirac_zero * s.dirac_zero;
  for (int m = 0; m < 4; ++m) r.p0 += minus_i * (s.dirac_linear[m] * s.derivative(s.dirac_zero, m));
  return r;
}

}  // namespace rwsa
