#pragma once

#include <array>
#include <functional>
#include <string>

#include "rwsa/clifford.hpp"
#include "rwsa/scalar.hpp"

namespace rwsa {

using Matrix4 = std::array<std::array<Gaussian, 4>, 4>;

inline Matrix4 identity4() {
  Matrix4 m;
  for (int i = 0; i < 4; ++i) m[i][i] = Gaussian(1);
  return m;
}

inline Matrix4 operator*(const Matrix4& a, const Matrix4& b) {
  Matrix4 r;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k)
        if (!a[i][k].is_zero() && !b[k][j].is_zero()) r[i][j] += a[i][k] * b[k][j];
  return r;
}

inline Matrix4 scaled(Matrix4 m, int s) {
  for (auto& row : m)
    for (auto& x : row) x = x * Gaussian(s);
  return m;
}

inline Gaussian matrix_trace(const Matrix4& m) { return m[0][0] + m[1][1] + m[2][2] + m[3][3]; }

/// The explicit 4x4 gamma matrices gamma^1..gamma^4 of the spinor bundle.
inline std::array<Matrix4, 4> gamma_matrices() {
  const Gaussian I = Gaussian::i();
  const Gaussian mI = -I;
  const Gaussian one(1);
  const Gaussian m1(-1);
  const Gaussian z;
  return {{
      {{{z, z, I, z}, {z, z, z, I}, {I, z, z, z}, {z, I, z, z}}},
      {{{z, z, z, one}, {z, z, one, z}, {z, m1, z, z}, {m1, z, z, z}}},
      {{{z, z, z, mI}, {z, z, I, z}, {z, I, z, z}, {mI, z, z, z}}},
      {{{z, z, one, z}, {z, z, z, m1}, {m1, z, z, z}, {z, one, z, z}}},
  }};
}

/// Matrix of gamma^S, the ascending product of the generators in S.
inline Matrix4 blade_matrix(Blade b) {
  const auto g = gamma_matrices();
  Matrix4 m = identity4();
  for (int i = 0; i < 4; ++i)
    if ((b >> i) & 1u) m = m * g[i];
  return m;
}

struct MatrixModelReport {
  bool ok = true;
  std::string first_failure;
};

using BladeProduct = std::function<SignedBlade(Blade, Blade)>;

/// Checks all 256 blade products and all 16 traces against the explicit
/// matrices. The product under test is injectable so that the check itself
/// can be tested against a corrupted sign table.
inline MatrixModelReport verify_matrix_model(const BladeProduct& product = blade_mul) {
  std::array<Matrix4, kBladeCount> mats;
  for (int b = 0; b < kBladeCount; ++b) mats[b] = blade_matrix(static_cast<Blade>(b));
  MatrixModelReport rep;
  for (int s = 0; s < kBladeCount; ++s) {
    for (int t = 0; t < kBladeCount; ++t) {
      const SignedBlade p = product(static_cast<Blade>(s), static_cast<Blade>(t));
      if (!(mats[s] * mats[t] == scaled(mats[p.blade], p.sign))) {
        rep.ok = false;
        rep.first_failure = blade_name(static_cast<Blade>(s)) + "*" + blade_name(static_cast<Blade>(t));
        return rep;
      }
    }
  }
  for (int b = 0; b < kBladeCount; ++b) {
    CliffordElement<Gaussian> x(Gaussian(1), static_cast<Blade>(b));
    if (!(trace(x) == matrix_trace(mats[b]))) {
      rep.ok = false;
      rep.first_failure = "trace " + blade_name(static_cast<Blade>(b));
      return rep;
    }
  }
  return rep;
}

}  // namespace rwsa
