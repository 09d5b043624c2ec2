#pragma once

#include <map>
#include <stdexcept>
#include <utility>

#include "rwsa/parametrix.hpp"

namespace rwsa {

/// Polynomial in r0 = (p2 - lambda)^-1 and xi with SymExpr coefficients:
/// (j, alpha) -> coefficient of r0^j xi^alpha.
using R0XiPoly = std::map<std::pair<int, Alpha>, SymExpr>;

namespace detail {

inline void poly_add(R0XiPoly& p, int j, const Alpha& a, const SymExpr& c) {
  if (c.is_zero()) return;
  auto key = std::make_pair(j, a);
  auto it = p.find(key);
  if (it == p.end()) {
    p.emplace(key, c);
    return;
  }
  it->second += c;
  if (it->second.is_zero()) p.erase(it);
}

inline R0XiPoly poly_mul(const R0XiPoly& x, const R0XiPoly& y) {
  R0XiPoly r;
  for (const auto& [kx, cx] : x)
    for (const auto& [ky, cy] : y) {
      Alpha a;
      for (int i = 0; i < 4; ++i) a[i] = kx.second[i] + ky.second[i];
      poly_add(r, kx.first + ky.first, a, cx * cy);
    }
  return r;
}

/// d/dx_k, using d r0 = -r0^2 d p2 with p2 = sum_l g^ll xi_l^2.
inline R0XiPoly poly_dx(const R0XiPoly& p, int k, const SymbolTable& s) {
  R0XiPoly r;
  if (!s.depends_on(k)) return r;
  std::array<SymExpr, 4> dg;
  for (int l = 0; l < 4; ++l) dg[l] = s.derivative(s.g_inv[l], k);
  for (const auto& [key, c] : p) {
    const auto& [j, a] = key;
    poly_add(r, j, a, s.derivative(c, k));
    if (j == 0) continue;
    for (int l = 0; l < 4; ++l) {
      if (dg[l].is_zero()) continue;
      Alpha b = a;
      b[l] += 2;
      poly_add(r, j + 1, b, Scalar(-j) * (dg[l] * c));
    }
  }
  return r;
}

/// d/dxi_k of a polynomial (the r0 chain rule term included).
inline R0XiPoly poly_dxi(const R0XiPoly& p, int k, const SymbolTable& s) {
  R0XiPoly r;
  for (const auto& [key, c] : p) {
    const auto& [j, a] = key;
    if (a[k] > 0) {
      Alpha b = a;
      b[k] -= 1;
      poly_add(r, j, b, Scalar(a[k]) * c);
    }
    if (j > 0) {
      Alpha b = a;
      b[k] += 1;
      poly_add(r, j + 1, b, Scalar(-2 * j) * (s.g_inv[k] * c));
    }
  }
  return r;
}

}  // namespace detail

/// Parametrix components r_0..r_n from the plain composition formula
///   r_n = -r0 sum (-i)^|alpha| / alpha! d_xi^alpha p_k d_x^alpha r_m
/// over |alpha| + m + 2 - k = n, m < n. Independent of the specialized
/// recursion in ParametrixEngine; exponential cost, meant for n <= 4.
inline std::map<NodeKey, SymExpr> slow_oracle_rn(int n_max, const SymbolTable& s) {
  using detail::poly_add;
  if (n_max > 4) throw std::invalid_argument("slow_oracle_rn: n <= 4 only");
  std::array<R0XiPoly, 3> p;  // p[k] = homogeneous part of order k
  for (int l = 0; l < 4; ++l) {
    Alpha a{};
    a[l] = 2;
    poly_add(p[2], 0, a, s.g_inv[l]);
    Alpha b{};
    b[l] = 1;
    poly_add(p[1], 0, b, s.p1[l]);
  }
  poly_add(p[0], 0, Alpha{}, s.p0);

  // All multi-indices with |alpha| <= 2.
  std::vector<Alpha> multi;
  for (int a0 = 0; a0 <= 2; ++a0)
    for (int a1 = 0; a0 + a1 <= 2; ++a1)
      for (int a2 = 0; a0 + a1 + a2 <= 2; ++a2)
        for (int a3 = 0; a0 + a1 + a2 + a3 <= 2; ++a3) multi.push_back({a0, a1, a2, a3});

  std::vector<R0XiPoly> r(static_cast<std::size_t>(n_max) + 1);
  poly_add(r[0], 1, Alpha{}, sym::one());
  for (int n = 1; n <= n_max; ++n) {
    R0XiPoly sum;
    for (int k = 0; k <= 2; ++k) {
      for (const Alpha& al : multi) {
        const int abs = al[0] + al[1] + al[2] + al[3];
        const int m = n + k - 2 - abs;
        if (m < 0 || m >= n) continue;
        R0XiPoly dp = p[k];
        R0XiPoly dr = r[m];
        int fact = 1;
        for (int c = 0; c < 4; ++c)
          for (int t = 0; t < al[c]; ++t) {
            dp = detail::poly_dxi(dp, c, s);
            dr = detail::poly_dx(dr, c, s);
            fact *= t + 1;
          }
        if (dp.empty() || dr.empty()) continue;
        // (-i)^|alpha| / alpha!
        Gaussian coef(Rational(1, fact));
        for (int t = 0; t < abs; ++t) coef = coef * Gaussian::i(-1);
        for (const auto& [key, c] : detail::poly_mul(dp, dr)) poly_add(sum, key.first, key.second, Scalar(coef) * c);
      }
    }
    for (const auto& [key, c] : sum) poly_add(r[n], key.first + 1, key.second, -c);
  }

  std::map<NodeKey, SymExpr> out;
  for (int n = 0; n <= n_max; ++n)
    for (const auto& [key, c] : r[n]) out.emplace(NodeKey{n, key.first, key.second}, c);
  return out;
}

}  // namespace rwsa
