#pragma once

#include <map>

#include "rwsa/parametrix.hpp"

namespace rwsa {

/// e_{n,j,alpha} = r_{n,j,alpha} a^(alpha2+alpha3+alpha4) sin^alpha3 cos^alpha4 / (j-1)!
/// in Hopf coordinates.
inline SymExpr e_from_r(const SymExpr& r, const NodeKey& k) {
  if (r.is_zero()) return r;
  Mono m;
  m.angles = {k.alpha[2], k.alpha[3], 0, 0};
  m.jets = {k.alpha[1] + k.alpha[2] + k.alpha[3]};
  return Scalar(Gaussian(Rational(Integer(1), factorial(static_cast<unsigned>(k.j - 1))))) *
         (SymExpr::monomial(Scalar(1), m) * r);
}

/// The Hopf-specific recursion for e_{n,j,alpha}, seeded with the closed-form
/// values at n = 0, 1. Kept independent of ParametrixEngine so the two can be
/// compared node by node.
///
/// Note the overall factor i on the n-1 group and the index
/// alpha-2e3-2e4 on the 8(a'^2 - 1) term; both come out of substituting the
/// definition of e into the r-recursion.
class HopfERecursion {
 public:
  HopfERecursion() { seed(); }

  const SymExpr& get(int n, int j, const Alpha& a) const {
    static const SymExpr zero;
    if (n < 0 || j < 1) return zero;
    for (int x : a)
      if (x < 0) return zero;
    auto it = nodes_.find(NodeKey{n, j, a});
    return it == nodes_.end() ? zero : it->second;
  }
  const SymExpr& get(const NodeKey& k) const { return get(k.n, k.j, k.alpha); }

  int levels() const { return levels_; }

  /// Extends the table through level n.
  void compute_through(int n) {
    for (int m = levels_; m <= n; ++m) {
      std::vector<std::pair<NodeKey, SymExpr>> level;
      for (const auto& k : valid_keys(m)) {
        SymExpr e = e_node(k);
        if (!e.is_zero()) level.emplace_back(k, std::move(e));
      }
      for (auto& [k, e] : level) nodes_.emplace(k, std::move(e));
      levels_ = m + 1;
    }
  }

  /// Runs the recursion at one key from the stored lower levels.
  SymExpr e_node(const NodeKey& key) const {
    const int n = key.n, j = key.j;
    if (n < 2) return get(key);
    const auto& al = key.alpha;
    const int a3 = al[2], a4 = al[3];
    const int S = al[1] + al[2] + al[3];
    auto sub = [&](std::initializer_list<std::pair<int, int>> d) {
      Alpha b = al;
      for (auto [idx, v] : d) b[idx] -= v;
      return b;
    };
    auto E = [&](int nn, int jj, const Alpha& b) -> const SymExpr& { return get(nn, jj, b); };
    auto dt = [](const SymExpr& x) { return x.d_dt(); };
    auto deta = [](const SymExpr& x) { return x.d_angle(0); };
    using detail::T;
    const Gaussian one(1);
    auto M = [](const Gaussian& c, std::initializer_list<std::pair<int, int>> jets) {
      return T(c, 0, {}, jets);
    };
    const SymExpr ap = M(1, {{1, 1}});
    auto cot = [](const Gaussian& c) { return T(c, 0, {-1, 1}, {}); };
    auto tan = [](const Gaussian& c) { return T(c, 0, {1, -1}, {}); };
    auto csc2 = [](const Gaussian& c) { return T(c, 0, {-2, 0}, {}); };
    auto sec2 = [](const Gaussian& c) { return T(c, 0, {0, -2}, {}); };
    auto G = [](Blade b, const Gaussian& c, std::array<int, kAngleSlots> ang,
                std::initializer_list<std::pair<int, int>> jets) { return T(c, b, ang, jets); };
    const Blade g12 = blade(1, 2), g13 = blade(1, 3), g14 = blade(1, 4), g23 = blade(2, 3), g24 = blade(2, 4);

    // Group with e_{n-1,...}: prefactor i / ((j-1) a).
    TermAccumulator g1;
    g1.add_product(G(g14, 1, {}, {{1, 1}}) + G(g24, -1, {1, -1}, {}), E(n - 1, j - 1, sub({{3, 1}})));
    g1.add_product(G(g13, 1, {}, {{1, 1}}) + G(g23, 1, {-1, 1}, {}), E(n - 1, j - 1, sub({{2, 1}})));
    g1.add_product(G(g12, 1, {}, {{1, 1}}) + tan(2 * a4 - 1) + cot(1 - 2 * a3), E(n - 1, j - 1, sub({{1, 1}})));
    for (int l = 1; l <= 3; ++l) g1.add_product(M(4, {{1, 1}}), E(n - 1, j - 2, sub({{0, 1}, {l, 2}})));
    g1.add_product(M(-2 * S + 3, {{1, 1}}), E(n - 1, j - 1, sub({{0, 1}})));
    g1.add_product(M(2, {{0, 1}}), dt(E(n - 1, j - 1, sub({{0, 1}}))));
    g1.add_product(tan(-4), E(n - 1, j - 2, sub({{1, 1}, {3, 2}})));
    g1.add_product(cot(4), E(n - 1, j - 2, sub({{1, 1}, {2, 2}})));
    g1.add_product(M(2, {}), deta(E(n - 1, j - 1, sub({{1, 1}}))));
    const SymExpr part1 = g1.finish();

    // Group with e_{n-2,...}: prefactor 1 / ((j-1) a^2).
    TermAccumulator g2;
    const SymExpr& e0 = E(n - 2, j - 1, al);
    g2.add_product(M(1, {{0, 2}}), dt(dt(e0)));
    for (int l = 1; l <= 3; ++l) g2.add_product(M(4, {{0, 1}, {1, 1}}), dt(E(n - 2, j - 2, sub({{l, 2}}))));
    g2.add_product(M(-2 * S + 3, {{0, 1}, {1, 1}}), dt(e0));
    g2.add_product(M(4, {{1, 2}}), E(n - 2, j - 3, sub({{1, 4}})));
    g2.add_product(M(8, {{1, 2}}), E(n - 2, j - 3, sub({{1, 2}, {2, 2}})));
    g2.add_product(M(8, {{1, 2}}), E(n - 2, j - 3, sub({{1, 2}, {3, 2}})));
    g2.add_product(cot(4), deta(E(n - 2, j - 2, sub({{2, 2}}))));
    g2.add_product(tan(-4), deta(E(n - 2, j - 2, sub({{3, 2}}))));
    g2.add_product(M(1, {}), deta(deta(e0)));
    g2.add_product(G(g12, 2, {-1, 1}, {{1, 1}}) + M(-4 * (S - 2), {{1, 2}}) + csc2(-4 * (a3 - 1)) +
                       M(4 * (a3 + a4 - 2), {}) + M(2, {{0, 1}, {2, 1}}),
                   E(n - 2, j - 2, sub({{2, 2}})));
    g2.add_product(cot(1 - 2 * a3) + tan(2 * a4 - 1) + G(g12, 1, {}, {{1, 1}}), deta(e0));
    g2.add_product(G(g12, -2, {1, -1}, {{1, 1}}) + M(-4 * (S - 2), {{1, 2}}) + sec2(-4 * (a4 - 1)) +
                       M(4 * (a3 + a4 - 2), {}) + M(2, {{0, 1}, {2, 1}}),
                   E(n - 2, j - 2, sub({{3, 2}})));
    g2.add_product(M(8, {{1, 2}}) + M(-8, {}), E(n - 2, j - 3, sub({{2, 2}, {3, 2}})));
    g2.add_product(cot(1) * cot(4) + M(4, {{1, 2}}), E(n - 2, j - 3, sub({{2, 4}})));
    g2.add_product(tan(1) * tan(4) + M(4, {{1, 2}}), E(n - 2, j - 3, sub({{3, 4}})));
    g2.add_product(M(2, {{0, 1}, {2, 1}}) + M(-4 * (S - 2), {{1, 2}}), E(n - 2, j - 2, sub({{1, 2}})));
    const Rational half(1, 2), quarter(1, 4);
    const SymExpr f_last =
        Scalar(Gaussian(half)) * (G(g12, 1 - 2 * a3, {-1, 1}, {{1, 1}}) + G(g12, 2 * a4 - 1, {1, -1}, {{1, 1}})) +
        Scalar(Gaussian(quarter)) * (csc2(4 * a3 * a3 - 1) + M(-4 * (a3 + a4 - 1) * (a3 + a4 - 1), {}) +
                                     M((2 * S - 3) * (2 * S - 1), {{1, 2}}) + sec2(4 * a4 * a4 - 1) +
                                     M(-2 * (2 * S - 3), {{0, 1}, {2, 1}}));
    g2.add_product(f_last, e0);
    const SymExpr part2 = g2.finish();

    const Rational inv_j(1, j - 1);
    return Scalar(Gaussian::i(inv_j)) * (M(1, {{0, -1}}) * part1) +
           Scalar(Gaussian(inv_j)) * (M(1, {{0, -2}}) * part2);
  }

 private:
  /// Closed-form values at n = 0 and n = 1.
  void seed() {
    using detail::T;
    const Gaussian two_i = Gaussian::i(2);
    const Gaussian i = Gaussian::i();
    const Rational half(1, 2);
    auto put = [&](int n, int j, Alpha a, SymExpr v) { nodes_.emplace(NodeKey{n, j, a}, std::move(v)); };
    put(0, 1, {0, 0, 0, 0}, sym::one());
    put(1, 2, {1, 0, 0, 0}, T(Gaussian::i(3), 0, {}, {{0, -1}, {1, 1}}));
    put(1, 3, {1, 2, 0, 0}, T(two_i, 0, {}, {{0, -1}, {1, 1}}));
    put(1, 3, {1, 0, 2, 0}, T(two_i, 0, {}, {{0, -1}, {1, 1}}));
    put(1, 3, {1, 0, 0, 2}, T(two_i, 0, {}, {{0, -1}, {1, 1}}));
    put(1, 3, {0, 1, 0, 2}, T(-two_i, 0, {1, -1}, {{0, -1}}));
    put(1, 3, {0, 1, 2, 0}, T(two_i, 0, {-1, 1}, {{0, -1}}));
    put(1, 2, {0, 0, 1, 0}, T(i, blade(1, 3), {}, {{0, -1}, {1, 1}}) + T(i, blade(2, 3), {-1, 1}, {{0, -1}}));
    put(1, 2, {0, 0, 0, 1}, T(i, blade(1, 4), {}, {{0, -1}, {1, 1}}) - T(i, blade(2, 4), {1, -1}, {{0, -1}}));
    // 2i cot(2 eta) = i (c/s - s/c)
    put(1, 2, {0, 1, 0, 0},
        T(i, 0, {-1, 1}, {{0, -1}}) - T(i, 0, {1, -1}, {{0, -1}}) + T(i, blade(1, 2), {}, {{0, -1}, {1, 1}}));
    levels_ = 2;
  }

  std::map<NodeKey, SymExpr> nodes_;
  int levels_ = 0;
};

}  // namespace rwsa
