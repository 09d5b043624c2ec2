#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>

namespace rwsa {

/// Subset of {1,2,3,4}: bit i-1 stands for gamma^i.
using Blade = std::uint8_t;

inline constexpr Blade kUnitBlade = 0;
inline constexpr int kBladeCount = 16;

constexpr Blade gen(int i) { return static_cast<Blade>(1u << (i - 1)); }
constexpr Blade blade(int i, int j) { return static_cast<Blade>(gen(i) | gen(j)); }

struct SignedBlade {
  int sign;
  Blade blade;
  friend bool operator==(const SignedBlade&, const SignedBlade&) = default;
};

/// Product gamma^s gamma^t under gamma^i gamma^j = -gamma^j gamma^i (i != j)
/// and (gamma^i)^2 = -1.
constexpr SignedBlade blade_mul(Blade s, Blade t) {
  int swaps = 0;
  unsigned x = s;
  for (int i = 0; i < 4; ++i) {
    if (!((t >> i) & 1u)) continue;
    swaps += std::popcount(x >> (i + 1));
    if ((x >> i) & 1u) ++swaps;
    x ^= 1u << i;
  }
  return {(swaps & 1) ? -1 : 1, static_cast<Blade>(x)};
}

namespace detail {
constexpr std::array<std::array<SignedBlade, kBladeCount>, kBladeCount> make_blade_table() {
  std::array<std::array<SignedBlade, kBladeCount>, kBladeCount> t{};
  for (int s = 0; s < kBladeCount; ++s)
    for (int u = 0; u < kBladeCount; ++u) t[s][u] = blade_mul(static_cast<Blade>(s), static_cast<Blade>(u));
  return t;
}
}  // namespace detail

inline constexpr auto kBladeTable = detail::make_blade_table();

/// "1", "g12", "g134", ...
inline std::string blade_name(Blade b) {
  if (b == kUnitBlade) return "1";
  std::string s = "g";
  for (int i = 0; i < 4; ++i)
    if ((b >> i) & 1u) s += static_cast<char>('1' + i);
  return s;
}

inline Blade parse_blade(const std::string& name) {
  if (name == "1") return kUnitBlade;
  if (name.size() < 2 || name[0] != 'g') throw std::invalid_argument("bad blade name: " + name);
  Blade b = 0;
  int last = 0;
  for (std::size_t k = 1; k < name.size(); ++k) {
    const int i = name[k] - '0';
    if (i <= last || i > 4) throw std::invalid_argument("bad blade name: " + name);
    b |= gen(i);
    last = i;
  }
  return b;
}

/// Element of the Clifford algebra over a coefficient ring. Zero coefficients
/// are never stored.
template <class Coeff>
class CliffordElement {
 public:
  CliffordElement() = default;
  explicit CliffordElement(Coeff c, Blade b = kUnitBlade) { add(b, std::move(c)); }

  void add(Blade b, const Coeff& c) {
    if (c == Coeff()) return;
    auto it = coeffs_.find(b);
    if (it == coeffs_.end()) {
      coeffs_.emplace(b, c);
      return;
    }
    it->second += c;
    if (it->second == Coeff()) coeffs_.erase(it);
  }

  Coeff coeff(Blade b) const {
    auto it = coeffs_.find(b);
    return it == coeffs_.end() ? Coeff() : it->second;
  }
  const std::map<Blade, Coeff>& coeffs() const { return coeffs_; }
  bool is_zero() const { return coeffs_.empty(); }

  friend CliffordElement operator+(CliffordElement a, const CliffordElement& b) {
    for (const auto& [bl, c] : b.coeffs_) a.add(bl, c);
    return a;
  }
  friend CliffordElement operator-(CliffordElement a, const CliffordElement& b) {
    for (const auto& [bl, c] : b.coeffs_) a.add(bl, -c);
    return a;
  }
  friend CliffordElement operator*(const CliffordElement& a, const CliffordElement& b) {
    CliffordElement r;
    for (const auto& [ba, ca] : a.coeffs_)
      for (const auto& [bb, cb] : b.coeffs_) {
        const SignedBlade p = kBladeTable[ba][bb];
        r.add(p.blade, p.sign > 0 ? ca * cb : -(ca * cb));
      }
    return r;
  }
  friend bool operator==(const CliffordElement&, const CliffordElement&) = default;

 private:
  std::map<Blade, Coeff> coeffs_;
};

/// Matrix trace in the 4-dimensional spinor representation: only the unit
/// blade contributes.
template <class Coeff>
Coeff trace(const CliffordElement<Coeff>& x) {
  return Coeff(4) * x.coeff(kUnitBlade);
}

}  // namespace rwsa
