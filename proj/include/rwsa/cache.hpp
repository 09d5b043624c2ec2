#pragma once

#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>

#include <unistd.h>

#include "rwsa/parametrix.hpp"

namespace rwsa {

/// One file per completed level:
///   "RWSAMEMO" | u32 version | u64 fingerprint | i32 n | u64 key count
///   per key: i32 j, 4 x i32 alpha, i32 sqrt(pi) exponent, u64 term count,
///            per term: key bytes, re and im as length-prefixed base-16 text.
/// Values are stored in canonical order, so a load reproduces the exact
/// SymExpr that was saved.
class LevelCache {
 public:
  static constexpr char kMagic[8] = {'R', 'W', 'S', 'A', 'M', 'E', 'M', 'O'};
  static constexpr std::uint32_t kVersion = 1;

  LevelCache(std::filesystem::path root, std::string coords, std::uint64_t fingerprint)
      : dir_(std::move(root) / (coords + "-" + hex(fingerprint))), fingerprint_(fingerprint) {}

  const std::filesystem::path& dir() const { return dir_; }
  std::filesystem::path level_path(int n) const { return dir_ / ("level-" + std::to_string(n) + ".bin"); }
  bool has_level(int n) const { return std::filesystem::exists(level_path(n)); }

  /// Writes to a temporary file and renames it into place.
  void save(const MemoTable& memo, int n) const {
    std::filesystem::create_directories(dir_);
    const auto& lv = memo.level(n);
    const auto final_path = level_path(n);
    auto tmp = final_path;
    tmp += ".tmp" + std::to_string(::getpid());
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw cache_error("cannot write " + tmp.string());
      out.write(kMagic, sizeof kMagic);
      put<std::uint32_t>(out, kVersion);
      put<std::uint64_t>(out, fingerprint_);
      put<std::int32_t>(out, n);
      put<std::uint64_t>(out, lv.keys.size());
      for (std::size_t i = 0; i < lv.keys.size(); ++i) {
        const auto& k = lv.keys[i];
        const auto& v = lv.values[i];
        put<std::int32_t>(out, k.j);
        for (int a : k.alpha) put<std::int32_t>(out, a);
        put<std::int32_t>(out, v.sqrt_pi_exp());
        put<std::uint64_t>(out, v.size());
        for (const auto& t : v.terms()) {
          out.write(reinterpret_cast<const char*>(t.key.bytes.data()), static_cast<std::streamsize>(t.key.bytes.size()));
          put_str(out, t.coeff.re.mpq().get_str(16));
          put_str(out, t.coeff.im.mpq().get_str(16));
        }
      }
      out.flush();
      if (!out) throw cache_error("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, final_path);
  }

  /// Loads level n into memo. Refuses files written for another symbol table.
  void load(MemoTable& memo, int n) const {
    const auto path = level_path(n);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw cache_error("cannot open " + path.string());
    char magic[8];
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, kMagic, sizeof magic) != 0) throw cache_error(path.string() + ": not a cache file");
    if (get<std::uint32_t>(in, path) != kVersion) throw cache_error(path.string() + ": unsupported version");
    const auto fp = get<std::uint64_t>(in, path);
    if (fp != fingerprint_ || fp != memo.fingerprint())
      throw cache_error(path.string() + ": written for symbol table " + hex(fp) + ", expected " + hex(fingerprint_));
    if (get<std::int32_t>(in, path) != n) throw cache_error(path.string() + ": level mismatch");
    const auto count = get<std::uint64_t>(in, path);
    std::vector<NodeKey> keys;
    std::vector<SymExpr> values;
    keys.reserve(count);
    values.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
      NodeKey k;
      k.n = n;
      k.j = get<std::int32_t>(in, path);
      for (int& a : k.alpha) a = get<std::int32_t>(in, path);
      const int exp = get<std::int32_t>(in, path);
      const auto nterms = get<std::uint64_t>(in, path);
      std::vector<Term> terms;
      terms.reserve(nterms);
      for (std::uint64_t t = 0; t < nterms; ++t) {
        Term term;
        in.read(reinterpret_cast<char*>(term.key.bytes.data()), static_cast<std::streamsize>(term.key.bytes.size()));
        if (!in) throw cache_error(path.string() + ": truncated");
        if (!terms.empty() && !(terms.back().key < term.key)) throw cache_error(path.string() + ": terms out of order");
        read_rational(in, path, term.coeff.re);
        read_rational(in, path, term.coeff.im);
        if (term.coeff.is_zero()) throw cache_error(path.string() + ": zero coefficient");
        terms.push_back(std::move(term));
      }
      keys.push_back(k);
      values.push_back(SymExpr::from_canonical(std::move(terms), exp));
    }
    try {
      memo.store_level(n, std::move(keys), std::move(values));
    } catch (const invariant_violation& e) {
      throw cache_error(path.string() + ": " + e.what());
    }
  }

  static std::string hex(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = digits[v & 15];
    return s;
  }

 private:
  template <class T>
  static void put(std::ostream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
  }
  static void put_str(std::ostream& out, const std::string& s) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
  }
  template <class T>
  static T get(std::istream& in, const std::filesystem::path& path) {
    T v;
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!in) throw cache_error(path.string() + ": truncated");
    return v;
  }
  static void read_rational(std::istream& in, const std::filesystem::path& path, Rational& r) {
    const auto len = get<std::uint32_t>(in, path);
    if (len > (1u << 24)) throw cache_error(path.string() + ": corrupt coefficient");
    std::string s(len, '\0');
    in.read(s.data(), len);
    if (!in) throw cache_error(path.string() + ": truncated");
    if (r.mpq().set_str(s, 16) != 0) throw cache_error(path.string() + ": corrupt coefficient");
    r.mpq().canonicalize();
  }

  std::filesystem::path dir_;
  std::uint64_t fingerprint_;
};

/// Cache root from the RWSA_CACHE_DIR environment variable, if set.
inline std::optional<std::filesystem::path> cache_dir_from_env() {
  const char* v = std::getenv("RWSA_CACHE_DIR");
  if (v == nullptr || *v == '\0') return std::nullopt;
  return std::filesystem::path(v);
}

}  // namespace rwsa
