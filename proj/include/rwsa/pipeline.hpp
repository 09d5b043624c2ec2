#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rwsa/assembly.hpp"
#include "rwsa/cache.hpp"

namespace rwsa {

/// Level n needs jets up to a^(n) plus two derivatives of headroom.
inline constexpr int kMaxOrder = kJetSlots - 3;

struct PipelineOptions {
  int order = 0;
  int jobs = 1;
  std::optional<std::filesystem::path> cache_root;
  /// Assemble every level up to order, not just the last one.
  bool assemble_all = true;
  /// Compute the final level only as far as the trace needs.
  bool trace_only_last = true;
  /// Drop levels once nothing above needs them.
  bool evict = true;
  std::function<void(const std::string&)> log;
};

struct CoordRun {
  std::string coords;
  std::uint64_t fingerprint = 0;
  std::map<int, LevelAssembly> assembled;
  std::vector<LevelStats> levels;
  std::size_t cache_hits = 0;
  std::size_t cache_misses = 0;
  double seconds = 0;
};

/// Computes r-levels 0..order for one table and assembles the heat
/// coefficients, reusing and extending the level cache when one is given.
inline CoordRun run_coordinates(const SymbolTable& table, const PipelineOptions& opt) {
  if (opt.order < 0 || opt.order > kMaxOrder)
    throw std::invalid_argument("order must be in 0.." + std::to_string(kMaxOrder));
  const auto t0 = std::chrono::steady_clock::now();
  CoordRun run;
  run.coords = table.name;
  run.fingerprint = table.fingerprint();
  MemoTable memo(run.fingerprint);
  ParametrixEngine engine(table, memo, opt.jobs);
  std::optional<LevelCache> cache;
  if (opt.cache_root) cache.emplace(*opt.cache_root, table.name, run.fingerprint);
  auto say = [&](const std::string& s) {
    if (opt.log) opt.log(s);
  };

  const int N = opt.order;
  // Highest h with levels 0..h all cached (below N).
  int cached_top = -1;
  if (cache)
    while (cached_top + 1 < N && cache->has_level(cached_top + 1)) ++cached_top;
  const int first_needed = opt.assemble_all ? 0 : std::max(0, std::min(cached_top, N - 1) - 1);

  for (int m = first_needed; m <= N; ++m) {
    const bool last = m == N;
    const bool want_assembly = opt.assemble_all || last;
    LevelStats st;
    st.n = m;
    SymExpr density;
    bool loaded = false;
    if (cache && m <= cached_top) {
      try {
        const auto ts = std::chrono::steady_clock::now();
        cache->load(memo, m);
        loaded = true;
        ++run.cache_hits;
        st.from_cache = true;
        st.keys = memo.level(m).keys.size();
        st.nonzero = memo.level_nonzero(m);
        st.terms = memo.level_terms(m);
        st.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - ts).count();
      } catch (const cache_error& e) {
        say(std::string("cache: ") + e.what() + "; recomputing");
      }
    }
    bool have_level = loaded;
    if (!loaded) {
      if (cache) ++run.cache_misses;
      if (last && opt.trace_only_last) {
        const auto nodes = engine.compute_trace_level(m, &st);
        if (want_assembly) density = trace_density(table, nodes);
      } else {
        st = engine.compute_level(m);
        have_level = true;
        if (cache) cache->save(memo, m);
      }
    }
    if (want_assembly && have_level) density = trace_density(table, memo, m);
    say(table.name + " level " + std::to_string(m) + ": " + std::to_string(st.nonzero) + " nonzero nodes, " +
        std::to_string(st.terms) + " terms" + (st.from_cache ? " (cache)" : "") + (st.trace_only ? " (trace only)" : ""));
    run.levels.push_back(st);
    if (want_assembly) run.assembled.emplace(m, assemble_level(m, density, table));
    if (opt.evict && m >= 2) memo.evict(m - 2);
  }
  run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return run;
}

}  // namespace rwsa
