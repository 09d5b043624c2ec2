#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "rwsa/suites.hpp"

using namespace rwsa;
namespace fs = std::filesystem;

namespace {

struct Common {
  int order = -1;
  std::string coords = "hopf";
  std::string format = "text";
  std::string cache;
  bool no_cache = false;
  int jobs = 1;
  std::string out;
  bool quiet = false;
};

std::optional<fs::path> cache_root(const Common& c) {
  if (c.no_cache) return std::nullopt;
  if (!c.cache.empty()) return fs::path(c.cache);
  return cache_dir_from_env();
}

std::vector<std::string> coord_list(const std::string& c) {
  if (c == "both") return {"hopf", "spherical"};
  return {c};
}

std::function<void(const std::string&)> logger(const Common& c) {
  if (c.quiet) return {};
  return [](const std::string& s) { std::cerr << s << '\n'; };
}

void emit(const Common& c, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text;
    return;
  }
  const fs::path tmp = c.out + ".tmp";
  {
    std::ofstream f(tmp);
    if (!f) throw std::runtime_error("cannot write " + c.out);
    f << text;
  }
  fs::rename(tmp, c.out);
}

nlohmann::json coefficient_json(int order, const std::string& coords, const JetRationalPoly& a) {
  const int reduced = a.min_denominator_power();
  return {{"order", order},
          {"coords", coords},
          {"aPower", q_form_power(order)},
          {"terms", terms_json(a, q_form_power(order))},
          {"reduced", {{"aPower", reduced}, {"terms", terms_json(a, reduced)}}},
          {"text", to_text(a, reduced)}};
}

std::string render(const Common& c, int order, const std::vector<std::pair<std::string, JetRationalPoly>>& results) {
  const std::string name = "a_" + std::to_string(order);
  if (c.format == "json") {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& [coords, a] : results) j.push_back(coefficient_json(order, coords, a));
    return (results.size() == 1 ? j[0] : j).dump(1) + "\n";
  }
  // Text and LaTeX print the value once; several coordinate systems must agree.
  const JetRationalPoly& a = results.front().second;
  const int d = a.min_denominator_power();
  if (c.format == "latex") return "a_{" + std::to_string(order) + "} = " + to_latex(a, d) + "\n";
  return name + " = " + to_text(a, d) + "\n";
}

int cmd_compute(const Common& c, bool allow_odd) {
  if (c.order < 0) throw CLI::ValidationError("--order", "required and non-negative");
  if (c.order % 2 && !allow_odd) {
    std::cerr << "error: order must be even (odd coefficients vanish; see --allow-odd to verify zero)\n";
    return 2;
  }
  std::vector<std::pair<std::string, JetRationalPoly>> results;
  for (const auto& coords : coord_list(c.coords)) {
    PipelineOptions opt;
    opt.order = c.order;
    opt.jobs = c.jobs;
    opt.cache_root = cache_root(c);
    opt.assemble_all = false;
    opt.log = logger(c);
    const CoordRun run = run_coordinates(symbols_by_name(coords), opt);
    std::size_t nodes = 0, terms = 0;
    for (const auto& st : run.levels) {
      nodes += st.nonzero;
      terms += st.terms;
    }
    if (!c.quiet) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "%s: %zu nonzero nodes, %zu terms, %zu cached levels, %.2f s", coords.c_str(), nodes,
                    terms, run.cache_hits, run.seconds);
      std::cerr << buf << '\n';
    }
    results.emplace_back(coords, run.assembled.at(c.order).a);
  }
  if (c.order % 2 && !results.front().second.is_zero()) {
    std::cerr << "error: a_" << c.order << " is nonzero\n";
    return 1;
  }
  for (std::size_t i = 1; i < results.size(); ++i)
    if (!(results[i].second == results[0].second)) {
      std::cerr << "error: " << results[0].first << " and " << results[i].first << " disagree on a_" << c.order << '\n';
      return 1;
    }
  if (results.size() > 1 && !c.quiet) std::cerr << "hopf and spherical agree\n";
  emit(c, render(c, c.order, results));
  return 0;
}

int cmd_verify(const Common& c, const std::string& suite) {
  auto order_or = [&](int def) { return c.order >= 0 ? c.order : def; };
  Session session(c.jobs, cache_root(c), logger(c));
  VerificationReport rep;
  const bool all = suite == "all";
  if (suite == "closed-form" || all) closed_form_suite(session, order_or(8), coord_list(c.coords), rep);
  if (suite == "round" || all) round_suite(session, order_or(all ? 8 : 12), rep);
  if (suite == "hn" || all) hn_suite(session, order_or(all ? 8 : 0), rep);
  if (suite == "cross" || all) cross_suite(session, order_or(8), rep);
  if (suite == "grading" || all) grading_suite(session, order_or(8), c.jobs, rep);
  emit(c, c.format == "json" ? rep.json().dump(1) + "\n" : rep.text());
  return rep.all_passed() ? 0 : 1;
}

int cmd_bench(const Common& c) {
  const int order = c.order >= 0 ? c.order : 6;
  std::ostringstream out;
  std::size_t hits = 0, lookups = 0;
  out << "coords     level   keys  nonzero     terms   seconds  source\n";
  for (const auto& coords : coord_list(c.coords)) {
    PipelineOptions opt;
    opt.order = order;
    opt.jobs = c.jobs;
    opt.cache_root = cache_root(c);
    opt.assemble_all = false;
    const CoordRun run = run_coordinates(symbols_by_name(coords), opt);
    for (const auto& st : run.levels) {
      char line[160];
      std::snprintf(line, sizeof line, "%-10s %5d %6zu %8zu %9zu %9.3f  %s\n", coords.c_str(), st.n, st.keys, st.nonzero,
                    st.terms, st.seconds, st.from_cache ? "cache" : (st.trace_only ? "trace" : "computed"));
      out << line;
    }
    hits += run.cache_hits;
    lookups += run.cache_hits + run.cache_misses;
    const JetRationalPoly& a = run.assembled.at(order).a;
    const std::string digest = hex64(fnv1a64(terms_json(a, q_form_power(order)).dump()));
    char line[160];
    std::snprintf(line, sizeof line, "%-10s total %.3f s, a_%d digest %s\n", coords.c_str(), run.seconds, order, digest.c_str());
    out << line;
  }
  if (lookups) out << "cache hit ratio " << hits << "/" << lookups << "\n";
  else out << "cache disabled\n";
  emit(c, out.str());
  return 0;
}

int cmd_cache(const Common& c, const std::string& action) {
  const auto root = cache_root(c);
  if (!root) {
    std::cerr << "error: no cache directory (use --cache or RWSA_CACHE_DIR)\n";
    return 2;
  }
  if (!fs::exists(*root)) {
    std::cout << *root << ": empty\n";
    return 0;
  }
  std::vector<fs::path> dirs;
  for (const auto& e : fs::directory_iterator(*root))
    if (e.is_directory()) dirs.push_back(e.path());
  std::sort(dirs.begin(), dirs.end());
  for (const auto& d : dirs) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(d))
      if (e.path().filename().string().rfind("level-", 0) == 0 && e.path().extension() == ".bin") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    std::uintmax_t bytes = 0;
    for (const auto& f : files) bytes += fs::file_size(f);
    if (action == "clear") {
      for (const auto& f : files) fs::remove(f);
      if (fs::is_empty(d)) fs::remove(d);
      std::cout << "removed " << files.size() << " level files from " << d.filename().string() << '\n';
    } else {
      std::cout << d.filename().string() << ": " << files.size() << " levels, " << bytes << " bytes\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heat coefficients of the Dirac operator on Robertson-Walker metrics"};
  app.require_subcommand(1);
  Common c;
  auto add_common = [&](CLI::App* sub, bool with_order = true) {
    if (with_order) sub->add_option("--order", c.order, "Coefficient index (a_order)")->check(CLI::Range(0, kMaxOrder));
    sub->add_option("--coords", c.coords, "Coordinate system")->check(CLI::IsMember({"hopf", "spherical", "both"}));
    sub->add_option("--cache", c.cache, "Level cache directory (default: $RWSA_CACHE_DIR)");
    sub->add_flag("--no-cache", c.no_cache, "Do not read or write the level cache");
    sub->add_option("--jobs", c.jobs, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--out", c.out, "Write the result to this file");
    sub->add_flag("-q,--quiet", c.quiet, "No progress output");
  };

  bool allow_odd = false;
  auto* compute = app.add_subcommand("compute", "Compute a_order");
  add_common(compute);
  compute->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"text", "json", "latex"}));
  compute->add_flag("--allow-odd", allow_odd, "Accept odd orders and check that they vanish");

  std::string suite = "all";
  auto* verify = app.add_subcommand("verify", "Run a verification suite");
  add_common(verify);
  verify->add_option("--suite", suite, "Suite")->check(CLI::IsMember({"closed-form", "round", "hn", "cross", "grading", "all"}));
  verify->add_option("--format", c.format, "Report format")->check(CLI::IsMember({"text", "json"}));

  auto* bench = app.add_subcommand("bench", "Per-level node counts, term counts and timings");
  add_common(bench);

  std::string action = "info";
  auto* cache = app.add_subcommand("cache", "Inspect or clear the level cache");
  add_common(cache, false);
  cache->add_option("action", action, "info or clear")->check(CLI::IsMember({"info", "clear"}));

  CLI11_PARSE(app, argc, argv);
  try {
    if (compute->parsed()) return cmd_compute(c, allow_odd);
    if (verify->parsed()) return cmd_verify(c, suite);
    if (bench->parsed()) return cmd_bench(c);
    if (cache->parsed()) return cmd_cache(c, action);
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const rationality_violation& e) {
    std::cerr << "error: rationality violated: " << e.what() << '\n';
    return 1;
  } catch (const invariant_violation& e) {
    std::cerr << "error: invariant violated: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
