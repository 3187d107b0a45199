// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include "gridlines/gridlines.hpp"

using namespace gridlines;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& name, double limit_s, const std::function<Outcome()>& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = fn();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = s <= limit_s;
  const bool ok = o.pass && in_time;
  if (!ok) ++failures;
  std::printf("%s [%d] %s (%.2fs, limit %.0fs%s): %s\n", ok ? "PASS" : "FAIL", id, name.c_str(), s, limit_s,
              in_time ? "" : ", over time", o.detail.c_str());
  std::fflush(stdout);
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(GRIDLINES_CLI) + " " + args + " >/dev/null 2>&1";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string fmt(double v, int prec = 4) {
  std::ostringstream o;
  o.precision(prec);
  o << v;
  return o.str();
}

// 1. |heavy_lines_through(p, j/n)| * j^2 <= 18 n^2 for every n <= 64, p, j.
// One call at alpha = 2/n lists every line through p with >= 2 points; the
// count at alpha = j/n is the number of those with >= j points. Direct calls
// at every alpha cross-check this for n <= 16, where every point is visited;
// for n > 16 one point per orbit of the square's symmetry group is visited
// (x <= y <= ceil(n/2)), since the symmetries permute lines and keep counts.
Outcome tail_bound() {
  std::int64_t checks = 0;
  double worst = 0;
  for (int n = 2; n <= 64; ++n) {
    const GridParams g(n);
    std::vector<std::int64_t> at_least(static_cast<std::size_t>(n) + 2);
    const bool all = n <= 16;
    const int h = (n + 1) / 2;
    for (int x = 1; x <= (all ? n : h); ++x)
      for (int y = all ? 1 : x; y <= (all ? n : h); ++y) {
        std::fill(at_least.begin(), at_least.end(), 0);
        const Point2 p = make_point(x, y);
        for (const auto& ls : heavy_lines_through(p, g, Rational(2, n))) ++at_least[static_cast<std::size_t>(ls.count)];
        for (int j = n; j >= 2; --j) at_least[static_cast<std::size_t>(j)] += at_least[static_cast<std::size_t>(j) + 1];
        for (int j = 2; j <= n; ++j) {
          const std::int64_t cnt = at_least[static_cast<std::size_t>(j)];
          if (n <= 16 && static_cast<std::int64_t>(heavy_lines_through(p, g, Rational(j, n)).size()) != cnt)
            return {false, "direct call disagrees at n=" + std::to_string(n)};
          ++checks;
          worst = std::max(worst, static_cast<double>(cnt) * j * j / (static_cast<double>(n) * n));
          if (cnt * j * j > 18LL * n * n)
            return {false, "n=" + std::to_string(n) + " p=(" + std::to_string(x) + "," + std::to_string(y) +
                               ") j=" + std::to_string(j) + " count=" + std::to_string(cnt)};
        }
      }
  }
  return {true, std::to_string(checks) + " (n, p, alpha) triples; max count*alpha^2 = " + fmt(worst)};
}

// 2. All 512 bipartite graphs on 3 + 3 vertices, k = 1..3.
Outcome ore_ryser() {
  int feasible = 0, infeasible = 0;
  for (unsigned mask = 0; mask < 512; ++mask) {
    EdgeSet e;
    for (int b = 0; b < 9; ++b)
      if (mask >> b & 1u) e.push_back(Edge{b / 3 + 1, b % 3 + 1});
    const BipartiteGraph G(3, e);
    for (int k = 1; k <= 3; ++k) {
      const bool brute = brute_force_k_regular(G, k);
      const auto res = k_regular_subgraph(G, k);
      const bool flow = std::holds_alternative<EdgeSet>(res);
      if (brute != flow) return {false, "verdict mismatch at mask " + std::to_string(mask) + " k=" + std::to_string(k)};
      if (flow) {
        std::vector<int> rd(4), cd(4);
        for (const auto& ed : std::get<EdgeSet>(res)) {
          if (!G.has_edge(ed.row, ed.col)) return {false, "subgraph edge not in G"};
          ++rd[ed.row];
          ++cd[ed.col];
        }
        for (int i = 1; i <= 3; ++i)
          if (rd[i] != k || cd[i] != k) return {false, "subgraph not k-regular"};
        ++feasible;
      } else {
        if (!verify_certificate(G, k, std::get<HallCertificate>(res)))
          return {false, "certificate rejected at mask " + std::to_string(mask) + " k=" + std::to_string(k)};
        ++infeasible;
      }
    }
  }
  return {true, std::to_string(feasible) + " feasible, " + std::to_string(infeasible) + " certified infeasible"};
}

// 3. construct --n 64 --k 16 over 32 seeds through the CLI.
Outcome end_to_end(const fs::path& dir) {
  const int n = 64, k = 16, seeds = 32;
  int ok = 0;
  std::int64_t worst_nonaxis = 0;
  std::string bad;
  for (int s = 0; s < seeds; ++s) {
    const std::string out = (dir / ("c" + std::to_string(s) + ".json")).string();
    if (run_cli("construct --n 64 --k 16 --retries 20 --seed " + std::to_string(s) + " --out " + out) != 0) continue;
    const int verify = run_cli("verify --in " + out + " --k 16");
    const auto S = parse_point_set<2>(read_file(out));
    const auto v = count_violations(S, k, GridParams(n));
    const bool good = verify == 0 && S.size() == k * n && has_exact_marginals(S, k) && v.max_nonaxis <= k;
    if (good) {
      ++ok;
      worst_nonaxis = std::max(worst_nonaxis, v.max_nonaxis);
    } else if (bad.empty()) {
      bad = " (seed " + std::to_string(s) + " produced an output failing verification)";
    }
  }
  return {4 * ok >= 3 * seeds && bad.empty(),
          std::to_string(ok) + "/" + std::to_string(seeds) + " seeds succeed; max non-axis line " +
              std::to_string(worst_nonaxis) + bad};
}

// 4. compose --n 40 --k 10 over 32 seeds through the CLI.
Outcome composition(const fs::path& dir) {
  const int n = 40, k = 10, seeds = 32;
  int success = 0, exact = 0, hyp = 0, implication_fail = 0, le_k = 0, agree = 0;
  for (int s = 0; s < seeds; ++s) {
    const std::string out = (dir / ("b" + std::to_string(s) + ".json")).string();
    if (run_cli("compose --n 40 --k 10 --seed " + std::to_string(s) + " --out " + out) != 0) continue;
    ++success;
    const auto S = parse_point_set<2>(read_file(out));
    const auto man = nlohmann::json::parse(read_file(out + ".manifest.json"));
    const auto v = count_violations(S, k, GridParams(n));
    if (S.size() == k * n && has_exact_marginals(S, k)) ++exact;
    if (man["max_nonaxis"].get<std::int64_t>() == v.max_nonaxis) ++agree;
    if (v.max_nonaxis <= k) ++le_k;
    if (man["hypothesis_holds"].get<bool>()) {
      ++hyp;
      if (100 * v.max_nonaxis > 84 * k) ++implication_fail;
    }
  }
  const Rational ratio = verify_block_inequality(block_plan(n, k));
  const bool pass = exact == success && agree == success && implication_fail == 0 && ratio <= Rational(4, 5);
  return {pass, std::to_string(success) + "/" + std::to_string(seeds) + " runs; exact marginals " +
                    std::to_string(exact) + "/" + std::to_string(success) + "; hypothesis held on " +
                    std::to_string(hyp) + " (implication failures " + std::to_string(implication_fail) +
                    "); max non-axis <= k on " + std::to_string(le_k) + "/" + std::to_string(success) +
                    "; block ratio " + to_string(ratio)};
}

// 5. Exhaustive optima on tiny grids, and constructor outputs against them.
Outcome tiny_grids() {
  const auto m22 = brute_force_max_set(GridParams(2), 2).size;
  const auto m32 = brute_force_max_set(GridParams(3), 2).size;
  if (m22 != 4) return {false, "max_set(2,2) = " + std::to_string(m22)};
  if (m32 != 6) return {false, "max_set(3,2) = " + std::to_string(m32) + ", pinned 6"};
  int built = 0;
  for (auto [n, k, opt] : std::vector<std::tuple<int, int, std::int64_t>>{{2, 2, m22}, {3, 2, m32}}) {
    PracticalConfig cfg;
    cfg.eps = n == 2 ? 0.0 : cfg.eps;
    for (std::uint64_t s = 0; s < 16; ++s) {
      CounterRng rng(s);
      PointSet2 S;
      try {
        S = construct(k, GridParams(n), cfg, rng);
      } catch (const BudgetExhausted&) {
        continue;
      }
      ++built;
      if (!count_violations(S, k, GridParams(n)).exact_ok) return {false, "constructor output violates its cap"};
      if (S.size() > opt) return {false, "constructor output exceeds optimum"};
    }
  }
  return {true, "max_set(2,2)=4, max_set(3,2)=6; " + std::to_string(built) + "/32 constructor outputs within optimum"};
}

// 6. d = 3, t = 2, n = 8, m = 16, delta = 0.25.
Outcome higher_dim() {
  const int n = 8, t = 2;
  const double m = 16, delta = 0.25;
  const GridParams g(n, 3);
  PracticalConfig cfg;
  cfg.delta_override = delta;
  CounterRng rng(1);
  HdPipelineReport rep;
  const auto S = run_hd_pipeline<3>(g, t, m, cfg, rng, std::nullopt, &rep);
  const auto params = GoodParams::desk(m, cfg, rep.tails);
  const auto good = check_good<3>(S, params, g, t);
  if (!good.passed) return {false, "check_good failed: " + std::to_string(good.heavy_total) + " heavy, " +
                                       std::to_string(good.medium_total) + " medium, " +
                                       std::to_string(good.light_total) + " light"};
  // Independent recount over every section with >= 3 points.
  const double caps = std::max((1 + delta) * std::cbrt(m), 6.0 * rep.tails.C + 3);
  int axis_planes = 0, axis_short = 0, over = 0, heavy_over = 0;
  std::int64_t min_axis = n * n;
  for (const auto& sec : enumerate_sections<3>(g, t, 3)) {
    std::int64_t c = 0;
    for (const auto& p : sec.points) c += S.contains(p) ? 1 : 0;
    if (sec.axis_aligned(t)) {
      ++axis_planes;
      min_axis = std::min(min_axis, c);
      if (c < (1 - delta) * m) ++axis_short;
    }
    const double w = sec.weight.value();
    if (static_cast<double>(c) > std::max((1 + delta) * m * w, caps) + 1e-9) ++over;
    if (params.classify(sec.size(), n * n) == LineClass::Heavy && static_cast<double>(c) > (1 + delta) * m * w + 1e-9)
      ++heavy_over;
  }
  return {axis_short == 0 && over == 0 && axis_planes == 3 * n,
          "|S|=" + std::to_string(S.size()) + ", C=" + std::to_string(rep.tails.C) + ", " +
              std::to_string(axis_planes) + " axis planes (min count " + std::to_string(min_axis) + "), " +
              std::to_string(over) + " sections over max((1+d)m w, caps); " + std::to_string(heavy_over) +
              " heavy sections above (1+d)m w without slack"};
}

// 7. Inclusion frequencies of run_pipeline(64, 16) over 500 trials.
Outcome spread() {
  const int n = 64, k = 16, trials = 500;
  PracticalConfig cfg;
  const double m1 = build_schedule(k, n, cfg.eps).stages[0];
  const double p = 1.2 * (m1 + 1) / n;
  CounterRng pick(7);
  std::vector<std::vector<Point2>> fam;
  auto random_point = [&] {
    return make_point(1 + static_cast<int>(pick.below(n)), 1 + static_cast<int>(pick.below(n)));
  };
  for (int i = 0; i < 200; ++i) fam.push_back({random_point()});
  while (fam.size() < 400) {
    const Point2 a = random_point(), b = random_point();
    if (a != b) fam.push_back({a, b});
  }
  const char* env = std::getenv("GRIDLINES_THREADS");
  const int threads = env ? std::max(1, std::atoi(env)) : 1;
  const auto est = estimate_spread(
      [&](std::uint64_t trial) {
        CounterRng rng(trial);
        return run_pipeline(k, GridParams(n), cfg, rng);
      },
      trials, fam, (m1 + 1) / n, threads);
  return {est.singleton_max <= p && est.pair_max <= p * p,
          "singleton max " + fmt(est.singleton_max) + " <= " + fmt(p) + ", pair max " + fmt(est.pair_max) +
              " <= " + fmt(p * p)};
}

// 8. 4 q Delta across the theory and desk regimes.
Outcome diagnostics() {
  const double big = 1e36;
  const auto th = stage_diagnostics(big * big * big, big, GridParams(2));
  const auto desk = stage_diagnostics(1e3, 10, GridParams(1000));
  return {th.lll_product < 1 && desk.lll_product >= 1,
          "theory 4qD = " + fmt(static_cast<double>(th.lll_product)) + ", desk 4qD = " +
              fmt(static_cast<double>(desk.lll_product))};
}

}  // namespace

int main() {
  const fs::path dir = fs::temp_directory_path() / ("gridlines_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  criterion(1, "tail bound 18/alpha^2 for n <= 64", 60, tail_bound);
  criterion(2, "Ore-Ryser equivalence on all 512 graphs at n=3", 10, ore_ryser);
  criterion(3, "construct 64/16 over 32 seeds", 300, [&] { return end_to_end(dir); });
  criterion(4, "compose 40/10 over 32 seeds", 300, [&] { return composition(dir); });
  criterion(5, "tiny-grid optima", 60, tiny_grids);
  criterion(6, "higher-dimensional pipeline d=3 t=2 n=8 m=16", 180, higher_dim);
  criterion(7, "spread statistics at 64/16", 600, spread);
  criterion(8, "diagnostics regime check", 1, diagnostics);
  fs::remove_all(dir);
  std::printf("%s: %d failure(s)\n", failures ? "FAILED" : "ALL PASSED", failures);
  return failures ? 1 : 0;
}
