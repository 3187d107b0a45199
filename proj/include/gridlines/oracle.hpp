#pragma once

// Ground truth: exact line counts by pair bucketing, exhaustive searches for
// tiny instances, and empirical spread estimation.

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <thread>
#include <numeric>
#include <utility>
#include <vector>

#include "gridlines/grid_geometry.hpp"
#include "gridlines/regularizer.hpp"
#include "gridlines/types.hpp"

namespace gridlines {

struct LineCount {
  Line line;
  std::int64_t count = 0;
  std::int64_t cap = 0;

  friend bool operator==(const LineCount&, const LineCount&) = default;
};

struct ViolationReport {
  std::optional<LineCount> max_line;  // heaviest line with >= 2 points; cap = k
  std::vector<LineCount> violations;  // count > k, canonical order
  bool relaxed_ok = false;
  bool exact_ok = false;
  std::int64_t max_nonaxis = 0;  // largest count on a non-axis line (0 if none has 2 points)
};

/// Counts of S on every line holding at least two of its points, by pair
/// bucketing: for each point x every other point votes for the direction of
/// the pair, so a line through x with c points collects c - 1 votes. The line
/// is emitted from its lexicographically first point only. Canonical order.
inline std::vector<std::pair<Line, std::int64_t>> line_counts(const PointSet2& S) {
  const auto pts = S.points();
  const int n = S.n();
  const int w = 2 * n + 1;
  std::vector<int> gcd_tab(static_cast<std::size_t>(n + 1) * (n + 1));
  for (int x = 0; x <= n; ++x)
    for (int y = 0; y <= n; ++y) gcd_tab[static_cast<std::size_t>(x) * (n + 1) + y] = std::gcd(x, y);
  std::vector<std::int32_t> votes(static_cast<std::size_t>(w) * w, 0);
  std::vector<std::uint8_t> before(static_cast<std::size_t>(w) * w, 0);
  std::vector<int> touched;
  std::vector<std::pair<Line, std::int64_t>> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    touched.clear();
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (j == i) continue;
      int dx = pts[j][0] - pts[i][0], dy = pts[j][1] - pts[i][1];
      const int g = gcd_tab[static_cast<std::size_t>(dx < 0 ? -dx : dx) * (n + 1) + (dy < 0 ? -dy : dy)];
      dx /= g;
      dy /= g;
      if (dx < 0 || (dx == 0 && dy < 0)) {
        dx = -dx;
        dy = -dy;
      }
      const int code = (dx + n) * w + (dy + n);
      if (votes[static_cast<std::size_t>(code)]++ == 0) touched.push_back(code);
      if (j < i) before[static_cast<std::size_t>(code)] = 1;
    }
    for (int code : touched) {
      if (!before[static_cast<std::size_t>(code)]) {
        const int dx = code / w - n, dy = code % w - n;
        out.emplace_back(line_through(pts[i], Direction{dx, dy}), votes[static_cast<std::size_t>(code)] + 1);
      }
      votes[static_cast<std::size_t>(code)] = 0;
      before[static_cast<std::size_t>(code)] = 0;
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline ViolationReport count_violations(const PointSet2& S, int k, const GridParams& g) {
  if (S.n() != g.n) throw InvalidArgument("count_violations: grid size mismatch");
  ViolationReport rep;
  rep.exact_ok = true;
  rep.relaxed_ok = true;
  for (const auto& [line, cnt] : line_counts(S)) {
    if (!rep.max_line || cnt > rep.max_line->count) rep.max_line = LineCount{line, cnt, k};
    if (cnt > k) {
      rep.exact_ok = false;
      rep.violations.push_back(LineCount{line, cnt, k});
    }
    if (!line.axis_aligned()) {
      rep.max_nonaxis = std::max(rep.max_nonaxis, cnt);
      // cnt <= k (w + 1/100) with w = gc / n, cleared of denominators.
      const std::int64_t gc = line_point_count(line, g.n);
      if (100 * static_cast<std::int64_t>(g.n) * cnt > static_cast<std::int64_t>(k) * (100 * gc + g.n))
        rep.relaxed_ok = false;
    }
  }
  if (k < 1 && !S.empty()) rep.exact_ok = false;
  std::vector<int> rows(static_cast<std::size_t>(g.n) + 1, 0), cols(static_cast<std::size_t>(g.n) + 1, 0);
  for (const auto& p : S.points()) {
    ++rows[p[0]];
    ++cols[p[1]];
  }
  for (int i = 1; i <= g.n; ++i)
    if (rows[i] != k || cols[i] != k) rep.relaxed_ok = false;
  return rep;
}

struct MaxSetResult {
  std::int64_t size = 0;
  PointSet2 witness;
  std::int64_t nodes = 0;
};

/// Largest S in [n]^2 with at most k points on every line, by include/exclude
/// backtracking in lexicographic point order. Prunes with the bound
/// current + sum of remaining row capacities. Throws BudgetExhausted after
/// `budget` search nodes.
inline MaxSetResult brute_force_max_set(const GridParams& g, int k, std::int64_t budget = 200000000) {
  const int n = g.n;
  if (n > 5) throw InvalidArgument("brute_force_max_set: n must be <= 5");
  if (k < 0) throw InvalidArgument("brute_force_max_set: k must be >= 0");
  const int N = n * n;
  // Only lines with more than k grid points can be violated.
  std::vector<LineStats> lines = enumerate_lines_min_count(g, std::max(2, k + 1));
  std::vector<std::vector<int>> lines_of(static_cast<std::size_t>(N));
  for (int li = 0; li < static_cast<int>(lines.size()); ++li)
    for (const auto& p : points_on_line(lines[li].line, g))
      lines_of[static_cast<std::size_t>(point_index(p, n))].push_back(li);
  std::vector<int> cnt(lines.size(), 0), row(static_cast<std::size_t>(n), 0);
  std::vector<std::uint8_t> cur(static_cast<std::size_t>(N), 0), best(static_cast<std::size_t>(N), 0);
  std::int64_t cur_size = 0, best_size = -1, nodes = 0;
  const int rk = std::min(k, n);

  std::function<void(int)> rec = [&](int i) {
    if (++nodes > budget) throw BudgetExhausted("brute_force_max_set: node budget exhausted");
    // Remaining capacity: rest of this row plus full rows below.
    std::int64_t bound = cur_size;
    if (i < N) {
      const int r = i / n, c = i % n;
      bound += std::min(rk - row[static_cast<std::size_t>(r)], n - c);
      bound += static_cast<std::int64_t>(n - 1 - r) * rk;
    }
    if (bound <= best_size) return;
    if (i == N) {
      best_size = cur_size;
      best = cur;
      return;
    }
    const int r = i / n;
    bool can = row[static_cast<std::size_t>(r)] < rk;
    for (int li : lines_of[static_cast<std::size_t>(i)])
      if (cnt[static_cast<std::size_t>(li)] >= k) can = false;
    if (can) {
      for (int li : lines_of[static_cast<std::size_t>(i)]) ++cnt[static_cast<std::size_t>(li)];
      ++row[static_cast<std::size_t>(r)];
      cur[static_cast<std::size_t>(i)] = 1;
      ++cur_size;
      rec(i + 1);
      --cur_size;
      cur[static_cast<std::size_t>(i)] = 0;
      --row[static_cast<std::size_t>(r)];
      for (int li : lines_of[static_cast<std::size_t>(i)]) --cnt[static_cast<std::size_t>(li)];
    }
    rec(i + 1);
  };
  rec(0);

  MaxSetResult res;
  res.size = best_size;
  res.witness = PointSet2(n);
  for (int i = 0; i < N; ++i)
    if (best[static_cast<std::size_t>(i)]) res.witness.insert_index(i);
  res.nodes = nodes;
  return res;
}

/// Whether G has a spanning subgraph with every degree exactly k, by trying
/// every k-subset of each row's edges and tracking column degrees.
inline bool brute_force_k_regular(const BipartiteGraph& G, int k) {
  if (G.n > 4) throw InvalidArgument("brute_force_k_regular: n must be <= 4");
  if (k < 0 || k > G.n) return false;
  const int n = G.n;
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n) + 1);
  for (const auto& e : G.edges) adj[static_cast<std::size_t>(e.row)].push_back(e.col);
  std::vector<int> coldeg(static_cast<std::size_t>(n) + 1, 0);
  std::function<bool(int)> rec = [&](int r) -> bool {
    if (r > n) {
      for (int c = 1; c <= n; ++c)
        if (coldeg[static_cast<std::size_t>(c)] != k) return false;
      return true;
    }
    const auto& nb = adj[static_cast<std::size_t>(r)];
    const int d = static_cast<int>(nb.size());
    for (std::uint32_t mask = 0; mask < (1u << d); ++mask) {
      if (std::popcount(mask) != k) continue;
      bool ok = true;
      for (int b = 0; b < d; ++b)
        if (mask >> b & 1u && ++coldeg[static_cast<std::size_t>(nb[static_cast<std::size_t>(b)])] > k) ok = false;
      if (ok && rec(r + 1)) return true;
      for (int b = 0; b < d; ++b)
        if (mask >> b & 1u) --coldeg[static_cast<std::size_t>(nb[static_cast<std::size_t>(b)])];
    }
    return false;
  };
  return rec(1);
}

struct SpreadEstimate {
  double p_target = 0;      // (m + 1) / n
  double singleton_max = 0;  // max frequency of {x} in S
  double pair_max = 0;       // max frequency of {x, y} in S
  std::int64_t trials = 0;

  /// Largest frequency(T)^{1/|T|} over the test family.
  double max_root() const { return std::max(singleton_max, std::sqrt(pair_max)); }
};

using Sampler = std::function<PointSet2(std::uint64_t trial)>;

/// Runs `sampler` for trials 0..trials-1 (on `threads` workers; the sampler
/// must be safe to call concurrently) and records how often each test set
/// lies inside the sample. Test sets must have one or two points.
inline SpreadEstimate estimate_spread(const Sampler& sampler, std::int64_t trials,
                                      const std::vector<std::vector<Point2>>& test_family,
                                      double p_target, int threads = 1) {
  if (trials < 100) throw InvalidArgument("estimate_spread: requires at least 100 trials");
  for (const auto& T : test_family)
    if (T.size() != 1 && T.size() != 2) throw InvalidArgument("estimate_spread: test sets must have size 1 or 2");
  std::vector<std::atomic<std::int64_t>> hits(test_family.size());
  std::atomic<std::int64_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::int64_t t = next.fetch_add(1);
      if (t >= trials) return;
      const PointSet2 S = sampler(static_cast<std::uint64_t>(t));
      for (std::size_t i = 0; i < test_family.size(); ++i) {
        bool in = true;
        for (const auto& p : test_family[i]) in = in && S.contains(p);
        if (in) hits[i].fetch_add(1);
      }
    }
  };
  threads = std::max(1, threads);
  std::vector<std::thread> pool;
  for (int w = 1; w < threads; ++w) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  SpreadEstimate est;
  est.p_target = p_target;
  est.trials = trials;
  for (std::size_t i = 0; i < test_family.size(); ++i) {
    const double f = static_cast<double>(hits[i].load()) / static_cast<double>(trials);
    if (test_family[i].size() == 1)
      est.singleton_max = std::max(est.singleton_max, f);
    else
      est.pair_max = std::max(est.pair_max, f);
  }
  return est;
}

}  // namespace gridlines
