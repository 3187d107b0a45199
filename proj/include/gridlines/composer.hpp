#pragma once

// Block composition: the n x n grid is cut into a 4 x 4 array of n/4 x n/4
// blocks. Blocks on the main diagonal or the anti-diagonal (i = j or
// i + j = 5) get quota 2k/10, all others 3k/10, so every block-row and
// block-column sums to k. Each block is built independently with exactly its
// quota per row and column; the union then has exactly k per row and column.

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gridlines/grid_geometry.hpp"
#include "gridlines/oracle.hpp"
#include "gridlines/pipeline2d.hpp"
#include "gridlines/regularizer.hpp"
#include "gridlines/rng.hpp"
#include "gridlines/types.hpp"

namespace gridlines {

struct BlockPlan {
  int n = 0;
  int k = 0;
  int side = 0;                           // n / 4
  std::array<std::array<int, 4>, 4> quota{};  // quota[i-1][j-1] = k_{i,j}

  int k_at(int i, int j) const { return quota[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)]; }
  /// First row (or column) of block index i, 1-based.
  int origin(int i) const { return (i - 1) * side + 1; }
};

inline BlockPlan block_plan(int n, int k) {
  if (n < 4 || n % 4 != 0) throw InvalidArgument("block_plan: n must be a positive multiple of 4");
  if (k < 10 || k % 10 != 0) throw InvalidArgument("block_plan: k must be a positive multiple of 10");
  // 3k/10 <= 0.9 * n/4, i.e. 12k <= 9n.
  if (12 * static_cast<std::int64_t>(k) > 9 * static_cast<std::int64_t>(n))
    throw InvalidArgument("block_plan: block quota 3k/10 exceeds 0.9 * n/4");
  BlockPlan p;
  p.n = n;
  p.k = k;
  p.side = n / 4;
  for (int i = 1; i <= 4; ++i)
    for (int j = 1; j <= 4; ++j)
      p.quota[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)] =
          (i == j || i + j == 5) ? 2 * k / 10 : 3 * k / 10;
  return p;
}

namespace detail {

// sum_{i,j} k_ij * |L cap block_ij| for one line.
inline std::int64_t quota_weighted_count(const BlockPlan& plan, const Line& l) {
  std::int64_t s = 0;
  for (const auto& p : points_on_line(l, GridParams(plan.n)))
    s += plan.k_at((p[0] - 1) / plan.side + 1, (p[1] - 1) / plan.side + 1);
  return s;
}

}  // namespace detail

/// max over non-axis lines of sum_{i,j} k_ij w_ij(L) / k, with
/// w_ij(L) = |L cap block_ij| / (n/4). A line with c grid points scores at
/// most (3k/10) c / (side k), so only lines with c >= 8 side / 3 can reach
/// the main diagonal's score of 4/5; shorter lines are skipped.
inline Rational verify_block_inequality(const BlockPlan& plan) {
  const GridParams g(plan.n);
  const std::int64_t den = static_cast<std::int64_t>(plan.side) * plan.k;
  Rational best(0);
  const std::int64_t min_count = std::max<std::int64_t>(2, 8 * plan.side / 3);
  for (const auto& ls : enumerate_lines_min_count(g, min_count)) {
    if (ls.line.axis_aligned()) continue;
    const Rational r(detail::quota_weighted_count(plan, ls.line), den);
    if (r > best) best = r;
  }
  return best;
}

struct BlockReport {
  int i = 0, j = 0;
  int quota = 0;
  int attempts = 0;         // attempts used
  int feasible_attempts = 0;  // attempts reaching exact block marginals
  bool relaxed_ok = false;  // |S_ij cap L| <= k_ij (w_ij(L) + 1/100) for all non-axis L
  std::int64_t max_nonaxis = 0;
};

struct ComposeReport {
  std::vector<BlockReport> blocks;
  bool full_grid = false;  // k >= 2n - 1 branch
  bool hypothesis_holds = false;  // every block relaxed_ok
  std::int64_t max_nonaxis = 0;
  std::optional<Line> max_line;
  bool nonaxis_le_k = false;
  bool bound_084 = false;  // max non-axis <= floor(0.84 k)
};

/// Non-axis lines of a block-local set; true iff every count c on a line with
/// g grid points satisfies c <= q (g/side + 1/100).
inline bool block_relaxed_ok(const PointSet2& block, int quota, std::int64_t* max_nonaxis = nullptr) {
  const int s = block.n();
  bool ok = true;
  std::int64_t mx = 0;
  for (const auto& [line, cnt] : line_counts(block)) {
    if (line.axis_aligned()) continue;
    mx = std::max(mx, cnt);
    const std::int64_t gc = line_point_count(line, s);
    if (100 * static_cast<std::int64_t>(s) * cnt > static_cast<std::int64_t>(quota) * (100 * gc + s)) ok = false;
  }
  if (max_nonaxis) *max_nonaxis = mx;
  return ok;
}

/// Builds each block with run_pipeline + regularize at (n/4, k_ij). Block
/// (i, j) attempt a draws from rng.fork(4(i-1) + (j-1)).fork(a). A block is
/// retried while it misses its marginals or the relaxed bound, up to
/// cfg.retry_budget attempts; the first attempt with exact marginals is kept
/// when the relaxed bound is never met. Throws BudgetExhausted naming the
/// block when no attempt reaches exact marginals.
inline PointSet2 compose(int n, int k, const PracticalConfig& cfg, CounterRng& rng,
                         ComposeReport* report = nullptr) {
  cfg.validate();
  ComposeReport local;
  ComposeReport& rep = report ? *report : local;
  rep = ComposeReport{};
  if (n >= 2 && k >= 2 * n - 1) {
    // No line meets [n]^2 in more than n <= k points.
    rep.full_grid = true;
    rep.max_nonaxis = n;
    rep.nonaxis_le_k = true;
    rep.bound_084 = n <= (84 * k) / 100;
    rep.hypothesis_holds = false;
    return PointSet2::full(n);
  }
  const BlockPlan plan = block_plan(n, k);
  const GridParams bg(plan.side);
  PointSet2 S(n);
  rep.hypothesis_holds = true;
  for (int i = 1; i <= 4; ++i)
    for (int j = 1; j <= 4; ++j) {
      const int q = plan.k_at(i, j);
      const CounterRng brng = rng.fork(static_cast<std::uint64_t>(4 * (i - 1) + (j - 1)));
      BlockReport br{i, j, q, 0, 0, false, 0};
      std::optional<PointSet2> chosen;
      for (int a = 0; a < cfg.retry_budget; ++a) {
        ++br.attempts;
        CounterRng arng = brng.fork(static_cast<std::uint64_t>(a));
        PointSet2 B(plan.side);
        try {
          CounterRng prng = arng.fork(0);
          B = run_pipeline(q, bg, cfg, prng);
        } catch (const BudgetExhausted&) {
          continue;
        }
        CounterRng seeds = arng.fork(1);
        auto reg = regularize(B, q, bg, seeds());
        if (!std::holds_alternative<PointSet2>(reg)) continue;
        PointSet2 T = std::move(std::get<PointSet2>(reg));
        ++br.feasible_attempts;
        std::int64_t mx = 0;
        const bool relaxed = block_relaxed_ok(T, q, &mx);
        if (!chosen || relaxed) {
          chosen = std::move(T);
          br.max_nonaxis = mx;
          br.relaxed_ok = relaxed;
        }
        if (relaxed) break;
      }
      if (!chosen)
        throw BudgetExhausted("compose: block (" + std::to_string(i) + "," + std::to_string(j) +
                              ") reached no exact marginals in " + std::to_string(cfg.retry_budget) + " attempts");
      rep.hypothesis_holds = rep.hypothesis_holds && br.relaxed_ok;
      for (const auto& p : chosen->points())
        S.insert(make_point(plan.origin(i) + p[0] - 1, plan.origin(j) + p[1] - 1));
      rep.blocks.push_back(br);
    }
  for (const auto& [line, cnt] : line_counts(S)) {
    if (line.axis_aligned() || cnt <= rep.max_nonaxis) continue;
    rep.max_nonaxis = cnt;
    rep.max_line = line;
  }
  rep.nonaxis_le_k = rep.max_nonaxis <= k;
  rep.bound_084 = 100 * rep.max_nonaxis <= 84 * static_cast<std::int64_t>(k);
  return S;
}

}  // namespace gridlines
