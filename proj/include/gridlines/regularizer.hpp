#pragma once

// k-regular spanning subgraphs of balanced bipartite graphs via max flow, with
// Ore–Ryser (Hall-type) violation certificates read off a minimum cut.
//
// Rows and columns are 1-based, matching grid coordinates: the point (x, y)
// is the edge between row x and column y.

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <queue>
#include <string>
#include <variant>
#include <vector>

#include "gridlines/grid_geometry.hpp"
#include "gridlines/rng.hpp"
#include "gridlines/types.hpp"

namespace gridlines {

struct Edge {
  int row = 1;
  int col = 1;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

using EdgeSet = std::vector<Edge>;

struct BipartiteGraph {
  int n = 0;
  EdgeSet edges;  // sorted, unique

  BipartiteGraph() = default;
  BipartiteGraph(int n_, EdgeSet e) : n(n_), edges(std::move(e)) {
    for (const auto& ed : edges)
      if (ed.row < 1 || ed.row > n || ed.col < 1 || ed.col > n)
        throw InvalidArgument("BipartiteGraph: edge endpoint out of range");
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  }

  bool has_edge(int r, int c) const {
    return std::binary_search(edges.begin(), edges.end(), Edge{r, c});
  }
};

/// Pair (A, B) with e_G(A, B0 \ B) < k(|A| - |B|).
struct HallCertificate {
  std::vector<int> A;  // rows, sorted
  std::vector<int> B;  // columns, sorted
  std::int64_t deficiency = 0;  // k(|A|-|B|) - e_G(A, B0 \ B)
  std::vector<std::string> pair_types;
};

inline BipartiteGraph to_bipartite(const PointSet2& S, const GridParams& g) {
  if (S.n() != g.n) throw InvalidArgument("to_bipartite: grid size mismatch");
  EdgeSet e;
  e.reserve(static_cast<std::size_t>(S.size()));
  for (const auto& p : S.points()) e.push_back(Edge{p[0], p[1]});
  return BipartiteGraph(g.n, std::move(e));
}

/// e_G(A, B0 \ B).
inline std::int64_t edges_leaving(const BipartiteGraph& G, const std::vector<int>& A,
                                  const std::vector<int>& B) {
  std::vector<std::uint8_t> inA(static_cast<std::size_t>(G.n) + 1, 0), inB(static_cast<std::size_t>(G.n) + 1, 0);
  for (int a : A) inA[a] = 1;
  for (int b : B) inB[b] = 1;
  std::int64_t e = 0;
  for (const auto& ed : G.edges)
    if (inA[ed.row] && !inB[ed.col]) ++e;
  return e;
}

/// Every type label of the seven-way cover that applies to (A, B).
inline std::vector<std::string> classify_pair(std::int64_t a_size, std::int64_t b_size, int n) {
  std::vector<std::string> out;
  const std::int64_t ac = n - a_size;  // |A0 \ A|
  const std::int64_t bc = n - b_size;  // |B0 \ B|
  if (b_size >= a_size) out.emplace_back("0");
  if (a_size > 2 * b_size) out.emplace_back("1");
  if (10 * a_size >= n && 2 * b_size <= n) out.emplace_back("2");
  if (b_size < a_size && a_size <= 2 * b_size && 10 * b_size <= n) out.emplace_back("3");
  if (bc > 2 * ac) out.emplace_back("1*");
  if (10 * bc >= n && 2 * ac <= n) out.emplace_back("2*");
  if (ac < bc && bc <= 2 * ac && 10 * ac <= n) out.emplace_back("3*");
  return out;
}

inline std::vector<std::string> classify_pair(const std::vector<int>& A, const std::vector<int>& B,
                                              const GridParams& g) {
  return classify_pair(static_cast<std::int64_t>(A.size()), static_cast<std::int64_t>(B.size()), g.n);
}

inline bool verify_certificate(const BipartiteGraph& G, int k, const HallCertificate& cert) {
  for (int a : cert.A)
    if (a < 1 || a > G.n) return false;
  for (int b : cert.B)
    if (b < 1 || b > G.n) return false;
  const std::int64_t rhs = static_cast<std::int64_t>(k) *
                           (static_cast<std::int64_t>(cert.A.size()) - static_cast<std::int64_t>(cert.B.size()));
  return edges_leaving(G, cert.A, cert.B) < rhs;
}

namespace detail {

// Dinic's algorithm on an integer-capacity network.
class MaxFlow {
 public:
  explicit MaxFlow(int nodes) : head_(static_cast<std::size_t>(nodes), -1), level_(nodes), it_(nodes) {}

  int add_arc(int u, int v, int cap) {
    to_.push_back(v); cap_.push_back(cap); next_.push_back(head_[u]); head_[u] = static_cast<int>(to_.size()) - 1;
    to_.push_back(u); cap_.push_back(0); next_.push_back(head_[v]); head_[v] = static_cast<int>(to_.size()) - 1;
    return static_cast<int>(to_.size()) - 2;
  }

  std::int64_t run(int s, int t) {
    std::int64_t flow = 0;
    while (bfs(s, t)) {
      for (std::size_t i = 0; i < head_.size(); ++i) it_[i] = head_[i];
      while (int f = dfs(s, t, std::numeric_limits<int>::max())) flow += f;
    }
    return flow;
  }

  int residual(int arc) const { return cap_[static_cast<std::size_t>(arc)]; }

  /// Nodes reachable from s in the residual network.
  std::vector<std::uint8_t> reachable(int s) const {
    std::vector<std::uint8_t> seen(head_.size(), 0);
    std::vector<int> stack{s};
    seen[s] = 1;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (int e = head_[u]; e != -1; e = next_[e])
        if (cap_[e] > 0 && !seen[to_[e]]) {
          seen[to_[e]] = 1;
          stack.push_back(to_[e]);
        }
    }
    return seen;
  }

 private:
  bool bfs(int s, int t) {
    std::fill(level_.begin(), level_.end(), -1);
    std::queue<int> q;
    level_[s] = 0;
    q.push(s);
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (int e = head_[u]; e != -1; e = next_[e])
        if (cap_[e] > 0 && level_[to_[e]] < 0) {
          level_[to_[e]] = level_[u] + 1;
          q.push(to_[e]);
        }
    }
    return level_[t] >= 0;
  }

  int dfs(int u, int t, int f) {
    if (u == t) return f;
    for (int& e = it_[u]; e != -1; e = next_[e]) {
      const int v = to_[e];
      if (cap_[e] > 0 && level_[v] == level_[u] + 1) {
        if (int d = dfs(v, t, std::min(f, cap_[e]))) {
          cap_[e] -= d;
          cap_[e ^ 1] += d;
          return d;
        }
      }
    }
    return 0;
  }

  std::vector<int> head_, level_, it_;
  std::vector<int> to_, cap_, next_;
};

}  // namespace detail

using RegularResult = std::variant<EdgeSet, HallCertificate>;

/// Source -> row (cap k), row -> column per edge (cap 1), column -> sink
/// (cap k). Feasible iff the max flow is k*n; the saturated edge arcs form the
/// subgraph. Otherwise (A, B) = (rows, columns) on the source side of the cut.
///
/// With `arc_seed` set, edge arcs are inserted in a seeded random order
/// instead of sorted order; this changes which subgraph is found, not whether.
inline RegularResult k_regular_subgraph(const BipartiteGraph& G, int k,
                                        std::optional<std::uint64_t> arc_seed = std::nullopt) {
  if (k < 0 || k > G.n) throw InvalidArgument("k_regular_subgraph: requires 0 <= k <= n");
  const int n = G.n;
  const int src = 0, sink = 2 * n + 1;
  detail::MaxFlow mf(2 * n + 2);
  for (int r = 1; r <= n; ++r) mf.add_arc(src, r, k);
  for (int c = 1; c <= n; ++c) mf.add_arc(n + c, sink, k);
  std::vector<std::size_t> order(G.edges.size());
  std::iota(order.begin(), order.end(), 0);
  if (arc_seed) {
    CounterRng rng(*arc_seed, 0x5265677541726373ULL);
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  }
  std::vector<int> arc_of(G.edges.size());
  for (std::size_t i : order) arc_of[i] = mf.add_arc(G.edges[i].row, n + G.edges[i].col, 1);
  const std::int64_t flow = mf.run(src, sink);

  if (flow == static_cast<std::int64_t>(k) * n) {
    EdgeSet H;
    H.reserve(static_cast<std::size_t>(k) * n);
    for (std::size_t i = 0; i < G.edges.size(); ++i)
      if (mf.residual(arc_of[i]) == 0) H.push_back(G.edges[i]);
    std::sort(H.begin(), H.end());
    return H;
  }

  const auto seen = mf.reachable(src);
  HallCertificate cert;
  for (int r = 1; r <= n; ++r)
    if (seen[r]) cert.A.push_back(r);
  for (int c = 1; c <= n; ++c)
    if (seen[n + c]) cert.B.push_back(c);
  cert.deficiency = static_cast<std::int64_t>(k) *
                        (static_cast<std::int64_t>(cert.A.size()) - static_cast<std::int64_t>(cert.B.size())) -
                    edges_leaving(G, cert.A, cert.B);
  cert.pair_types = classify_pair(cert.A, cert.B, GridParams(std::max(2, n)));
  return cert;
}

using RegularizeResult = std::variant<PointSet2, HallCertificate>;

/// S' ⊆ S with exactly k points in every row and column, or a verified
/// certificate that none exists.
inline RegularizeResult regularize(const PointSet2& S, int k, const GridParams& g,
                                   std::optional<std::uint64_t> arc_seed = std::nullopt) {
  if (k < 0 || k > g.n) throw InvalidArgument("regularize: requires 0 <= k <= n");
  const BipartiteGraph G = to_bipartite(S, g);
  if (static_cast<std::int64_t>(k) * g.n > S.size()) {
    // Whole row side against empty column side: e_G(A0, B0) = |S| < kn.
    HallCertificate cert;
    cert.A.resize(static_cast<std::size_t>(g.n));
    std::iota(cert.A.begin(), cert.A.end(), 1);
    cert.deficiency = static_cast<std::int64_t>(k) * g.n - S.size();
    cert.pair_types = classify_pair(cert.A, cert.B, g);
    return cert;
  }
  auto res = k_regular_subgraph(G, k, arc_seed);
  if (auto* cert = std::get_if<HallCertificate>(&res)) return std::move(*cert);
  PointSet2 out(g.n);
  for (const auto& e : std::get<EdgeSet>(res)) out.insert(make_point(e.row, e.col));
  return out;
}

/// Per-row and per-column counts equal k.
inline bool has_exact_marginals(const PointSet2& S, int k) {
  const int n = S.n();
  std::vector<int> rows(static_cast<std::size_t>(n) + 1, 0), cols(static_cast<std::size_t>(n) + 1, 0);
  for (const auto& p : S.points()) {
    ++rows[p[0]];
    ++cols[p[1]];
  }
  for (int i = 1; i <= n; ++i)
    if (rows[i] != k || cols[i] != k) return false;
  return true;
}

struct RebalanceStats {
  std::int64_t initial_excess = 0;  // sum over non-axis lines of max(0, count - cap)
  std::int64_t final_excess = 0;
  std::int64_t swaps = 0;
  std::int64_t steps = 0;
};

/// Lowers non-axis line counts of T to at most `cap` with marginal-preserving
/// swaps: (r1,c1),(r2,c2) in T are replaced by (r1,c2),(r2,c1) from pool \ T.
/// Row and column counts of T never change, and T stays inside pool. Each step
/// picks a point on an over-full line and takes the swap that lowers the total
/// excess most (ties broken at random). Returns true iff the excess reached 0.
inline bool rebalance_lines(PointSet2& T, const PointSet2& pool, int cap, CounterRng& rng,
                            std::int64_t max_steps, RebalanceStats* stats = nullptr) {
  const int n = T.n();
  if (pool.n() != n) throw InvalidArgument("rebalance_lines: grid size mismatch");
  if (!T.is_subset_of(pool)) throw InvalidArgument("rebalance_lines: T must lie inside pool");
  if (cap < 1) throw InvalidArgument("rebalance_lines: cap must be >= 1");

  struct Family {
    LineFamily fam;
    std::int64_t lo;
    std::vector<std::int32_t> cnt;
  };
  std::vector<Family> fams;
  if (cap + 1 <= n) {
    for_each_direction(max_step_for_count(n, cap + 1), [&](Direction dir) {
      const auto [a, b] = normal_of(dir.dx, dir.dy);
      if (a == 0 || b == 0) return;
      LineFamily fam(a, b, n);
      fams.push_back(Family{fam, fam.offset_range().first, family_counts(fam, T.points())});
    });
  }
  auto slot = [&](Family& f, int x, int y) -> std::int32_t& {
    return f.cnt[static_cast<std::size_t>(f.fam.a() * x + f.fam.b() * y - f.lo)];
  };
  std::int64_t excess = 0;
  for (const auto& f : fams)
    for (auto c : f.cnt) excess += std::max(0, c - cap);
  if (stats) *stats = RebalanceStats{excess, excess, 0, 0};

  // Change in excess from adding (+1) or removing (-1) a point, applied.
  auto bump = [&](int x, int y, int d) {
    std::int64_t delta = 0;
    for (auto& f : fams) {
      auto& c = slot(f, x, y);
      const int before = std::max(0, c - cap);
      c += d;
      delta += std::max(0, c - cap) - before;
    }
    return delta;
  };
  auto swap_delta = [&](int r1, int c1, int r2, int c2, bool keep) {
    std::int64_t d = bump(r1, c1, -1) + bump(r2, c2, -1) + bump(r1, c2, 1) + bump(r2, c1, 1);
    if (!keep) {
      bump(r1, c2, -1); bump(r2, c1, -1); bump(r1, c1, 1); bump(r2, c2, 1);
    }
    return d;
  };

  std::vector<std::array<int, 2>> over;
  for (std::int64_t step = 0; excess > 0 && step < max_steps; ++step) {
    if (stats) stats->steps = step + 1;
    // A random point of T on some over-full line.
    over.clear();
    for (const auto& p : T.points()) {
      for (auto& f : fams)
        if (slot(f, p[0], p[1]) > cap) {
          over.push_back({p[0], p[1]});
          break;
        }
    }
    const auto [r1, c1] = over[rng.below(over.size())];
    std::int64_t best = std::numeric_limits<std::int64_t>::max();
    std::vector<std::array<int, 2>> best_moves;
    for (int c2 = 1; c2 <= n; ++c2) {
      if (c2 == c1 || T.contains(make_point(r1, c2)) || !pool.contains(make_point(r1, c2))) continue;
      for (int r2 = 1; r2 <= n; ++r2) {
        if (r2 == r1 || !T.contains(make_point(r2, c2))) continue;
        if (T.contains(make_point(r2, c1)) || !pool.contains(make_point(r2, c1))) continue;
        const std::int64_t d = swap_delta(r1, c1, r2, c2, false);
        if (d < best) {
          best = d;
          best_moves.clear();
        }
        if (d == best) best_moves.push_back({r2, c2});
      }
    }
    if (best_moves.empty() || best > 0) continue;
    const auto [r2, c2] = best_moves[rng.below(best_moves.size())];
    excess += swap_delta(r1, c1, r2, c2, true);
    T.erase(make_point(r1, c1));
    T.erase(make_point(r2, c2));
    T.insert(make_point(r1, c2));
    T.insert(make_point(r2, c1));
    if (stats) ++stats->swaps;
  }
  if (stats) stats->final_excess = excess;
  return excess == 0;
}

}  // namespace gridlines
