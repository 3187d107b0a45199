#pragma once

// Staged subsampling of the plane grid: m-nice sets, the stage schedule,
// one resampled subsampling stage, and the theoretical bound calculator.

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <numeric>
#include <algorithm>
#include <string>
#include <vector>

#include "gridlines/grid_geometry.hpp"
#include "gridlines/resampler.hpp"
#include "gridlines/rng.hpp"
#include "gridlines/types.hpp"

namespace gridlines {

inline constexpr double kTheoryEps = 0.005;
inline constexpr double kTheoryK = 1e36;
inline constexpr int kTheoryLightCap = 14;
// Desk-scale defaults: the heavy-line tolerance used for m <= 1e4 and the
// schedule slack that keeps row/column lower bounds at or above k.
inline constexpr double kDeskDelta = 0.25;
inline constexpr double kDeskDeltaCeiling = 1e4;
inline constexpr double kDeskEps = 1.0 / 3.0;
inline constexpr double kDeskSlackZ = 2.0;

struct PracticalConfig {
  std::optional<double> delta_override;
  std::optional<int> light_cap_override;
  int quasi_sample_pairs = 64;
  std::int64_t resample_budget = 200000;
  int retry_budget = 20;
  std::uint64_t rng_seed = 0;
  double eps = kDeskEps;
  // Widen each integer acceptance window to [floor(lo), ceil(hi)]. At small m
  // the real windows can contain no integer at all.
  bool outward_rounding = true;
  // Non-axis line windows are widened by ceil(slack_z * sqrt(m w(L))), about
  // slack_z standard deviations of the stage count. Rows and columns keep
  // the plain (1 +- delta) window.
  double slack_z = kDeskSlackZ;
  // Swap steps allowed when lowering line counts after regularization.
  std::int64_t repair_steps = 20000;

  void validate() const {
    if (resample_budget < 1 || retry_budget < 1)
      throw InvalidArgument("budgets must be >= 1");
    if (delta_override && !(*delta_override > 0.0 && *delta_override < 1.0))
      throw InvalidArgument("delta override must lie in (0, 1)");
    if (light_cap_override && *light_cap_override < 2)
      throw InvalidArgument("light cap override must be >= 2");
    if (quasi_sample_pairs < 0) throw InvalidArgument("quasi_sample_pairs must be >= 0");
    if (eps < 0.0) throw InvalidArgument("eps must be >= 0");
    if (slack_z < 0.0) throw InvalidArgument("slack_z must be >= 0");
    if (repair_steps < 0) throw InvalidArgument("repair_steps must be >= 0");
  }
};

enum class LineClass { Heavy, Medium, Light };

inline const char* to_string(LineClass c) {
  switch (c) {
    case LineClass::Heavy: return "heavy";
    case LineClass::Medium: return "medium";
    case LineClass::Light: return "light";
  }
  return "?";
}

/// Inclusive integer window for a count.
struct CountWindow {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  bool contains(std::int64_t v) const { return v >= lo && v <= hi; }
};

/// Thresholds of an m-nice set. Classification is by grid count on an n-grid:
/// heavy w > m^{-2/3}, light w <= m^{-2}, medium in between.
struct NiceParams {
  double m = 1.0;
  double heavy_threshold = 1.0;
  double light_threshold = 1.0;
  double delta = 0.5;
  int light_cap = kTheoryLightCap;
  bool outward_rounding = false;
  double slack_z = 0.0;

  static NiceParams theory(double m) {
    if (m < 1.0) throw InvalidArgument("NiceParams: m must be >= 1");
    NiceParams p;
    p.m = m;
    p.heavy_threshold = std::pow(m, -2.0 / 3.0);
    p.light_threshold = std::pow(m, -2.0);
    p.delta = std::pow(m, -1.0 / 12.0);
    if (p.delta >= 1.0) p.delta = 0.5;  // m = 1 degenerate
    return p;
  }

  /// Theory thresholds with the desk tolerance: delta_override if set, else
  /// min(0.25, m^{-1/12}).
  static NiceParams desk(double m, const PracticalConfig& cfg) {
    NiceParams p = theory(m);
    p.delta = cfg.delta_override ? *cfg.delta_override
                                 : std::min(kDeskDelta, std::pow(m, -1.0 / 12.0));
    if (cfg.light_cap_override) p.light_cap = *cfg.light_cap_override;
    p.outward_rounding = cfg.outward_rounding;
    p.slack_z = cfg.slack_z;
    return p;
  }

  double medium_cap_real() const { return (1.0 + delta) * std::cbrt(m); }

  /// Smallest grid count that is heavy.
  std::int64_t heavy_min_count(int n) const { return detail::floor_snap(heavy_threshold * n) + 1; }
  /// Largest grid count that is light.
  std::int64_t light_max_count(int n) const { return detail::floor_snap(light_threshold * n); }

  LineClass classify(std::int64_t grid_count, int n) const {
    if (grid_count >= heavy_min_count(n)) return LineClass::Heavy;
    if (grid_count <= light_max_count(n)) return LineClass::Light;
    return LineClass::Medium;
  }

  std::int64_t medium_cap() const {
    return outward_rounding ? detail::ceil_snap(medium_cap_real())
                            : detail::floor_snap(medium_cap_real());
  }

  std::int64_t slack(std::int64_t grid_count, int n, bool axis) const {
    if (axis || slack_z <= 0.0) return 0;
    return detail::ceil_snap(slack_z * std::sqrt(m * static_cast<double>(grid_count) / n));
  }

  CountWindow window(std::int64_t grid_count, int n, bool axis = false) const {
    const std::int64_t s = slack(grid_count, n, axis);
    switch (classify(grid_count, n)) {
      case LineClass::Heavy: {
        const double mw = m * static_cast<double>(grid_count) / n;
        CountWindow w = real_window((1.0 - delta) * mw, (1.0 + delta) * mw);
        return CountWindow{std::max<std::int64_t>(0, w.lo - s), w.hi + s};
      }
      case LineClass::Medium: return CountWindow{0, medium_cap() + s};
      case LineClass::Light: return CountWindow{0, light_cap};
    }
    return {};
  }

  CountWindow real_window(double lo, double hi) const {
    if (outward_rounding) return CountWindow{detail::floor_snap(lo), detail::ceil_snap(hi)};
    return CountWindow{detail::ceil_snap(lo), detail::floor_snap(hi)};
  }

  /// Smallest grid count of a line that could violate its window; used to
  /// prune enumeration.
  std::int64_t relevant_min_count(int n) const {
    for (std::int64_t gc = 2; gc <= n; ++gc) {
      if (classify(gc, n) == LineClass::Heavy) return gc;
      if (gc > window(gc, n, true).hi) return gc;
    }
    return n + 1;
  }
};

struct StageSchedule {
  std::vector<double> stages;  // m_(1) < ... < m_(r)
  int k = 0;
  int n = 0;
  double eps = kTheoryEps;
  double K_theory = kTheoryK;

  int r() const { return static_cast<int>(stages.size()); }
  // The proof assumes k <= 0.9 n; reported, not enforced.
  bool within_theory_k_range() const { return k <= 0.9 * n; }
};

/// m_(1) = (1+eps)k, m_(i+1) = m_(i)^3, stopping at the last stage <= n.
inline StageSchedule build_schedule(int k, int n, double eps) {
  if (n < 2) throw InvalidArgument("build_schedule: n must be >= 2");
  if (k < 1) throw InvalidArgument("build_schedule: k must be >= 1");
  if (k > n) throw InvalidArgument("build_schedule: k must not exceed n");
  if (eps < 0) throw InvalidArgument("build_schedule: eps must be >= 0");
  const double m1 = (1.0 + eps) * k;
  if (m1 > n * (1.0 + detail::kSnap)) throw InvalidArgument("build_schedule: (1+eps)k exceeds n");
  StageSchedule s;
  s.k = k;
  s.n = n;
  s.eps = eps;
  s.stages.push_back(std::min(m1, static_cast<double>(n)));
  for (;;) {
    const double next = s.stages.back() * s.stages.back() * s.stages.back();
    if (next > n * (1.0 + detail::kSnap)) break;
    s.stages.push_back(next);
  }
  return s;
}

struct LineViolation {
  Line line;
  std::int64_t count = 0;
  std::int64_t grid_count = 0;
  CountWindow allowed;
};

struct QuasiViolation {
  std::int64_t i_size = 0;
  std::int64_t j_size = 0;
  std::int64_t count = 0;
  CountWindow allowed;
};

struct NiceReport {
  bool passed = false;
  std::vector<LineViolation> heavy_violations;
  std::vector<LineViolation> medium_violations;
  std::vector<LineViolation> light_violations;
  std::vector<QuasiViolation> quasi_violations;
  // Totals; the lists above keep at most kMaxReported entries each.
  std::int64_t heavy_total = 0, medium_total = 0, light_total = 0, quasi_total = 0;
  std::int64_t lines_checked = 0;
  std::int64_t quasi_pairs_checked = 0;

  static constexpr std::size_t kMaxReported = 32;

  bool lines_ok() const { return heavy_total == 0 && medium_total == 0 && light_total == 0; }
};

namespace detail {

template <typename V, typename T>
void report(std::vector<V>& list, std::int64_t& total, T&& v) {
  ++total;
  if (list.size() < NiceReport::kMaxReported) list.push_back(std::forward<T>(v));
}

// Invokes fn(line, grid_count, s_count, members) for every line whose grid
// count is >= min_count, in canonical (a, b, c) order within each direction.
// `members` are indices into pts.
template <typename Fn>
void scan_lines(const std::vector<Point2>& pts, int n, std::int64_t min_count, Fn&& fn) {
  min_count = std::max<std::int64_t>(2, min_count);
  if (min_count > n) return;
  std::vector<int> order, start;
  for_each_direction(max_step_for_count(n, min_count), [&](Direction dir) {
    const auto [a, b] = normal_of(dir.dx, dir.dy);
    LineFamily fam(a, b, n);
    const auto [lo, hi] = fam.offset_range();
    const std::size_t span = static_cast<std::size_t>(hi - lo + 1);
    start.assign(span + 1, 0);
    for (const auto& p : pts) ++start[static_cast<std::size_t>(a * p[0] + b * p[1] - lo) + 1];
    for (std::size_t i = 0; i < span; ++i) start[i + 1] += start[i];
    order.assign(pts.size(), 0);
    std::vector<int> fill(start.begin(), start.end() - 1);
    for (int i = 0; i < static_cast<int>(pts.size()); ++i)
      order[fill[static_cast<std::size_t>(a * pts[i][0] + b * pts[i][1] - lo)]++] = i;
    for (std::int64_t c = lo; c <= hi; ++c) {
      const std::int64_t gc = fam.count(c);
      if (gc < min_count) continue;
      const std::size_t off = static_cast<std::size_t>(c - lo);
      const std::span<const int> members(order.data() + start[off],
                                         static_cast<std::size_t>(start[off + 1] - start[off]));
      fn(Line{a, b, c}, gc, static_cast<std::int64_t>(members.size()), members);
    }
  });
}

}  // namespace detail

/// Exact check of the line conditions of an m-nice set plus a sampled check
/// of quasirandomness over contiguous-interval pairs and random pairs (I, J)
/// with |I|, |J| >= n/10.
inline NiceReport check_nice(const PointSet2& S, const NiceParams& params, const GridParams& g,
                             const PracticalConfig& cfg, CounterRng& rng) {
  const int n = g.n;
  if (S.n() != n) throw InvalidArgument("check_nice: point set grid size mismatch");
  NiceReport rep;
  const auto pts = S.points();

  detail::scan_lines(pts, n, params.relevant_min_count(n),
                     [&](const Line& l, std::int64_t gc, std::int64_t cnt, auto) {
                       ++rep.lines_checked;
                       const CountWindow w = params.window(gc, n, l.axis_aligned());
                       if (w.contains(cnt)) return;
                       LineViolation v{l, cnt, gc, w};
                       switch (params.classify(gc, n)) {
                         case LineClass::Heavy: detail::report(rep.heavy_violations, rep.heavy_total, v); break;
                         case LineClass::Medium: detail::report(rep.medium_violations, rep.medium_total, v); break;
                         case LineClass::Light: detail::report(rep.light_violations, rep.light_total, v); break;
                       }
                     });

  // Quasirandomness on rectangles I x J.
  const std::int64_t min_side = detail::ceil_div(n, 10);
  const double density = params.m / n;
  auto quasi_window = [&](std::int64_t a, std::int64_t b) {
    const double e = static_cast<double>(a) * static_cast<double>(b) * density;
    return params.real_window((1.0 - params.delta) * e, (1.0 + params.delta) * e);
  };

  std::vector<std::int64_t> pre(static_cast<std::size_t>(n + 1) * (n + 1), 0);
  auto at = [&](int x, int y) -> std::int64_t& { return pre[static_cast<std::size_t>(x) * (n + 1) + y]; };
  for (int x = 1; x <= n; ++x)
    for (int y = 1; y <= n; ++y)
      at(x, y) = at(x - 1, y) + at(x, y - 1) - at(x - 1, y - 1) + (S.contains(make_point(x, y)) ? 1 : 0);
  for (int x1 = 1; x1 <= n; ++x1)
    for (int x2 = x1 + static_cast<int>(min_side) - 1; x2 <= n; ++x2)
      for (int y1 = 1; y1 <= n; ++y1)
        for (int y2 = y1 + static_cast<int>(min_side) - 1; y2 <= n; ++y2) {
          const std::int64_t cnt = at(x2, y2) - at(x1 - 1, y2) - at(x2, y1 - 1) + at(x1 - 1, y1 - 1);
          const std::int64_t si = x2 - x1 + 1, sj = y2 - y1 + 1;
          ++rep.quasi_pairs_checked;
          const CountWindow w = quasi_window(si, sj);
          if (!w.contains(cnt)) detail::report(rep.quasi_violations, rep.quasi_total, QuasiViolation{si, sj, cnt, w});
        }

  std::vector<int> perm_i(n), perm_j(n);
  for (int s = 0; s < cfg.quasi_sample_pairs; ++s) {
    std::iota(perm_i.begin(), perm_i.end(), 1);
    std::iota(perm_j.begin(), perm_j.end(), 1);
    const std::int64_t si = min_side + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(n - min_side + 1)));
    const std::int64_t sj = min_side + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(n - min_side + 1)));
    for (std::int64_t t = 0; t < si; ++t) std::swap(perm_i[t], perm_i[t + rng.below(static_cast<std::uint64_t>(n - t))]);
    for (std::int64_t t = 0; t < sj; ++t) std::swap(perm_j[t], perm_j[t + rng.below(static_cast<std::uint64_t>(n - t))]);
    std::int64_t cnt = 0;
    for (std::int64_t a = 0; a < si; ++a)
      for (std::int64_t b = 0; b < sj; ++b) cnt += S.contains(make_point(perm_i[a], perm_j[b])) ? 1 : 0;
    ++rep.quasi_pairs_checked;
    const CountWindow w = quasi_window(si, sj);
    if (!w.contains(cnt)) detail::report(rep.quasi_violations, rep.quasi_total, QuasiViolation{si, sj, cnt, w});
  }

  rep.passed = rep.lines_ok() && rep.quasi_total == 0;
  return rep;
}

struct StageReport {
  double m0 = 0;
  double m = 0;
  std::int64_t constraints = 0;
  ResampleStats resample;
};

/// Builds the bad-event constraints of one stage: one per line of 𝓛 that
/// can violate its window given the points of S0.
inline std::vector<CountConstraint> stage_constraints(const std::vector<Point2>& s0_pts,
                                                      const NiceParams& params, int n,
                                                      std::vector<Line>* lines_out = nullptr) {
  struct Tagged {
    Line line;
    CountConstraint c;
  };
  std::vector<Tagged> tagged;
  detail::scan_lines(s0_pts, n, params.relevant_min_count(n),
                     [&](const Line& l, std::int64_t gc, std::int64_t cnt, std::span<const int> members) {
                       const CountWindow w = params.window(gc, n, l.axis_aligned());
                       const bool heavy = params.classify(gc, n) == LineClass::Heavy;
                       if (!heavy && cnt <= w.hi) return;  // cannot exceed its cap
                       if (heavy && w.lo <= 0 && cnt <= w.hi) return;
                       tagged.push_back({l, CountConstraint{w.lo, w.hi, {members.begin(), members.end()}}});
                     });
  std::sort(tagged.begin(), tagged.end(), [](const Tagged& x, const Tagged& y) { return x.line < y.line; });
  std::vector<CountConstraint> out;
  out.reserve(tagged.size());
  if (lines_out) lines_out->clear();
  for (auto& t : tagged) {
    if (lines_out) lines_out->push_back(t.line);
    out.push_back(std::move(t.c));
  }
  return out;
}

/// One subsampling stage: keep each point of S0 with probability m/m0, then
/// resample the points of the lowest violated line until the line conditions
/// of an m-nice set hold. Throws BudgetExhausted when resample_budget runs out
/// or when some heavy line cannot reach its lower bound inside S0.
inline PointSet2 subsample_stage(const PointSet2& S0, double m0, double m, const GridParams& g,
                                 const PracticalConfig& cfg, CounterRng& rng,
                                 StageReport* report = nullptr) {
  if (m > m0 * (1.0 + detail::kSnap)) throw InvalidArgument("subsample_stage: requires m <= m0");
  if (m < 1.0) throw InvalidArgument("subsample_stage: requires m >= 1");
  if (S0.n() != g.n) throw InvalidArgument("subsample_stage: grid size mismatch");
  const double p = std::min(1.0, m / m0);
  if (report) *report = StageReport{m0, m, 0, {}};
  if (p >= 1.0 - detail::kSnap) return S0;

  const NiceParams params = NiceParams::desk(m, cfg);
  const auto pts = S0.points();
  std::vector<Line> lines;
  Resampler rs(static_cast<int>(pts.size()), stage_constraints(pts, params, g.n, &lines));
  if (report) report->constraints = static_cast<std::int64_t>(rs.constraints().size());
  if (const int bad = rs.first_infeasible(); bad >= 0) {
    const Line& l = lines[static_cast<std::size_t>(bad)];
    throw BudgetExhausted("stage m=" + std::to_string(m) + ": line (" + std::to_string(l.a) + "," +
                          std::to_string(l.b) + "," + std::to_string(l.c) +
                          ") cannot meet its window inside S0");
  }
  std::vector<std::uint8_t> sel;
  ResampleStats stats;
  const bool ok = rs.run(p, rng, cfg.resample_budget, sel, stats);
  if (report) report->resample = stats;
  if (!ok)
    throw BudgetExhausted("stage m=" + std::to_string(m) + ": resample budget of " +
                          std::to_string(cfg.resample_budget) + " exhausted");
  PointSet2 out(g.n);
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (sel[i]) out.insert(pts[i]);
  return out;
}

struct PipelineReport {
  StageSchedule schedule;
  std::vector<StageReport> stages;  // in execution order (m_(r) first)
};

/// Folds subsample_stage from [n]^2 down the schedule m_(r), ..., m_(1).
/// Stage i draws from rng.fork(i).
inline PointSet2 run_pipeline(int k, const GridParams& g, const PracticalConfig& cfg,
                              CounterRng& rng, PipelineReport* report = nullptr) {
  cfg.validate();
  const StageSchedule sched = build_schedule(k, g.n, cfg.eps);
  if (report) *report = PipelineReport{sched, {}};
  PointSet2 S = PointSet2::full(g.n);
  double m0 = g.n;
  for (int i = sched.r() - 1; i >= 0; --i) {
    CounterRng stage_rng = rng.fork(static_cast<std::uint64_t>(i));
    StageReport sr;
    try {
      S = subsample_stage(S, m0, sched.stages[i], g, cfg, stage_rng, &sr);
    } catch (const BudgetExhausted& e) {
      throw BudgetExhausted(e.what(), i);
    }
    if (report) report->stages.push_back(sr);
    m0 = sched.stages[i];
  }
  return S;
}

/// The bound chain of one induction step, evaluated in extended precision
/// (the in-theory values reach 1e540).
struct StageDiagnostics {
  long double p = 0;
  long double delta = 0;
  long double q_bound = 0;
  long double delta_dep = 0;
  long double lll_product = 0;
  long double D = 0;
  long double chernoff_heavy = 0;
  long double chernoff_medium = 0;
  long double light_bound = 0;
  bool theory_satisfied = false;  // lll_product <= 1
};

inline StageDiagnostics stage_diagnostics(double m0_in, double m_in, const GridParams& g) {
  (void)g;
  if (m_in > m0_in * (1.0 + detail::kSnap)) throw InvalidArgument("stage_diagnostics: requires m <= m0");
  if (m_in < 1.0) throw InvalidArgument("stage_diagnostics: requires m >= 1");
  using LD = long double;
  const LD m = m_in, m0 = m0_in;
  StageDiagnostics d;
  d.p = m / m0;
  d.delta = std::pow(m, -1.0L / 12.0L);
  const LD d3 = d.delta * d.delta * d.delta;
  const LD half = d.delta / 2.0L;
  // Heavy: worst heavy line has m * w = m^{1/3}.
  d.chernoff_heavy = 2.0L * std::exp(-(half * half) * (1.0L - d3) * std::cbrt(m) / 3.0L);
  // Medium: p * m' >= m^{1/3} - 1.
  d.chernoff_medium = 2.0L * std::exp(-(half * half) * std::max<LD>(0, std::cbrt(m) - 1.0L) / 3.0L);
  // Light: (e (1+delta^3) m0 m^{-2} p / (C+1))^{C+1}.
  constexpr int C1 = kTheoryLightCap + 1;
  d.light_bound = std::pow(std::exp(1.0L) * (1.0L + d3) * m0 / (m * m) * d.p / C1, static_cast<LD>(C1));
  d.q_bound = std::max({d.chernoff_heavy, d.chernoff_medium, d.light_bound});
  d.D = 18.0L * std::pow(m0, 4.0L);
  d.delta_dep = (1.0L + d3) * m0 * d.D;
  d.lll_product = 4.0L * d.q_bound * d.delta_dep;
  d.theory_satisfied = d.lll_product <= 1.0L;
  return d;
}

}  // namespace gridlines
