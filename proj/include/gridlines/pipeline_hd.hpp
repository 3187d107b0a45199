#pragma once

// Affine sections of [n]^d and the good-set pipeline built on them.
//
// A section is the intersection of a t-dimensional affine subspace with the
// grid, kept only when the grid points span it (hull-closed). Enumeration
// supports d in {2, 3}: lines are found by walking primitive directions and
// planes by bucketing the grid along every primitive normal that is the cross
// product of two grid differences.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "gridlines/pipeline2d.hpp"
#include "gridlines/resampler.hpp"
#include "gridlines/rng.hpp"
#include "gridlines/types.hpp"

namespace gridlines {

template <int D>
struct Section {
  std::vector<Point<D>> points;  // lexicographic
  int hull_dim = 0;
  Rational weight;

  std::int64_t size() const { return static_cast<std::int64_t>(points.size()); }

  /// A t-flat parallel to t coordinate axes: d - t coordinates are constant.
  bool axis_aligned(int t) const {
    if (hull_dim != t || points.empty()) return false;
    int fixed = 0;
    for (int i = 0; i < D; ++i) {
      const int v = points.front()[i];
      if (std::all_of(points.begin(), points.end(), [&](const Point<D>& p) { return p[i] == v; })) ++fixed;
    }
    return fixed == D - t;
  }

  friend bool operator==(const Section&, const Section&) = default;
};

/// Polynomial tails: every vertex lies in at most C * alpha^{-C} edges of
/// weight >= alpha, where weight is |F| / N.
struct TailParams {
  std::int64_t N = 1;
  int C = 1;

  TailParams() = default;
  TailParams(std::int64_t N_, int C_) : N(N_), C(C_) {
    if (N < 1 || C < 1) throw InvalidArgument("TailParams: requires N >= 1 and C >= 1");
  }

  /// Smallest admissible C given a measured constant c_hat of the
  /// count <= c_hat * alpha^{-d} law.
  static TailParams from_measured(std::int64_t N, double c_hat, int d) {
    return TailParams(N, std::max<int>(d, static_cast<int>(detail::ceil_snap(c_hat))));
  }
};

/// Thresholds of an m-good set: those of an m-nice set with light cap 6C + 3.
struct GoodParams : NiceParams {
  static GoodParams theory(double m, const TailParams& tails) {
    GoodParams p;
    static_cast<NiceParams&>(p) = NiceParams::theory(m);
    p.light_cap = 6 * tails.C + 3;
    return p;
  }

  static GoodParams desk(double m, const PracticalConfig& cfg, const TailParams& tails) {
    GoodParams p;
    static_cast<NiceParams&>(p) = NiceParams::desk(m, cfg);
    p.light_cap = cfg.light_cap_override ? *cfg.light_cap_override : 6 * tails.C + 3;
    return p;
  }
};

namespace detail {

inline std::int64_t ipow(std::int64_t b, int e) {
  std::int64_t r = 1;
  while (e-- > 0) r *= b;
  return r;
}

template <int D>
using Vec = std::array<int, D>;

// Primitive vectors whose first nonzero coordinate is positive, with every
// coordinate in [-max_step, max_step].
template <int D>
std::vector<Vec<D>> primitive_directions(int max_step) {
  std::vector<Vec<D>> out;
  Vec<D> v{};
  const int side = 2 * max_step + 1;
  const std::int64_t total = ipow(side, D);
  for (std::int64_t code = 0; code < total; ++code) {
    std::int64_t c = code;
    for (int i = D - 1; i >= 0; --i) {
      v[i] = static_cast<int>(c % side) - max_step;
      c /= side;
    }
    int lead = 0, g = 0;
    for (int i = 0; i < D; ++i) {
      if (lead == 0 && v[i] != 0) lead = v[i];
      g = std::gcd(g, v[i] < 0 ? -v[i] : v[i]);
    }
    if (lead > 0 && g == 1) out.push_back(v);
  }
  return out;
}

template <int D>
bool in_grid(const Vec<D>& p, int n) {
  for (int i = 0; i < D; ++i)
    if (p[i] < 1 || p[i] > n) return false;
  return true;
}

template <int D>
std::int64_t vec_index(const Vec<D>& p, int n) {
  std::int64_t idx = 0;
  for (int i = 0; i < D; ++i) idx = idx * n + (p[i] - 1);
  return idx;
}

// Calls fn(indices) for every grid line with at least min_size points;
// indices are row-major point indices in walking order.
template <int D, typename Fn>
void for_each_line(int n, std::int64_t min_size, Fn&& fn) {
  min_size = std::max<std::int64_t>(2, min_size);
  if (min_size > n) return;
  const int step = max_step_for_count(n, min_size);
  const std::int64_t vol = ipow(n, D);
  std::vector<std::int64_t> buf;
  for (const auto& v : primitive_directions<D>(step)) {
    for (std::int64_t s = 0; s < vol; ++s) {
      const Point<D> sp = index_point<D>(s, n);
      Vec<D> p = sp.c, prev;
      for (int i = 0; i < D; ++i) prev[i] = p[i] - v[i];
      if (in_grid<D>(prev, n)) continue;  // not the first point of its line
      buf.clear();
      while (in_grid<D>(p, n)) {
        buf.push_back(vec_index<D>(p, n));
        for (int i = 0; i < D; ++i) p[i] += v[i];
      }
      if (static_cast<std::int64_t>(buf.size()) >= min_size) fn(buf);
    }
  }
}

inline Vec<3> cross(const Vec<3>& u, const Vec<3>& v) {
  return {u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]};
}

// Canonical primitive normals of every plane through three non-collinear
// points of [n]^3, in increasing lexicographic order.
inline std::vector<Vec<3>> plane_normals(int n) {
  const auto dirs = primitive_directions<3>(n - 1);
  struct H {
    std::size_t operator()(const Vec<3>& v) const {
      return static_cast<std::size_t>((static_cast<std::int64_t>(v[0]) * 1000003 + v[1]) * 1000033 + v[2]);
    }
  };
  std::unordered_set<Vec<3>, H> seen;
  for (std::size_t i = 0; i < dirs.size(); ++i)
    for (std::size_t j = i + 1; j < dirs.size(); ++j) {
      Vec<3> c = cross(dirs[i], dirs[j]);
      const int g = std::gcd(std::gcd(std::abs(c[0]), std::abs(c[1])), std::abs(c[2]));
      if (g == 0) continue;
      for (auto& x : c) x /= g;
      const int lead = c[0] != 0 ? c[0] : (c[1] != 0 ? c[1] : c[2]);
      if (lead < 0)
        for (auto& x : c) x = -x;
      seen.insert(c);
    }
  std::vector<Vec<3>> out(seen.begin(), seen.end());
  std::sort(out.begin(), out.end());
  return out;
}

inline bool collinear3(const std::vector<std::int64_t>& idx, int n) {
  if (idx.size() < 3) return true;
  const Point3 p0 = index_point<3>(idx[0], n), p1 = index_point<3>(idx[1], n);
  const Vec<3> u{p1[0] - p0[0], p1[1] - p0[1], p1[2] - p0[2]};
  for (std::size_t k = 2; k < idx.size(); ++k) {
    const Point3 q = index_point<3>(idx[k], n);
    const Vec<3> w = cross(u, Vec<3>{q[0] - p0[0], q[1] - p0[1], q[2] - p0[2]});
    if (w[0] != 0 || w[1] != 0 || w[2] != 0) return false;
  }
  return true;
}

// Upper bound on the grid points of any plane with normal nv: dropping a
// coordinate i with nv[i] != 0 leaves a coset of an index-|nv[i]| lattice in
// an n x n box, with at most ceil(n * gcd(nv[k], nv[i]) / |nv[i]|) points per
// value of the remaining coordinate j.
inline std::int64_t plane_size_bound(const Vec<3>& nv, int n) {
  std::int64_t best = static_cast<std::int64_t>(n) * n;
  for (int i = 0; i < 3; ++i) {
    const int ci = std::abs(nv[i]);
    if (ci == 0) continue;
    for (int k = 0; k < 3; ++k) {
      if (k == i) continue;
      const std::int64_t per = ceil_div(static_cast<std::int64_t>(n) * std::gcd(std::abs(nv[k]), ci), ci);
      best = std::min(best, static_cast<std::int64_t>(n) * std::min<std::int64_t>(n, per));
    }
  }
  return best;
}

// Calls fn(indices) for every plane of [n]^3 whose grid points are not
// collinear and number at least min_size; indices ascend.
template <typename Fn>
void for_each_plane(int n, std::int64_t min_size, Fn&& fn) {
  min_size = std::max<std::int64_t>(3, min_size);
  const std::int64_t vol = ipow(n, 3);
  std::vector<Vec<3>> coords(static_cast<std::size_t>(vol));
  for (std::int64_t i = 0; i < vol; ++i) coords[static_cast<std::size_t>(i)] = index_point<3>(i, n).c;
  std::vector<int> start, order, fill, key(static_cast<std::size_t>(vol));
  std::vector<std::int64_t> buf;
  for (const auto& nv : plane_normals(n)) {
    if (plane_size_bound(nv, n) < min_size) continue;
    int lo = 0, hi = 0;
    for (int i = 0; i < 3; ++i) {
      lo += nv[i] > 0 ? nv[i] : nv[i] * n;
      hi += nv[i] > 0 ? nv[i] * n : nv[i];
    }
    const std::size_t span = static_cast<std::size_t>(hi - lo + 1);
    start.assign(span + 1, 0);
    for (std::size_t i = 0; i < coords.size(); ++i) {
      const auto& p = coords[i];
      key[i] = nv[0] * p[0] + nv[1] * p[1] + nv[2] * p[2] - lo;
      ++start[static_cast<std::size_t>(key[i]) + 1];
    }
    bool any = false;
    for (std::size_t i = 0; i < span; ++i) {
      any = any || start[i + 1] >= min_size;
      start[i + 1] += start[i];
    }
    if (!any) continue;
    order.assign(static_cast<std::size_t>(vol), 0);
    fill.assign(start.begin(), start.end() - 1);
    for (std::size_t i = 0; i < coords.size(); ++i) order[static_cast<std::size_t>(fill[static_cast<std::size_t>(key[i])]++)] = static_cast<int>(i);
    for (std::size_t b = 0; b < span; ++b) {
      const int cnt = start[b + 1] - start[b];
      if (cnt < min_size) continue;
      buf.assign(order.begin() + start[b], order.begin() + start[b + 1]);
      if (!collinear3(buf, n)) fn(buf);
    }
  }
}

// True when the points (ascending indices) fill a t-flat parallel to t axes.
template <int D>
bool axis_aligned_indices(const std::vector<std::int64_t>& idx, int n, int t) {
  if (static_cast<std::int64_t>(idx.size()) != ipow(n, t)) return false;
  const Point<D> p0 = index_point<D>(idx.front(), n);
  int fixed = 0;
  for (int i = 0; i < D; ++i) {
    bool same = true;
    for (auto j : idx)
      if (index_point<D>(j, n)[i] != p0[i]) {
        same = false;
        break;
      }
    fixed += same ? 1 : 0;
  }
  return fixed == D - t;
}

// Every section (lines, plus planes when t = 2) with >= min_size points, as
// (hull_dim, indices) in enumeration order.
template <int D, typename Fn>
void for_each_section(int n, int t, std::int64_t min_size, Fn&& fn) {
  for_each_line<D>(n, min_size, [&](const std::vector<std::int64_t>& idx) {
    std::vector<std::int64_t> sorted(idx);
    std::sort(sorted.begin(), sorted.end());
    fn(1, sorted);
  });
  if constexpr (D == 3) {
    if (t == 2) for_each_plane(n, min_size, [&](const std::vector<std::int64_t>& idx) { fn(2, idx); });
  }
}

template <int D>
void check_section_args(const GridParams& g, int t) {
  if (g.d != D) throw InvalidArgument("grid dimension does not match the point type");
  if (D != 2 && D != 3) throw InvalidArgument("sections are supported for d in {2, 3}");
  if (t < 1 || t > D - 1) throw InvalidArgument("section dimension t must lie in [1, d-1]");
}

template <int D>
Section<D> make_section(int hull_dim, const std::vector<std::int64_t>& idx, int n, std::int64_t N) {
  Section<D> s;
  s.hull_dim = hull_dim;
  s.points.reserve(idx.size());
  for (auto i : idx) s.points.push_back(index_point<D>(i, n));
  std::sort(s.points.begin(), s.points.end());
  s.weight = Rational(static_cast<std::int64_t>(idx.size()), N);
  return s;
}

}  // namespace detail

/// All hull-closed sections of dimension <= t with at least min_size points,
/// each once, sorted by (hull_dim, points).
template <int D>
std::vector<Section<D>> enumerate_sections(const GridParams& g, int t, std::int64_t min_size) {
  detail::check_section_args<D>(g, t);
  if (min_size < 3) throw InvalidArgument("enumerate_sections: min_size must be >= 3");
  const std::int64_t N = detail::ipow(g.n, t);
  std::vector<Section<D>> out;
  detail::for_each_section<D>(g.n, t, min_size, [&](int hd, const std::vector<std::int64_t>& idx) {
    out.push_back(detail::make_section<D>(hd, idx, g.n, N));
  });
  std::sort(out.begin(), out.end(), [](const Section<D>& a, const Section<D>& b) {
    return std::tie(a.hull_dim, a.points) < std::tie(b.hull_dim, b.points);
  });
  return out;
}

/// Every section through x (including two-point lines) with weight >= alpha.
template <int D>
std::vector<Section<D>> sections_through_point(const Point<D>& x, const GridParams& g, int t,
                                               const Rational& alpha) {
  detail::check_section_args<D>(g, t);
  if (!x.in_grid(g.n)) throw InvalidArgument("sections_through_point: point outside grid");
  if (alpha.num <= 0) throw InvalidArgument("sections_through_point: alpha must be positive");
  const int n = g.n;
  const std::int64_t N = detail::ipow(n, t);
  const std::int64_t need = std::max<std::int64_t>(2, detail::ceil_div(alpha.num * N, alpha.den));
  std::vector<Section<D>> out;
  if (need <= n) {
    for (const auto& v : detail::primitive_directions<D>(max_step_for_count(n, need))) {
      detail::Vec<D> p = x.c;
      for (;;) {
        detail::Vec<D> q;
        for (int i = 0; i < D; ++i) q[i] = p[i] - v[i];
        if (!detail::in_grid<D>(q, n)) break;
        p = q;
      }
      std::vector<std::int64_t> idx;
      while (detail::in_grid<D>(p, n)) {
        idx.push_back(detail::vec_index<D>(p, n));
        for (int i = 0; i < D; ++i) p[i] += v[i];
      }
      if (static_cast<std::int64_t>(idx.size()) >= need) out.push_back(detail::make_section<D>(1, idx, n, N));
    }
  }
  if constexpr (D == 3) {
    if (t == 2) {
      const std::int64_t vol = detail::ipow(n, 3);
      std::vector<std::int64_t> idx;
      for (const auto& nv : detail::plane_normals(n)) {
        const int e = nv[0] * x[0] + nv[1] * x[1] + nv[2] * x[2];
        idx.clear();
        for (std::int64_t i = 0; i < vol; ++i) {
          const Point3 p = index_point<3>(i, n);
          if (nv[0] * p[0] + nv[1] * p[1] + nv[2] * p[2] == e) idx.push_back(i);
        }
        if (static_cast<std::int64_t>(idx.size()) >= std::max<std::int64_t>(3, need) &&
            !detail::collinear3(idx, n))
          out.push_back(detail::make_section<3>(2, idx, n, N));
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const Section<D>& a, const Section<D>& b) {
    return std::tie(a.hull_dim, a.points) < std::tie(b.hull_dim, b.points);
  });
  return out;
}

struct TailsProfile {
  double c_hat = 0;  // max over x, alpha of |sections through x, w >= alpha| * alpha^d
  Rational argmax_alpha;
  std::int64_t argmax_count = 0;
};

/// Measured constant of the O(alpha^{-d}) tail law over every grid point.
template <int D>
TailsProfile tails_profile(const GridParams& g, int t, const std::vector<Rational>& alpha_grid) {
  detail::check_section_args<D>(g, t);
  for (const auto& a : alpha_grid)
    if (a.num <= 0 || a > Rational(1)) throw InvalidArgument("tails_profile: alpha must lie in (0, 1]");
  const int n = g.n;
  const std::int64_t N = detail::ipow(n, t);
  const std::int64_t vol = detail::ipow(n, D);
  // hist[x][s]: sections through x with exactly s points.
  std::vector<std::int64_t> hist(static_cast<std::size_t>(vol * (N + 1)), 0);
  detail::for_each_section<D>(n, t, 2, [&](int, const std::vector<std::int64_t>& idx) {
    for (auto i : idx) ++hist[static_cast<std::size_t>(i * (N + 1)) + idx.size()];
  });
  TailsProfile prof;
  std::vector<std::int64_t> at_least(static_cast<std::size_t>(N + 2));
  for (std::int64_t x = 0; x < vol; ++x) {
    at_least[static_cast<std::size_t>(N + 1)] = 0;
    for (std::int64_t s = N; s >= 0; --s)
      at_least[static_cast<std::size_t>(s)] =
          at_least[static_cast<std::size_t>(s + 1)] + hist[static_cast<std::size_t>(x * (N + 1) + s)];
    for (const auto& a : alpha_grid) {
      const std::int64_t need = std::max<std::int64_t>(2, detail::ceil_div(a.num * N, a.den));
      if (need > N) continue;
      const std::int64_t cnt = at_least[static_cast<std::size_t>(need)];
      const double v = static_cast<double>(cnt) * std::pow(a.value(), D);
      if (v > prof.c_hat) prof = TailsProfile{v, a, cnt};
    }
  }
  return prof;
}

/// Tail parameters from a profile over alpha = s / N for s = 2..N.
template <int D>
TailParams measure_tails(const GridParams& g, int t) {
  const std::int64_t N = detail::ipow(g.n, t);
  std::vector<Rational> grid;
  for (std::int64_t s = 2; s <= N; ++s) grid.emplace_back(s, N);
  return TailParams::from_measured(N, tails_profile<D>(g, t, grid).c_hat, D);
}

template <int D>
struct SectionViolation {
  std::vector<Point<D>> points;
  int hull_dim = 0;
  std::int64_t count = 0;
  CountWindow allowed;
};

template <int D>
struct GoodReport {
  bool passed = false;
  std::vector<SectionViolation<D>> heavy_violations, medium_violations, light_violations;
  std::int64_t heavy_total = 0, medium_total = 0, light_total = 0;
  std::int64_t sections_checked = 0;
};

/// Exact check of the three good-set conditions over every section that can
/// violate its window.
template <int D>
GoodReport<D> check_good(const PointSet<D>& S, const GoodParams& params, const GridParams& g, int t) {
  detail::check_section_args<D>(g, t);
  if (S.n() != g.n) throw InvalidArgument("check_good: grid size mismatch");
  const std::int64_t N = detail::ipow(g.n, t);
  GoodReport<D> rep;
  const int NN = static_cast<int>(N);
  detail::for_each_section<D>(g.n, t, params.relevant_min_count(NN),
                              [&](int hd, const std::vector<std::int64_t>& idx) {
                                ++rep.sections_checked;
                                const auto gc = static_cast<std::int64_t>(idx.size());
                                std::int64_t cnt = 0;
                                for (auto i : idx) cnt += S.contains_index(i) ? 1 : 0;
                                const bool axis = hd == t && detail::axis_aligned_indices<D>(idx, g.n, t);
                                const CountWindow w = params.window(gc, NN, axis);
                                if (w.contains(cnt)) return;
                                SectionViolation<D> v{detail::make_section<D>(hd, idx, g.n, N).points, hd, cnt, w};
                                switch (params.classify(gc, NN)) {
                                  case LineClass::Heavy: detail::report(rep.heavy_violations, rep.heavy_total, std::move(v)); break;
                                  case LineClass::Medium: detail::report(rep.medium_violations, rep.medium_total, std::move(v)); break;
                                  case LineClass::Light: detail::report(rep.light_violations, rep.light_total, std::move(v)); break;
                                }
                              });
  rep.passed = rep.heavy_total == 0 && rep.medium_total == 0 && rep.light_total == 0;
  return rep;
}

struct HdPipelineReport {
  std::vector<double> schedule;  // m_(1) < ... < m_(r)
  TailParams tails;
  std::vector<StageReport> stages;  // m_(r) first
};

namespace detail {

template <int D>
PointSet<D> subsample_sections(const PointSet<D>& S0, double m0, double m, const GridParams& g, int t,
                               const GoodParams& params, const PracticalConfig& cfg, CounterRng& rng,
                               StageReport& sr) {
  const double p = std::min(1.0, m / m0);
  sr = StageReport{m0, m, 0, {}};
  if (p >= 1.0 - kSnap) return S0;
  const std::int64_t N = ipow(g.n, t);
  const int NN = static_cast<int>(N);
  const auto s0_idx = S0.indices();
  std::vector<int> var_of(static_cast<std::size_t>(ipow(g.n, D)), -1);
  for (std::size_t i = 0; i < s0_idx.size(); ++i) var_of[static_cast<std::size_t>(s0_idx[i])] = static_cast<int>(i);
  std::vector<CountConstraint> cons;
  for_each_section<D>(g.n, t, params.relevant_min_count(NN), [&](int hd, const std::vector<std::int64_t>& idx) {
    const auto gc = static_cast<std::int64_t>(idx.size());
    const bool axis = hd == t && axis_aligned_indices<D>(idx, g.n, t);
    const CountWindow w = params.window(gc, NN, axis);
    CountConstraint c{w.lo, w.hi, {}};
    for (auto i : idx)
      if (var_of[static_cast<std::size_t>(i)] >= 0) c.members.push_back(var_of[static_cast<std::size_t>(i)]);
    const auto cnt = static_cast<std::int64_t>(c.members.size());
    if (params.classify(gc, NN) != LineClass::Heavy && cnt <= w.hi) return;
    if (w.lo <= 0 && cnt <= w.hi) return;
    cons.push_back(std::move(c));
  });
  Resampler rs(static_cast<int>(s0_idx.size()), std::move(cons));
  sr.constraints = static_cast<std::int64_t>(rs.constraints().size());
  if (rs.first_infeasible() >= 0)
    throw BudgetExhausted("stage m=" + std::to_string(m) + ": a section cannot meet its window inside S0");
  std::vector<std::uint8_t> sel;
  if (!rs.run(p, rng, cfg.resample_budget, sel, sr.resample))
    throw BudgetExhausted("stage m=" + std::to_string(m) + ": resample budget of " +
                          std::to_string(cfg.resample_budget) + " exhausted");
  PointSet<D> out(g.n);
  for (std::size_t i = 0; i < s0_idx.size(); ++i)
    if (sel[i]) out.insert_index(s0_idx[i]);
  return out;
}

}  // namespace detail

/// Staged subsampling of [n]^d down m_(r), ..., m_(1) = m with m_(i+1) =
/// m_(i)^3 <= n^t, resampling violated sections at each stage. Stage i draws
/// from rng.fork(i). Tail parameters are measured when not supplied.
template <int D>
PointSet<D> run_hd_pipeline(const GridParams& g, int t, double m, const PracticalConfig& cfg, CounterRng& rng,
                            std::optional<TailParams> tails = std::nullopt, HdPipelineReport* report = nullptr) {
  detail::check_section_args<D>(g, t);
  cfg.validate();
  const std::int64_t N = detail::ipow(g.n, t);
  if (m < 1.0 || m > static_cast<double>(N) * (1.0 + detail::kSnap))
    throw InvalidArgument("run_hd_pipeline: requires 1 <= m <= n^t");
  // The light cap 6C+3 only matters when some section of >= 2 points is
  // light at m; otherwise skip the (costly) tail measurement.
  const bool light_possible = detail::floor_snap(std::pow(m, -2.0) * static_cast<double>(N)) >= 2;
  const TailParams tp = tails ? *tails : (light_possible ? measure_tails<D>(g, t) : TailParams(N, D));
  std::vector<double> sched{m};
  for (;;) {
    const double next = sched.back() * sched.back() * sched.back();
    if (next > static_cast<double>(N) * (1.0 + detail::kSnap)) break;
    sched.push_back(next);
  }
  if (report) *report = HdPipelineReport{sched, tp, {}};
  PointSet<D> S = PointSet<D>::full(g.n);
  double m0 = static_cast<double>(N);
  for (int i = static_cast<int>(sched.size()) - 1; i >= 0; --i) {
    CounterRng stage_rng = rng.fork(static_cast<std::uint64_t>(i));
    StageReport sr;
    const GoodParams params = GoodParams::desk(sched[static_cast<std::size_t>(i)], cfg, tp);
    try {
      S = detail::subsample_sections<D>(S, m0, sched[static_cast<std::size_t>(i)], g, t, params, cfg, stage_rng, sr);
    } catch (const BudgetExhausted& e) {
      throw BudgetExhausted(e.what(), i);
    }
    if (report) report->stages.push_back(sr);
    m0 = sched[static_cast<std::size_t>(i)];
  }
  return S;
}

}  // namespace gridlines
