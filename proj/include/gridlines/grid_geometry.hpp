#pragma once

// Exact integer geometry of lines in the grid [n]^2.
//
// A line is stored as the locus a*x + b*y = c with gcd(a, b) = 1 and
// (a > 0) or (a = 0 and b > 0). Every line through two grid points has a
// unique such representation, so Line is usable as a hash/sort key.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <functional>
#include <numeric>
#include <tuple>
#include <utility>
#include <vector>

#include "gridlines/types.hpp"

namespace gridlines {

struct Line {
  std::int64_t a = 0;
  std::int64_t b = 1;
  std::int64_t c = 0;

  friend auto operator<=>(const Line&, const Line&) = default;

  bool horizontal() const { return a == 0; }  // y = c
  bool vertical() const { return b == 0; }    // x = c
  bool axis_aligned() const { return a == 0 || b == 0; }
  bool contains(const Point2& p) const { return a * p[0] + b * p[1] == c; }
};

struct LineHash {
  std::size_t operator()(const Line& l) const {
    std::uint64_t h = static_cast<std::uint64_t>(l.a) * 0x9e3779b97f4a7c15ULL;
    h ^= static_cast<std::uint64_t>(l.b) + 0x7f4a7c159e3779b9ULL + (h << 6) + (h >> 2);
    h ^= static_cast<std::uint64_t>(l.c) + 0x94d049bb133111ebULL + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

struct LineStats {
  Line line;
  std::int64_t count = 0;  // |[n]^2 ∩ L|
  Rational weight;         // count / n

  friend bool operator==(const LineStats&, const LineStats&) = default;
};

/// Primitive direction (dx, dy) with dx > 0, or dx = 0 and dy = 1.
struct Direction {
  int dx = 1;
  int dy = 0;
  friend auto operator<=>(const Direction&, const Direction&) = default;
};

namespace detail {

// Solves a*u + b*v = gcd(a, b) for the Bezout coefficients (u, v).
inline std::int64_t ext_gcd(std::int64_t a, std::int64_t b, std::int64_t& u, std::int64_t& v) {
  std::int64_t old_r = a, r = b, old_s = 1, s = 0, old_t = 0, t = 1;
  while (r != 0) {
    const std::int64_t q = old_r / r;
    std::tie(old_r, r) = std::make_pair(r, old_r - q * r);
    std::tie(old_s, s) = std::make_pair(s, old_s - q * s);
    std::tie(old_t, t) = std::make_pair(t, old_t - q * t);
  }
  if (old_r < 0) {
    old_r = -old_r;
    old_s = -old_s;
    old_t = -old_t;
  }
  u = old_s;
  v = old_t;
  return old_r;
}

inline std::int64_t iabs(std::int64_t v) { return v < 0 ? -v : v; }

}  // namespace detail

/// Canonical normal (a, b) for a nonzero integer direction.
inline std::pair<std::int64_t, std::int64_t> normal_of(std::int64_t dx, std::int64_t dy) {
  if (dx == 0 && dy == 0) throw InvalidArgument("normal_of: zero direction");
  const std::int64_t g = std::gcd(detail::iabs(dx), detail::iabs(dy));
  std::int64_t a = dy / g;
  std::int64_t b = -dx / g;
  if (a < 0 || (a == 0 && b < 0)) {
    a = -a;
    b = -b;
  }
  return {a, b};
}

/// The canonical line through p and q. Throws if p == q.
inline Line canonicalize_line(const Point2& p, const Point2& q) {
  if (p == q) throw InvalidArgument("canonicalize_line: points must be distinct");
  const auto [a, b] = normal_of(q[0] - p[0], q[1] - p[1]);
  return Line{a, b, a * p[0] + b * p[1]};
}

inline Line line_through(const Point2& p, const Direction& dir) {
  const auto [a, b] = normal_of(dir.dx, dir.dy);
  return Line{a, b, a * p[0] + b * p[1]};
}

/// Walks the lattice points of all lines sharing one normal (a, b).
///
/// Points of a*x + b*y = c are (x0 - b*t, y0 + a*t) for a particular solution
/// (x0, y0); the grid constraints cut t to an interval, so counting is O(1) and
/// listing is O(count).
class LineFamily {
 public:
  LineFamily(std::int64_t a, std::int64_t b, int n) : a_(a), b_(b), n_(n) {
    detail::ext_gcd(a_, b_, u_, v_);
  }

  std::int64_t a() const { return a_; }
  std::int64_t b() const { return b_; }

  /// Inclusive t-range of grid points on a*x + b*y = c; empty if lo > hi.
  std::pair<std::int64_t, std::int64_t> t_range(std::int64_t c) const {
    using detail::ceil_div;
    using detail::floor_div;
    const std::int64_t n = n_;
    if (a_ == 0 || b_ == 0) {  // y = c or x = c
      if (c >= 1 && c <= n) return {1, n};
      return {1, 0};
    }
    const std::int64_t x0 = u_ * c, y0 = v_ * c;
    // 1 <= y0 + a t <= n with a > 0
    std::int64_t lo = ceil_div(1 - y0, a_);
    std::int64_t hi = floor_div(n - y0, a_);
    // 1 <= x0 - b t <= n
    if (b_ > 0) {
      lo = std::max(lo, ceil_div(x0 - n, b_));
      hi = std::min(hi, floor_div(x0 - 1, b_));
    } else {
      const std::int64_t nb = -b_;
      lo = std::max(lo, ceil_div(1 - x0, nb));
      hi = std::min(hi, floor_div(n - x0, nb));
    }
    return {lo, hi};
  }

  std::int64_t count(std::int64_t c) const {
    const auto [lo, hi] = t_range(c);
    return hi >= lo ? hi - lo + 1 : 0;
  }

  Point2 point_at(std::int64_t c, std::int64_t t) const {
    if (a_ == 0) return make_point(static_cast<int>(t), static_cast<int>(c));
    if (b_ == 0) return make_point(static_cast<int>(c), static_cast<int>(t));
    return make_point(static_cast<int>(u_ * c - b_ * t), static_cast<int>(v_ * c + a_ * t));
  }

  /// Grid points of the line in lexicographic order.
  std::vector<Point2> points(std::int64_t c) const {
    std::vector<Point2> out;
    const auto [lo, hi] = t_range(c);
    if (hi < lo) return out;
    out.reserve(static_cast<std::size_t>(hi - lo + 1));
    for (std::int64_t t = lo; t <= hi; ++t) out.push_back(point_at(c, t));
    // x = x0 - b t decreases in t when a != 0 and b > 0.
    if (a_ != 0 && b_ > 0) std::reverse(out.begin(), out.end());
    return out;
  }

  /// Range of c = a*x + b*y over the grid.
  std::pair<std::int64_t, std::int64_t> offset_range() const {
    const std::int64_t n = n_;
    const std::int64_t ax_lo = a_ >= 0 ? a_ : a_ * n, ax_hi = a_ >= 0 ? a_ * n : a_;
    const std::int64_t by_lo = b_ >= 0 ? b_ : b_ * n, by_hi = b_ >= 0 ? b_ * n : b_;
    return {ax_lo + by_lo, ax_hi + by_hi};
  }

 private:
  std::int64_t a_, b_;
  int n_;
  std::int64_t u_ = 0, v_ = 0;
};

inline std::vector<Point2> points_on_line(const Line& l, const GridParams& g) {
  return LineFamily(l.a, l.b, g.n).points(l.c);
}

inline std::int64_t line_point_count(const Line& l, int n) {
  return LineFamily(l.a, l.b, n).count(l.c);
}

inline LineStats line_stats(const Line& l, int n) {
  const std::int64_t cnt = line_point_count(l, n);
  return LineStats{l, cnt, Rational(cnt, n)};
}

/// Calls fn(Direction) for every primitive direction in the canonical half
/// plane with |dx|, |dy| <= max_step, in increasing (dx, dy) order.
template <typename Fn>
void for_each_direction(int max_step, Fn&& fn) {
  for (int dx = 0; dx <= max_step; ++dx) {
    for (int dy = (dx == 0 ? 1 : -max_step); dy <= max_step; ++dy) {
      if (std::gcd(dx, dy < 0 ? -dy : dy) != 1) continue;
      fn(Direction{dx, dy});
    }
  }
}

/// Largest coordinate step of a direction whose lines can still hold
/// min_count grid points.
inline int max_step_for_count(int n, std::int64_t min_count) {
  if (min_count <= 1) return n - 1;
  return static_cast<int>((n - 1) / (min_count - 1));
}

/// Smallest point count whose weight reaches `w` on an n-grid (at least 2).
inline std::int64_t min_count_for_weight(const Rational& w, int n) {
  const std::int64_t c = detail::ceil_div(w.num * n, w.den);
  return std::max<std::int64_t>(2, c);
}

namespace detail {

inline void sort_lines(std::vector<LineStats>& v) {
  std::sort(v.begin(), v.end(),
            [](const LineStats& x, const LineStats& y) { return x.line < y.line; });
}

}  // namespace detail

/// Every line of the grid with at least `min_count` points (min_count >= 2),
/// each exactly once, sorted by canonical (a, b, c).
inline std::vector<LineStats> enumerate_lines_min_count(const GridParams& g,
                                                        std::int64_t min_count) {
  min_count = std::max<std::int64_t>(2, min_count);
  std::vector<LineStats> out;
  if (min_count > g.n) return out;
  for_each_direction(max_step_for_count(g.n, min_count), [&](Direction dir) {
    const auto [a, b] = normal_of(dir.dx, dir.dy);
    LineFamily fam(a, b, g.n);
    const auto [c_lo, c_hi] = fam.offset_range();
    for (std::int64_t c = c_lo; c <= c_hi; ++c) {
      const std::int64_t cnt = fam.count(c);
      if (cnt >= min_count) out.push_back(LineStats{Line{a, b, c}, cnt, Rational(cnt, g.n)});
    }
  });
  detail::sort_lines(out);
  return out;
}

/// Every line of 𝓛 with w(L) >= min_weight.
inline std::vector<LineStats> enumerate_lines(const GridParams& g, const Rational& min_weight) {
  return enumerate_lines_min_count(g, min_count_for_weight(min_weight, g.n));
}

/// Lines of 𝓛 through p with weight >= alpha, sorted canonically.
inline std::vector<LineStats> heavy_lines_through(const Point2& p, const GridParams& g,
                                                  const Rational& alpha) {
  if (alpha.num <= 0 || alpha > Rational(1))
    throw InvalidArgument("heavy_lines_through: alpha must lie in (0, 1]");
  if (!p.in_grid(g.n)) throw InvalidArgument("heavy_lines_through: point outside grid");
  const std::int64_t min_count = min_count_for_weight(alpha, g.n);
  std::vector<LineStats> out;
  for_each_direction(max_step_for_count(g.n, min_count), [&](Direction dir) {
    const Line l = line_through(p, dir);
    const std::int64_t cnt = line_point_count(l, g.n);
    if (cnt >= min_count) out.push_back(LineStats{l, cnt, Rational(cnt, g.n)});
  });
  detail::sort_lines(out);
  return out;
}

/// Counts of S on every line of one direction family, keyed by offset c.
/// Returned vector is indexed by c - offset_range().first.
inline std::vector<std::int32_t> family_counts(const LineFamily& fam,
                                               const std::vector<Point2>& pts) {
  const auto [lo, hi] = fam.offset_range();
  std::vector<std::int32_t> cnt(static_cast<std::size_t>(hi - lo + 1), 0);
  for (const auto& p : pts) ++cnt[static_cast<std::size_t>(fam.a() * p[0] + fam.b() * p[1] - lo)];
  return cnt;
}

}  // namespace gridlines
