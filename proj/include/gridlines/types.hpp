#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <compare>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace gridlines {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Raised when a randomized stage runs out of resampling or retry budget.
// `stage` is the schedule index (or block index for the composer), -1 if n/a.
class BudgetExhausted : public Error {
 public:
  BudgetExhausted(const std::string& what, int stage = -1)
      : Error(what), stage_(stage) {}
  int stage() const { return stage_; }

 private:
  int stage_;
};

/// Exact non-negative rational used for line weights and thresholds that
/// must compare without rounding.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  constexpr Rational() = default;
  constexpr Rational(std::int64_t n, std::int64_t d = 1) : num(n), den(d) {
    if (den == 0) throw InvalidArgument("Rational: zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }

  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    const __int128 l = static_cast<__int128>(a.num) * b.den;
    const __int128 r = static_cast<__int128>(b.num) * a.den;
    return l <=> r;
  }
  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num == b.num && a.den == b.den;
  }
};

inline std::string to_string(const Rational& r) {
  return std::to_string(r.num) + "/" + std::to_string(r.den);
}

/// Side length n and dimension d of the grid [n]^d.
struct GridParams {
  int n = 2;
  int d = 2;

  GridParams() = default;
  GridParams(int n_, int d_ = 2) : n(n_), d(d_) {
    if (n < 2) throw InvalidArgument("grid side n must be >= 2");
    if (d < 1) throw InvalidArgument("dimension d must be >= 1");
  }

  std::int64_t volume() const {
    std::int64_t v = 1;
    for (int i = 0; i < d; ++i) v *= n;
    return v;
  }
};

/// A point of [n]^D with 1-based coordinates.
template <int D>
struct Point {
  std::array<int, D> c{};

  int& operator[](int i) { return c[i]; }
  int operator[](int i) const { return c[i]; }

  friend auto operator<=>(const Point&, const Point&) = default;

  bool in_grid(int n) const {
    return std::all_of(c.begin(), c.end(), [n](int v) { return v >= 1 && v <= n; });
  }
};

using Point2 = Point<2>;
using Point3 = Point<3>;

inline Point2 make_point(int x, int y) { return Point2{{x, y}}; }
inline Point3 make_point(int x, int y, int z) { return Point3{{x, y, z}}; }

/// Row-major index of a point: lexicographic order of points equals index order.
template <int D>
inline std::int64_t point_index(const Point<D>& p, int n) {
  std::int64_t idx = 0;
  for (int i = 0; i < D; ++i) idx = idx * n + (p[i] - 1);
  return idx;
}

template <int D>
inline Point<D> index_point(std::int64_t idx, int n) {
  Point<D> p;
  for (int i = D - 1; i >= 0; --i) {
    p[i] = static_cast<int>(idx % n) + 1;
    idx /= n;
  }
  return p;
}

/// Subset of [n]^D backed by a dense membership mask.
template <int D>
class PointSet {
 public:
  PointSet() : n_(2), mask_(ipow(2), 0) {}
  explicit PointSet(int n) : n_(n), mask_(ipow(n), 0) {
    if (n < 1) throw InvalidArgument("PointSet: n must be >= 1");
  }

  static PointSet full(int n) {
    PointSet s(n);
    std::fill(s.mask_.begin(), s.mask_.end(), 1);
    s.size_ = static_cast<std::int64_t>(s.mask_.size());
    return s;
  }

  int n() const { return n_; }
  std::int64_t size() const { return size_; }
  bool empty() const { return size_ == 0; }
  std::int64_t capacity() const { return static_cast<std::int64_t>(mask_.size()); }

  bool contains(const Point<D>& p) const {
    return p.in_grid(n_) && mask_[point_index(p, n_)] != 0;
  }
  bool contains_index(std::int64_t i) const { return mask_[i] != 0; }

  void insert(const Point<D>& p) {
    if (!p.in_grid(n_)) throw InvalidArgument("PointSet::insert: point outside grid");
    insert_index(point_index(p, n_));
  }
  void insert_index(std::int64_t i) {
    if (!mask_[i]) {
      mask_[i] = 1;
      ++size_;
    }
  }
  void erase(const Point<D>& p) {
    if (p.in_grid(n_)) erase_index(point_index(p, n_));
  }
  void erase_index(std::int64_t i) {
    if (mask_[i]) {
      mask_[i] = 0;
      --size_;
    }
  }

  /// Points in lexicographic order.
  std::vector<Point<D>> points() const {
    std::vector<Point<D>> out;
    out.reserve(static_cast<std::size_t>(size_));
    for (std::int64_t i = 0; i < capacity(); ++i)
      if (mask_[i]) out.push_back(index_point<D>(i, n_));
    return out;
  }

  std::vector<std::int64_t> indices() const {
    std::vector<std::int64_t> out;
    out.reserve(static_cast<std::size_t>(size_));
    for (std::int64_t i = 0; i < capacity(); ++i)
      if (mask_[i]) out.push_back(i);
    return out;
  }

  bool is_subset_of(const PointSet& other) const {
    if (other.n_ != n_) return false;
    for (std::size_t i = 0; i < mask_.size(); ++i)
      if (mask_[i] && !other.mask_[i]) return false;
    return true;
  }

  friend bool operator==(const PointSet& a, const PointSet& b) {
    return a.n_ == b.n_ && a.mask_ == b.mask_;
  }

 private:
  std::size_t ipow(int n) const {
    std::size_t v = 1;
    for (int i = 0; i < D; ++i) v *= static_cast<std::size_t>(n);
    return v;
  }

  int n_;
  std::vector<std::uint8_t> mask_;
  std::int64_t size_ = 0;
};

using PointSet2 = PointSet<2>;
using PointSet3 = PointSet<3>;

namespace detail {

// Threshold arithmetic on reals: values within kSnap of an integer are treated
// as that integer so that e.g. 0.75 * (4/3) * 2 compares as exactly 2.
inline constexpr double kSnap = 1e-9;

inline std::int64_t floor_snap(double x) {
  return static_cast<std::int64_t>(std::floor(x + kSnap));
}
inline std::int64_t ceil_snap(double x) {
  return static_cast<std::int64_t>(std::ceil(x - kSnap));
}

inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}
inline std::int64_t ceil_div(std::int64_t a, std::int64_t b) {
  return -floor_div(-a, b);
}

}  // namespace detail

}  // namespace gridlines
