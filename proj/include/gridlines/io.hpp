#pragma once

// On-disk formats. A point set is the JSON object
//   {"n": int, "d": int, "points": [[x, ...], ...]}
// with 1-based coordinates and points in lexicographic order, so equal sets
// serialize to identical bytes.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "gridlines/grid_geometry.hpp"
#include "gridlines/oracle.hpp"
#include "gridlines/types.hpp"

namespace gridlines {

class IoError : public Error {
 public:
  using Error::Error;
};

template <int D>
nlohmann::json to_json(const PointSet<D>& S) {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : S.points()) {
    nlohmann::json row = nlohmann::json::array();
    for (int i = 0; i < D; ++i) row.push_back(p[i]);
    pts.push_back(std::move(row));
  }
  return nlohmann::json{{"n", S.n()}, {"d", D}, {"points", std::move(pts)}};
}

template <int D>
PointSet<D> point_set_from_json(const nlohmann::json& j) {
  try {
    const int n = j.at("n").get<int>();
    const int d = j.at("d").get<int>();
    if (d != D) throw IoError("point set has d=" + std::to_string(d) + ", expected " + std::to_string(D));
    if (n < 2) throw IoError("point set has n < 2");
    PointSet<D> S(n);
    for (const auto& row : j.at("points")) {
      if (!row.is_array() || row.size() != static_cast<std::size_t>(D))
        throw IoError("point with wrong number of coordinates");
      Point<D> p;
      for (int i = 0; i < D; ++i) p[i] = row.at(static_cast<std::size_t>(i)).get<int>();
      if (!p.in_grid(n)) throw IoError("point outside [n]^d");
      S.insert(p);
    }
    return S;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("malformed point set: ") + e.what());
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << content;
  if (!out) throw IoError("write failed for " + path);
}

template <int D>
std::string dump_point_set(const PointSet<D>& S) {
  return to_json(S).dump() + "\n";
}

inline int peek_dimension(const std::string& text) {
  try {
    return nlohmann::json::parse(text).at("d").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("malformed point set: ") + e.what());
  }
}

template <int D>
PointSet<D> parse_point_set(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("malformed point set: ") + e.what());
  }
  return point_set_from_json<D>(j);
}

template <int D>
std::string to_csv(const PointSet<D>& S) {
  std::ostringstream out;
  static const char* names[] = {"x", "y", "z"};
  for (int i = 0; i < D; ++i) out << (i ? "," : "") << (i < 3 ? names[i] : "c" + std::to_string(i));
  out << "\n";
  for (const auto& p : S.points()) {
    for (int i = 0; i < D; ++i) out << (i ? "," : "") << p[i];
    out << "\n";
  }
  return out.str();
}

inline nlohmann::json to_json(const Line& l) { return nlohmann::json{{"a", l.a}, {"b", l.b}, {"c", l.c}}; }

inline nlohmann::json to_json(const ViolationReport& r) {
  nlohmann::json v = nlohmann::json::array();
  for (const auto& lc : r.violations)
    v.push_back({{"line", to_json(lc.line)}, {"count", lc.count}, {"cap", lc.cap}});
  nlohmann::json j{{"exact_ok", r.exact_ok},
                   {"relaxed_ok", r.relaxed_ok},
                   {"max_nonaxis", r.max_nonaxis},
                   {"violations", std::move(v)}};
  if (r.max_line)
    j["max_line"] = {{"line", to_json(r.max_line->line)}, {"count", r.max_line->count}};
  else
    j["max_line"] = nullptr;
  return j;
}

/// SVG of a plane point set: grid dots, points as circles, and optionally the
/// `overlay` heaviest lines (ties in canonical order) as segments. Row x is
/// drawn left to right, column y bottom to top.
inline std::string render_svg(const PointSet2& S, int overlay = 0) {
  const int n = S.n();
  const int cell = 20, pad = 20;
  const int size = 2 * pad + (n - 1) * cell;
  auto X = [&](int x) { return pad + (x - 1) * cell; };
  auto Y = [&](int y) { return size - pad - (y - 1) * cell; };
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size
    << "\" viewBox=\"0 0 " << size << " " << size << "\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (int x = 1; x <= n; ++x)
    for (int y = 1; y <= n; ++y)
      o << "<circle cx=\"" << X(x) << "\" cy=\"" << Y(y) << "\" r=\"1.5\" fill=\"#bbb\"/>\n";
  if (overlay > 0) {
    auto counts = line_counts(S);
    std::stable_sort(counts.begin(), counts.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    const std::size_t take = std::min(counts.size(), static_cast<std::size_t>(overlay));
    for (std::size_t i = 0; i < take; ++i) {
      const auto pts = points_on_line(counts[i].first, GridParams(n));
      o << "<line x1=\"" << X(pts.front()[0]) << "\" y1=\"" << Y(pts.front()[1]) << "\" x2=\""
        << X(pts.back()[0]) << "\" y2=\"" << Y(pts.back()[1])
        << "\" stroke=\"#d33\" stroke-width=\"1.5\" stroke-opacity=\"0.7\"/>\n";
    }
  }
  for (const auto& p : S.points())
    o << "<circle cx=\"" << X(p[0]) << "\" cy=\"" << Y(p[1]) << "\" r=\"6\" fill=\"#1f4e9c\"/>\n";
  o << "</svg>\n";
  return o.str();
}

}  // namespace gridlines
