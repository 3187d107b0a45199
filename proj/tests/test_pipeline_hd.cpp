#include <gtest/gtest.h>

#include <set>

#include "brute.hpp"
#include "gridlines/grid_geometry.hpp"
#include "gridlines/pipeline_hd.hpp"

using namespace gridlines;

namespace {

using P3 = Point3;

std::vector<P3> cube(int n) {
  std::vector<P3> v;
  for (int x = 1; x <= n; ++x)
    for (int y = 1; y <= n; ++y)
      for (int z = 1; z <= n; ++z) v.push_back(make_point(x, y, z));
  return v;
}

std::array<std::int64_t, 3> sub(const P3& a, const P3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }

std::array<std::int64_t, 3> crs(const std::array<std::int64_t, 3>& u, const std::array<std::int64_t, 3>& v) {
  return {u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]};
}

bool zero(const std::array<std::int64_t, 3>& v) { return v[0] == 0 && v[1] == 0 && v[2] == 0; }

// Sections of [n]^3 of dimension <= 2 spanned by grid points, by closing the
// affine hull of every pair and every non-collinear triple over the cube.
std::set<std::pair<int, std::vector<P3>>> brute_sections(int n, std::size_t min_size) {
  const auto pts = cube(n);
  std::set<std::pair<int, std::vector<P3>>> out;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const auto u = sub(pts[j], pts[i]);
      std::vector<P3> line;
      for (const auto& r : pts)
        if (zero(crs(u, sub(r, pts[i])))) line.push_back(r);
      if (line.size() >= min_size) out.insert({1, line});
      for (std::size_t k = j + 1; k < pts.size(); ++k) {
        const auto nv = crs(u, sub(pts[k], pts[i]));
        if (zero(nv)) continue;
        std::vector<P3> plane;
        for (const auto& r : pts) {
          const auto w = sub(r, pts[i]);
          if (nv[0] * w[0] + nv[1] * w[1] + nv[2] * w[2] == 0) plane.push_back(r);
        }
        if (plane.size() >= min_size) out.insert({2, plane});
      }
    }
  return out;
}

}  // namespace

TEST(EnumerateSections, CubeOfSideTwo) {
  const auto secs = enumerate_sections<3>(GridParams(2, 3), 2, 4);
  EXPECT_EQ(secs.size(), 12u);
  int axis = 0;
  for (const auto& s : secs) {
    EXPECT_EQ(s.hull_dim, 2);
    EXPECT_EQ(s.weight, Rational(1));
    axis += s.axis_aligned(2);
  }
  EXPECT_EQ(axis, 6);
}

TEST(EnumerateSections, PlaneFourByFour) {
  const auto secs = enumerate_sections<2>(GridParams(4, 2), 1, 4);
  EXPECT_EQ(secs.size(), 10u);
  std::set<std::vector<Point2>> want;
  for (const auto& ls : enumerate_lines_min_count(GridParams(4), 4)) want.insert(points_on_line(ls.line, GridParams(4)));
  std::set<std::vector<Point2>> got;
  for (const auto& s : secs) got.insert(s.points);
  EXPECT_EQ(got, want);
}

TEST(EnumerateSections, MatchesHullClosureBruteForce) {
  for (int n : {2, 3}) {
    for (std::size_t mn : {3u, 4u, 5u}) {
      const auto want = brute_sections(n, mn);
      const auto got_v = enumerate_sections<3>(GridParams(n, 3), 2, static_cast<std::int64_t>(mn));
      std::set<std::pair<int, std::vector<P3>>> got;
      for (const auto& s : got_v) got.insert({s.hull_dim, s.points});
      EXPECT_EQ(got.size(), got_v.size()) << "duplicates at n=" << n;
      EXPECT_EQ(got, want) << "n=" << n << " min_size=" << mn;
    }
  }
}

TEST(EnumerateSections, LinesOnlyForTOne) {
  const auto secs = enumerate_sections<3>(GridParams(3, 3), 1, 3);
  for (const auto& s : secs) EXPECT_EQ(s.hull_dim, 1);
  // (5^3 - 3^3) / 2 lines of [3]^3 carry three points.
  EXPECT_EQ(secs.size(), 49u);
}

TEST(EnumerateSections, RejectsBadArguments) {
  EXPECT_THROW(enumerate_sections<3>(GridParams(3, 3), 3, 3), InvalidArgument);
  EXPECT_THROW(enumerate_sections<3>(GridParams(3, 2), 2, 3), InvalidArgument);
  EXPECT_THROW(enumerate_sections<3>(GridParams(3, 3), 2, 2), InvalidArgument);
}

TEST(SectionsThroughPoint, AgreesWithLineGeometryInPlane) {
  for (int n : {3, 7, 12, 16}) {
    const GridParams g2(n, 2);
    for (int x = 1; x <= n; ++x)
      for (int y = 1; y <= n; ++y)
        for (int j = 2; j <= n; ++j) {
          const Rational alpha(j, n);
          std::set<std::vector<Point2>> want, got;
          for (const auto& ls : heavy_lines_through(make_point(x, y), GridParams(n), alpha))
            want.insert(points_on_line(ls.line, GridParams(n)));
          for (const auto& s : sections_through_point<2>(make_point(x, y), g2, 1, alpha)) got.insert(s.points);
          ASSERT_EQ(got, want) << n << " (" << x << "," << y << ") " << j;
        }
  }
}

TEST(SectionsThroughPoint, InteriorPointHasThreeAxisPlanes) {
  const auto secs = sections_through_point<3>(make_point(2, 3, 2), GridParams(4, 3), 2, Rational(1));
  int axis = 0;
  for (const auto& s : secs) {
    EXPECT_EQ(s.weight, Rational(1));
    axis += s.axis_aligned(2);
  }
  EXPECT_EQ(axis, 3);
}

TEST(Tails, PlaneLawBelowEighteen) {
  for (int n : {4, 8, 16, 24}) {
    std::vector<Rational> grid;
    for (int j = 2; j <= n; ++j) grid.emplace_back(j, n);
    const auto prof = tails_profile<2>(GridParams(n, 2), 1, grid);
    EXPECT_LE(prof.c_hat, 18.0) << n;
    EXPECT_GT(prof.c_hat, 0.0);
  }
}

TEST(Tails, AlphaOneCountsWeightOneSections) {
  const int n = 4;
  const auto prof = tails_profile<3>(GridParams(n, 3), 2, {Rational(1)});
  std::int64_t best = 0;
  for (const auto& x : cube(n))
    best = std::max<std::int64_t>(best, static_cast<std::int64_t>(
                                            sections_through_point<3>(x, GridParams(n, 3), 2, Rational(1)).size()));
  EXPECT_EQ(prof.argmax_count, best);
  EXPECT_DOUBLE_EQ(prof.c_hat, static_cast<double>(best));
}

TEST(Tails, MeasuredConstantAtLeastDimension) {
  const auto tp = measure_tails<3>(GridParams(4, 3), 1);
  EXPECT_GE(tp.C, 3);
  EXPECT_EQ(tp.N, 4);
  EXPECT_THROW(TailParams(0, 3), InvalidArgument);
}

TEST(GoodParams, LightCapFromTails) {
  const TailParams tp(64, 7);
  EXPECT_EQ(GoodParams::theory(16, tp).light_cap, 45);
  PracticalConfig cfg;
  EXPECT_EQ(GoodParams::desk(16, cfg, tp).light_cap, 45);
  cfg.light_cap_override = 9;
  EXPECT_EQ(GoodParams::desk(16, cfg, tp).light_cap, 9);
}

TEST(CheckGood, FullCubeAtTopStagePasses) {
  const int n = 4;
  const auto params = GoodParams::theory(16, TailParams(16, 3));
  const auto rep = check_good<3>(PointSet3::full(n), params, GridParams(n, 3), 2);
  EXPECT_TRUE(rep.passed);
  EXPECT_GT(rep.sections_checked, 0);
}

TEST(CheckGood, EmptySetFailsOnAxisPlanes) {
  const int n = 4;
  const auto rep = check_good<3>(PointSet3(n), GoodParams::theory(8, TailParams(16, 3)), GridParams(n, 3), 2);
  EXPECT_FALSE(rep.passed);
  ASSERT_GT(rep.heavy_total, 0);
  bool axis_plane = false;
  for (const auto& v : rep.heavy_violations) {
    Section<3> s{v.points, v.hull_dim, Rational(1)};
    axis_plane = axis_plane || s.axis_aligned(2);
  }
  EXPECT_TRUE(axis_plane);
}

TEST(HdPipeline, TopStageReturnsFullCube) {
  PracticalConfig cfg;
  CounterRng rng(1);
  EXPECT_EQ(run_hd_pipeline<3>(GridParams(3, 3), 2, 9, cfg, rng), PointSet3::full(3));
  EXPECT_THROW(run_hd_pipeline<3>(GridParams(3, 3), 2, 10, cfg, rng), InvalidArgument);
}

TEST(HdPipeline, DeskRunPassesAndPlantedPlaneIsReported) {
  const int n = 8;
  const GridParams g(n, 3);
  PracticalConfig cfg;
  CounterRng rng(3);
  HdPipelineReport rep;
  auto S = run_hd_pipeline<3>(g, 2, 16, cfg, rng, std::nullopt, &rep);
  const auto params = GoodParams::desk(16, cfg, rep.tails);
  EXPECT_TRUE(check_good<3>(S, params, g, 2).passed);
  for (int x = 1; x <= n; ++x)
    for (int y = 1; y <= n; ++y) S.insert(make_point(x, y, 5));
  const auto bad = check_good<3>(S, params, g, 2);
  EXPECT_FALSE(bad.passed);
  EXPECT_GT(bad.heavy_total, 0);
  EXPECT_FALSE(params.window(n * n, n * n, true).contains(n * n));
}
