#include <gtest/gtest.h>

#include <cmath>

#include "gridlines/construct.hpp"
#include "gridlines/oracle.hpp"
#include "gridlines/pipeline2d.hpp"

using namespace gridlines;

TEST(Schedule, TwoStagesAtMillion) {
  const auto s = build_schedule(10, 1000000, 0.005);
  ASSERT_EQ(s.r(), 2);
  EXPECT_NEAR(s.stages[0], 10.05, 1e-9);
  EXPECT_NEAR(s.stages[1], 10.05 * 10.05 * 10.05, 1e-6);
  EXPECT_LE(1e6, std::pow(s.stages[1], 3));
}

TEST(Schedule, SingleStageAtThousand) {
  const auto s = build_schedule(10, 1000, 0.005);
  ASSERT_EQ(s.r(), 1);
  EXPECT_NEAR(s.stages[0], 10.05, 1e-12);
}

TEST(Schedule, DegenerateKEqualsN) {
  const auto s = build_schedule(17, 17, 0.0);
  ASSERT_EQ(s.r(), 1);
  EXPECT_EQ(s.stages[0], 17.0);
}

TEST(Schedule, StagesAreCubesAndBelowN) {
  for (int n : {50, 1000, 100000}) {
    const auto s = build_schedule(3, n, 0.2);
    for (int i = 1; i < s.r(); ++i) EXPECT_NEAR(s.stages[i], std::pow(s.stages[i - 1], 3), 1e-6 * s.stages[i]);
    EXPECT_LE(s.stages.back(), n);
    EXPECT_GT(std::pow(s.stages.back(), 3), n);
  }
}

TEST(Schedule, RejectsBadArguments) {
  EXPECT_THROW(build_schedule(0, 10, 0.1), InvalidArgument);
  EXPECT_THROW(build_schedule(11, 10, 0.1), InvalidArgument);
  EXPECT_THROW(build_schedule(10, 10, 0.1), InvalidArgument);
  EXPECT_THROW(build_schedule(3, 10, -0.1), InvalidArgument);
}

TEST(NiceParams, ClassesPartitionCounts) {
  const auto p = NiceParams::theory(21.0);
  const int n = 64;
  for (std::int64_t gc = 1; gc <= n; ++gc) {
    const double w = static_cast<double>(gc) / n;
    const auto c = p.classify(gc, n);
    if (w > std::pow(21.0, -2.0 / 3.0))
      EXPECT_EQ(c, LineClass::Heavy) << gc;
    else if (w <= std::pow(21.0, -2.0))
      EXPECT_EQ(c, LineClass::Light) << gc;
    else
      EXPECT_EQ(c, LineClass::Medium) << gc;
  }
}

TEST(NiceParams, AxisWindowIgnoresSlack) {
  PracticalConfig cfg;
  const auto p = NiceParams::desk(20.0, cfg);
  const auto axis = p.window(64, 64, true);
  EXPECT_EQ(axis.lo, 15);
  EXPECT_EQ(axis.hi, 25);
  const auto diag = p.window(64, 64, false);
  EXPECT_LT(diag.lo, axis.lo);
  EXPECT_GT(diag.hi, axis.hi);
}

TEST(CheckNice, FullGridIsNNice) {
  PracticalConfig cfg;
  CounterRng rng(1);
  for (int n : {5, 12}) {
    const auto rep = check_nice(PointSet2::full(n), NiceParams::theory(n), GridParams(n), cfg, rng);
    EXPECT_TRUE(rep.passed) << n;
    EXPECT_GT(rep.quasi_pairs_checked, 0);
  }
}

TEST(CheckNice, EmptySetFailsHeavyLowerBound) {
  PracticalConfig cfg;
  CounterRng rng(2);
  const auto rep = check_nice(PointSet2(10), NiceParams::theory(4.0), GridParams(10), cfg, rng);
  EXPECT_FALSE(rep.passed);
  EXPECT_GT(rep.heavy_total, 0);
}

TEST(CheckNice, FullRowIsReported) {
  const int n = 100;
  PracticalConfig cfg;
  CounterRng rng(5);
  PointSet2 S = subsample_stage(PointSet2::full(n), n, 25, GridParams(n), cfg, rng);
  for (int y = 1; y <= n; ++y) S.insert(make_point(7, y));
  CounterRng crng(6);
  const auto rep = check_nice(S, NiceParams::desk(25, cfg), GridParams(n), cfg, crng);
  EXPECT_FALSE(rep.passed);
  bool found = false;
  for (const auto& v : rep.heavy_violations) found = found || (v.line == Line{1, 0, 7} && v.count == n);
  EXPECT_TRUE(found);
}

TEST(Subsample, ProbabilityOneIsIdentity) {
  PracticalConfig cfg;
  CounterRng rng(3);
  StageReport sr;
  const auto S = subsample_stage(PointSet2::full(9), 9, 9, GridParams(9), cfg, rng, &sr);
  EXPECT_EQ(S, PointSet2::full(9));
  EXPECT_EQ(sr.resample.resamples, 0);
}

TEST(Subsample, RejectsMAboveM0) {
  PracticalConfig cfg;
  CounterRng rng(3);
  EXPECT_THROW(subsample_stage(PointSet2::full(9), 5, 6, GridParams(9), cfg, rng), InvalidArgument);
}

TEST(Subsample, HundredGridPassesLineConditions) {
  const int n = 100;
  PracticalConfig cfg;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    CounterRng rng(seed);
    const auto S = subsample_stage(PointSet2::full(n), n, 25, GridParams(n), cfg, rng);
    CounterRng crng(seed + 100);
    const auto rep = check_nice(S, NiceParams::desk(25, cfg), GridParams(n), cfg, crng);
    EXPECT_TRUE(rep.lines_ok()) << "seed " << seed << " heavy " << rep.heavy_total << " medium "
                                << rep.medium_total << " light " << rep.light_total;
  }
}

TEST(RunPipeline, KEqualsNReturnsFullGrid) {
  PracticalConfig cfg;
  cfg.eps = 0;
  CounterRng rng(1);
  EXPECT_EQ(run_pipeline(8, GridParams(8), cfg, rng), PointSet2::full(8));
}

TEST(RunPipeline, DeskScaleRowsAndLightLines) {
  const int n = 64, k = 16;
  PracticalConfig cfg;
  CounterRng rng(11);
  PipelineReport rep;
  const auto S = run_pipeline(k, GridParams(n), cfg, rng, &rep);
  ASSERT_EQ(rep.schedule.r(), 1);
  const double m1 = rep.schedule.stages[0];
  const auto params = NiceParams::desk(m1, cfg);
  const auto win = params.window(n, n, true);
  std::vector<int> rows(n + 1), cols(n + 1);
  for (const auto& p : S.points()) {
    ++rows[p[0]];
    ++cols[p[1]];
  }
  for (int i = 1; i <= n; ++i) {
    EXPECT_TRUE(win.contains(rows[i])) << "row " << i << " = " << rows[i];
    EXPECT_TRUE(win.contains(cols[i])) << "col " << i << " = " << cols[i];
  }
  // Light lines, by the independent counter.
  for (const auto& [line, cnt] : line_counts(S))
    if (params.classify(line_point_count(line, n), n) == LineClass::Light) {
      EXPECT_LE(cnt, params.light_cap);
    }
}

TEST(RunPipeline, DeterministicPerSeed) {
  PracticalConfig cfg;
  CounterRng a(99), b(99), c(100);
  const auto Sa = run_pipeline(8, GridParams(40), cfg, a);
  const auto Sb = run_pipeline(8, GridParams(40), cfg, b);
  const auto Sc = run_pipeline(8, GridParams(40), cfg, c);
  EXPECT_EQ(Sa, Sb);
  EXPECT_NE(Sa, Sc);
}

TEST(Construct, ExactMarginalsAndLineCap) {
  const int n = 64, k = 16;
  PracticalConfig cfg;
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    CounterRng rng(seed);
    ConstructReport rep;
    const auto S = construct(k, GridParams(n), cfg, rng, &rep);
    EXPECT_TRUE(rep.success);
    EXPECT_EQ(S.size(), k * n);
    EXPECT_TRUE(has_exact_marginals(S, k));
    const auto v = count_violations(S, k, GridParams(n));
    EXPECT_TRUE(v.exact_ok);
    EXPECT_LE(v.max_nonaxis, k);
  }
}

TEST(Construct, RejectsOversizedK) {
  PracticalConfig cfg;
  CounterRng rng(0);
  EXPECT_THROW(construct(12, GridParams(10), cfg, rng), InvalidArgument);
}

TEST(Diagnostics, TheoryRegime) {
  const double m = 1e36;
  const auto d = stage_diagnostics(m * m * m, m, GridParams(2));
  EXPECT_LT(d.lll_product, 1.0L);
  EXPECT_TRUE(d.theory_satisfied);
}

TEST(Diagnostics, DeskRegime) {
  const auto d = stage_diagnostics(1000, 10, GridParams(1000));
  EXPECT_GE(d.lll_product, 1.0L);
  EXPECT_FALSE(d.theory_satisfied);
}

TEST(Diagnostics, DegenerateStage) {
  const auto d = stage_diagnostics(50, 50, GridParams(50));
  EXPECT_EQ(d.p, 1.0L);
  EXPECT_EQ(d.q_bound, std::max({d.chernoff_heavy, d.chernoff_medium, d.light_bound}));
  EXPECT_THROW(stage_diagnostics(10, 20, GridParams(50)), InvalidArgument);
}
