#pragma once

// End-to-end construction of an n x n set with exactly k points per row and
// column and at most k points on every line: staged subsampling, max-flow
// regularization, then swap repair of over-full lines. Failed attempts are
// retried with independent random streams.

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "gridlines/pipeline2d.hpp"
#include "gridlines/regularizer.hpp"
#include "gridlines/rng.hpp"
#include "gridlines/types.hpp"

namespace gridlines {

struct AttemptReport {
  int attempt = 0;
  std::string outcome;  // "ok", "budget", "hall", "lines"
  std::string detail;
  PipelineReport pipeline;
  std::int64_t pipeline_size = 0;
  RebalanceStats repair;
};

struct ConstructReport {
  std::vector<AttemptReport> attempts;
  bool success = false;
};

/// Attempt a draws from rng.fork(a); at most cfg.retry_budget attempts.
/// Throws BudgetExhausted when every attempt fails.
inline PointSet2 construct(int k, const GridParams& g, const PracticalConfig& cfg, CounterRng& rng,
                           ConstructReport* report = nullptr) {
  cfg.validate();
  build_schedule(k, g.n, cfg.eps);  // argument check before any work
  ConstructReport local;
  ConstructReport& rep = report ? *report : local;
  rep = ConstructReport{};
  for (int a = 0; a < cfg.retry_budget; ++a) {
    CounterRng arng = rng.fork(static_cast<std::uint64_t>(a));
    AttemptReport ar;
    ar.attempt = a;
    PointSet2 S(g.n);
    try {
      CounterRng prng = arng.fork(0);
      S = run_pipeline(k, g, cfg, prng, &ar.pipeline);
    } catch (const BudgetExhausted& e) {
      ar.outcome = "budget";
      ar.detail = e.what();
      rep.attempts.push_back(std::move(ar));
      continue;
    }
    ar.pipeline_size = S.size();
    CounterRng seeds = arng.fork(1);
    auto reg = regularize(S, k, g, seeds());
    if (auto* cert = std::get_if<HallCertificate>(&reg)) {
      ar.outcome = "hall";
      ar.detail = "deficiency " + std::to_string(cert->deficiency);
      rep.attempts.push_back(std::move(ar));
      continue;
    }
    PointSet2 T = std::move(std::get<PointSet2>(reg));
    CounterRng repair_rng = arng.fork(2);
    const bool ok = rebalance_lines(T, S, k, repair_rng, cfg.repair_steps, &ar.repair);
    ar.outcome = ok ? "ok" : "lines";
    if (!ok) ar.detail = "excess " + std::to_string(ar.repair.final_excess) + " after repair";
    rep.attempts.push_back(std::move(ar));
    if (ok) {
      rep.success = true;
      return T;
    }
  }
  throw BudgetExhausted("construct: all " + std::to_string(cfg.retry_budget) + " attempts failed");
}

}  // namespace gridlines
