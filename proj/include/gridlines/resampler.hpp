#pragma once

// Moser–Tardos resampling over independent Bernoulli variables.
//
// Variables are the points of a ground set S0; each constraint is a set of
// variables whose selected count must lie in [lo, hi]. While some constraint
// is violated, the lowest-indexed violated constraint has all its variables
// redrawn. Callers order constraints canonically so runs are reproducible.

#include <cstdint>
#include <set>
#include <vector>

#include "gridlines/rng.hpp"
#include "gridlines/types.hpp"

namespace gridlines {

struct CountConstraint {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  std::vector<int> members;  // variable indices
};

struct ResampleStats {
  std::int64_t initial_violations = 0;
  std::int64_t resamples = 0;
};

class Resampler {
 public:
  Resampler(int num_vars, std::vector<CountConstraint> constraints)
      : num_vars_(num_vars), constraints_(std::move(constraints)) {
    std::vector<int> deg(static_cast<std::size_t>(num_vars_) + 1, 0);
    for (const auto& c : constraints_)
      for (int v : c.members) ++deg[static_cast<std::size_t>(v) + 1];
    for (int v = 0; v < num_vars_; ++v) deg[v + 1] += deg[v];
    offsets_ = deg;
    incidence_.resize(static_cast<std::size_t>(offsets_.back()));
    std::vector<int> fill(offsets_.begin(), offsets_.end() - 1);
    for (int ci = 0; ci < static_cast<int>(constraints_.size()); ++ci)
      for (int v : constraints_[ci].members) incidence_[fill[v]++] = ci;
  }

  const std::vector<CountConstraint>& constraints() const { return constraints_; }

  /// Index of the first constraint that no assignment can satisfy, or -1.
  int first_infeasible() const {
    for (int ci = 0; ci < static_cast<int>(constraints_.size()); ++ci) {
      const auto& c = constraints_[ci];
      if (c.lo > c.hi || c.lo > static_cast<std::int64_t>(c.members.size()) || c.hi < 0) return ci;
    }
    return -1;
  }

  /// Draws every variable with probability p, then resamples violated
  /// constraints until none remain. Returns false if `budget` resamplings did
  /// not suffice; `selected` holds the last state either way.
  bool run(double p, CounterRng& rng, std::int64_t budget, std::vector<std::uint8_t>& selected,
           ResampleStats& stats) {
    selected.assign(static_cast<std::size_t>(num_vars_), 0);
    counts_.assign(constraints_.size(), 0);
    for (int v = 0; v < num_vars_; ++v) {
      if (rng.bernoulli(p)) {
        selected[v] = 1;
        for (int k = offsets_[v]; k < offsets_[v + 1]; ++k) ++counts_[incidence_[k]];
      }
    }
    violated_.clear();
    for (int ci = 0; ci < static_cast<int>(constraints_.size()); ++ci)
      if (is_violated(ci)) violated_.insert(ci);
    stats.initial_violations = static_cast<std::int64_t>(violated_.size());
    stats.resamples = 0;

    while (!violated_.empty()) {
      if (stats.resamples >= budget) return false;
      const int ci = *violated_.begin();
      ++stats.resamples;
      for (int v : constraints_[ci].members) {
        const std::uint8_t now = rng.bernoulli(p) ? 1 : 0;
        if (now == selected[v]) continue;
        selected[v] = now;
        const int delta = now ? 1 : -1;
        for (int k = offsets_[v]; k < offsets_[v + 1]; ++k) {
          const int cj = incidence_[k];
          const bool before = is_violated(cj);
          counts_[cj] += delta;
          const bool after = is_violated(cj);
          if (before != after) {
            if (after)
              violated_.insert(cj);
            else
              violated_.erase(cj);
          }
        }
      }
    }
    return true;
  }

 private:
  bool is_violated(int ci) const {
    const auto cnt = counts_[ci];
    return cnt < constraints_[ci].lo || cnt > constraints_[ci].hi;
  }

  int num_vars_;
  std::vector<CountConstraint> constraints_;
  std::vector<int> offsets_;
  std::vector<int> incidence_;
  std::vector<std::int64_t> counts_;
  std::set<int> violated_;
};

}  // namespace gridlines
