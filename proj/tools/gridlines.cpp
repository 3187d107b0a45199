#include <atomic>
#include <chrono>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gridlines/gridlines.hpp"

using namespace gridlines;
using nlohmann::json;

namespace {

enum Exit : int { kOk = 0, kUsage = 1, kBudget = 2, kVerify = 3 };

struct CommonOpts {
  int n = 0;
  int k = 0;
  std::uint64_t seed = 0;
  double eps = kDeskEps;
  std::optional<double> delta;
  int retries = 20;
  std::string out;
  int sweep = 0;
};

PracticalConfig make_cfg(const CommonOpts& o) {
  PracticalConfig cfg;
  cfg.eps = o.eps;
  cfg.delta_override = o.delta;
  cfg.retry_budget = o.retries;
  cfg.rng_seed = o.seed;
  cfg.validate();
  return cfg;
}

json cfg_json(const PracticalConfig& c) {
  return json{{"delta_override", c.delta_override ? json(*c.delta_override) : json(nullptr)},
              {"light_cap_override", c.light_cap_override ? json(*c.light_cap_override) : json(nullptr)},
              {"quasi_sample_pairs", c.quasi_sample_pairs},
              {"resample_budget", c.resample_budget},
              {"retry_budget", c.retry_budget},
              {"rng_seed", c.rng_seed},
              {"eps", c.eps},
              {"outward_rounding", c.outward_rounding},
              {"slack_z", c.slack_z},
              {"repair_steps", c.repair_steps}};
}

int worker_count() {
  if (const char* env = std::getenv("GRIDLINES_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Runs fn(seed) for seeds base..base+count-1 on worker threads; results come
// back in seed order.
template <typename R, typename Fn>
std::vector<R> fan_out(std::uint64_t base, int count, Fn&& fn) {
  std::vector<R> out(static_cast<std::size_t>(count));
  std::atomic<int> next{0};
  auto work = [&] {
    for (int i; (i = next.fetch_add(1)) < count;) out[static_cast<std::size_t>(i)] = fn(base + static_cast<std::uint64_t>(i));
  };
  std::vector<std::thread> pool;
  const int w = std::min(worker_count(), count);
  for (int t = 1; t < w; ++t) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  return out;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void write_manifest(const std::string& path, const json& m) { write_file(path, m.dump(2) + "\n"); }

json schedule_json(const PipelineReport& p) {
  json stages = json::array();
  for (const auto& s : p.stages)
    stages.push_back({{"m0", s.m0},
                      {"m", s.m},
                      {"constraints", s.constraints},
                      {"initial_violations", s.resample.initial_violations},
                      {"resamples", s.resample.resamples}});
  return json{{"schedule", p.schedule.stages}, {"stages", stages}};
}

int cmd_construct(const CommonOpts& o, const std::string& csv) {
  const GridParams g(o.n);
  const PracticalConfig cfg = make_cfg(o);
  build_schedule(o.k, o.n, cfg.eps);

  if (o.sweep > 0) {
    struct Row {
      bool ok = false;
      int attempts = 0;
      double secs = 0;
    };
    auto rows = fan_out<Row>(o.seed, o.sweep, [&](std::uint64_t seed) {
      const auto t0 = std::chrono::steady_clock::now();
      CounterRng rng(seed);
      ConstructReport rep;
      Row r;
      try {
        const PointSet2 S = construct(o.k, g, cfg, rng, &rep);
        r.ok = count_violations(S, o.k, g).exact_ok && has_exact_marginals(S, o.k);
      } catch (const BudgetExhausted&) {
      }
      r.attempts = static_cast<int>(rep.attempts.size());
      r.secs = seconds_since(t0);
      return r;
    });
    int ok = 0;
    std::cout << "seed\tok\tattempts\tseconds\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
      ok += rows[i].ok;
      std::cout << o.seed + i << "\t" << rows[i].ok << "\t" << rows[i].attempts << "\t" << rows[i].secs << "\n";
    }
    std::cout << "success " << ok << "/" << o.sweep << "\n";
    return kOk;
  }

  const auto t0 = std::chrono::steady_clock::now();
  CounterRng rng(o.seed);
  ConstructReport rep;
  json manifest{{"command", "construct"},
                {"parameters", {{"n", o.n}, {"k", o.k}}},
                {"seed", o.seed},
                {"rng", std::string(CounterRng::kName)},
                {"config", cfg_json(cfg)}};
  int code = kOk;
  std::optional<PointSet2> S;
  try {
    S = construct(o.k, g, cfg, rng, &rep);
  } catch (const BudgetExhausted& e) {
    std::cerr << "budget exhausted: " << e.what() << "\n";
    code = kBudget;
  }
  json attempts = json::array();
  for (const auto& a : rep.attempts) {
    json aj{{"attempt", a.attempt}, {"outcome", a.outcome}, {"detail", a.detail},
            {"pipeline_size", a.pipeline_size}, {"repair_swaps", a.repair.swaps},
            {"repair_excess", {a.repair.initial_excess, a.repair.final_excess}}};
    aj.update(schedule_json(a.pipeline));
    attempts.push_back(std::move(aj));
  }
  manifest["attempts"] = attempts;
  manifest["retries_used"] = rep.attempts.empty() ? 0 : static_cast<int>(rep.attempts.size()) - 1;
  if (S) {
    const ViolationReport vr = count_violations(*S, o.k, g);
    manifest["verdict"] = to_json(vr);
    manifest["verdict"]["exact_marginals"] = has_exact_marginals(*S, o.k);
    manifest["size"] = S->size();
    if (!vr.exact_ok || !has_exact_marginals(*S, o.k)) code = kVerify;
    const std::string out = o.out.empty() ? "construct.json" : o.out;
    write_file(out, dump_point_set(*S));
    if (!csv.empty()) write_file(csv, to_csv(*S));
    std::cout << "wrote " << out << ": " << S->size() << " points, max line " << (vr.max_line ? vr.max_line->count : 0)
              << ", max non-axis line " << vr.max_nonaxis << "\n";
  }
  manifest["wall_seconds"] = seconds_since(t0);
  manifest["exit_code"] = code;
  write_manifest((o.out.empty() ? "construct.json" : o.out) + ".manifest.json", manifest);
  return code;
}

int cmd_compose(const CommonOpts& o, const std::string& csv) {
  const PracticalConfig cfg = make_cfg(o);
  if (o.k < 2 * o.n - 1) {
    try {
      block_plan(o.n, o.k);
    } catch (const InvalidArgument& e) {
      std::cerr << e.what() << " (block decomposition needs 4 | n, 10 | k and 12k <= 9n)\n";
      return kUsage;
    }
  }
  const GridParams g(o.n);

  if (o.sweep > 0) {
    struct Row {
      bool ok = false;
      bool hypothesis = false;
      std::int64_t max_nonaxis = 0;
      bool le_k = false;
      double secs = 0;
    };
    auto rows = fan_out<Row>(o.seed, o.sweep, [&](std::uint64_t seed) {
      const auto t0 = std::chrono::steady_clock::now();
      CounterRng rng(seed);
      ComposeReport rep;
      Row r;
      try {
        const PointSet2 S = compose(o.n, o.k, cfg, rng, &rep);
        r.ok = has_exact_marginals(S, o.k) && S.size() == static_cast<std::int64_t>(o.k) * o.n;
        r.hypothesis = rep.hypothesis_holds;
        r.max_nonaxis = rep.max_nonaxis;
        r.le_k = rep.nonaxis_le_k;
      } catch (const BudgetExhausted&) {
      }
      r.secs = seconds_since(t0);
      return r;
    });
    int ok = 0, le_k = 0;
    std::cout << "seed\tok\thypothesis\tmax_nonaxis\tle_k\tseconds\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& r = rows[i];
      ok += r.ok;
      le_k += r.ok && r.le_k;
      std::cout << o.seed + i << "\t" << r.ok << "\t" << r.hypothesis << "\t" << r.max_nonaxis << "\t" << r.le_k
                << "\t" << r.secs << "\n";
    }
    std::cout << "success " << ok << "/" << o.sweep << ", max non-axis <= k on " << le_k << "/" << o.sweep << "\n";
    return kOk;
  }

  const auto t0 = std::chrono::steady_clock::now();
  CounterRng rng(o.seed);
  ComposeReport rep;
  json manifest{{"command", "compose"},
                {"parameters", {{"n", o.n}, {"k", o.k}}},
                {"seed", o.seed},
                {"rng", std::string(CounterRng::kName)},
                {"config", cfg_json(cfg)}};
  int code = kOk;
  try {
    const PointSet2 S = compose(o.n, o.k, cfg, rng, &rep);
    json blocks = json::array();
    for (const auto& b : rep.blocks)
      blocks.push_back({{"i", b.i}, {"j", b.j}, {"quota", b.quota}, {"attempts", b.attempts},
                        {"feasible_attempts", b.feasible_attempts}, {"relaxed_ok", b.relaxed_ok},
                        {"max_nonaxis", b.max_nonaxis}});
    manifest["blocks"] = blocks;
    manifest["full_grid"] = rep.full_grid;
    manifest["hypothesis_holds"] = rep.hypothesis_holds;
    manifest["max_nonaxis"] = rep.max_nonaxis;
    manifest["nonaxis_le_k"] = rep.nonaxis_le_k;
    manifest["bound_084"] = rep.bound_084;
    manifest["exact_marginals"] = has_exact_marginals(S, o.k);
    manifest["size"] = S.size();
    if (!rep.full_grid && !has_exact_marginals(S, o.k)) code = kVerify;
    const std::string out = o.out.empty() ? "compose.json" : o.out;
    write_file(out, dump_point_set(S));
    if (!csv.empty()) write_file(csv, to_csv(S));
    std::cout << "wrote " << out << ": " << S.size() << " points, max non-axis line " << rep.max_nonaxis
              << (rep.nonaxis_le_k ? " (<= k)" : " (> k)") << "\n";
  } catch (const BudgetExhausted& e) {
    std::cerr << "budget exhausted: " << e.what() << "\n";
    code = kBudget;
  }
  manifest["wall_seconds"] = seconds_since(t0);
  manifest["exit_code"] = code;
  write_manifest((o.out.empty() ? "compose.json" : o.out) + ".manifest.json", manifest);
  return code;
}

int cmd_verify(const std::string& in, int k) {
  const std::string text = read_file(in);
  if (peek_dimension(text) != 2) throw IoError("verify expects a plane point set (d = 2)");
  const PointSet2 S = parse_point_set<2>(text);
  const ViolationReport r = count_violations(S, k, GridParams(S.n()));
  json j = to_json(r);
  j["n"] = S.n();
  j["k"] = k;
  j["size"] = S.size();
  std::cout << j.dump(2) << "\n";
  return r.exact_ok ? kOk : kVerify;
}

int cmd_enumerate(int n, int d, int t, std::int64_t min_size, bool list) {
  json out;
  std::int64_t count = 0;
  json items = json::array();
  auto emit = [&](const auto& secs) {
    count = static_cast<std::int64_t>(secs.size());
    if (!list) return;
    for (const auto& s : secs) {
      json pts = json::array();
      for (const auto& p : s.points) pts.push_back(p.c);
      items.push_back({{"hull_dim", s.hull_dim}, {"weight", to_string(s.weight)}, {"points", pts}});
    }
  };
  if (d == 2)
    emit(enumerate_sections<2>(GridParams(n, 2), t, min_size));
  else if (d == 3)
    emit(enumerate_sections<3>(GridParams(n, 3), t, min_size));
  else
    throw InvalidArgument("enumerate supports d in {2, 3}");
  out = json{{"n", n}, {"d", d}, {"t", t}, {"min_size", min_size}, {"count", count}};
  if (list) out["sections"] = items;
  std::cout << out.dump(2) << "\n";
  return kOk;
}

int cmd_profile(int n, int d, int t, const std::vector<double>& stage) {
  json out{{"n", n}, {"d", d}, {"t", t}};
  if (stage.size() == 2) {
    const StageDiagnostics s = stage_diagnostics(stage[0], stage[1], GridParams(n));
    out["stage"] = {{"m0", stage[0]},
                    {"m", stage[1]},
                    {"p", static_cast<double>(s.p)},
                    {"q_bound", static_cast<double>(s.q_bound)},
                    {"delta_dep", static_cast<double>(s.delta_dep)},
                    {"lll_product", static_cast<double>(s.lll_product)},
                    {"theory_satisfied", s.theory_satisfied},
                    {"regime", s.theory_satisfied ? "inside proof regime" : "outside proof regime"}};
  } else {
    std::int64_t N = 1;
    for (int i = 0; i < t; ++i) N *= n;
    std::vector<Rational> grid;
    for (std::int64_t s = 2; s <= N; ++s) grid.emplace_back(s, N);
    TailsProfile prof;
    if (d == 2)
      prof = tails_profile<2>(GridParams(n, 2), t, grid);
    else if (d == 3)
      prof = tails_profile<3>(GridParams(n, 3), t, grid);
    else
      throw InvalidArgument("profile supports d in {2, 3}");
    out["c_hat"] = prof.c_hat;
    out["argmax_alpha"] = to_string(prof.argmax_alpha);
    out["argmax_count"] = prof.argmax_count;
  }
  std::cout << out.dump(2) << "\n";
  return kOk;
}

int cmd_render(const std::string& in, const std::string& out, int overlay) {
  const std::string text = read_file(in);
  if (peek_dimension(text) != 2) throw IoError("render expects a plane point set (d = 2)");
  write_file(out, render_svg(parse_point_set<2>(text), overlay));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Point sets in the n x n grid with at most k points on every line"};
  app.require_subcommand(1);

  CommonOpts con, comp;
  std::string con_csv, comp_csv;
  auto add_common = [](CLI::App* sc, CommonOpts& o, std::string& csv) {
    sc->add_option("--n", o.n, "grid side")->required()->check(CLI::Range(2, 4096));
    sc->add_option("--k", o.k, "points per row and column")->required()->check(CLI::PositiveNumber);
    sc->add_option("--seed", o.seed, "64-bit seed");
    sc->add_option("--eps", o.eps, "schedule slack: m_(1) = (1+eps) k")->check(CLI::NonNegativeNumber);
    sc->add_option("--delta", o.delta, "heavy-line tolerance override in (0, 1)");
    sc->add_option("--retries", o.retries, "attempts per build")->check(CLI::PositiveNumber);
    sc->add_option("--out", o.out, "output point-set JSON");
    sc->add_option("--csv", csv, "also write a CSV export");
    sc->add_option("--sweep", o.sweep, "run seeds seed..seed+N-1 and print a table")->check(CLI::NonNegativeNumber);
  };
  auto* construct_cmd = app.add_subcommand("construct", "staged subsampling + regularization + line repair");
  add_common(construct_cmd, con, con_csv);
  auto* compose_cmd = app.add_subcommand("compose", "4 x 4 block composition");
  add_common(compose_cmd, comp, comp_csv);

  std::string verify_in;
  int verify_k = 0;
  auto* verify_cmd = app.add_subcommand("verify", "count points on every line");
  verify_cmd->add_option("--in", verify_in, "point-set JSON")->required();
  verify_cmd->add_option("--k", verify_k, "line cap")->required()->check(CLI::NonNegativeNumber);

  int en_n = 0, en_d = 2, en_t = 1;
  std::int64_t en_min = 3;
  bool en_list = false;
  auto* enum_cmd = app.add_subcommand("enumerate", "list sections of [n]^d");
  enum_cmd->add_option("--n", en_n, "grid side")->required()->check(CLI::Range(2, 64));
  enum_cmd->add_option("--d", en_d, "dimension (2 or 3)");
  enum_cmd->add_option("--t", en_t, "section dimension");
  enum_cmd->add_option("--min-size", en_min, "minimum points per section");
  enum_cmd->add_flag("--list", en_list, "print every section");

  int pr_n = 0, pr_d = 2, pr_t = 1;
  std::vector<double> pr_stage;
  auto* prof_cmd = app.add_subcommand("profile", "tail constant of sections, or stage bound diagnostics");
  prof_cmd->add_option("--n", pr_n, "grid side")->required()->check(CLI::Range(2, 64));
  prof_cmd->add_option("--d", pr_d, "dimension (2 or 3)");
  prof_cmd->add_option("--t", pr_t, "section dimension");
  prof_cmd->add_option("--stage", pr_stage, "m0 m: print the bound chain of one stage")->expected(2);

  std::string rin, rout;
  int overlay = 0;
  auto* render_cmd = app.add_subcommand("render", "SVG picture of a plane point set");
  render_cmd->add_option("--in", rin, "point-set JSON")->required();
  render_cmd->add_option("--out", rout, "SVG path")->required();
  render_cmd->add_option("--overlay-lines", overlay, "draw the N heaviest lines")->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (*construct_cmd) return cmd_construct(con, con_csv);
    if (*compose_cmd) return cmd_compose(comp, comp_csv);
    if (*verify_cmd) return cmd_verify(verify_in, verify_k);
    if (*enum_cmd) return cmd_enumerate(en_n, en_d, en_t, en_min, en_list);
    if (*prof_cmd) return cmd_profile(pr_n, pr_d, pr_t, pr_stage);
    if (*render_cmd) return cmd_render(rin, rout, overlay);
  } catch (const InvalidArgument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return kUsage;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kUsage;
  } catch (const BudgetExhausted& e) {
    std::cerr << "budget exhausted: " << e.what() << "\n";
    return kBudget;
  }
  return kUsage;
}
