#include "wslab/verify.hpp"

#include <cmath>
#include <cstdarg>
#include <cstdio>

#include "wslab/atomic_split_deque.hpp"
#include "wslab/executor.hpp"
#include "wslab/potential.hpp"
#include "wslab/reference_deque.hpp"
#include "wslab/rng.hpp"
#include "wslab/split_deque.hpp"

namespace wslab {

namespace {

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

// One random owner-discipline operation sequence replayed on a deque build
// and on the reference model; returns false on the first divergence.
template <class Deque>
bool replay_sequence(Deque& d, Rng& rng, std::uint64_t ops) {
  ReferenceSplitDeque ref;
  NodeRef next_node = 0;
  for (std::uint64_t k = 0; k < ops; ++k) {
    std::uint64_t pick = rng.bounded(8);
    SyncEvents ev;
    if (pick < 3) {
      NodeRef n = next_node++;
      d.push(n);
      ref.push(n);
    } else if (pick < 5) {
      NodeRef got = d.pop();
      if (got != ref.pop()) return false;
    } else if (pick < 6) {
      d.update_bottom(ev);
      ref.update_bottom();
      if (ev.fences != 1 || ev.cas_attempts != 0) return false;
    } else if (pick < 7) {
      // popBottom is only meaningful with an empty private part, which is
      // the only state the scheduler ever calls it in.
      if (ref.private_size() != 0) {
        NodeRef got = d.pop();
        if (got != ref.pop()) return false;
      } else {
        NodeRef got = d.pop_bottom(ev);
        if (got != ref.pop_bottom()) return false;
        if (ev.fences != 1) return false;
      }
    } else {
      NodeRef got = d.pop_top(ev);
      if (got != ref.pop_top()) return false;
      if (valid_node(got) && ev.cas_successes != 1) return false;
    }
    if (d.private_size() != ref.private_size()) return false;
    if (d.public_size() != ref.public_size()) return false;
  }
  return true;
}

}  // namespace

SuiteResult verify_deque_suite(std::uint64_t sequences, std::uint64_t seed) {
  SuiteResult out;
  out.name = "deque";
  Rng rng(seed);
  std::uint64_t ok_sim = 0, ok_atomic = 0, total_ops = 0;
  for (std::uint64_t s = 0; s < sequences; ++s) {
    std::uint64_t ops = 1 + rng.bounded(40);
    total_ops += ops;
    std::uint64_t subseed = rng.next();
    {
      Rng r1(subseed);
      SplitDeque d;
      if (replay_sequence(d, r1, ops)) ok_sim += 1;
    }
    {
      Rng r2(subseed);
      AtomicSplitDeque d(ops + 1);
      if (replay_sequence(d, r2, ops)) ok_atomic += 1;
    }
  }
  out.check(ok_sim == sequences,
            fmt("simulator deque matches the reference on %llu/%llu sequences",
                (unsigned long long)ok_sim, (unsigned long long)sequences));
  out.check(ok_atomic == sequences,
            fmt("threaded deque matches the reference on %llu/%llu sequences",
                (unsigned long long)ok_atomic, (unsigned long long)sequences));
  out.note(fmt("%llu operations replayed in total",
               (unsigned long long)total_ops));
  return out;
}

std::vector<History> collect_sim_histories(std::size_t target,
                                           std::size_t max_events,
                                           std::uint64_t seed) {
  std::vector<History> windows;
  const std::uint32_t depths[] = {3, 4, 5};
  const std::uint32_t procs[] = {2, 3, 4};
  std::uint64_t s = seed;
  for (std::uint32_t round = 0; windows.size() < target && round < 4000;
       ++round) {
    const CompDag dag = generate_regular(depths[round % 3]);
    SimConfig cfg;
    cfg.processors = procs[(round / 3) % 3];
    cfg.master_seed = s++;
    cfg.record_history = true;
    SimResult r = run_sim(dag, cfg);
    for (const auto& h : r.histories) {
      for (auto& w : window_history(h, max_events)) {
        windows.push_back(std::move(w));
        if (windows.size() == target) return windows;
      }
    }
  }
  return windows;
}

std::vector<History> collect_executor_histories(std::size_t target,
                                                std::size_t max_events,
                                                std::uint64_t seed) {
  std::vector<History> windows;
  std::uint64_t s = seed;
  for (std::uint32_t round = 0; windows.size() < target && round < 4000;
       ++round) {
    const CompDag dag = generate_regular(2 + round % 2);
    ExecutorConfig cfg;
    cfg.workers = 2 + round % 2;
    cfg.claim_checks = true;
    cfg.record_history = true;
    cfg.seed = s++;
    ExecutionReport rep = execute_dag_parallel(dag, cfg);
    for (auto& h : rep.histories) {
      std::size_t non_aborting = 0;
      for (const auto& e : h.events)
        if (!e.aborted()) non_aborting += 1;
      if (non_aborting == 0 || non_aborting > max_events) continue;
      windows.push_back(std::move(h));
      if (windows.size() == target) break;
    }
  }
  return windows;
}

SuiteResult verify_semantics_suite(std::size_t sim_windows,
                                   std::size_t executor_windows,
                                   std::uint64_t seed) {
  SuiteResult out;
  out.name = "semantics";
  auto run_batch = [&](const std::vector<History>& batch, const char* what,
                       std::size_t want) {
    std::size_t valid = 0, good = 0;
    for (const auto& h : batch) {
      if (is_good(h)) good += 1;
      if (check_relaxed(h).verdict == Verdict::valid) valid += 1;
    }
    out.check(batch.size() >= want,
              fmt("collected %zu %s histories (wanted %zu)", batch.size(),
                  what, want));
    out.check(good == batch.size(),
              fmt("%zu/%zu %s histories are good invocation sets", good,
                  batch.size(), what));
    out.check(valid == batch.size(),
              fmt("%zu/%zu %s histories satisfy the relaxed semantics", valid,
                  batch.size(), what));
  };
  run_batch(collect_sim_histories(sim_windows, 12, seed), "simulator",
            sim_windows);
  run_batch(collect_executor_histories(executor_windows, 12, seed + 1),
            "executor", executor_windows);
  return out;
}

std::vector<LemmaGridItem> default_lemma_grid() {
  std::vector<LemmaGridItem> grid;
  for (std::uint32_t depth = 4; depth <= 8; ++depth)
    for (std::uint32_t p : {1u, 2u, 4u, 8u})
      grid.push_back({DagSpec{DagSpec::Kind::regular, depth, 0.05, 0}, p, 10});
  for (std::uint32_t p : {2u, 8u})
    grid.push_back({DagSpec{DagSpec::Kind::irregular, 60, 0.05, 0}, p, 10});
  return grid;
}

SuiteResult verify_lemma_suite(const std::vector<LemmaGridItem>& grid) {
  SuiteResult out;
  out.name = "lemmas";
  std::uint64_t traces = 0, events = 0, steps = 0;
  std::uint64_t bad_drops = 0, bad_top = 0, bad_struct = 0;
  std::string first;
  for (const auto& item : grid) {
    for (std::uint32_t seed = 0; seed < item.seeds; ++seed) {
      DagSpec spec = item.dag;
      if (spec.kind == DagSpec::Kind::irregular) spec.seed = seed;
      const CompDag dag = generate(spec);
      SimConfig cfg;
      cfg.processors = item.procs;
      cfg.master_seed = seed;
      cfg.trace_level = TraceLevel::full;
      SimResult r = run_sim(dag, cfg);
      AnalyzerReport drops = check_drops(dag, r.trace);
      AnalyzerReport top = check_top_heavy(dag, r.trace);
      AnalyzerReport structural = check_structural(dag, r.trace);
      traces += 1;
      events += drops.events_checked;
      steps += drops.steps_checked;
      bad_drops += drops.violations.size();
      bad_top += top.violations.size();
      bad_struct += structural.violations.size();
      for (const auto* rep : {&drops, &top, &structural})
        if (first.empty() && !rep->violations.empty())
          first = rep->violations.front().check + ": " +
                  rep->violations.front().details;
    }
  }
  out.check(bad_drops == 0, fmt("potential-drop bounds: %llu violations",
                                (unsigned long long)bad_drops));
  out.check(bad_top == 0, fmt("top-heavy deques: %llu violations",
                              (unsigned long long)bad_top));
  out.check(bad_struct == 0, fmt("weight ordering: %llu violations",
                                 (unsigned long long)bad_struct));
  out.note(fmt("%llu traces, %llu steps, %llu potential events",
               (unsigned long long)traces, (unsigned long long)steps,
               (unsigned long long)events));
  if (!first.empty()) out.note("first violation: " + first);
  return out;
}

SuiteResult verify_serial_sync_suite() {
  SuiteResult out;
  out.name = "serial-sync";
  const CompDag dag = generate_regular(20);
  {
    SimConfig cfg;
    cfg.processors = 1;
    cfg.scheduler = SchedulerKind::lcws;
    SimMetrics m = run_sim(dag, cfg).metrics;
    std::uint64_t total = m.cas + m.mfence + m.notifications;
    out.check(m.notifications == 0 && total <= 2,
              fmt("lcws depth-20 P=1: cas+mfence+notifications = %llu (<= 2), "
                  "notifications = %llu",
                  (unsigned long long)total,
                  (unsigned long long)m.notifications));
  }
  {
    SimConfig cfg;
    cfg.processors = 1;
    cfg.scheduler = SchedulerKind::cws;
    SimMetrics m = run_sim(dag, cfg).metrics;
    std::uint64_t total = m.sync_total();
    out.check(total >= 2097151 && total <= 2099200,
              fmt("cws depth-20 P=1: cas+mfence = %llu (in [2097151, "
                  "2099200])",
                  (unsigned long long)total));
    out.check(total >= dag.t1(),
              "cws serial total is at least one sync op per node");
  }
  return out;
}

SuiteResult verify_span_ratio_suite(std::uint32_t seeds) {
  SuiteResult out;
  out.name = "span-ratio";
  // One dag per depth; both schedulers and all seeds share it.
  auto means_at = [&](std::uint32_t depth, double& lcws_mean,
                      double& cws_mean) {
    const CompDag dag = generate_regular(depth);
    for (SchedulerKind k : {SchedulerKind::lcws, SchedulerKind::cws}) {
      double acc = 0;
      for (std::uint32_t seed = 0; seed < seeds; ++seed) {
        SimConfig cfg;
        cfg.processors = 64;
        cfg.scheduler = k;
        cfg.master_seed = seed;
        acc += double(run_sim(dag, cfg).metrics.sync_total());
      }
      (k == SchedulerKind::lcws ? lcws_mean : cws_mean) = acc / double(seeds);
    }
  };
  double cws15 = 0, cws25 = 0, lcws15 = 0, lcws25 = 0;
  means_at(15, lcws15, cws15);
  means_at(25, lcws25, cws25);
  out.check(cws25 / cws15 > 200.0,
            fmt("cws depth-25/depth-15 sync ratio at P=64: %.1f (> 200)",
                cws25 / cws15));
  out.check(lcws25 / lcws15 < 5.0,
            fmt("lcws depth-25/depth-15 sync ratio at P=64: %.2f (< 5)",
                lcws25 / lcws15));
  out.note(fmt("cws means: %.0f -> %.0f; lcws means: %.0f -> %.0f", cws15,
               cws25, lcws15, lcws25));
  return out;
}

SuiteResult verify_idle_scaling_suite(std::uint32_t procs,
                                      const std::vector<std::uint32_t>& depths,
                                      std::uint32_t seeds) {
  SuiteResult out;
  out.name = "idle-scaling";
  std::vector<double> xs, ys;
  bool law_ok = true;
  bool bound_ok = true;
  std::uint64_t runs = 0;
  for (std::uint32_t depth : depths) {
    const CompDag dag = generate_regular(depth);
    double idle_acc = 0;
    for (std::uint32_t seed = 0; seed < seeds; ++seed) {
      SimConfig cfg;
      cfg.processors = procs;
      cfg.master_seed = seed;
      SimMetrics m = run_sim(dag, cfg).metrics;
      idle_acc += double(m.idle_iterations);
      // cas + mfence <= 8 * (idle + P) on every run
      if (m.sync_total() > 8 * (m.idle_iterations + procs)) law_ok = false;
      runs += 1;
    }
    double mean_idle = idle_acc / double(seeds);
    xs.push_back(double(dag.t_inf()));
    ys.push_back(mean_idle);
    // mean idle <= 64 * P * t_inf
    if (mean_idle > 64.0 * procs * dag.t_inf()) bound_ok = false;
    out.note(fmt("depth %u (span %u): mean idle %.1f over %u seeds", depth,
                 dag.t_inf(), mean_idle, seeds));
  }
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += xs[i] * ys[i];
    sxx += xs[i] * xs[i];
    syy += ys[i] * ys[i];
  }
  double slope = sxy / sxx;
  double ss_res = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double e = ys[i] - slope * xs[i];
    ss_res += e * e;
  }
  double r2 = syy == 0 ? 1.0 : 1.0 - ss_res / syy;
  out.check(r2 >= 0.9,
            fmt("idle ~ span through origin: slope %.1f, R^2 = %.4f (>= 0.9)",
                slope, r2));
  out.check(bound_ok, fmt("mean idle <= 64*P*span at every depth (P=%u)",
                          procs));
  out.check(law_ok,
            fmt("cas+mfence <= 8*(idle+P) on all %llu runs",
                (unsigned long long)runs));
  return out;
}

SuiteResult verify_balls_bins_suite(std::uint64_t trials, std::uint64_t seed) {
  SuiteResult out;
  out.name = "balls-bins";
  const double sigma3 = 3.0 * 0.5 / std::sqrt(double(trials));
  for (std::size_t bins : {8u, 64u}) {
    for (bool skewed : {false, true}) {
      std::vector<double> weights(bins);
      for (std::size_t i = 0; i < bins; ++i)
        weights[i] = skewed ? double(i + 1) : 1.0;
      for (double beta : {0.3, 0.5}) {
        double bound = 1.0 - 1.0 / ((1.0 - beta) * std::exp(1.0));
        double est =
            balls_bins_trial(weights, beta, bins, trials, seed++);
        out.check(est >= bound - sigma3,
                  fmt("B=%zu %s beta=%.1f: estimate %.4f >= bound %.4f - 3s",
                      bins, skewed ? "skewed" : "uniform", beta, est, bound));
      }
    }
  }
  return out;
}

namespace {

struct FibProblem {
  bool is_leaf(std::int64_t n) const { return n < 2; }
  std::int64_t leaf_value(std::int64_t n) const { return n; }
  std::pair<std::int64_t, std::int64_t> split(std::int64_t n) const {
    return {n - 1, n - 2};
  }
  std::int64_t combine(std::int64_t a, std::int64_t b) const { return a + b; }
};

// Sums f(i) = 3i + 1 over a leaf index range packed as (lo << 32) | hi.
struct TreeSumProblem {
  static std::int64_t pack(std::uint32_t lo, std::uint32_t hi) {
    return (std::int64_t(lo) << 32) | hi;
  }
  bool is_leaf(std::int64_t arg) const {
    return (arg >> 32) + 1 == (arg & 0xFFFFFFFF);
  }
  std::int64_t leaf_value(std::int64_t arg) const {
    return 3 * (arg >> 32) + 1;
  }
  std::pair<std::int64_t, std::int64_t> split(std::int64_t arg) const {
    std::uint32_t lo = std::uint32_t(arg >> 32);
    std::uint32_t hi = std::uint32_t(arg & 0xFFFFFFFF);
    std::uint32_t mid = lo + (hi - lo) / 2;
    return {pack(lo, mid), pack(mid, hi)};
  }
  std::int64_t combine(std::int64_t a, std::int64_t b) const { return a + b; }
};

std::int64_t fib_sequential(std::int64_t n) {
  return n < 2 ? n : fib_sequential(n - 1) + fib_sequential(n - 2);
}

}  // namespace

SuiteResult verify_executor_suite(std::uint32_t repetitions) {
  SuiteResult out;
  out.name = "executor";
  const std::uint32_t procs[] = {1, 2, 4, 8};

  const std::int64_t fib25 = fib_sequential(25);
  out.check(fib25 == 75025, "sequential fib(25) oracle equals 75025");

  const std::uint32_t leaves = 1u << 15;
  std::int64_t tree_expected = 0;
  for (std::uint32_t i = 0; i < leaves; ++i) tree_expected += 3 * i + 1;

  for (std::uint32_t p : procs) {
    std::uint32_t fib_ok = 0, tree_ok = 0;
    std::uint64_t cas_p1 = 0;
    for (std::uint32_t rep = 0; rep < repetitions; ++rep) {
      ExecutorConfig cfg;
      cfg.workers = p;
      cfg.claim_checks = true;
      cfg.seed = rep;
      ExecutionReport report;
      std::int64_t got = run_forkjoin(FibProblem{}, 25, cfg, &report);
      if (got == fib25) fib_ok += 1;
      if (p == 1) cas_p1 += report.sync_total().cas_attempts;
      std::int64_t ts = run_forkjoin(
          TreeSumProblem{}, TreeSumProblem::pack(0, leaves), cfg, nullptr);
      if (ts == tree_expected) tree_ok += 1;
    }
    out.check(fib_ok == repetitions,
              fmt("fib(25) = 75025 at P=%u in %u/%u repetitions", p, fib_ok,
                  repetitions));
    out.check(tree_ok == repetitions,
              fmt("tree-sum over 2^15 leaves at P=%u in %u/%u repetitions", p,
                  tree_ok, repetitions));
    if (p == 1)
      out.check(cas_p1 == 0, fmt("P=1 fork-join runs used %llu CAS",
                                 (unsigned long long)cas_p1));
  }

  {
    const CompDag dag = generate_regular(10);
    for (std::uint32_t p : procs) {
      ExecutorConfig cfg;
      cfg.workers = p;
      cfg.claim_checks = true;
      ExecutionReport rep = execute_dag_parallel(dag, cfg);
      out.check(rep.nodes_executed == dag.t1(),
                fmt("regular depth-10 dag at P=%u executed %llu/%llu nodes", p,
                    (unsigned long long)rep.nodes_executed,
                    (unsigned long long)dag.t1()));
      if (p == 1)
        out.check(rep.notifications == 0,
                  "no notifications in a single-worker dag run");
    }
  }
  {
    const CompDag dag = generate_regular(16);
    std::uint64_t checksum = 0;
    bool stable = true;
    std::uint32_t reps = std::min(repetitions, 20u);
    for (std::uint32_t rep = 0; rep < reps; ++rep) {
      ExecutorConfig cfg;
      cfg.workers = 8;
      cfg.claim_checks = true;
      cfg.seed = rep;
      ExecutionReport r = execute_dag_parallel(dag, cfg);
      if (rep == 0)
        checksum = r.checksum;
      else if (r.checksum != checksum)
        stable = false;
    }
    out.check(stable,
              fmt("regular depth-16 dag at P=8: execution checksum identical "
                  "over %u runs",
                  reps));
  }
  {
    const CompDag dag = generate_irregular(300, 0.05, 42);
    ExecutorConfig cfg;
    cfg.workers = 8;
    cfg.claim_checks = true;
    ExecutionReport rep = execute_dag_parallel(dag, cfg);
    out.check(rep.nodes_executed == dag.t1(),
              fmt("irregular depth-300 dag at P=8 executed %llu/%llu nodes",
                  (unsigned long long)rep.nodes_executed,
                  (unsigned long long)dag.t1()));
  }
#if defined(__SANITIZE_THREAD__)
  out.note("thread sanitizer active in this build");
#elif defined(__has_feature)
#if __has_feature(thread_sanitizer)
  out.note("thread sanitizer active in this build");
#endif
#endif
  return out;
}

SuiteResult verify_phase_suite(std::uint32_t depth, std::uint32_t procs,
                               std::uint32_t seeds) {
  SuiteResult out;
  out.name = "phase-decrease";
  const CompDag dag = generate_regular(depth);
  std::uint64_t phases = 0, successes = 0;
  for (std::uint32_t seed = 0; seed < seeds; ++seed) {
    SimConfig cfg;
    cfg.processors = procs;
    cfg.master_seed = seed;
    cfg.trace_level = TraceLevel::full;
    SimResult r = run_sim(dag, cfg);
    PhaseReport rep = check_phase_decrease(dag, r.trace);
    phases += rep.phases;
    successes += rep.successes;
  }
  double fraction = phases == 0 ? 1.0 : double(successes) / double(phases);
  out.check(fraction > 0.25,
            fmt("potential dropped 3/10 of Phi(D) in %.1f%% of %llu phases "
                "(> 25%%)",
                100.0 * fraction, (unsigned long long)phases));
  return out;
}

std::vector<SuiteResult> run_all_suites() {
  std::vector<SuiteResult> all;
  all.push_back(verify_deque_suite(100000, 1));
  all.push_back(verify_semantics_suite(500, 500, 2));
  all.push_back(verify_lemma_suite(default_lemma_grid()));
  all.push_back(verify_serial_sync_suite());
  all.push_back(verify_span_ratio_suite(5));
  all.push_back(verify_idle_scaling_suite(16, {5, 10, 15, 20}, 20));
  all.push_back(verify_balls_bins_suite(10000, 3));
  all.push_back(verify_phase_suite(10, 8, 50));
  all.push_back(verify_executor_suite(100));
  return all;
}

}  // namespace wslab
