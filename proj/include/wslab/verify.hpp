#ifndef WSLAB_VERIFY_HPP
#define WSLAB_VERIFY_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "wslab/history.hpp"
#include "wslab/sim.hpp"

namespace wslab {

struct SuiteResult {
  std::string name;
  bool passed = true;
  std::vector<std::string> lines;

  void check(bool ok, const std::string& line) {
    passed = passed && ok;
    lines.push_back(std::string(ok ? "  ok   " : "  FAIL ") + line);
  }
  void note(const std::string& line) { lines.push_back("       " + line); }
};

// Randomized single-owner operation sequences on both split-deque builds,
// replayed against the sequential reference model.
SuiteResult verify_deque_suite(std::uint64_t sequences, std::uint64_t seed);

// Histories recorded from simulator runs (windowed at empty-deque points)
// and from whole tiny threaded-executor runs, all pushed through the
// relaxed-semantics checker.
SuiteResult verify_semantics_suite(std::size_t sim_windows,
                                   std::size_t executor_windows,
                                   std::uint64_t seed);
// Window collectors, exposed for tests.
std::vector<History> collect_sim_histories(std::size_t target,
                                           std::size_t max_events,
                                           std::uint64_t seed);
std::vector<History> collect_executor_histories(std::size_t target,
                                                std::size_t max_events,
                                                std::uint64_t seed);

// Exact lemma checks (potential drops, top-heavy deques, weight ordering)
// over full traces of a configuration grid; any violation fails.
struct LemmaGridItem {
  DagSpec dag;
  std::uint32_t procs;
  std::uint32_t seeds;
};
SuiteResult verify_lemma_suite(const std::vector<LemmaGridItem>& grid);
std::vector<LemmaGridItem> default_lemma_grid();

// Single-processor depth-20 sync totals for both schedulers.
SuiteResult verify_serial_sync_suite();

// Depth-25 over depth-15 total-sync ratios at P = 64, averaged over seeds.
SuiteResult verify_span_ratio_suite(std::uint32_t seeds);

// Idle-iteration scaling against the span at fixed P, plus the
// sync <= 8 * (idle + P) law on every run.
SuiteResult verify_idle_scaling_suite(std::uint32_t procs,
                                      const std::vector<std::uint32_t>& depths,
                                      std::uint32_t seeds);

// Monte-Carlo balls-and-weighted-bins estimates against the analytic bound.
SuiteResult verify_balls_bins_suite(std::uint64_t trials, std::uint64_t seed);

// Threaded executor: fork-join oracles and dag executions.
SuiteResult verify_executor_suite(std::uint32_t repetitions);

// Phase-wise potential decrease frequency (reported, thresholded in
// aggregate over many seeds).
SuiteResult verify_phase_suite(std::uint32_t depth, std::uint32_t procs,
                               std::uint32_t seeds);

std::vector<SuiteResult> run_all_suites();

}  // namespace wslab

#endif  // WSLAB_VERIFY_HPP
