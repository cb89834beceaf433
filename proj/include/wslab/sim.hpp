#ifndef WSLAB_SIM_HPP
#define WSLAB_SIM_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "wslab/concurrent_deque.hpp"
#include "wslab/core.hpp"
#include "wslab/dag.hpp"
#include "wslab/history.hpp"
#include "wslab/scheduler.hpp"

namespace wslab {

enum class SchedulerKind : std::uint8_t { lcws, cws };

const char* scheduler_name(SchedulerKind k);
std::optional<SchedulerKind> scheduler_from_name(const std::string& s);

enum class TraceLevel : std::uint8_t { none, counters, full };

struct SimConfig {
  std::uint32_t processors = 1;
  SchedulerKind scheduler = SchedulerKind::lcws;
  std::uint64_t master_seed = 0;
  TraceLevel trace_level = TraceLevel::none;
  bool record_history = false;  // per-deque op histories; small runs only
  std::uint64_t step_budget = 0;  // 0 = 10 * (t1 + P * t_inf)
  CwsCostModel cws_cost = {};
};

struct SimMetrics {
  std::uint64_t steps = 0;
  std::uint64_t busy_iterations = 0;
  std::uint64_t idle_iterations = 0;
  std::uint64_t cas = 0;
  std::uint64_t mfence = 0;
  std::uint64_t notifications = 0;
  std::uint64_t steals_success = 0;
  std::uint64_t steals_abort = 0;
  std::uint64_t steals_empty = 0;

  std::uint64_t sync_total() const { return cas + mfence; }
};

// Everything the potential analyzer needs to replay one scheduling
// iteration.  Records appear in execution order: step-major, then
// processor id.
struct IterationRecord {
  std::uint64_t step = 0;
  std::uint32_t proc = 0;
  bool idle = false;
  bool saw_targeted = false;       // entered the updateBottom branch
  NodeRef executed = kNone;        // kNone for idle iterations
  std::uint8_t enabled_count = 0;
  NodeRef enabled[2] = {kNone, kNone};
  NodeRef pop_result = kNone;         // kNone = pop not invoked
  NodeRef pop_bottom_result = kNone;  // kNone = popBottom not invoked
  std::uint32_t victim = kNone;       // kNone = no steal attempt
  NodeRef steal_result = kNone;
  SyncEvents sync;
};

struct Trace {
  SchedulerKind scheduler = SchedulerKind::lcws;
  std::uint32_t processors = 0;
  std::uint64_t steps = 0;
  std::vector<IterationRecord> records;
};

struct SimResult {
  SimMetrics metrics;
  Trace trace;                     // populated at TraceLevel::full
  std::vector<History> histories;  // one per deque, when record_history
};

// Deterministic discrete-time execution: every live processor performs one
// scheduling iteration per step, in processor-id order; the root starts
// assigned to processor 0; the run ends when all t1 nodes have executed.
// A pure function of (dag, cfg).
SimResult run_sim(const CompDag& dag, const SimConfig& cfg);

// One sweep row: configuration key plus the measured counters.
struct SweepItem {
  DagSpec dag;
  std::uint32_t procs = 1;
  SchedulerKind scheduler = SchedulerKind::lcws;
  std::uint64_t seed = 0;  // master seed; also the dag seed for irregular
};

struct RunRow {
  SweepItem item;
  std::uint64_t t1 = 0;
  std::uint32_t t_inf = 0;
  SimMetrics metrics;
};

// Runs each item, reusing the generated dag across consecutive items that
// share one.  Irregular dag generation takes its seed from the item seed.
std::vector<RunRow> sweep(const std::vector<SweepItem>& items);

RunRow run_item(const CompDag& dag, const SweepItem& item);

extern const char* const kCsvHeader;
void write_csv_row(std::ostream& out, const RunRow& row);
void write_csv(std::ostream& out, const std::vector<RunRow>& rows);

}  // namespace wslab

#endif  // WSLAB_SIM_HPP
