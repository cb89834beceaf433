#include "wslab/sim.hpp"

#include <cinttypes>
#include <cstdio>
#include <ostream>

#include "wslab/rng.hpp"
#include "wslab/split_deque.hpp"

namespace wslab {

const char* scheduler_name(SchedulerKind k) {
  return k == SchedulerKind::lcws ? "lcws" : "cws";
}

std::optional<SchedulerKind> scheduler_from_name(const std::string& s) {
  if (s == "lcws") return SchedulerKind::lcws;
  if (s == "cws") return SchedulerKind::cws;
  return std::nullopt;
}

namespace {

struct LcwsProc {
  SplitDeque deque;
  NodeRef assigned = kNone;
  bool targeted = false;
  Rng rng{0};
};

struct CwsProc {
  ConcurrentDeque deque;
  NodeRef assigned = kNone;
  Rng rng{0};

  CwsProc() : deque(64) {}
  explicit CwsProc(CwsCostModel cost) : deque(64, cost) {}
};

struct Engine {
  const CompDag& dag;
  const SimConfig& cfg;
  SimResult result;
  ReadyTracker tracker;
  std::uint64_t clock = 0;
  bool full_trace;

  Engine(const CompDag& d, const SimConfig& c)
      : dag(d),
        cfg(c),
        tracker(d, false),
        full_trace(c.trace_level == TraceLevel::full) {
    WSLAB_REQUIRE(cfg.processors >= 1, "simulator needs at least 1 processor");
    if (cfg.record_history) result.histories.resize(cfg.processors);
    result.trace.scheduler = cfg.scheduler;
    result.trace.processors = cfg.processors;
  }

  void record_op(std::uint32_t worker, std::uint32_t deque_id, Method m,
                 NodeRef arg, NodeRef res) {
    if (!cfg.record_history) return;
    std::uint64_t t0 = clock++;
    std::uint64_t t1 = clock++;
    result.histories[deque_id].events.push_back({worker, m, arg, res, t0, t1});
  }

  std::uint64_t step_budget() const {
    if (cfg.step_budget) return cfg.step_budget;
    return 10 * (dag.t1() + std::uint64_t(cfg.processors) * dag.t_inf()) + 10;
  }

  template <class IterateFn>
  void drive(IterateFn&& iterate) {
    const std::uint64_t budget = step_budget();
    SimMetrics& m = result.metrics;
    while (!tracker.done()) {
      WSLAB_REQUIRE(m.steps < budget,
                    "step budget exceeded; scheduler is not making progress");
      for (std::uint32_t p = 0; p < cfg.processors && !tracker.done(); ++p)
        iterate(p);
      m.steps += 1;
    }
    WSLAB_REQUIRE(m.busy_iterations == dag.t1(),
                  "busy iterations != node count");
    if (cfg.processors > 1) {
      WSLAB_REQUIRE(m.steals_success + m.steals_abort + m.steals_empty ==
                        m.idle_iterations,
                    "steal outcomes do not cover idle iterations");
    }
  }
};

void run_lcws(Engine& eng) {
  const std::uint32_t P = eng.cfg.processors;
  std::vector<LcwsProc> procs(P);
  for (std::uint32_t p = 0; p < P; ++p)
    procs[p].rng = Rng::substream(eng.cfg.master_seed, p);
  procs[0].assigned = eng.dag.root();
  SimMetrics& m = eng.result.metrics;

  eng.drive([&](std::uint32_t p) {
    LcwsProc& self = procs[p];
    IterationRecord rec;
    rec.step = m.steps;
    rec.proc = p;
    SyncEvents sync;

    if (self.targeted) {
      rec.saw_targeted = true;
      self.deque.update_bottom(sync);
      eng.record_op(p, p, Method::update_bottom, kNone, kNone);
      self.targeted = false;
    }
    if (valid_node(self.assigned)) {
      m.busy_iterations += 1;
      NodeRef u = self.assigned;
      rec.executed = u;
      NodeRef enabled[2];
      std::uint32_t n = eng.tracker.execute(u, enabled);
      rec.enabled_count = static_cast<std::uint8_t>(n);
      for (std::uint32_t i = 0; i < n; ++i) rec.enabled[i] = enabled[i];
      if (n > 0) {
        self.assigned = enabled[0];
        if (n == 2) {
          self.deque.push(enabled[1]);
          eng.record_op(p, p, Method::push, enabled[1], kNone);
        }
      } else {
        NodeRef r = self.deque.pop();
        eng.record_op(p, p, Method::pop, kNone, r);
        rec.pop_result = r;
        if (r == kRace) {
          r = self.deque.pop_bottom(sync);
          eng.record_op(p, p, Method::pop_bottom, kNone, r);
          rec.pop_bottom_result = r;
        }
        self.assigned = r;  // a node or EMPTY
      }
    } else {
      m.idle_iterations += 1;
      rec.idle = true;
      if (P > 1) {
        std::uint32_t v =
            static_cast<std::uint32_t>(self.rng.bounded(P - 1));
        if (v >= p) v += 1;
        NodeRef r = procs[v].deque.pop_top(sync);
        eng.record_op(p, v, Method::pop_top, kNone, r);
        rec.victim = v;
        rec.steal_result = r;
        self.assigned = r;
        if (r == kEmpty) {
          procs[v].targeted = true;
          m.notifications += 1;
          m.steals_empty += 1;
        } else if (r == kAbort) {
          m.steals_abort += 1;
        } else {
          m.steals_success += 1;
        }
      }
    }
    rec.sync = sync;
    m.cas += sync.cas_attempts;
    m.mfence += sync.fences;
    if (eng.full_trace) eng.result.trace.records.push_back(rec);
  });
  WSLAB_REQUIRE(m.notifications == m.steals_empty,
                "notifications != empty steal attempts");
}

void run_cws(Engine& eng) {
  const std::uint32_t P = eng.cfg.processors;
  std::vector<CwsProc> procs;
  procs.reserve(P);
  for (std::uint32_t p = 0; p < P; ++p) {
    procs.emplace_back(eng.cfg.cws_cost);
    procs[p].rng = Rng::substream(eng.cfg.master_seed, p);
  }
  procs[0].assigned = eng.dag.root();
  SimMetrics& m = eng.result.metrics;

  eng.drive([&](std::uint32_t p) {
    CwsProc& self = procs[p];
    IterationRecord rec;
    rec.step = m.steps;
    rec.proc = p;
    SyncEvents sync;

    if (valid_node(self.assigned)) {
      m.busy_iterations += 1;
      NodeRef u = self.assigned;
      rec.executed = u;
      NodeRef enabled[2];
      std::uint32_t n = eng.tracker.execute(u, enabled);
      rec.enabled_count = static_cast<std::uint8_t>(n);
      for (std::uint32_t i = 0; i < n; ++i) rec.enabled[i] = enabled[i];
      if (n > 0) {
        self.assigned = enabled[0];
        if (n == 2) self.deque.push_bottom(enabled[1], sync);
      } else {
        NodeRef r = self.deque.pop_bottom(sync);
        rec.pop_bottom_result = r;
        self.assigned = r;
      }
    } else {
      m.idle_iterations += 1;
      rec.idle = true;
      if (P > 1) {
        std::uint32_t v =
            static_cast<std::uint32_t>(self.rng.bounded(P - 1));
        if (v >= p) v += 1;
        NodeRef r = procs[v].deque.pop_top(sync);
        rec.victim = v;
        rec.steal_result = r;
        self.assigned = r;
        if (r == kEmpty)
          m.steals_empty += 1;
        else if (r == kAbort)
          m.steals_abort += 1;
        else
          m.steals_success += 1;
      }
    }
    rec.sync = sync;
    m.cas += sync.cas_attempts;
    m.mfence += sync.fences;
    if (eng.full_trace) eng.result.trace.records.push_back(rec);
  });
}

}  // namespace

SimResult run_sim(const CompDag& dag, const SimConfig& cfg) {
  WSLAB_REQUIRE(dag.node_count() >= 1, "cannot run an empty dag");
  Engine eng(dag, cfg);
  if (cfg.scheduler == SchedulerKind::lcws)
    run_lcws(eng);
  else
    run_cws(eng);
  eng.result.trace.steps = eng.result.metrics.steps;
  return std::move(eng.result);
}

RunRow run_item(const CompDag& dag, const SweepItem& item) {
  SimConfig cfg;
  cfg.processors = item.procs;
  cfg.scheduler = item.scheduler;
  cfg.master_seed = item.seed;
  SimResult r = run_sim(dag, cfg);
  return RunRow{item, dag.t1(), dag.t_inf(), r.metrics};
}

std::vector<RunRow> sweep(const std::vector<SweepItem>& items) {
  std::vector<RunRow> rows;
  rows.reserve(items.size());
  CompDag dag;
  bool have = false;
  DagSpec current{};
  for (const auto& it : items) {
    DagSpec want = it.dag;
    if (want.kind == DagSpec::Kind::irregular) want.seed = it.seed;
    bool same = have && want.kind == current.kind &&
                want.depth == current.depth &&
                (want.kind == DagSpec::Kind::regular ||
                 (want.lambda == current.lambda && want.seed == current.seed));
    if (!same) {
      dag = generate(want);
      current = want;
      have = true;
    }
    rows.push_back(run_item(dag, it));
  }
  return rows;
}

const char* const kCsvHeader =
    "scheduler,kind,depth,lambda,procs,seed,t1,t_inf,steps,busy,idle,cas,"
    "mfence,notifications,steals_success,steals_abort,steals_empty";

void write_csv_row(std::ostream& out, const RunRow& row) {
  char lambda[32];
  if (row.item.dag.kind == DagSpec::Kind::irregular)
    std::snprintf(lambda, sizeof lambda, "%g", row.item.dag.lambda);
  else
    std::snprintf(lambda, sizeof lambda, "0");
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "%s,%s,%u,%s,%u,%" PRIu64 ",%" PRIu64 ",%u,%" PRIu64
                ",%" PRIu64 ",%" PRIu64 ",%" PRIu64 ",%" PRIu64 ",%" PRIu64
                ",%" PRIu64 ",%" PRIu64 ",%" PRIu64,
                scheduler_name(row.item.scheduler), kind_name(row.item.dag.kind),
                row.item.dag.depth, lambda, row.item.procs, row.item.seed,
                row.t1, row.t_inf, row.metrics.steps,
                row.metrics.busy_iterations, row.metrics.idle_iterations,
                row.metrics.cas, row.metrics.mfence, row.metrics.notifications,
                row.metrics.steals_success, row.metrics.steals_abort,
                row.metrics.steals_empty);
  out << buf << '\n';
}

void write_csv(std::ostream& out, const std::vector<RunRow>& rows) {
  out << kCsvHeader << '\n';
  for (const auto& r : rows) write_csv_row(out, r);
}

}  // namespace wslab
