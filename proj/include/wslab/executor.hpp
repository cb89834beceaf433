#ifndef WSLAB_EXECUTOR_HPP
#define WSLAB_EXECUTOR_HPP

#include <algorithm>
#include <atomic>
#include <deque>
#include <chrono>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <utility>
#include <vector>

#include "wslab/atomic_split_deque.hpp"
#include "wslab/core.hpp"
#include "wslab/dag.hpp"
#include "wslab/history.hpp"
#include "wslab/rng.hpp"

namespace wslab {

struct ExecutorConfig {
  std::uint32_t workers = 0;  // 0 = hardware concurrency
  // Measurement mode keeps idle workers spinning at a constant attempt rate;
  // library mode (default) backs idle workers off with bounded spinning and
  // yields, which behaves far better on oversubscribed machines.
  bool measurement_mode = false;
  // Every node handle returned by a deque removal is claimed in a global
  // token table; a second claim of the same handle aborts the run.
  bool claim_checks = false;
  std::size_t deque_capacity = 1u << 20;
  bool record_history = false;  // tiny runs only
  std::uint64_t seed = 0;
};

struct ExecutionReport {
  double wall_seconds = 0;
  std::vector<SyncEvents> per_worker;
  std::uint64_t notifications = 0;
  std::uint64_t nodes_executed = 0;
  std::uint64_t checksum = 0;  // order-independent hash of executed handles
  // Ready-tracking join-counter updates; dag-runtime synchronization, kept
  // apart from the scheduler's own CAS/fence counts.
  std::uint64_t join_updates = 0;
  std::vector<History> histories;  // per deque, when recording

  SyncEvents sync_total() const {
    SyncEvents s;
    for (const auto& w : per_worker) s += w;
    return s;
  }
};

namespace detail {

struct alignas(64) WorkerShared {
  AtomicSplitDeque deque;
  std::atomic<bool> targeted{false};

  explicit WorkerShared(std::size_t cap) : deque(cap) {}
};

struct PendingEvent {
  std::uint32_t deque_id;
  HistoryEvent event;
};

}  // namespace detail

// Runs the scheduling loop with P real workers over a Runtime, which
// supplies the work graph:
//
//   NodeRef root();                     handle every worker starts from
//   std::uint32_t execute(worker, u, out[2]);   0..2 newly ready handles
//   bool finished() const;
//   std::size_t handle_capacity() const;        for claim tables
//
// Worker 0 begins with the root assigned; everyone else starts stealing.
// Each iteration checks the targeted flag, publishes one node if it was
// set, then either executes the assigned node or attempts one steal from a
// uniformly random other worker, setting the victim's flag when its public
// part is empty.
template <class Runtime>
ExecutionReport run_workers(Runtime& rt, const ExecutorConfig& cfg) {
  const std::uint32_t P =
      cfg.workers ? cfg.workers
                  : std::max(1u, std::thread::hardware_concurrency());
  const std::size_t cap =
      std::max<std::size_t>(cfg.deque_capacity, rt.handle_capacity() + 16);

  std::deque<detail::WorkerShared> shared;
  for (std::uint32_t w = 0; w < P; ++w) shared.emplace_back(cap);

  std::vector<std::atomic<std::uint8_t>> claims(
      cfg.claim_checks ? rt.handle_capacity() : 0);
  std::atomic<bool> claim_violation{false};
  std::atomic<bool> stop{false};
  std::exception_ptr first_error;
  std::mutex error_mu;

  HistoryClock clock;
  std::vector<std::vector<detail::PendingEvent>> pending(P);

  ExecutionReport report;
  report.per_worker.assign(P, SyncEvents{});
  std::vector<std::uint64_t> notif(P, 0), executed(P, 0), checksum(P, 0);

  auto body = [&](std::uint32_t w) {
    detail::WorkerShared& self = shared[w];
    Rng rng = Rng::substream(cfg.seed, w);
    NodeRef assigned = w == 0 ? rt.root() : kNone;
    SyncEvents& ev = report.per_worker[w];
    std::uint32_t streak = 0;
    auto& buf = pending[w];

    auto record = [&](std::uint32_t deque_id, Method m, NodeRef arg,
                      NodeRef res, std::uint64_t t0) {
      buf.push_back({deque_id, {w, m, arg, res, t0, clock.tick()}});
    };
    auto claim = [&](NodeRef r) {
      if (!cfg.claim_checks) return;
      if (claims[r].fetch_add(1, std::memory_order_relaxed) != 0)
        claim_violation.store(true, std::memory_order_relaxed);
    };

    while (!rt.finished() && !stop.load(std::memory_order_relaxed)) {
      if (self.targeted.load(std::memory_order_relaxed)) {
        std::uint64_t t0 = cfg.record_history ? clock.tick() : 0;
        self.deque.update_bottom(ev);
        if (cfg.record_history)
          record(w, Method::update_bottom, kNone, kNone, t0);
        self.targeted.store(false, std::memory_order_relaxed);
      }
      if (valid_node(assigned)) {
        NodeRef enabled[2];
        std::uint32_t n = rt.execute(w, assigned, enabled);
        executed[w] += 1;
        checksum[w] += mix64(assigned);
        if (n > 0) {
          assigned = enabled[0];
          if (n == 2) {
            std::uint64_t t0 = cfg.record_history ? clock.tick() : 0;
            self.deque.push(enabled[1]);
            if (cfg.record_history)
              record(w, Method::push, enabled[1], kNone, t0);
          }
        } else {
          std::uint64_t t0 = cfg.record_history ? clock.tick() : 0;
          NodeRef r = self.deque.pop();
          if (cfg.record_history) record(w, Method::pop, kNone, r, t0);
          if (r == kRace) {
            std::uint64_t t1 = cfg.record_history ? clock.tick() : 0;
            r = self.deque.pop_bottom(ev);
            if (cfg.record_history)
              record(w, Method::pop_bottom, kNone, r, t1);
          }
          if (valid_node(r)) claim(r);
          assigned = r;
        }
        streak = 0;
      } else {
        if (P > 1) {
          std::uint32_t v = static_cast<std::uint32_t>(rng.bounded(P - 1));
          if (v >= w) v += 1;
          std::uint64_t t0 = cfg.record_history ? clock.tick() : 0;
          NodeRef r = shared[v].deque.pop_top(ev);
          if (cfg.record_history) record(v, Method::pop_top, kNone, r, t0);
          if (r == kEmpty) {
            shared[v].targeted.store(true, std::memory_order_relaxed);
            notif[w] += 1;
          }
          if (valid_node(r)) {
            claim(r);
            streak = 0;
          }
          assigned = r;
        }
        if (!valid_node(assigned) && !cfg.measurement_mode) {
          streak += 1;
          if (streak < 16) {
            for (std::uint32_t spin = 0; spin < (1u << std::min(streak, 8u));
                 ++spin)
              ;
          } else {
            std::this_thread::yield();
          }
        }
      }
    }
  };

  auto t_start = std::chrono::steady_clock::now();
  if (P == 1) {
    body(0);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(P);
    for (std::uint32_t w = 0; w < P; ++w)
      threads.emplace_back([&, w] {
        try {
          body(w);
        } catch (...) {
          {
            std::lock_guard<std::mutex> lk(error_mu);
            if (!first_error) first_error = std::current_exception();
          }
          stop.store(true, std::memory_order_relaxed);
        }
      });
    for (auto& t : threads) t.join();
  }
  auto t_end = std::chrono::steady_clock::now();
  if (first_error) std::rethrow_exception(first_error);
  WSLAB_REQUIRE(!claim_violation.load(),
                "a node was returned by two deque removals");

  report.wall_seconds = std::chrono::duration<double>(t_end - t_start).count();
  for (std::uint32_t w = 0; w < P; ++w) {
    report.notifications += notif[w];
    report.nodes_executed += executed[w];
    report.checksum += checksum[w];
  }
  if (cfg.record_history) {
    report.histories.resize(P);
    for (auto& buf : pending)
      for (auto& pe : buf)
        report.histories[pe.deque_id].events.push_back(pe.event);
    for (auto& h : report.histories)
      std::sort(h.events.begin(), h.events.end(),
                [](const HistoryEvent& a, const HistoryEvent& b) {
                  return a.invoke_ts < b.invoke_ts;
                });
  }
  return report;
}

// Executes a computation dag with real workers; every node is executed
// exactly once, with two-parent nodes readied through an atomic join
// counter.  The report's checksum covers the executed node multiset.
ExecutionReport execute_dag_parallel(const CompDag& dag,
                                     const ExecutorConfig& cfg);

// Minimal fork-join facade over the same scheduler: a problem describes a
// binary recursion (leaf test, leaf value, split, combine) whose spawn
// structure unfolds to a dag with out-degree at most two, joins included.
//
//   struct Fib {
//     bool is_leaf(std::int64_t n) const { return n < 2; }
//     std::int64_t leaf_value(std::int64_t n) const { return n; }
//     std::pair<std::int64_t, std::int64_t> split(std::int64_t n) const {
//       return {n - 1, n - 2};
//     }
//     std::int64_t combine(std::int64_t a, std::int64_t b) const {
//       return a + b;
//     }
//   };
template <class Problem>
class ForkJoinRuntime {
 public:
  ForkJoinRuntime(const Problem& problem, std::int64_t root_arg,
                  std::size_t capacity)
      : problem_(problem), arena_(capacity) {
    std::uint32_t r = alloc();
    arena_[r].value[0] = root_arg;
    arena_[r].parent = kNone;
    arena_[r].slot = 0;
    arena_[r].kind = kCompute;
    root_ = r;
  }

  NodeRef root() const { return root_; }
  std::size_t handle_capacity() const { return arena_.size(); }
  bool finished() const { return done_.load(std::memory_order_acquire); }
  std::int64_t result() const { return result_; }
  std::uint64_t tasks_created() const {
    return next_.load(std::memory_order_relaxed);
  }

  std::uint32_t execute(std::uint32_t worker, NodeRef t, NodeRef out[2]) {
    (void)worker;
    Task& task = arena_[t];
    if (task.kind == kCompute) {
      std::int64_t arg = task.value[0];
      if (problem_.is_leaf(arg))
        return deposit(task.parent, task.slot, problem_.leaf_value(arg), out);
      auto [l, r] = problem_.split(arg);
      std::uint32_t j = alloc();
      arena_[j].parent = task.parent;
      arena_[j].slot = task.slot;
      arena_[j].kind = kJoin;
      arena_[j].pending.store(2, std::memory_order_relaxed);
      std::uint32_t a = alloc();
      arena_[a].value[0] = l;
      arena_[a].parent = j;
      arena_[a].slot = 0;
      arena_[a].kind = kCompute;
      std::uint32_t b = alloc();
      arena_[b].value[0] = r;
      arena_[b].parent = j;
      arena_[b].slot = 1;
      arena_[b].kind = kCompute;
      out[0] = a;
      out[1] = b;
      return 2;
    }
    std::int64_t v = problem_.combine(task.value[0], task.value[1]);
    return deposit(task.parent, task.slot, v, out);
  }

 private:
  static constexpr std::uint8_t kCompute = 0;
  static constexpr std::uint8_t kJoin = 1;

  struct Task {
    std::int64_t value[2] = {0, 0};  // compute: arg; join: child results
    std::atomic<std::uint32_t> pending{0};
    std::uint32_t parent = kNone;
    std::uint8_t slot = 0;
    std::uint8_t kind = kCompute;
  };

  std::uint32_t alloc() {
    std::uint32_t i = next_.fetch_add(1, std::memory_order_relaxed);
    WSLAB_REQUIRE(i < arena_.size(), "fork-join task arena exhausted");
    return i;
  }

  std::uint32_t deposit(std::uint32_t parent, std::uint8_t slot,
                        std::int64_t v, NodeRef out[2]) {
    if (parent == kNone) {
      result_ = v;
      done_.store(true, std::memory_order_release);
      return 0;
    }
    Task& p = arena_[parent];
    p.value[slot] = v;
    if (p.pending.fetch_sub(1, std::memory_order_acq_rel) == 1) {
      out[0] = parent;
      return 1;
    }
    return 0;
  }

  const Problem& problem_;
  std::vector<Task> arena_;
  std::atomic<std::uint32_t> next_{0};
  std::atomic<bool> done_{false};
  std::int64_t result_ = 0;
  NodeRef root_ = kNone;
};

template <class Problem>
std::int64_t run_forkjoin(const Problem& problem, std::int64_t root_arg,
                          const ExecutorConfig& cfg,
                          ExecutionReport* report_out = nullptr,
                          std::size_t capacity = 1u << 20) {
  ForkJoinRuntime<Problem> rt(problem, root_arg, capacity);
  ExecutionReport report = run_workers(rt, cfg);
  WSLAB_REQUIRE(report.nodes_executed == rt.tasks_created(),
                "fork-join: created and executed task counts differ");
  if (report_out) *report_out = std::move(report);
  return rt.result();
}

}  // namespace wslab

#endif  // WSLAB_EXECUTOR_HPP
