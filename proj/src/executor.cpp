#include "wslab/executor.hpp"

namespace wslab {

namespace {

// Readiness tracking for a static dag under concurrent execution.  Nodes
// with a single parent become ready the moment that parent executes; nodes
// with two or more parents go through an atomic join counter, and the
// worker whose decrement reaches zero enables the node.
class DagRuntime {
 public:
  explicit DagRuntime(const CompDag& dag) : dag_(&dag) {
    bool any_join = false;
    for (std::uint32_t i = 0; i < dag.node_count(); ++i)
      if (dag.in_degree(i) > 1) {
        any_join = true;
        break;
      }
    if (any_join) {
      joins_ = std::vector<std::atomic<std::uint8_t>>(dag.node_count());
      for (std::uint32_t i = 0; i < dag.node_count(); ++i)
        joins_[i].store(dag.in_degree(i), std::memory_order_relaxed);
    }
  }

  NodeRef root() const { return dag_->root(); }
  std::size_t handle_capacity() const { return dag_->node_count(); }
  bool finished() const {
    return executed_.load(std::memory_order_acquire) == dag_->t1();
  }
  std::uint64_t executed_count() const {
    return executed_.load(std::memory_order_relaxed);
  }
  std::uint64_t join_updates() const {
    return join_updates_.load(std::memory_order_relaxed);
  }

  std::uint32_t execute(std::uint32_t worker, NodeRef u, NodeRef out[2]) {
    (void)worker;
    std::uint32_t n = 0;
    for (NodeRef c : dag_->children(u)) {
      if (dag_->in_degree(c) <= 1) {
        out[n++] = c;
      } else {
        join_updates_.fetch_add(1, std::memory_order_relaxed);
        if (joins_[c].fetch_sub(1, std::memory_order_acq_rel) == 1)
          out[n++] = c;
      }
    }
    executed_.fetch_add(1, std::memory_order_acq_rel);
    return n;
  }

 private:
  const CompDag* dag_;
  std::vector<std::atomic<std::uint8_t>> joins_;
  std::atomic<std::uint64_t> executed_{0};
  std::atomic<std::uint64_t> join_updates_{0};
};

}  // namespace

ExecutionReport execute_dag_parallel(const CompDag& dag,
                                     const ExecutorConfig& cfg) {
  WSLAB_REQUIRE(validate(dag).empty(), "execute_dag_parallel: invalid dag");
  DagRuntime rt(dag);
  ExecutionReport report = run_workers(rt, cfg);
  report.join_updates = rt.join_updates();
  WSLAB_REQUIRE(report.nodes_executed == dag.t1(),
                "executor did not execute every node exactly once");
  return report;
}

}  // namespace wslab
