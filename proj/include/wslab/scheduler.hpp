#ifndef WSLAB_SCHEDULER_HPP
#define WSLAB_SCHEDULER_HPP

#include <cstdint>
#include <vector>

#include "wslab/core.hpp"
#include "wslab/dag.hpp"

namespace wslab {

// Tracks readiness during one execution of a dag: a per-node counter starts
// at the in-degree and a node becomes ready when it hits zero.  Optionally
// records the enabling edge (which parent's execution made the node ready)
// and the node's depth in the enabling tree, which is what the weight
// w(u) = t_inf - d(u) is computed from.
class ReadyTracker {
 public:
  explicit ReadyTracker(const CompDag& dag, bool track_enabling = false);

  // Executes u: decrements each child's counter and appends children that
  // became ready, in child order, to out (at most 2).  Executing a node
  // twice is a fatal invariant violation.
  std::uint32_t execute(NodeRef u, NodeRef out[2]);

  bool executed(NodeRef u) const {
    return (executed_bits_[u >> 6] >> (u & 63)) & 1;
  }
  std::uint64_t executed_count() const { return executed_count_; }
  bool done() const { return executed_count_ == dag_->t1(); }

  bool tracking_enabling() const { return track_; }
  std::uint32_t depth(NodeRef u) const { return depth_[u]; }
  NodeRef enabling_parent(NodeRef u) const { return enabling_parent_[u]; }
  // Weight of u in this execution; requires enabling tracking.
  std::uint32_t weight(NodeRef u) const { return dag_->t_inf() - depth_[u]; }

 private:
  const CompDag* dag_;
  std::vector<std::uint8_t> remaining_parents_;
  std::vector<std::uint64_t> executed_bits_;
  std::uint64_t executed_count_ = 0;
  bool track_;
  std::vector<std::uint32_t> depth_;
  std::vector<NodeRef> enabling_parent_;
};

// One scheduling-loop pass, as observed by the engines.  kind is busy iff
// the iteration began with a valid assigned node.
struct IterationOutcome {
  enum class Kind : std::uint8_t { busy, idle };
  Kind kind = Kind::busy;
  NodeRef executed = kNone;
  std::uint8_t enabled_count = 0;
  SyncEvents sync;
  std::uint32_t notified_victim = kNone;
};

}  // namespace wslab

#endif  // WSLAB_SCHEDULER_HPP
