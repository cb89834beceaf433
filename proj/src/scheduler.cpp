#include "wslab/scheduler.hpp"

namespace wslab {

ReadyTracker::ReadyTracker(const CompDag& dag, bool track_enabling)
    : dag_(&dag),
      remaining_parents_(dag.node_count()),
      executed_bits_((dag.node_count() + 63) / 64, 0),
      track_(track_enabling) {
  for (std::uint32_t i = 0; i < dag.node_count(); ++i)
    remaining_parents_[i] = dag.in_degree(i);
  if (track_) {
    depth_.assign(dag.node_count(), 0);
    enabling_parent_.assign(dag.node_count(), kNone);
  }
}

std::uint32_t ReadyTracker::execute(NodeRef u, NodeRef out[2]) {
  WSLAB_REQUIRE(!executed(u),
                "node " + std::to_string(u) + " executed twice");
  executed_bits_[u >> 6] |= 1ull << (u & 63);
  executed_count_ += 1;
  std::uint32_t n = 0;
  for (NodeRef c : dag_->children(u)) {
    if (--remaining_parents_[c] == 0) {
      out[n++] = c;
      if (track_) {
        depth_[c] = depth_[u] + 1;
        enabling_parent_[c] = u;
      }
    }
  }
  return n;
}

}  // namespace wslab
