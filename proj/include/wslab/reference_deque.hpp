#ifndef WSLAB_REFERENCE_DEQUE_HPP
#define WSLAB_REFERENCE_DEQUE_HPP

#include <deque>
#include <vector>

#include "wslab/core.hpp"

namespace wslab {

// Plain sequential model of the split deque semantics.  push/pop act on the
// bottom of the private part, updateBottom moves the topmost private node to
// the bottom of the public part, popBottom/popTop act on the two ends of the
// public part.  No indices, no tags: this is the oracle that the real
// implementations are replayed against, and the state machine the history
// checker uses for linearization search.
class ReferenceSplitDeque {
 public:
  void push(NodeRef node) { private_.push_back(node); }

  NodeRef pop() {
    if (private_.empty()) return kRace;
    NodeRef n = private_.back();
    private_.pop_back();
    return n;
  }

  void update_bottom() {
    if (private_.empty()) return;
    public_.push_back(private_.front());
    private_.pop_front();
  }

  NodeRef pop_bottom() {
    if (public_.empty()) return kEmpty;
    NodeRef n = public_.back();
    public_.pop_back();
    return n;
  }

  NodeRef pop_top() {
    if (public_.empty()) return kEmpty;
    NodeRef n = public_.front();
    public_.pop_front();
    return n;
  }

  // True when the invocation would remove the item currently at the top of
  // the public part; used for the abort condition of the relaxed semantics.
  bool pop_top_removes_top() const { return !public_.empty(); }
  bool pop_bottom_removes_top() const { return public_.size() == 1; }

  std::size_t private_size() const { return private_.size(); }
  std::size_t public_size() const { return public_.size(); }
  std::size_t size() const { return private_.size() + public_.size(); }
  bool empty() const { return size() == 0; }

  // Live nodes ordered bottom to top (private bottom first, public top last).
  std::vector<NodeRef> bottom_to_top() const {
    std::vector<NodeRef> out;
    out.reserve(size());
    for (auto it = private_.rbegin(); it != private_.rend(); ++it)
      out.push_back(*it);
    for (auto it = public_.rbegin(); it != public_.rend(); ++it)
      out.push_back(*it);
    return out;
  }

  // Topmost node of the whole deque (public top if any, else private top).
  NodeRef topmost() const {
    if (!public_.empty()) return public_.front();
    if (!private_.empty()) return private_.front();
    return kNone;
  }

  const std::deque<NodeRef>& private_part() const { return private_; }
  const std::deque<NodeRef>& public_part() const { return public_; }

 private:
  std::deque<NodeRef> private_;  // front = top, back = bottom
  std::deque<NodeRef> public_;   // front = top, back = bottom
};

}  // namespace wslab

#endif  // WSLAB_REFERENCE_DEQUE_HPP
