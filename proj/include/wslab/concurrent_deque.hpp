#ifndef WSLAB_CONCURRENT_DEQUE_HPP
#define WSLAB_CONCURRENT_DEQUE_HPP

#include <cstdint>
#include <vector>

#include "wslab/core.hpp"

namespace wslab {

// Synchronization charges for the classical fully concurrent deque.  Unlike
// the split deque, every local access pays: the owner's push must publish
// the node before thieves may take it, and the owner's popBottom needs the
// bottom-store/top-load fence.  The constants live in a struct so the cost
// model stays visible and adjustable.
struct CwsCostModel {
  std::uint32_t fence_per_push = 1;
  std::uint32_t fence_per_pop_bottom = 1;
  std::uint32_t cas_per_top_removal = 1;
  std::uint32_t cas_on_last_element_race = 1;
};

// Classical concurrent work-stealing deque (single bottom index plus an
// age word), simulator build: plain fields, deterministic, with the cost
// model above charged per invocation.
class ConcurrentDeque {
 public:
  explicit ConcurrentDeque(std::size_t initial_capacity = 64,
                           CwsCostModel cost = {})
      : entries_(initial_capacity ? initial_capacity : 1), cost_(cost) {}

  void push_bottom(NodeRef node, SyncEvents& ev) {
    ev.fences += cost_.fence_per_push;
    std::uint32_t b = bottom_;
    if (b == entries_.size()) entries_.resize(entries_.size() * 2);
    entries_[b] = node;
    bottom_ = b + 1;
  }

  NodeRef pop_bottom(SyncEvents& ev) {
    ev.fences += cost_.fence_per_pop_bottom;
    std::uint32_t b = bottom_;
    if (b == 0) return kEmpty;
    b -= 1;
    bottom_ = b;
    NodeRef node = entries_[b];
    Age old_age = age_;
    if (b > old_age.top) return node;
    bottom_ = 0;
    Age new_age{0, old_age.tag + 1};
    if (b == old_age.top) {
      // Last element: the owner races thieves for it via CAS on age.
      ev.cas_attempts += cost_.cas_on_last_element_race;
      ev.cas_successes += cost_.cas_on_last_element_race;
      age_ = new_age;
      return node;
    }
    age_ = new_age;
    return kEmpty;
  }

  NodeRef pop_top(SyncEvents& ev) {
    Age old_age = age_;
    std::uint32_t b = bottom_;
    if (b <= old_age.top) return kEmpty;
    ev.fences += 1;
    ev.cas_attempts += cost_.cas_per_top_removal;
    ev.cas_successes += cost_.cas_per_top_removal;
    NodeRef node = entries_[old_age.top];
    age_.top = old_age.top + 1;
    return node;
  }

  std::uint32_t size() const { return bottom_ - age_.top; }
  bool empty() const { return size() == 0; }
  Age age() const { return age_; }
  std::uint32_t bottom() const { return bottom_; }

 private:
  std::vector<NodeRef> entries_;
  std::uint32_t bottom_ = 0;
  Age age_{};
  CwsCostModel cost_;
};

}  // namespace wslab

#endif  // WSLAB_CONCURRENT_DEQUE_HPP
