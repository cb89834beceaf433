#ifndef WSLAB_SPLIT_DEQUE_HPP
#define WSLAB_SPLIT_DEQUE_HPP

#include <cstdint>
#include <vector>

#include "wslab/core.hpp"

namespace wslab {

// Lock-free split deque, simulator build.
//
// The deque is one array plus three indices:
//
//   entries[age.top .. officialBottom)     the public part (top = age.top)
//   entries[officialBottom .. privateBottom)  the private part
//
// push/pop work on the private end and touch no shared word that needs
// ordering; updateBottom publishes one node by bumping officialBottom;
// popBottom takes the public bottom and, when it drains the public part,
// resets all indices under a tag bump so stale thieves fail their CAS;
// popTop snapshots (age, officialBottom) and claims the top via one CAS on
// age.
//
// This build runs single-threaded inside the deterministic simulator, so the
// fields are plain integers and every CAS trivially succeeds.  Invocations
// still report the synchronization events the operation would incur, using
// the charging rules described in core.hpp.  The entries array grows on
// demand, which is safe here precisely because nothing runs concurrently.
class SplitDeque {
 public:
  explicit SplitDeque(std::size_t initial_capacity = 64)
      : entries_(initial_capacity ? initial_capacity : 1) {}

  void push(NodeRef node) {
    std::uint32_t pbot = private_bottom_;
    if (pbot == entries_.size()) entries_.resize(entries_.size() * 2);
    entries_[pbot] = node;
    private_bottom_ = pbot + 1;
  }

  NodeRef pop() {
    std::uint32_t pbot = private_bottom_;
    if (pbot == official_bottom_) return kRace;
    pbot -= 1;
    NodeRef node = entries_[pbot];
    private_bottom_ = pbot;
    return node;
  }

  void update_bottom(SyncEvents& ev) {
    ev.fences += 1;
    std::uint32_t obot = official_bottom_;
    if (private_bottom_ > obot) obot += 1;
    official_bottom_ = obot;
  }

  NodeRef pop_top(SyncEvents& ev) {
    Age old_age = age_;
    std::uint32_t old_bottom = official_bottom_;
    if (old_bottom <= old_age.top) return kEmpty;
    ev.fences += 1;
    NodeRef node = entries_[old_age.top];
    ev.cas_attempts += 1;
    // Nothing can interleave inside one invocation here, so the CAS wins.
    ev.cas_successes += 1;
    age_.top = old_age.top + 1;
    return node;
  }

  NodeRef pop_bottom(SyncEvents& ev) {
    ev.fences += 1;
    std::uint32_t obot = official_bottom_;
    if (obot == 0) return kEmpty;
    obot -= 1;
    official_bottom_ = obot;
    NodeRef node = entries_[obot];
    Age old_age = age_;
    if (obot > old_age.top) return node;
    official_bottom_ = 0;
    private_bottom_ = 0;
    Age new_age{0, old_age.tag + 1};
    if (obot == old_age.top) {
      ev.cas_attempts += 1;
      ev.cas_successes += 1;
      age_ = new_age;
      return node;
    }
    age_ = new_age;
    return kEmpty;
  }

  std::uint32_t private_size() const {
    return private_bottom_ - official_bottom_;
  }
  std::uint32_t public_size() const { return official_bottom_ - age_.top; }
  std::uint32_t size() const { return private_bottom_ - age_.top; }
  bool empty() const { return size() == 0; }

  Age age() const { return age_; }
  std::uint32_t official_bottom() const { return official_bottom_; }
  std::uint32_t private_bottom() const { return private_bottom_; }
  NodeRef entry(std::uint32_t i) const { return entries_[i]; }

 private:
  std::vector<NodeRef> entries_;
  std::uint32_t private_bottom_ = 0;
  std::uint32_t official_bottom_ = 0;
  Age age_{};
};

}  // namespace wslab

#endif  // WSLAB_SPLIT_DEQUE_HPP
