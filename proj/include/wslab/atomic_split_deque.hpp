#ifndef WSLAB_ATOMIC_SPLIT_DEQUE_HPP
#define WSLAB_ATOMIC_SPLIT_DEQUE_HPP

#include <atomic>
#include <cstdint>
#include <memory>

#include "wslab/core.hpp"

namespace wslab {

// Lock-free split deque, threaded build.  Same algorithm as SplitDeque, with
// the memory-ordering contract a real multi-worker execution needs:
//
//  - entries writes happen-before the officialBottom publication in
//    updateBottom (relaxed slot store + release store of officialBottom);
//  - thieves read age, then officialBottom, then the entry with acquire
//    semantics, and claim the top with one CAS on age;
//  - popBottom orders its officialBottom decrement before the age read with
//    a full fence (the classic take-side fence);
//  - privateBottom is owner-only and stays a plain field.
//
// Entry slots are atomics because a thief holding a stale snapshot may read
// a slot the owner is rewriting after a reset; the tag makes that thief's
// CAS fail and the value is discarded, but the access itself must be a
// non-racing read.
//
// Capacity is fixed; overflow is a configuration error (there is no safe
// resize protocol under concurrent popTop).
class AtomicSplitDeque {
 public:
  explicit AtomicSplitDeque(std::size_t capacity)
      : entries_(new std::atomic<NodeRef>[capacity]), capacity_(capacity) {}

  // owner only
  void push(NodeRef node) {
    std::uint32_t pbot = private_bottom_;
    WSLAB_REQUIRE(pbot < capacity_, "split deque capacity exhausted");
    entries_[pbot].store(node, std::memory_order_relaxed);
    private_bottom_ = pbot + 1;
  }

  // owner only
  NodeRef pop() {
    std::uint32_t pbot = private_bottom_;
    if (pbot == official_bottom_.load(std::memory_order_relaxed)) return kRace;
    pbot -= 1;
    NodeRef node = entries_[pbot].load(std::memory_order_relaxed);
    private_bottom_ = pbot;
    return node;
  }

  // owner only
  void update_bottom(SyncEvents& ev) {
    ev.fences += 1;
    std::uint32_t obot = official_bottom_.load(std::memory_order_relaxed);
    if (private_bottom_ > obot) obot += 1;
    official_bottom_.store(obot, std::memory_order_release);
  }

  // any worker, any multiplicity
  NodeRef pop_top(SyncEvents& ev) {
    std::uint64_t old_age = age_.load(std::memory_order_acquire);
    std::uint32_t old_bottom = official_bottom_.load(std::memory_order_acquire);
    Age a = Age::unpack(old_age);
    if (old_bottom <= a.top) return kEmpty;
    ev.fences += 1;
    NodeRef node = entries_[a.top].load(std::memory_order_relaxed);
    Age next{a.top + 1, a.tag};
    ev.cas_attempts += 1;
    if (age_.compare_exchange_strong(old_age, next.pack(),
                                     std::memory_order_seq_cst,
                                     std::memory_order_relaxed)) {
      ev.cas_successes += 1;
      return node;
    }
    return kAbort;
  }

  // owner only
  NodeRef pop_bottom(SyncEvents& ev) {
    ev.fences += 1;
    std::uint32_t obot = official_bottom_.load(std::memory_order_relaxed);
    if (obot == 0) return kEmpty;
    obot -= 1;
    official_bottom_.store(obot, std::memory_order_relaxed);
    std::atomic_thread_fence(std::memory_order_seq_cst);
    NodeRef node = entries_[obot].load(std::memory_order_relaxed);
    std::uint64_t old_age = age_.load(std::memory_order_relaxed);
    Age a = Age::unpack(old_age);
    if (obot > a.top) return node;
    official_bottom_.store(0, std::memory_order_relaxed);
    private_bottom_ = 0;
    Age next{0, a.tag + 1};
    if (obot == a.top) {
      ev.cas_attempts += 1;
      if (age_.compare_exchange_strong(old_age, next.pack(),
                                       std::memory_order_seq_cst,
                                       std::memory_order_relaxed)) {
        ev.cas_successes += 1;
        return node;
      }
    }
    age_.store(next.pack(), std::memory_order_release);
    return kEmpty;
  }

  // Owner-side snapshots, for tests run at quiescent points.
  std::uint32_t private_size() const {
    return private_bottom_ - official_bottom_.load(std::memory_order_relaxed);
  }
  std::uint32_t public_size() const {
    return official_bottom_.load(std::memory_order_relaxed) -
           Age::unpack(age_.load(std::memory_order_relaxed)).top;
  }
  std::uint32_t size() const {
    return private_bottom_ -
           Age::unpack(age_.load(std::memory_order_relaxed)).top;
  }
  Age age() const { return Age::unpack(age_.load(std::memory_order_relaxed)); }

 private:
  std::unique_ptr<std::atomic<NodeRef>[]> entries_;
  std::size_t capacity_;
  std::uint32_t private_bottom_ = 0;                 // owner-only
  std::atomic<std::uint32_t> official_bottom_{0};
  std::atomic<std::uint64_t> age_{0};
};

}  // namespace wslab

#endif  // WSLAB_ATOMIC_SPLIT_DEQUE_HPP
