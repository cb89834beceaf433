#ifndef WSLAB_CORE_HPP
#define WSLAB_CORE_HPP

#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>

namespace wslab {

// A node handle is a dense index into a CompDag (or a task arena).  The top
// of the index space is reserved for sentinel values so that a handle and
// the outcome of a deque operation fit in one word.
using NodeRef = std::uint32_t;

inline constexpr NodeRef kNone = 0xFFFFFFFFu;   // "no assigned node"
inline constexpr NodeRef kEmpty = 0xFFFFFFFEu;  // popTop/popBottom on empty part
inline constexpr NodeRef kAbort = 0xFFFFFFFDu;  // popTop lost a race
inline constexpr NodeRef kRace = 0xFFFFFFFCu;   // pop found the private part empty

// Largest node count a dag may have; keeps real handles clear of sentinels.
inline constexpr std::uint64_t kMaxNodeCount = 0xFFFFFFF0ull;

constexpr bool valid_node(NodeRef x) { return x < kRace; }

inline std::string node_to_string(NodeRef x) {
  switch (x) {
    case kNone: return "NONE";
    case kEmpty: return "EMPTY";
    case kAbort: return "ABORT";
    case kRace: return "RACE";
    default: return std::to_string(x);
  }
}

// Counts of synchronization events charged to one or more deque method
// invocations.  push/pop charge nothing; updateBottom charges one publication
// fence; popBottom charges one fence per invocation plus its CAS when the
// reset path runs; popTop charges one fence and one CAS attempt whenever the
// snapshot observes a non-empty public part.
struct SyncEvents {
  std::uint64_t cas_attempts = 0;
  std::uint64_t cas_successes = 0;
  std::uint64_t fences = 0;

  SyncEvents& operator+=(const SyncEvents& o) {
    cas_attempts += o.cas_attempts;
    cas_successes += o.cas_successes;
    fences += o.fences;
    return *this;
  }
  std::uint64_t total() const { return cas_attempts + fences; }
  bool operator==(const SyncEvents&) const = default;
};

// The (top, tag) pair guarding the public part of a deque.  Packed into one
// 64-bit word so a single compare-and-swap covers both fields; the tag only
// exists to defeat ABA on the owner's reset path.
struct Age {
  std::uint32_t top = 0;
  std::uint32_t tag = 0;

  static Age unpack(std::uint64_t v) {
    return Age{static_cast<std::uint32_t>(v & 0xFFFFFFFFu),
               static_cast<std::uint32_t>(v >> 32)};
  }
  std::uint64_t pack() const {
    return (static_cast<std::uint64_t>(tag) << 32) | top;
  }
  bool operator==(const Age&) const = default;
};

// Fatal invariant violations abort the run with a message; these are bugs or
// configuration errors, never data-dependent outcomes.
[[noreturn]] inline void fatal(const std::string& msg) {
  throw std::logic_error("wslab: " + msg);
}

#define WSLAB_REQUIRE(cond, msg) \
  do {                           \
    if (!(cond)) ::wslab::fatal(msg); \
  } while (0)

}  // namespace wslab

#endif  // WSLAB_CORE_HPP
