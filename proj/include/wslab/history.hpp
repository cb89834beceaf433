#ifndef WSLAB_HISTORY_HPP
#define WSLAB_HISTORY_HPP

#include <atomic>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "wslab/core.hpp"

namespace wslab {

enum class Method : std::uint8_t {
  push,
  pop,
  update_bottom,
  pop_bottom,
  pop_top,
};

const char* method_name(Method m);
std::optional<Method> method_from_name(const std::string& s);

// One recorded invocation against one deque instance.  Timestamps come from
// a shared monotonic counter; only interval overlap matters, so counter
// skew between workers is irrelevant.
struct HistoryEvent {
  std::uint32_t worker = 0;
  Method method = Method::push;
  NodeRef argument = kNone;  // push only
  NodeRef result = kNone;    // kNone for void methods
  std::uint64_t invoke_ts = 0;
  std::uint64_t response_ts = 0;

  bool owner_method() const { return method != Method::pop_top; }
  bool aborted() const {
    return method == Method::pop_top && result == kAbort;
  }
};

struct History {
  std::vector<HistoryEvent> events;
};

// History file format: one event per line,
//   <worker> <method> <arg|-> <result|-> <invoke_ts> <response_ts>
void write_history(std::ostream& out, const History& h);
History read_history(std::istream& in);

// True iff no two of the four owner methods overlap in time.  popTop is
// exempt; it may overlap anything.
bool is_good(const History& h);

enum class Verdict { valid, invalid, too_large };

struct CheckResult {
  Verdict verdict = Verdict::valid;
  std::string detail;  // counterexample description when invalid
};

struct CheckOptions {
  // Exhaustive search bound on non-aborting invocations per history.
  std::size_t max_events = 12;
  // Deque contents at the start of the window, bottom to top of the private
  // part then bottom to top of the public part.  Empty for windows cut at
  // quiescent points.
  std::vector<NodeRef> initial_private;
  std::vector<NodeRef> initial_public;
};

// Decides whether the history satisfies the relaxed split-deque semantics:
// there must exist distinct linearization points, each inside its
// invocation's interval, whose order replays every recorded non-aborting
// result on the sequential reference deque, and every aborted popTop must
// contain the linearization point of some invocation that removed the
// topmost public item.  Exhaustive over interval-respecting orders with
// prefix-simulation pruning.
CheckResult check_relaxed(const History& h, const CheckOptions& opts = {});

// Shared monotonic clock for timestamping invocations.
class HistoryClock {
 public:
  std::uint64_t tick() { return t_.fetch_add(1, std::memory_order_relaxed); }

 private:
  std::atomic<std::uint64_t> t_{0};
};

// Cuts a (sequential, per-deque) history into windows that start and end at
// quiescent empty-deque points and contain at most max_events non-aborting
// invocations.  Oversized segments are dropped.
std::vector<History> window_history(const History& h, std::size_t max_events);

}  // namespace wslab

#endif  // WSLAB_HISTORY_HPP
