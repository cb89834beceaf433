#include "wslab/history.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "wslab/reference_deque.hpp"

namespace wslab {

const char* method_name(Method m) {
  switch (m) {
    case Method::push: return "push";
    case Method::pop: return "pop";
    case Method::update_bottom: return "updateBottom";
    case Method::pop_bottom: return "popBottom";
    case Method::pop_top: return "popTop";
  }
  return "?";
}

std::optional<Method> method_from_name(const std::string& s) {
  if (s == "push") return Method::push;
  if (s == "pop") return Method::pop;
  if (s == "updateBottom") return Method::update_bottom;
  if (s == "popBottom") return Method::pop_bottom;
  if (s == "popTop") return Method::pop_top;
  return std::nullopt;
}

namespace {

std::string field_to_string(NodeRef x) {
  return x == kNone ? "-" : node_to_string(x);
}

NodeRef field_from_string(const std::string& s) {
  if (s == "-") return kNone;
  if (s == "RACE") return kRace;
  if (s == "EMPTY") return kEmpty;
  if (s == "ABORT") return kAbort;
  return static_cast<NodeRef>(std::stoul(s));
}

}  // namespace

void write_history(std::ostream& out, const History& h) {
  for (const auto& e : h.events) {
    out << e.worker << ' ' << method_name(e.method) << ' '
        << field_to_string(e.argument) << ' ' << field_to_string(e.result)
        << ' ' << e.invoke_ts << ' ' << e.response_ts << '\n';
  }
}

History read_history(std::istream& in) {
  History h;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string method, arg, result;
    HistoryEvent e;
    ls >> e.worker >> method >> arg >> result >> e.invoke_ts >> e.response_ts;
    WSLAB_REQUIRE(bool(ls), "history parse: bad line: " + line);
    auto m = method_from_name(method);
    WSLAB_REQUIRE(m.has_value(), "history parse: unknown method " + method);
    e.method = *m;
    e.argument = field_from_string(arg);
    e.result = field_from_string(result);
    h.events.push_back(e);
  }
  return h;
}

bool is_good(const History& h) {
  std::vector<const HistoryEvent*> owner;
  for (const auto& e : h.events)
    if (e.owner_method()) owner.push_back(&e);
  for (std::size_t i = 0; i < owner.size(); ++i)
    for (std::size_t j = i + 1; j < owner.size(); ++j) {
      const auto& a = *owner[i];
      const auto& b = *owner[j];
      if (a.invoke_ts < b.response_ts && b.invoke_ts < a.response_ts)
        return false;
    }
  return true;
}

namespace {

// Applies one non-aborting invocation to the reference state.  Returns false
// on a result mismatch; sets removed_top when the invocation removed the
// node that was at the top of the public part.
bool apply_event(ReferenceSplitDeque& d, const HistoryEvent& e,
                 bool& removed_top) {
  removed_top = false;
  switch (e.method) {
    case Method::push:
      d.push(e.argument);
      return true;
    case Method::pop:
      return d.pop() == e.result;
    case Method::update_bottom:
      d.update_bottom();
      return true;
    case Method::pop_bottom: {
      bool was_top = d.pop_bottom_removes_top();
      NodeRef r = d.pop_bottom();
      removed_top = was_top && valid_node(r);
      return r == e.result;
    }
    case Method::pop_top: {
      NodeRef r = d.pop_top();
      removed_top = valid_node(r);
      return r == e.result;
    }
  }
  return false;
}

struct Searcher {
  const std::vector<const HistoryEvent*>& ordered;
  const std::vector<const HistoryEvent*>& aborts;
  std::vector<std::uint32_t> order;       // indices into ordered
  std::vector<std::uint8_t> removed_top;  // parallel to order
  std::vector<std::uint8_t> used;
  ReferenceSplitDeque initial;
  std::uint64_t explored = 0;
  bool hit_cap = false;
  static constexpr std::uint64_t kNodeCap = 50'000'000;

  // Memo of (used-mask, deque state) pairs that already failed; only sound
  // when there are no aborted invocations, because then validity of a
  // completion depends on nothing but the remaining events and the state.
  std::set<std::pair<std::uint32_t, std::vector<NodeRef>>> failed;
  bool use_memo = false;

  bool points_feasible() const {
    // Choose linearization points t_1 < ... < t_n, each inside its event's
    // open interval, and for every aborted popTop pick a witness among the
    // top-removing events whose point also lies inside the abort's interval.
    // For a fixed witness assignment, greedy left-to-right placement is
    // exact; points are tracked as (integer, count-of-epsilons).
    std::vector<std::vector<std::uint32_t>> candidates(aborts.size());
    for (std::size_t ai = 0; ai < aborts.size(); ++ai) {
      const auto& x = *aborts[ai];
      for (std::size_t k = 0; k < order.size(); ++k) {
        if (!removed_top[k]) continue;
        const auto& y = *ordered[order[k]];
        if (std::max(x.invoke_ts, y.invoke_ts) <
            std::min(x.response_ts, y.response_ts))
          candidates[ai].push_back(static_cast<std::uint32_t>(k));
      }
      if (candidates[ai].empty()) return false;
    }
    std::vector<std::size_t> pick(aborts.size(), 0);
    while (true) {
      // Intersect each event's interval with the intervals of the aborts it
      // witnesses, then place greedily.
      bool ok = true;
      std::uint64_t base = 0;
      std::uint32_t eps = 0;
      for (std::size_t k = 0; k < order.size() && ok; ++k) {
        const auto& e = *ordered[order[k]];
        std::uint64_t lo = e.invoke_ts;
        std::uint64_t hi = e.response_ts;
        for (std::size_t ai = 0; ai < aborts.size(); ++ai) {
          if (candidates[ai][pick[ai]] == k) {
            lo = std::max(lo, aborts[ai]->invoke_ts);
            hi = std::min(hi, aborts[ai]->response_ts);
          }
        }
        if (k == 0 || lo > base || (lo == base && eps == 0)) {
          base = lo;
          eps = 1;
        } else {
          eps += 1;
        }
        if (base >= hi) ok = false;
      }
      if (ok) return true;
      // next witness assignment
      std::size_t ai = 0;
      while (ai < aborts.size()) {
        if (++pick[ai] < candidates[ai].size()) break;
        pick[ai] = 0;
        ++ai;
      }
      if (ai == aborts.size()) return false;
    }
  }

  bool dfs(ReferenceSplitDeque state, std::uint32_t used_mask) {
    if (++explored > kNodeCap) {
      hit_cap = true;
      return false;
    }
    const std::size_t n = ordered.size();
    if (order.size() == n) return points_feasible();
    if (use_memo) {
      auto key = std::make_pair(used_mask, state.bottom_to_top());
      if (failed.count(key)) return false;
    }
    // An event may linearize next iff no other remaining event completes
    // before it begins.
    std::uint64_t min1 = ~0ull, min2 = ~0ull;
    for (std::size_t i = 0; i < n; ++i) {
      if (used[i]) continue;
      std::uint64_t r = ordered[i]->response_ts;
      if (r < min1) {
        min2 = min1;
        min1 = r;
      } else if (r < min2) {
        min2 = r;
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (used[i]) continue;
      std::uint64_t bound =
          ordered[i]->response_ts == min1 ? min2 : min1;
      if (ordered[i]->invoke_ts >= bound) continue;
      ReferenceSplitDeque next = state;
      bool rtop = false;
      if (!apply_event(next, *ordered[i], rtop)) continue;
      used[i] = 1;
      order.push_back(static_cast<std::uint32_t>(i));
      removed_top.push_back(rtop);
      if (dfs(std::move(next), used_mask | (1u << i))) return true;
      removed_top.pop_back();
      order.pop_back();
      used[i] = 0;
      if (hit_cap) return false;
    }
    if (use_memo)
      failed.emplace(used_mask, state.bottom_to_top());
    return false;
  }
};

}  // namespace

CheckResult check_relaxed(const History& h, const CheckOptions& opts) {
  std::vector<const HistoryEvent*> ordered;
  std::vector<const HistoryEvent*> aborts;
  for (const auto& e : h.events) {
    if (e.aborted())
      aborts.push_back(&e);
    else
      ordered.push_back(&e);
  }
  if (ordered.size() > opts.max_events || ordered.size() > 31)
    return {Verdict::too_large,
            "non-aborting event count " + std::to_string(ordered.size()) +
                " exceeds search bound"};

  // Both parts are given bottom-to-top.  Pushing in top-first order makes
  // the listed bottom the most recent push; publishing then peels the
  // private top, so the public part comes out in the listed order too.
  ReferenceSplitDeque initial;
  for (auto it = opts.initial_public.rbegin(); it != opts.initial_public.rend();
       ++it)
    initial.push(*it);
  for (std::size_t i = 0; i < opts.initial_public.size(); ++i)
    initial.update_bottom();
  for (auto it = opts.initial_private.rbegin();
       it != opts.initial_private.rend(); ++it)
    initial.push(*it);

  Searcher s{ordered, aborts};
  s.used.assign(ordered.size(), 0);
  s.use_memo = aborts.empty();
  if (s.dfs(initial, 0)) return {Verdict::valid, ""};
  if (s.hit_cap)
    return {Verdict::too_large, "linearization search exceeded node cap"};
  return {Verdict::invalid,
          "no interval-respecting linearization reproduces the recorded "
          "results (" +
              std::to_string(ordered.size()) + " events, " +
              std::to_string(aborts.size()) + " aborts)"};
}

std::vector<History> window_history(const History& h,
                                    std::size_t max_events) {
  std::vector<History> out;
  ReferenceSplitDeque d;
  History current;
  std::size_t non_aborting = 0;
  bool broken = false;  // replay diverged; skip until next quiescent point
  for (std::size_t i = 0; i < h.events.size(); ++i) {
    const auto& e = h.events[i];
    current.events.push_back(e);
    if (!e.aborted()) {
      bool rtop = false;
      if (!apply_event(d, e, rtop)) broken = true;
      non_aborting += 1;
    }
    bool time_separated =
        i + 1 == h.events.size() ||
        e.response_ts < h.events[i + 1].invoke_ts;
    if (d.empty() && time_separated) {
      if (!broken && non_aborting > 0 && non_aborting <= max_events)
        out.push_back(std::move(current));
      current = {};
      non_aborting = 0;
      broken = false;
    }
  }
  return out;
}

}  // namespace wslab
