#ifndef WSLAB_POTENTIAL_HPP
#define WSLAB_POTENTIAL_HPP

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "wslab/dag.hpp"
#include "wslab/reference_deque.hpp"
#include "wslab/sim.hpp"

namespace wslab {

using BigInt = boost::multiprecision::cpp_int;

// Status of a ready node, as the potential function sees it.  A node is
// stealable exactly when it sits in the public part of some deque.
enum class NodeStatus : std::uint8_t {
  not_ready,
  assigned,
  stealable,
  private_queued,
  executed,
};

// phi(u) = 4^(3w-2) assigned, 4^(3w-1) stealable, 4^(3w) otherwise.
// Exact: potentials like 4^(3*26) overflow doubles long before the
// interesting dag sizes, so everything here is arbitrary precision.
BigInt node_potential(std::uint32_t weight, NodeStatus status);

struct PotentialLedger {
  BigInt phi_total;
  BigInt phi_d;  // potential of processors with non-empty deques
  BigInt phi_a;  // the rest
};

struct Violation {
  std::uint64_t step;
  std::uint32_t proc;  // kNone when not processor-specific
  std::string check;
  std::string details;
};

struct AnalyzerReport {
  std::vector<Violation> violations;
  std::uint64_t steps_checked = 0;
  std::uint64_t events_checked = 0;
  bool ok() const { return violations.empty(); }
};

// Machine-readable violation list: one `step,processor,check,details` line
// per violation.
void write_violations(std::ostream& out, const AnalyzerReport& r);

// Replays a full simulator trace against the reference deque model while
// maintaining enabling-tree depths, node statuses and exact potentials.
// Any divergence between the trace and the model is a hard error: the trace
// is the ground truth the checks run on, so it must be self-consistent.
class TraceReplayer {
 public:
  // One potential-changing event observed during replay.
  struct Event {
    enum class Kind : std::uint8_t { assigned, stealable, executed };
    Kind kind;
    std::uint64_t step;
    std::uint32_t proc;
    NodeRef node;
    std::uint32_t weight;
    std::uint8_t children;  // executed events only
    BigInt phi_before;      // potential of the node before the event
    BigInt drop;            // total potential decrease caused by the event
  };

  TraceReplayer(const CompDag& dag, const Trace& trace);

  bool done() const { return next_record_ == trace_->records.size(); }
  std::uint64_t boundary() const { return boundary_step_; }

  // Processes all records of the next step.  When `events` is non-null the
  // step's potential events are appended to it.
  void advance_step(std::vector<Event>* events = nullptr);

  // State at the current step boundary.
  const BigInt& phi_total() const { return phi_total_; }
  const BigInt& phi_proc(std::uint32_t p) const { return phi_proc_[p]; }
  BigInt phi_d() const;
  bool deque_nonempty(std::uint32_t p) const { return !deques_[p].empty(); }
  NodeRef assigned(std::uint32_t p) const { return assigned_[p]; }
  NodeRef topmost(std::uint32_t p) const { return deques_[p].topmost(); }
  std::vector<NodeRef> deque_bottom_to_top(std::uint32_t p) const {
    return deques_[p].bottom_to_top();
  }
  std::uint32_t processors() const {
    return static_cast<std::uint32_t>(deques_.size());
  }
  std::uint32_t weight(NodeRef u) const { return t_inf_ - depth_[u]; }
  NodeStatus status(NodeRef u) const { return status_[u]; }
  const BigInt& pow4(std::uint32_t e) const { return pow4_[e]; }
  BigInt potential_of(NodeRef u) const;
  std::uint64_t idle_in_step() const { return idle_in_step_; }

  // Independent full sum over ready nodes; the incremental phi_total must
  // always equal this.
  PotentialLedger full_ledger() const;

 private:
  void set_status(NodeRef u, NodeStatus s);
  BigInt remove_potential(std::uint32_t proc, NodeRef u);
  BigInt add_potential(std::uint32_t proc, NodeRef u, NodeStatus s);

  const CompDag* dag_;
  const Trace* trace_;
  std::uint32_t t_inf_;
  std::size_t next_record_ = 0;
  std::uint64_t boundary_step_ = 0;
  std::uint64_t idle_in_step_ = 0;
  std::vector<ReferenceSplitDeque> deques_;
  std::vector<NodeRef> assigned_;
  std::vector<std::uint32_t> depth_;
  std::vector<NodeStatus> status_;
  std::vector<BigInt> phi_proc_;
  BigInt phi_total_;
  std::vector<BigInt> pow4_;
};

// Rebuilds the exact ledger at a step boundary (state before step `step`,
// with step == trace.steps giving the terminal state) by from-scratch
// replay.  Throws when step is out of range.
PotentialLedger ledger_at(const CompDag& dag, const Trace& trace,
                          std::uint64_t step);

// Per-event potential-drop bounds: assignments and publications drop at
// least 3/4 of the node's potential; executing an assigned node drops
// exactly phi, (63/64) phi or (47/64) phi for 0, 1, 2 enabled children.
// Also flags any step where the total potential increased.
AnalyzerReport check_drops(const CompDag& dag, const Trace& trace);

// At every step boundary, the topmost node of every non-empty deque must
// hold at least 4/5 of the potential attached to the processor.
AnalyzerReport check_top_heavy(const CompDag& dag, const Trace& trace);

// At every step boundary, weights from the assigned node through the deque
// bottom-to-top satisfy w(v0) <= w(v1) < w(v2) < ... < w(vk).
AnalyzerReport check_structural(const CompDag& dag, const Trace& trace);

struct PhaseReport {
  std::uint64_t phases = 0;
  std::uint64_t successes = 0;
  double fraction() const {
    return phases == 0 ? 1.0 : double(successes) / double(phases);
  }
};

// Greedy left-to-right phases, each closed at the first step by which at
// least P idle iterations accumulated; a phase succeeds when the potential
// dropped by at least 3/10 of Phi(D) at the phase start, measured with a
// two-step grace after the close.
PhaseReport check_phase_decrease(const CompDag& dag, const Trace& trace);

// Monte-Carlo estimate of P{X >= beta * W} when `balls` balls land
// uniformly in B weighted bins and X sums the weights of hit bins.
double balls_bins_trial(std::span<const double> weights, double beta,
                        std::uint64_t balls, std::uint64_t trials,
                        std::uint64_t seed);

}  // namespace wslab

#endif  // WSLAB_POTENTIAL_HPP
