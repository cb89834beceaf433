#include "wslab/potential.hpp"

#include <ostream>

#include "wslab/rng.hpp"

namespace wslab {

namespace {

std::uint32_t potential_exponent(std::uint32_t weight, NodeStatus status) {
  WSLAB_REQUIRE(weight >= 1, "node weight must be at least 1");
  switch (status) {
    case NodeStatus::assigned: return 3 * weight - 2;
    case NodeStatus::stealable: return 3 * weight - 1;
    case NodeStatus::private_queued: return 3 * weight;
    default: break;
  }
  fatal("potential of a non-ready node");
}

}  // namespace

BigInt node_potential(std::uint32_t weight, NodeStatus status) {
  BigInt one = 1;
  return one << (2 * potential_exponent(weight, status));
}

void write_violations(std::ostream& out, const AnalyzerReport& r) {
  for (const auto& v : r.violations) {
    out << v.step << ',';
    if (v.proc == kNone)
      out << '-';
    else
      out << v.proc;
    out << ',' << v.check << ',' << v.details << '\n';
  }
}

TraceReplayer::TraceReplayer(const CompDag& dag, const Trace& trace)
    : dag_(&dag),
      trace_(&trace),
      t_inf_(dag.t_inf()),
      deques_(trace.processors),
      assigned_(trace.processors, kNone),
      depth_(dag.node_count(), 0),
      status_(dag.node_count(), NodeStatus::not_ready),
      phi_proc_(trace.processors, BigInt(0)) {
  WSLAB_REQUIRE(trace.processors >= 1, "trace has no processors");
  WSLAB_REQUIRE(trace.scheduler == SchedulerKind::lcws,
                "potential replay is defined over lcws traces");
  pow4_.reserve(3 * t_inf_ + 1);
  BigInt v = 1;
  for (std::uint32_t e = 0; e <= 3 * t_inf_; ++e) {
    pow4_.push_back(v);
    v <<= 2;
  }
  // The root starts assigned to processor 0 with depth 0.
  add_potential(0, dag.root(), NodeStatus::assigned);
  assigned_[0] = dag.root();
}

BigInt TraceReplayer::potential_of(NodeRef u) const {
  return pow4_[potential_exponent(weight(u), status_[u])];
}

BigInt TraceReplayer::phi_d() const {
  BigInt acc = 0;
  for (std::uint32_t p = 0; p < processors(); ++p)
    if (deque_nonempty(p)) acc += phi_proc_[p];
  return acc;
}

PotentialLedger TraceReplayer::full_ledger() const {
  PotentialLedger led;
  std::vector<BigInt> per_proc(processors(), BigInt(0));
  for (std::uint32_t p = 0; p < processors(); ++p) {
    if (valid_node(assigned_[p])) per_proc[p] += potential_of(assigned_[p]);
    for (NodeRef u : deques_[p].bottom_to_top())
      per_proc[p] += potential_of(u);
  }
  for (std::uint32_t p = 0; p < processors(); ++p) {
    led.phi_total += per_proc[p];
    if (deque_nonempty(p))
      led.phi_d += per_proc[p];
    else
      led.phi_a += per_proc[p];
  }
  return led;
}

BigInt TraceReplayer::remove_potential(std::uint32_t proc, NodeRef u) {
  BigInt phi = potential_of(u);
  phi_proc_[proc] -= phi;
  phi_total_ -= phi;
  return phi;
}

BigInt TraceReplayer::add_potential(std::uint32_t proc, NodeRef u,
                                    NodeStatus s) {
  status_[u] = s;
  BigInt phi = potential_of(u);
  phi_proc_[proc] += phi;
  phi_total_ += phi;
  return phi;
}

void TraceReplayer::advance_step(std::vector<Event>* events) {
  WSLAB_REQUIRE(!done(), "trace replay past the final step");
  idle_in_step_ = 0;
  const auto& records = trace_->records;
  const std::uint64_t step = records[next_record_].step;

  for (; next_record_ < records.size() && records[next_record_].step == step;
       ++next_record_) {
    const IterationRecord& rec = records[next_record_];
    const std::uint32_t p = rec.proc;
    ReferenceSplitDeque& deque = deques_[p];

    if (rec.saw_targeted) {
      if (deque.private_size() > 0) {
        NodeRef moved = deque.private_part().front();
        BigInt before = remove_potential(p, moved);
        deque.update_bottom();
        BigInt after = add_potential(p, moved, NodeStatus::stealable);
        if (events)
          events->push_back({Event::Kind::stealable, step, p, moved,
                             weight(moved), 0, before, before - after});
      } else {
        deque.update_bottom();
      }
    }

    if (!rec.idle) {
      NodeRef u = rec.executed;
      WSLAB_REQUIRE(u == assigned_[p], "trace executed node != assigned node");
      WSLAB_REQUIRE(status_[u] == NodeStatus::assigned,
                    "executed node was not assigned");
      BigInt phi_u = remove_potential(p, u);
      status_[u] = NodeStatus::executed;
      BigInt drop = phi_u;
      for (std::uint32_t i = 0; i < rec.enabled_count; ++i)
        depth_[rec.enabled[i]] = depth_[u] + 1;
      if (rec.enabled_count > 0) {
        assigned_[p] = rec.enabled[0];
        drop -= add_potential(p, rec.enabled[0], NodeStatus::assigned);
        if (rec.enabled_count == 2) {
          deque.push(rec.enabled[1]);
          drop -= add_potential(p, rec.enabled[1],
                                NodeStatus::private_queued);
        }
        if (events)
          events->push_back({Event::Kind::executed, step, p, u, weight(u),
                             rec.enabled_count, phi_u, drop});
      } else {
        if (events)
          events->push_back({Event::Kind::executed, step, p, u, weight(u), 0,
                             phi_u, drop});
        NodeRef r = deque.pop();
        WSLAB_REQUIRE(r == rec.pop_result, "trace pop result diverged");
        if (r == kRace) {
          r = deque.pop_bottom();
          WSLAB_REQUIRE(r == rec.pop_bottom_result,
                        "trace popBottom result diverged");
        }
        if (valid_node(r)) {
          BigInt before = remove_potential(p, r);
          BigInt after = add_potential(p, r, NodeStatus::assigned);
          if (events)
            events->push_back({Event::Kind::assigned, step, p, r, weight(r),
                               0, before, before - after});
        }
        assigned_[p] = r;
      }
    } else {
      idle_in_step_ += 1;
      if (rec.victim != kNone) {
        NodeRef r = deques_[rec.victim].pop_top();
        WSLAB_REQUIRE(r == rec.steal_result, "trace popTop result diverged");
        if (valid_node(r)) {
          BigInt before = remove_potential(rec.victim, r);
          BigInt after = add_potential(p, r, NodeStatus::assigned);
          if (events)
            events->push_back({Event::Kind::assigned, step, p, r, weight(r),
                               0, before, before - after});
        }
        assigned_[p] = r;
      }
    }
  }
  boundary_step_ = step + 1;
}

PotentialLedger ledger_at(const CompDag& dag, const Trace& trace,
                          std::uint64_t step) {
  WSLAB_REQUIRE(step <= trace.steps, "ledger_at: step out of range");
  TraceReplayer rep(dag, trace);
  while (!rep.done() && rep.boundary() < step) rep.advance_step();
  return rep.full_ledger();
}

AnalyzerReport check_drops(const CompDag& dag, const Trace& trace) {
  AnalyzerReport report;
  TraceReplayer rep(dag, trace);
  std::vector<TraceReplayer::Event> events;
  BigInt prev_phi = rep.phi_total();
  while (!rep.done()) {
    events.clear();
    rep.advance_step(&events);
    report.steps_checked += 1;
    for (const auto& e : events) {
      report.events_checked += 1;
      switch (e.kind) {
        case TraceReplayer::Event::Kind::assigned:
        case TraceReplayer::Event::Kind::stealable:
          // drop >= (3/4) phi
          if (4 * e.drop < 3 * e.phi_before)
            report.violations.push_back(
                {e.step, e.proc,
                 e.kind == TraceReplayer::Event::Kind::assigned
                     ? "drop-assigned"
                     : "drop-stealable",
                 "node " + std::to_string(e.node) + " w=" +
                     std::to_string(e.weight) + " dropped less than 3/4 phi"});
          break;
        case TraceReplayer::Event::Kind::executed: {
          // exact: phi, (63/64) phi, (47/64) phi for 0/1/2 children
          const int num[3] = {64, 63, 47};
          if (64 * e.drop != num[e.children] * e.phi_before)
            report.violations.push_back(
                {e.step, e.proc, "drop-executed",
                 "node " + std::to_string(e.node) + " w=" +
                     std::to_string(e.weight) + " children=" +
                     std::to_string(e.children) +
                     " drop is not the exact fraction"});
          break;
        }
      }
    }
    if (rep.phi_total() > prev_phi)
      report.violations.push_back({rep.boundary(), kNone, "phi-increase",
                                   "total potential increased across a step"});
    prev_phi = rep.phi_total();
  }
  if (rep.phi_total() != 0)
    report.violations.push_back(
        {trace.steps, kNone, "phi-terminal",
         "potential nonzero after the computation terminated"});
  return report;
}

AnalyzerReport check_top_heavy(const CompDag& dag, const Trace& trace) {
  AnalyzerReport report;
  TraceReplayer rep(dag, trace);
  auto scan = [&]() {
    for (std::uint32_t p = 0; p < rep.processors(); ++p) {
      if (!rep.deque_nonempty(p)) continue;
      BigInt top = rep.potential_of(rep.topmost(p));
      // phi(top) >= (4/5) Phi(p)
      if (5 * top < 4 * rep.phi_proc(p))
        report.violations.push_back(
            {rep.boundary(), p, "top-heavy",
             "topmost node holds less than 4/5 of the processor potential"});
    }
  };
  scan();
  while (!rep.done()) {
    rep.advance_step();
    report.steps_checked += 1;
    scan();
  }
  return report;
}

AnalyzerReport check_structural(const CompDag& dag, const Trace& trace) {
  AnalyzerReport report;
  TraceReplayer rep(dag, trace);
  auto scan = [&]() {
    for (std::uint32_t p = 0; p < rep.processors(); ++p) {
      auto chain = rep.deque_bottom_to_top(p);
      if (chain.empty()) continue;
      NodeRef v0 = rep.assigned(p);
      if (valid_node(v0) && rep.weight(v0) > rep.weight(chain[0]))
        report.violations.push_back(
            {rep.boundary(), p, "structural",
             "assigned node outweighs the deque bottom"});
      for (std::size_t i = 1; i < chain.size(); ++i)
        if (rep.weight(chain[i - 1]) >= rep.weight(chain[i]))
          report.violations.push_back(
              {rep.boundary(), p, "structural",
               "deque weights not strictly increasing bottom to top"});
    }
  };
  scan();
  while (!rep.done()) {
    rep.advance_step();
    report.steps_checked += 1;
    scan();
  }
  return report;
}

PhaseReport check_phase_decrease(const CompDag& dag, const Trace& trace) {
  WSLAB_REQUIRE(trace.processors >= 2, "phase check needs P >= 2");
  TraceReplayer rep(dag, trace);
  // Collect per-boundary potentials and per-step idle counts.
  std::vector<BigInt> phi;      // boundary b = state before step b
  std::vector<BigInt> phi_d;
  std::vector<std::uint64_t> idles;
  phi.push_back(rep.phi_total());
  phi_d.push_back(rep.phi_d());
  while (!rep.done()) {
    rep.advance_step();
    idles.push_back(rep.idle_in_step());
    phi.push_back(rep.phi_total());
    phi_d.push_back(rep.phi_d());
  }
  const std::uint64_t steps = idles.size();
  const std::uint64_t P = trace.processors;

  PhaseReport out;
  std::uint64_t start = 0;
  std::uint64_t acc = 0;
  for (std::uint64_t s = 0; s < steps; ++s) {
    acc += idles[s];
    if (acc >= P) {
      // Phase [start, s] closed; measure the drop with a 2-step grace.
      std::uint64_t end_boundary = std::min(s + 3, steps);
      BigInt drop = phi[start] - phi[end_boundary];
      out.phases += 1;
      if (10 * drop >= 3 * phi_d[start]) out.successes += 1;
      start = s + 1;
      acc = 0;
    }
  }
  return out;
}

double balls_bins_trial(std::span<const double> weights, double beta,
                        std::uint64_t balls, std::uint64_t trials,
                        std::uint64_t seed) {
  const std::size_t bins = weights.size();
  WSLAB_REQUIRE(bins >= 1, "balls_bins_trial: need at least one bin");
  WSLAB_REQUIRE(balls >= bins, "balls_bins_trial: need balls >= bins");
  WSLAB_REQUIRE(beta > 0.0 && beta < 1.0, "balls_bins_trial: beta in (0,1)");
  double total = 0;
  for (double w : weights) total += w;
  const double target = beta * total;
  Rng rng(seed);
  std::vector<std::uint8_t> hit(bins);
  std::uint64_t successes = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    std::fill(hit.begin(), hit.end(), 0);
    for (std::uint64_t b = 0; b < balls; ++b) hit[rng.bounded(bins)] = 1;
    double x = 0;
    for (std::size_t i = 0; i < bins; ++i)
      if (hit[i]) x += weights[i];
    if (x >= target) successes += 1;
  }
  return double(successes) / double(trials);
}

}  // namespace wslab
