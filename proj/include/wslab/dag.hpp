#ifndef WSLAB_DAG_HPP
#define WSLAB_DAG_HPP

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "wslab/core.hpp"

namespace wslab {

// Immutable computation dag.  Each node is an instruction with at most two
// children; t1 is the node count (total work) and t_inf the number of nodes
// on a longest directed path (span).  Storage is index-based and dense:
// every node's children live contiguously in one flat array, so a dag with
// 2^26 nodes stays within a few hundred MB.
//
// A CompDag is immutable after construction and safe for concurrent reads.
class CompDag {
 public:
  std::uint32_t node_count() const {
    return static_cast<std::uint32_t>(child_count_.size());
  }
  std::uint64_t t1() const { return node_count(); }
  std::uint32_t t_inf() const { return t_inf_; }
  NodeRef root() const { return root_; }

  std::span<const NodeRef> children(NodeRef u) const {
    return {child_storage_.data() + first_child_[u], child_count_[u]};
  }
  std::uint8_t out_degree(NodeRef u) const { return child_count_[u]; }
  std::uint8_t in_degree(NodeRef u) const { return parent_count_[u]; }

  // Line-oriented text format: `dag <t1> <t_inf>` then `<id> <c0|-> <c1|->`
  // per node.  Used by the CLI to cache generated dags.
  void serialize(std::ostream& out) const;
  static CompDag parse(std::istream& in);

 private:
  friend class DagBuilder;
  friend CompDag generate_regular(std::uint32_t);
  std::vector<NodeRef> child_storage_;
  std::vector<std::uint32_t> first_child_;
  std::vector<std::uint8_t> child_count_;
  std::vector<std::uint8_t> parent_count_;
  NodeRef root_ = kNone;
  std::uint32_t t_inf_ = 0;
};

// Mutable construction surface.  Deliberately permissive: it will happily
// record out-degree ~3, several roots or a cycle, so that validate() has
// something to report; execution paths require validate() to pass first.
class DagBuilder {
 public:
  explicit DagBuilder(std::uint64_t expected_nodes = 0);

  NodeRef add_node();
  void add_child(NodeRef parent, NodeRef child);
  std::uint32_t node_count() const {
    return static_cast<std::uint32_t>(out_degree_.size());
  }

  CompDag build();

 private:
  std::vector<std::pair<NodeRef, NodeRef>> edges_;
  std::vector<std::uint8_t> out_degree_;
};

struct DagSpec {
  enum class Kind { regular, irregular };
  Kind kind = Kind::regular;
  std::uint32_t depth = 0;
  double lambda = 0.05;     // irregular only
  std::uint64_t seed = 0;   // irregular only
};

// Full binary out-tree of fork depth `depth`: 2^(depth+1) - 1 nodes, span
// depth + 1.  Deterministic; rejects depths whose node count overflows the
// handle space.
CompDag generate_regular(std::uint32_t depth);

// Fork tree with exponentially distributed fork spacing: along any path the
// depth distance between consecutive fork instructions is max(1, ceil(X))
// with X ~ Exponential(lambda), so large lambda degenerates to the regular
// tree.  Node depth never exceeds `depth`; reproducible for a fixed seed.
CompDag generate_irregular(std::uint32_t depth, double lambda,
                           std::uint64_t seed);

CompDag generate(const DagSpec& spec);

struct DagViolation {
  enum class Kind { out_degree, no_root, multiple_roots, cycle, unreachable };
  Kind kind;
  NodeRef node;  // offending node where applicable, else kNone
  std::string describe() const;
};

// Checks all structural invariants; pure, never throws on bad structure.
std::vector<DagViolation> validate(const CompDag& dag);

struct DagMeasure {
  std::uint64_t t1;
  std::uint32_t t_inf;
};

// Recomputes (t1, t_inf) by topological-order dynamic programming,
// independent of the values cached at construction.
DagMeasure measure(const CompDag& dag);

inline const char* kind_name(DagSpec::Kind k) {
  return k == DagSpec::Kind::regular ? "regular" : "irregular";
}

}  // namespace wslab

#endif  // WSLAB_DAG_HPP
