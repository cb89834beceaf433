#include "wslab/dag.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "wslab/rng.hpp"

namespace wslab {

DagBuilder::DagBuilder(std::uint64_t expected_nodes) {
  out_degree_.reserve(expected_nodes);
  edges_.reserve(expected_nodes);
}

NodeRef DagBuilder::add_node() {
  WSLAB_REQUIRE(out_degree_.size() < kMaxNodeCount, "dag node count overflow");
  out_degree_.push_back(0);
  return static_cast<NodeRef>(out_degree_.size() - 1);
}

void DagBuilder::add_child(NodeRef parent, NodeRef child) {
  WSLAB_REQUIRE(parent < out_degree_.size() && child < out_degree_.size(),
                "add_child: node id out of range");
  WSLAB_REQUIRE(out_degree_[parent] < 255, "add_child: out-degree cap");
  out_degree_[parent]++;
  edges_.emplace_back(parent, child);
}

CompDag DagBuilder::build() {
  const std::uint32_t n = node_count();
  CompDag dag;
  dag.child_count_ = out_degree_;
  dag.first_child_.assign(n + 1, 0);
  for (std::uint32_t i = 0; i < n; ++i)
    dag.first_child_[i + 1] = dag.first_child_[i] + out_degree_[i];
  dag.child_storage_.resize(edges_.size());
  {
    // Stable grouping by parent keeps per-node child order = insertion order.
    std::vector<std::uint32_t> cursor(dag.first_child_.begin(),
                                      dag.first_child_.end() - 1);
    for (const auto& [p, c] : edges_) dag.child_storage_[cursor[p]++] = c;
  }
  dag.parent_count_.assign(n, 0);
  for (const auto& [p, c] : edges_) {
    WSLAB_REQUIRE(dag.parent_count_[c] < 255, "in-degree cap exceeded");
    dag.parent_count_[c]++;
  }
  dag.root_ = kNone;
  for (std::uint32_t i = 0; i < n; ++i) {
    if (dag.parent_count_[i] == 0) {
      dag.root_ = i;
      break;
    }
  }
  // Longest path over the processed part of a Kahn traversal; on a cyclic
  // graph this under-counts, which validate() reports separately.
  {
    std::vector<std::uint32_t> indeg(dag.parent_count_.begin(),
                                     dag.parent_count_.end());
    std::vector<std::uint32_t> dist(n, 1);
    std::vector<NodeRef> queue;
    for (std::uint32_t i = 0; i < n; ++i)
      if (indeg[i] == 0) queue.push_back(i);
    std::uint32_t best = n == 0 ? 0 : 1;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      NodeRef u = queue[head];
      best = std::max(best, dist[u]);
      for (NodeRef c : dag.children(u)) {
        dist[c] = std::max(dist[c], dist[u] + 1);
        if (--indeg[c] == 0) queue.push_back(c);
      }
    }
    dag.t_inf_ = best;
  }
  return dag;
}

CompDag generate_regular(std::uint32_t depth) {
  WSLAB_REQUIRE(depth < 31, "generate_regular: node count overflows");
  const std::uint64_t n64 = (1ull << (depth + 1)) - 1;
  WSLAB_REQUIRE(n64 < kMaxNodeCount, "generate_regular: node count overflows");
  const std::uint32_t n = static_cast<std::uint32_t>(n64);
  const std::uint32_t internal = n / 2;  // nodes with two children

  CompDag dag;
  dag.child_count_.assign(n, 0);
  dag.parent_count_.assign(n, 1);
  dag.parent_count_[0] = 0;
  dag.first_child_.assign(n + 1, 0);
  dag.child_storage_.resize(n == 0 ? 0 : n - 1);
  // Heap layout: children of i are 2i+1 and 2i+2, stored contiguously.
  for (std::uint32_t i = 0; i < internal; ++i) {
    dag.child_count_[i] = 2;
    dag.child_storage_[2 * i] = 2 * i + 1;
    dag.child_storage_[2 * i + 1] = 2 * i + 2;
  }
  for (std::uint32_t i = 0; i < n; ++i)
    dag.first_child_[i + 1] = dag.first_child_[i] + dag.child_count_[i];
  dag.root_ = 0;
  dag.t_inf_ = depth + 1;
  return dag;
}

namespace {

struct IrregularGen {
  DagBuilder builder;
  std::vector<std::uint32_t> node_depth;
  std::uint32_t max_depth;
  Rng rng;

  IrregularGen(std::uint32_t d, std::uint64_t seed) : max_depth(d), rng(seed) {}

  NodeRef make_node(std::uint32_t depth) {
    NodeRef u = builder.add_node();
    node_depth.push_back(depth);
    return u;
  }

  std::uint32_t draw_gap(double lambda) {
    double x = rng.exponential(lambda);
    double g = std::ceil(x);
    if (g < 1.0) return 1;
    if (g > static_cast<double>(max_depth) + 1.0)
      return max_depth + 1;  // clamp; anything this large truncates the run
    return static_cast<std::uint32_t>(g);
  }

  // Grows the run that starts at node u: a unary chain down to the next fork
  // instruction, which sits gap-1 levels below a run start of gap g (so
  // gap 1 makes u itself the fork).  Runs truncate at max_depth.
  void grow_run(NodeRef u, double lambda) {
    std::uint32_t gap = draw_gap(lambda);
    NodeRef v = u;
    for (std::uint32_t i = 1; i < gap; ++i) {
      if (node_depth[v] == max_depth) return;
      NodeRef w = make_node(node_depth[v] + 1);
      builder.add_child(v, w);
      v = w;
    }
    if (node_depth[v] + 1 > max_depth) return;  // no room for children
    NodeRef a = make_node(node_depth[v] + 1);
    NodeRef b = make_node(node_depth[v] + 1);
    builder.add_child(v, a);
    builder.add_child(v, b);
    grow_run(a, lambda);
    grow_run(b, lambda);
  }
};

}  // namespace

CompDag generate_irregular(std::uint32_t depth, double lambda,
                           std::uint64_t seed) {
  WSLAB_REQUIRE(lambda > 0.0, "generate_irregular: lambda must be positive");
  IrregularGen gen(depth, seed);
  NodeRef root = gen.make_node(0);
  gen.grow_run(root, lambda);
  return gen.builder.build();
}

CompDag generate(const DagSpec& spec) {
  if (spec.kind == DagSpec::Kind::regular) return generate_regular(spec.depth);
  return generate_irregular(spec.depth, spec.lambda, spec.seed);
}

std::string DagViolation::describe() const {
  switch (kind) {
    case Kind::out_degree:
      return "node " + std::to_string(node) + " has out-degree > 2";
    case Kind::no_root: return "no node with in-degree 0";
    case Kind::multiple_roots:
      return "extra root at node " + std::to_string(node);
    case Kind::cycle: return "cycle through node " + std::to_string(node);
    case Kind::unreachable:
      return "node " + std::to_string(node) + " unreachable from root";
  }
  return "unknown violation";
}

std::vector<DagViolation> validate(const CompDag& dag) {
  std::vector<DagViolation> out;
  const std::uint32_t n = dag.node_count();

  for (std::uint32_t i = 0; i < n; ++i)
    if (dag.out_degree(i) > 2)
      out.push_back({DagViolation::Kind::out_degree, i});

  NodeRef root = kNone;
  for (std::uint32_t i = 0; i < n; ++i) {
    if (dag.in_degree(i) == 0) {
      if (root == kNone)
        root = i;
      else
        out.push_back({DagViolation::Kind::multiple_roots, i});
    }
  }
  if (root == kNone && n > 0)
    out.push_back({DagViolation::Kind::no_root, kNone});

  // Kahn traversal: nodes left unprocessed sit on a cycle.
  std::vector<std::uint32_t> indeg(n);
  for (std::uint32_t i = 0; i < n; ++i) indeg[i] = dag.in_degree(i);
  std::vector<NodeRef> queue;
  for (std::uint32_t i = 0; i < n; ++i)
    if (indeg[i] == 0) queue.push_back(i);
  std::size_t processed = 0;
  for (std::size_t head = 0; head < queue.size(); ++head, ++processed) {
    for (NodeRef c : dag.children(queue[head]))
      if (--indeg[c] == 0) queue.push_back(c);
  }
  if (processed < n) {
    for (std::uint32_t i = 0; i < n; ++i)
      if (indeg[i] != 0) {
        out.push_back({DagViolation::Kind::cycle, i});
        break;
      }
  }

  if (root != kNone && processed == n) {
    std::vector<std::uint8_t> seen(n, 0);
    std::vector<NodeRef> stack{root};
    seen[root] = 1;
    while (!stack.empty()) {
      NodeRef u = stack.back();
      stack.pop_back();
      for (NodeRef c : dag.children(u))
        if (!seen[c]) {
          seen[c] = 1;
          stack.push_back(c);
        }
    }
    for (std::uint32_t i = 0; i < n; ++i)
      if (!seen[i]) {
        out.push_back({DagViolation::Kind::unreachable, i});
        break;
      }
  }
  return out;
}

DagMeasure measure(const CompDag& dag) {
  const std::uint32_t n = dag.node_count();
  std::vector<std::uint32_t> indeg(n);
  for (std::uint32_t i = 0; i < n; ++i) indeg[i] = dag.in_degree(i);
  std::vector<std::uint32_t> dist(n, 1);
  std::vector<NodeRef> queue;
  queue.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i)
    if (indeg[i] == 0) queue.push_back(i);
  std::uint32_t best = n == 0 ? 0 : 1;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    NodeRef u = queue[head];
    best = std::max(best, dist[u]);
    for (NodeRef c : dag.children(u)) {
      dist[c] = std::max(dist[c], dist[u] + 1);
      if (--indeg[c] == 0) queue.push_back(c);
    }
  }
  WSLAB_REQUIRE(queue.size() == n, "measure: dag has a cycle");
  return {n, best};
}

void CompDag::serialize(std::ostream& out) const {
  out << "dag " << t1() << ' ' << t_inf() << '\n';
  for (std::uint32_t i = 0; i < node_count(); ++i) {
    out << i;
    auto cs = children(i);
    for (std::size_t k = 0; k < 2; ++k) {
      if (k < cs.size())
        out << ' ' << cs[k];
      else
        out << " -";
    }
    out << '\n';
  }
}

CompDag CompDag::parse(std::istream& in) {
  std::string tag;
  std::uint64_t n = 0;
  std::uint32_t span = 0;
  in >> tag >> n >> span;
  WSLAB_REQUIRE(in && tag == "dag", "dag parse: bad header");
  WSLAB_REQUIRE(n < kMaxNodeCount, "dag parse: node count overflow");
  DagBuilder builder(n);
  for (std::uint64_t i = 0; i < n; ++i) builder.add_node();
  for (std::uint64_t i = 0; i < n; ++i) {
    std::uint64_t id;
    std::string c0, c1;
    in >> id >> c0 >> c1;
    WSLAB_REQUIRE(in && id == i, "dag parse: bad node line");
    for (const std::string& c : {c0, c1}) {
      if (c == "-") continue;
      std::uint64_t child = std::stoull(c);
      WSLAB_REQUIRE(child < n, "dag parse: child id out of range");
      builder.add_child(static_cast<NodeRef>(i), static_cast<NodeRef>(child));
    }
  }
  return builder.build();
}

}  // namespace wslab
