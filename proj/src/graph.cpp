#include "gaussdag/graph.hpp"

#include "gaussdag/errors.hpp"

#include <algorithm>
#include <set>
#include <tuple>

namespace gaussdag {

// Unchecked mutation; every public path re-validates acyclicity before the
// edited value escapes.
class DagEditor {
 public:
  explicit DagEditor(Dag d) : dag_(std::move(d)) {}

  void set(int u, int v) {
    auto& w = dag_.bits_[dag_.row_offset(u) + (v >> 6)];
    const std::uint64_t mask = 1ULL << (v & 63);
    if (!(w & mask)) {
      w |= mask;
      ++dag_.num_edges_;
    }
  }
  void clear(int u, int v) {
    auto& w = dag_.bits_[dag_.row_offset(u) + (v >> 6)];
    const std::uint64_t mask = 1ULL << (v & 63);
    if (w & mask) {
      w &= ~mask;
      --dag_.num_edges_;
    }
  }
  bool acyclic() const;
  Dag release() && { return std::move(dag_); }
  const Dag& view() const { return dag_; }

 private:
  Dag dag_;
};

namespace {

// Kahn peeling on the bit matrix: O(q²) word operations.
bool kahn_acyclic(const Dag& d, std::vector<int>* order) {
  const int q = d.q();
  std::vector<int> indeg(static_cast<std::size_t>(q), 0);
  for (int u = 0; u < q; ++u)
    for (int v = 0; v < q; ++v)
      if (d.has_edge(u, v)) ++indeg[static_cast<std::size_t>(v)];
  std::vector<int> stack;
  for (int v = q - 1; v >= 0; --v)
    if (indeg[static_cast<std::size_t>(v)] == 0) stack.push_back(v);
  int seen = 0;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    ++seen;
    if (order) order->push_back(u);
    for (int v = q - 1; v >= 0; --v)
      if (d.has_edge(u, v) && --indeg[static_cast<std::size_t>(v)] == 0) stack.push_back(v);
  }
  return seen == q;
}

void check_node(const Dag& d, int j) {
  if (j < 0 || j >= d.q()) throw IndexError("node index " + std::to_string(j) + " out of range");
}

void check_adjacency_shape(const AdjacencyMatrix& adj) {
  if (adj.rows() != adj.cols()) throw ShapeError("adjacency matrix is not square");
  for (Eigen::Index u = 0; u < adj.rows(); ++u)
    for (Eigen::Index v = 0; v < adj.cols(); ++v) {
      const int x = adj(u, v);
      if (x != 0 && x != 1) throw ShapeError("adjacency matrix is not binary");
      if (u == v && x != 0) throw ShapeError("adjacency matrix has a nonzero diagonal");
    }
}

}  // namespace

bool DagEditor::acyclic() const { return kahn_acyclic(dag_, nullptr); }

Dag::Dag(int q) : q_(q), words_((q + 63) / 64) {
  if (q < 0) throw ShapeError("negative node count");
  bits_.assign(static_cast<std::size_t>(q) * static_cast<std::size_t>(words_), 0);
}

Dag Dag::from_adjacency(const AdjacencyMatrix& adj) {
  check_adjacency_shape(adj);
  DagEditor ed{Dag(static_cast<int>(adj.rows()))};
  for (Eigen::Index u = 0; u < adj.rows(); ++u)
    for (Eigen::Index v = 0; v < adj.cols(); ++v)
      if (adj(u, v)) ed.set(static_cast<int>(u), static_cast<int>(v));
  if (!ed.acyclic()) throw CycleError("adjacency matrix contains a directed cycle");
  return std::move(ed).release();
}

Dag Dag::from_edges(int q, const std::vector<std::pair<int, int>>& edges) {
  DagEditor ed{Dag(q)};
  for (auto [u, v] : edges) {
    if (u < 0 || u >= q || v < 0 || v >= q) throw IndexError("edge endpoint out of range");
    if (u == v) throw ShapeError("self-loop in edge list");
    ed.set(u, v);
  }
  if (!ed.acyclic()) throw CycleError("edge list contains a directed cycle");
  return std::move(ed).release();
}

std::vector<int> Dag::parents(int j) const {
  check_node(*this, j);
  std::vector<int> out;
  for (int u = 0; u < q_; ++u)
    if (has_edge(u, j)) out.push_back(u);
  return out;
}

std::vector<int> Dag::children(int u) const {
  check_node(*this, u);
  std::vector<int> out;
  for (int v = 0; v < q_; ++v)
    if (has_edge(u, v)) out.push_back(v);
  return out;
}

std::vector<std::pair<int, int>> Dag::edges() const {
  std::vector<std::pair<int, int>> out;
  for (int u = 0; u < q_; ++u)
    for (int v = 0; v < q_; ++v)
      if (has_edge(u, v)) out.emplace_back(u, v);
  return out;
}

AdjacencyMatrix Dag::adjacency() const {
  AdjacencyMatrix a = AdjacencyMatrix::Zero(q_, q_);
  for (int u = 0; u < q_; ++u)
    for (int v = 0; v < q_; ++v) a(u, v) = has_edge(u, v) ? 1 : 0;
  return a;
}

std::string Dag::bitstring() const {
  std::string s;
  s.reserve(static_cast<std::size_t>(q_) * static_cast<std::size_t>(q_));
  for (int u = 0; u < q_; ++u)
    for (int v = 0; v < q_; ++v) s.push_back(has_edge(u, v) ? '1' : '0');
  return s;
}

std::vector<int> Dag::topological_order() const {
  std::vector<int> order;
  kahn_acyclic(*this, &order);
  return order;
}

std::strong_ordering operator<=>(const Dag& a, const Dag& b) {
  if (auto c = a.q_ <=> b.q_; c != 0) return c;
  return a.bitstring() <=> b.bitstring();
}

std::size_t DagHash::operator()(const Dag& d) const {
  std::uint64_t h = splitmix64(static_cast<std::uint64_t>(d.q()));
  for (std::uint64_t w : d.words()) h = splitmix64(h ^ w);
  return static_cast<std::size_t>(h);
}

bool is_acyclic(const AdjacencyMatrix& adj) {
  check_adjacency_shape(adj);
  DagEditor ed{Dag(static_cast<int>(adj.rows()))};
  for (Eigen::Index u = 0; u < adj.rows(); ++u)
    for (Eigen::Index v = 0; v < adj.cols(); ++v)
      if (adj(u, v)) ed.set(static_cast<int>(u), static_cast<int>(v));
  return ed.acyclic();
}

std::vector<int> parents(const Dag& dag, int j) { return dag.parents(j); }

AdjacencyMatrix skeleton(const Dag& dag) {
  const AdjacencyMatrix a = dag.adjacency();
  AdjacencyMatrix s = a + a.transpose();
  return s.cwiseMin(1);
}

std::vector<std::vector<bool>> reachability(const Dag& dag) {
  const int q = dag.q();
  std::vector<std::vector<bool>> reach(static_cast<std::size_t>(q), std::vector<bool>(static_cast<std::size_t>(q), false));
  const std::vector<int> order = dag.topological_order();
  // Children come later in the order, so walking backwards sees them first.
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const int u = *it;
    auto& row = reach[static_cast<std::size_t>(u)];
    row[static_cast<std::size_t>(u)] = true;
    for (int c = 0; c < q; ++c) {
      if (!dag.has_edge(u, c)) continue;
      const auto& crow = reach[static_cast<std::size_t>(c)];
      for (int x = 0; x < q; ++x)
        if (crow[static_cast<std::size_t>(x)]) row[static_cast<std::size_t>(x)] = true;
    }
  }
  return reach;
}

const char* to_string(OpKind kind) {
  switch (kind) {
    case OpKind::Insert: return "InsertD";
    case OpKind::Delete: return "DeleteD";
    case OpKind::Reverse: return "ReverseD";
  }
  return "?";
}

Operator inverse(const Operator& op) {
  switch (op.kind) {
    case OpKind::Insert: return {OpKind::Delete, op.u, op.v};
    case OpKind::Delete: return {OpKind::Insert, op.u, op.v};
    case OpKind::Reverse: return {OpKind::Reverse, op.v, op.u};
  }
  return op;
}

const Operator& PossibleOperators::operator[](std::size_t i) const {
  if (i < insert.size()) return insert[i];
  i -= insert.size();
  if (i < remove.size()) return remove[i];
  return reverse[i - remove.size()];
}

PossibleOperators enumerate_possible_operators(const Dag& dag) {
  PossibleOperators ops;
  const int q = dag.q();
  for (int u = 0; u < q; ++u)
    for (int v = 0; v < q; ++v) {
      if (u == v) continue;
      if (dag.has_edge(u, v)) {
        ops.remove.push_back({OpKind::Delete, u, v});
        ops.reverse.push_back({OpKind::Reverse, u, v});
      } else if (!dag.has_edge(v, u)) {
        ops.insert.push_back({OpKind::Insert, u, v});
      }
    }
  return ops;
}

Dag apply_operator(const Dag& dag, const Operator& op) {
  const int q = dag.q();
  if (op.u < 0 || op.u >= q || op.v < 0 || op.v >= q || op.u == op.v)
    throw NotApplicableError("operator endpoints are invalid for this graph");
  DagEditor ed{dag};
  switch (op.kind) {
    case OpKind::Insert:
      if (dag.has_edge(op.u, op.v) || dag.has_edge(op.v, op.u))
        throw NotApplicableError("InsertD on a pair that is already joined");
      ed.set(op.u, op.v);
      break;
    case OpKind::Delete:
      if (!dag.has_edge(op.u, op.v)) throw NotApplicableError("DeleteD on a missing edge");
      ed.clear(op.u, op.v);
      return std::move(ed).release();
    case OpKind::Reverse:
      if (!dag.has_edge(op.u, op.v)) throw NotApplicableError("ReverseD on a missing edge");
      ed.clear(op.u, op.v);
      ed.set(op.v, op.u);
      break;
  }
  if (!ed.acyclic()) throw CycleError("operator result contains a directed cycle");
  return std::move(ed).release();
}

namespace {

// Validity through the reachability closure. Equivalent to applying each
// operator and testing acyclicity, but O(q³) for the whole set.
template <typename Visit>
void for_each_valid(const Dag& dag, Visit&& visit) {
  const int q = dag.q();
  const auto reach = reachability(dag);
  const PossibleOperators ops = enumerate_possible_operators(dag);
  for (const Operator& op : ops.insert)
    if (!reach[static_cast<std::size_t>(op.v)][static_cast<std::size_t>(op.u)]) visit(op);
  for (const Operator& op : ops.remove) visit(op);
  for (const Operator& op : ops.reverse) {
    // u → v can be flipped unless another route u → c ⇝ v exists.
    bool other_path = false;
    for (int c = 0; c < q && !other_path; ++c)
      if (c != op.v && dag.has_edge(op.u, c) && reach[static_cast<std::size_t>(c)][static_cast<std::size_t>(op.v)])
        other_path = true;
    if (!other_path) visit(op);
  }
}

}  // namespace

std::vector<Operator> valid_operators(const Dag& dag) {
  std::vector<Operator> out;
  for_each_valid(dag, [&](const Operator& op) { out.push_back(op); });
  return out;
}

std::size_t count_valid_operators(const Dag& dag) {
  std::size_t n = 0;
  for_each_valid(dag, [&](const Operator&) { ++n; });
  return n;
}

Proposal propose_exact(const Dag& dag, Rng& rng) {
  if (dag.q() < 2) throw NoMoveError("no operators exist on fewer than two nodes");
  const std::vector<Operator> ops = valid_operators(dag);
  const Operator op = ops[rng.uniform_index(ops.size())];
  return {apply_operator(dag, op), op, ops.size()};
}

Proposal propose_fast(const Dag& dag, Rng& rng) {
  if (dag.q() < 2) throw NoMoveError("no operators exist on fewer than two nodes");
  const PossibleOperators ops = enumerate_possible_operators(dag);
  for (;;) {
    const Operator op = ops[rng.uniform_index(ops.size())];
    try {
      return {apply_operator(dag, op), op, 0};
    } catch (const CycleError&) {
      continue;
    }
  }
}

std::vector<Dag> enumerate_all_dags(int q) {
  if (q < 1) throw DomainError("enumerate_all_dags requires q >= 1");
  if (q > 4) throw TooLargeError("enumerate_all_dags is limited to q <= 4");
  std::vector<std::pair<int, int>> slots;
  for (int u = 0; u < q; ++u)
    for (int v = 0; v < q; ++v)
      if (u != v) slots.emplace_back(u, v);
  std::vector<Dag> out;
  const std::uint32_t total = 1U << slots.size();
  for (std::uint32_t mask = 0; mask < total; ++mask) {
    AdjacencyMatrix a = AdjacencyMatrix::Zero(q, q);
    for (std::size_t k = 0; k < slots.size(); ++k)
      if (mask & (1U << k)) a(slots[k].first, slots[k].second) = 1;
    if (is_acyclic(a)) out.push_back(Dag::from_adjacency(a));
  }
  return out;
}

namespace {
std::set<std::tuple<int, int, int>> v_structures(const Dag& d) {
  std::set<std::tuple<int, int, int>> out;
  for (int w = 0; w < d.q(); ++w) {
    const auto pa = d.parents(w);
    for (std::size_t i = 0; i < pa.size(); ++i)
      for (std::size_t k = i + 1; k < pa.size(); ++k) {
        const int a = pa[i], b = pa[k];
        if (!d.has_edge(a, b) && !d.has_edge(b, a)) out.emplace(a, w, b);
      }
  }
  return out;
}
}  // namespace

bool markov_equivalent(const Dag& a, const Dag& b) {
  if (a.q() != b.q()) throw ShapeError("markov_equivalent: graphs differ in node count");
  return skeleton(a) == skeleton(b) && v_structures(a) == v_structures(b);
}

int structural_hamming_distance(const AdjacencyMatrix& a, const AdjacencyMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols())
    throw ShapeError("structural_hamming_distance: shapes differ");
  int d = 0;
  for (Eigen::Index u = 0; u < a.rows(); ++u)
    for (Eigen::Index v = u + 1; v < a.cols(); ++v)
      if (a(u, v) != b(u, v) || a(v, u) != b(v, u)) ++d;
  return d;
}

}  // namespace gaussdag
