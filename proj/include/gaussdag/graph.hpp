#pragma once

#include "gaussdag/numkernel.hpp"

#include <Eigen/Dense>

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace gaussdag {

/// 0/1 integer matrix used at the graph I/O boundary. adj(u, v) = 1 means u → v.
using AdjacencyMatrix = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic>;

/// A directed acyclic graph on nodes 0..q-1, stored as a dense bit matrix.
///
/// Every Dag value is acyclic with an empty diagonal; the only ways to build
/// one are the empty-graph constructor and the checked factories below.
/// Values are immutable and cheap to copy for the sizes this library targets.
class Dag {
 public:
  Dag() = default;
  /// Empty graph on q nodes.
  explicit Dag(int q);

  /// Throws ShapeError (non-square, non-binary, nonzero diagonal) or CycleError.
  static Dag from_adjacency(const AdjacencyMatrix& adj);
  /// Edge list of (source, target) pairs, 0-based. Throws IndexError/ShapeError/CycleError.
  static Dag from_edges(int q, const std::vector<std::pair<int, int>>& edges);

  int q() const { return q_; }
  bool has_edge(int u, int v) const {
    return (bits_[row_offset(u) + (v >> 6)] >> (v & 63)) & 1ULL;
  }
  int num_edges() const { return num_edges_; }

  /// Sorted parent set of j. Throws IndexError.
  std::vector<int> parents(int j) const;
  std::vector<int> children(int u) const;
  std::vector<std::pair<int, int>> edges() const;

  AdjacencyMatrix adjacency() const;
  /// Row-major '0'/'1' string of the adjacency matrix.
  std::string bitstring() const;
  /// Some topological order (parents before children).
  std::vector<int> topological_order() const;

  const std::vector<std::uint64_t>& words() const { return bits_; }
  int words_per_row() const { return words_; }

  friend bool operator==(const Dag& a, const Dag& b) { return a.q_ == b.q_ && a.bits_ == b.bits_; }
  /// Orders by q, then by bitstring lexicographically.
  friend std::strong_ordering operator<=>(const Dag& a, const Dag& b);

 private:
  friend class DagEditor;
  std::size_t row_offset(int u) const { return static_cast<std::size_t>(u) * static_cast<std::size_t>(words_); }

  int q_ = 0;
  int words_ = 0;
  int num_edges_ = 0;
  std::vector<std::uint64_t> bits_;
};

struct DagHash {
  std::size_t operator()(const Dag& d) const;
};

/// True iff adj encodes no directed cycle. Throws ShapeError on malformed input.
bool is_acyclic(const AdjacencyMatrix& adj);

std::vector<int> parents(const Dag& dag, int j);
/// Symmetric 0/1 matrix, S(u,v) = adj(u,v) OR adj(v,u).
AdjacencyMatrix skeleton(const Dag& dag);

/// Transitive closure including the trivial path: reach(u, v) is true iff
/// u == v or there is a directed path u ⇝ v.
std::vector<std::vector<bool>> reachability(const Dag& dag);

enum class OpKind : std::uint8_t { Insert = 0, Delete = 1, Reverse = 2 };

const char* to_string(OpKind kind);

/// A local edit of a DAG. For Delete and Reverse, (u, v) names the existing
/// edge u → v; Reverse turns it into v → u.
struct Operator {
  OpKind kind = OpKind::Insert;
  int u = 0;
  int v = 0;

  friend bool operator==(const Operator&, const Operator&) = default;
  friend auto operator<=>(const Operator&, const Operator&) = default;
};

/// The operator that undoes `op` once applied.
Operator inverse(const Operator& op);

/// All operators applicable to a DAG, before any acyclicity filtering.
struct PossibleOperators {
  std::vector<Operator> insert;
  std::vector<Operator> remove;
  std::vector<Operator> reverse;

  std::size_t size() const { return insert.size() + remove.size() + reverse.size(); }
  const Operator& operator[](std::size_t i) const;
};

PossibleOperators enumerate_possible_operators(const Dag& dag);

/// Throws NotApplicableError when op does not fit the graph, CycleError when
/// the edited graph is cyclic.
Dag apply_operator(const Dag& dag, const Operator& op);

/// Operators whose result is acyclic, ordered Insert, Delete, Reverse and
/// lexicographically by (u, v) within each kind.
std::vector<Operator> valid_operators(const Dag& dag);
std::size_t count_valid_operators(const Dag& dag);

struct Proposal {
  Dag next;
  Operator op;
  /// |valid operators of the current DAG|; 0 for the fast proposal, which never builds the set.
  std::size_t num_valid = 0;
};

/// Uniform draw from the valid operators. Throws NoMoveError when q < 2.
Proposal propose_exact(const Dag& dag, Rng& rng);
/// Uniform draw from the possible operators, redrawn until the result is acyclic.
Proposal propose_fast(const Dag& dag, Rng& rng);

/// Every labeled DAG on q ≤ 4 nodes. Throws TooLargeError above that.
std::vector<Dag> enumerate_all_dags(int q);

/// Same skeleton and same v-structures. Throws ShapeError when q differs.
bool markov_equivalent(const Dag& a, const Dag& b);

/// Edge insertions, deletions and reversals separating two graphs of equal q.
/// A reversed edge counts once.
int structural_hamming_distance(const AdjacencyMatrix& a, const AdjacencyMatrix& b);

}  // namespace gaussdag
