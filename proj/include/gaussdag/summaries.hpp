#pragma once

#include "gaussdag/chain.hpp"

#include <cstdint>
#include <vector>

namespace gaussdag {

/// (u, v) entry: fraction of retained DAGs containing u → v.
Matrix edge_probabilities(const Chain& chain);

/// Most visited DAG; ties go to the smallest adjacency bitstring.
Dag map_dag(const Chain& chain);

/// Edges with posterior probability strictly above 0.5. The result is not
/// guaranteed to be acyclic, so it is returned as a plain matrix.
AdjacencyMatrix mpm_dag(const Chain& chain);

struct DiagnosticsReport {
  std::vector<int> size_trace;
  std::vector<double> running_mean_size;
  /// running_edge_probs[v](s, u): fraction of the first s+1 DAGs containing u → v.
  std::vector<Matrix> running_edge_probs;
};

/// Incremental form of the diagnostics series, for chains too long to hold
/// every running matrix in memory.
class DiagnosticsAccumulator {
 public:
  explicit DiagnosticsAccumulator(int q);

  void push(const Dag& dag);

  std::size_t steps() const { return steps_; }
  int last_size() const { return last_size_; }
  double running_mean_size() const;
  /// Running inclusion frequency of u → v after the latest push.
  double running_edge_prob(int u, int v) const;

 private:
  int q_;
  std::size_t steps_ = 0;
  int last_size_ = 0;
  std::int64_t size_sum_ = 0;
  std::vector<std::uint64_t> counts_;
};

DiagnosticsReport diagnostics(const Chain& chain);

}  // namespace gaussdag
