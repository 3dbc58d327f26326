#include "gaussdag/summaries.hpp"

#include "gaussdag/errors.hpp"

#include <unordered_map>

namespace gaussdag {

namespace {
void require_nonempty(const Chain& chain) {
  if (chain.empty()) throw EmptyChainError("chain has no retained states");
}
}  // namespace

Matrix edge_probabilities(const Chain& chain) {
  require_nonempty(chain);
  DiagnosticsAccumulator acc(chain.q());
  for (std::size_t s = 0; s < chain.size(); ++s) acc.push(chain.dag(s));
  Matrix p(chain.q(), chain.q());
  for (int u = 0; u < chain.q(); ++u)
    for (int v = 0; v < chain.q(); ++v) p(u, v) = acc.running_edge_prob(u, v);
  return p;
}

Dag map_dag(const Chain& chain) {
  require_nonempty(chain);
  std::unordered_map<Dag, std::size_t, DagHash> visits;
  for (std::size_t s = 0; s < chain.size(); ++s) ++visits[chain.dag(s)];
  const Dag* best = nullptr;
  std::size_t best_count = 0;
  for (const auto& [dag, count] : visits) {
    if (!best || count > best_count || (count == best_count && dag.bitstring() < best->bitstring())) {
      best = &dag;
      best_count = count;
    }
  }
  return *best;
}

AdjacencyMatrix mpm_dag(const Chain& chain) {
  const Matrix p = edge_probabilities(chain);
  return (p.array() > 0.5).cast<int>().matrix();
}

DiagnosticsAccumulator::DiagnosticsAccumulator(int q)
    : q_(q), counts_(static_cast<std::size_t>(q) * static_cast<std::size_t>(q), 0) {}

void DiagnosticsAccumulator::push(const Dag& dag) {
  if (dag.q() != q_) throw ShapeError("DAG has the wrong number of nodes");
  ++steps_;
  last_size_ = dag.num_edges();
  size_sum_ += last_size_;
  for (int u = 0; u < q_; ++u)
    for (int v = 0; v < q_; ++v)
      if (dag.has_edge(u, v)) ++counts_[static_cast<std::size_t>(u) * static_cast<std::size_t>(q_) + static_cast<std::size_t>(v)];
}

double DiagnosticsAccumulator::running_mean_size() const {
  return static_cast<double>(size_sum_) / static_cast<double>(steps_);
}

double DiagnosticsAccumulator::running_edge_prob(int u, int v) const {
  return static_cast<double>(counts_[static_cast<std::size_t>(u) * static_cast<std::size_t>(q_) + static_cast<std::size_t>(v)]) /
         static_cast<double>(steps_);
}

DiagnosticsReport diagnostics(const Chain& chain) {
  require_nonempty(chain);
  const int q = chain.q();
  const auto S = static_cast<Eigen::Index>(chain.size());
  DiagnosticsReport r;
  r.size_trace.reserve(chain.size());
  r.running_mean_size.reserve(chain.size());
  r.running_edge_probs.assign(static_cast<std::size_t>(q), Matrix(S, q));
  DiagnosticsAccumulator acc(q);
  for (Eigen::Index s = 0; s < S; ++s) {
    acc.push(chain.dag(static_cast<std::size_t>(s)));
    r.size_trace.push_back(acc.last_size());
    r.running_mean_size.push_back(acc.running_mean_size());
    for (int v = 0; v < q; ++v)
      for (int u = 0; u < q; ++u) r.running_edge_probs[static_cast<std::size_t>(v)](s, u) = acc.running_edge_prob(u, v);
  }
  return r;
}

}  // namespace gaussdag
