#pragma once

#include "gaussdag/graph.hpp"

namespace gaussdag {

/// Prior probability of edge inclusion in the DAG skeleton.
class EdgePriorProb {
 public:
  /// Throws DomainError unless 0 ≤ w ≤ 1.
  explicit EdgePriorProb(double w);
  double value() const { return w_; }
  /// Throws DegenerateError when w is 0 or 1, where log-ratios are infinite.
  void require_interior() const;

 private:
  double w_;
};

/// Unnormalized log p(D): |S| log w + (q(q−1)/2 − |S|) log(1 − w).
double log_prior(const Dag& dag, EdgePriorProb w);

/// log p(D′)/p(D) for D′ = op(D): ±log(w/(1−w)) for insert/delete, 0 for reverse.
double log_prior_ratio(const Operator& op, EdgePriorProb w);

}  // namespace gaussdag
