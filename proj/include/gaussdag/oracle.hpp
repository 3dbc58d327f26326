#pragma once

#include "gaussdag/dagprior.hpp"
#include "gaussdag/dagwishart.hpp"
#include "gaussdag/graph.hpp"

#include <string>
#include <vector>

// Brute-force reference computations. They are slow on purpose and exist so
// results on small problems can be audited independently of the sampler.
namespace gaussdag::oracle {

/// p(D | X) over every DAG on q ≤ 4 nodes.
struct ExactPosterior {
  std::vector<Dag> dags;
  std::vector<double> probs;
  double log_normalizer = 0.0;

  double prob(const Dag& dag) const;
  /// Σ_D p(D | X) adj_D.
  Matrix edge_marginals() const;
};

/// Enumerates m(X | D) p(D) and normalizes with log-sum-exp. Throws TooLargeError for q > 4.
ExactPosterior exact_posterior(const Matrix& tXX, std::size_t n, const DagWishartHyper& hyper, EdgePriorProb w);

struct McEstimate {
  double log_estimate = 0.0;
  /// Jackknife standard error of log_estimate.
  double se = 0.0;
  /// Set when n·q is large enough that the estimator is unreliable.
  std::string warning;
};

/// log m(X | D) by averaging the likelihood over prior draws of (D, L).
/// X is n × q; n = 0 returns exactly 0 with zero error.
McEstimate mc_marginal_likelihood(const Dag& dag, const Matrix& X, const DagWishartHyper& hyper, std::size_t ndraws,
                                  Rng& rng);

/// Total effect of each h ∈ I on Y by the path rule: the sum over directed
/// paths h ⇝ Y in the intervention graph of Π (−L[u][v]).
Vector path_coefficient_effect(const Dag& dag, const Matrix& L, const std::vector<int>& targets, int response);

}  // namespace gaussdag::oracle
