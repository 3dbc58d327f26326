#include "gaussdag/oracle.hpp"

#include "gaussdag/causal.hpp"
#include "gaussdag/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace gaussdag::oracle {

double ExactPosterior::prob(const Dag& dag) const {
  for (std::size_t i = 0; i < dags.size(); ++i)
    if (dags[i] == dag) return probs[i];
  return 0.0;
}

Matrix ExactPosterior::edge_marginals() const {
  const int q = dags.empty() ? 0 : dags.front().q();
  Matrix m = Matrix::Zero(q, q);
  for (std::size_t i = 0; i < dags.size(); ++i) m += probs[i] * dags[i].adjacency().cast<double>();
  return m;
}

ExactPosterior exact_posterior(const Matrix& tXX, std::size_t n, const DagWishartHyper& hyper, EdgePriorProb w) {
  const int q = hyper.q();
  if (q > 4) throw TooLargeError("exact posterior enumeration is limited to q <= 4");
  ExactPosterior out;
  out.dags = enumerate_all_dags(q);
  std::vector<double> logp;
  for (const Dag& d : out.dags) logp.push_back(dag_log_marginal(d, tXX, n, hyper) + log_prior(d, w));
  const double m = *std::max_element(logp.begin(), logp.end());
  double s = 0.0;
  for (double l : logp) s += std::exp(l - m);
  out.log_normalizer = m + std::log(s);
  for (double l : logp) out.probs.push_back(std::exp(l - out.log_normalizer));
  return out;
}

namespace {

double log_likelihood(const Matrix& X, const CholParams& p) {
  const Matrix L = p.L();
  const int q = p.q();
  double ll = 0.0;
  for (Eigen::Index i = 0; i < X.rows(); ++i)
    for (int j = 0; j < q; ++j) {
      double mean = 0.0;
      for (int u = 0; u < q; ++u)
        if (u != j) mean -= L(u, j) * X(i, u);
      const double var = p.variances()(j);
      const double r = X(i, j) - mean;
      ll += -0.5 * std::log(2.0 * std::numbers::pi * var) - 0.5 * r * r / var;
    }
  return ll;
}

}  // namespace

McEstimate mc_marginal_likelihood(const Dag& dag, const Matrix& X, const DagWishartHyper& hyper, std::size_t ndraws,
                                  Rng& rng) {
  McEstimate out;
  if (X.cols() != dag.q()) throw ShapeError("data and DAG dimensions differ");
  if (X.rows() == 0) return out;
  if (ndraws < 2) throw DomainError("need at least two prior draws");
  if (X.rows() * X.cols() > 40) out.warning = "n*q > 40: prior-predictive estimate has very high variance";

  std::vector<double> logs;
  logs.reserve(ndraws);
  constexpr std::size_t kBatch = 4096;
  while (logs.size() < ndraws) {
    const std::size_t k = std::min(kBatch, ndraws - logs.size());
    for (const CholParams& p : sample_prior(dag, hyper, rng, k)) logs.push_back(log_likelihood(X, p));
  }

  const double N = static_cast<double>(ndraws);
  const double m = *std::max_element(logs.begin(), logs.end());
  double total = 0.0;
  for (double l : logs) total += std::exp(l - m);
  out.log_estimate = m + std::log(total / N);

  // Leave-one-out jackknife on the log scale.
  double loo_mean = 0.0;
  std::vector<double> loo(ndraws);
  for (std::size_t i = 0; i < ndraws; ++i) {
    loo[i] = m + std::log((total - std::exp(logs[i] - m)) / (N - 1.0));
    loo_mean += loo[i];
  }
  loo_mean /= N;
  double ss = 0.0;
  for (double l : loo) ss += (l - loo_mean) * (l - loo_mean);
  out.se = std::sqrt((N - 1.0) / N * ss);
  return out;
}

Vector path_coefficient_effect(const Dag& dag, const Matrix& L, const std::vector<int>& targets, int response) {
  const int q = dag.q();
  if (L.rows() != q || L.cols() != q) throw ShapeError("L must be q x q");
  CausalQuery{targets, response}.validate(q);
  const std::set<int> intervened(targets.begin(), targets.end());

  Vector out(static_cast<Eigen::Index>(targets.size()));
  for (std::size_t k = 0; k < targets.size(); ++k) {
    double total = 0.0;
    // Explicit DFS stack of (node, product so far). Edges into intervened
    // nodes are absent in the intervention graph.
    std::vector<std::pair<int, double>> stack{{targets[k], 1.0}};
    while (!stack.empty()) {
      auto [u, prod] = stack.back();
      stack.pop_back();
      if (u == response) {
        total += prod;
        continue;
      }
      for (int v = 0; v < q; ++v)
        if (dag.has_edge(u, v) && !intervened.count(v)) stack.emplace_back(v, prod * -L(u, v));
    }
    out(static_cast<Eigen::Index>(k)) = total;
  }
  return out;
}

}  // namespace gaussdag::oracle
