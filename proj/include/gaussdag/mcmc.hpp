#pragma once

#include "gaussdag/chain.hpp"
#include "gaussdag/dagprior.hpp"
#include "gaussdag/dagwishart.hpp"
#include "gaussdag/dataset.hpp"

#include <vector>

namespace gaussdag {

/// log r for moving from dag to next = op(dag):
/// node marginal-likelihood ratio (node v, plus node u for a reversal),
/// plus the prior ratio, plus log_qratio = log q(D|D′) − log q(D′|D).
double acceptance_log_ratio(const Dag& dag, const Dag& next, const Operator& op, const DagWishartScorer& scorer,
                            EdgePriorProb w, double log_qratio);
double acceptance_log_ratio(const Dag& dag, const Dag& next, const Operator& op, const Matrix& tXX, std::size_t n,
                            const DagWishartHyper& hyper, EdgePriorProb w, double log_qratio);

/// Joint sampler over (DAG, D, L). Requires config.collapse == false.
Chain run_pas(const McmcConfig& config, const Dataset& data, const DagWishartHyper& hyper);
/// Sampler over DAGs only. Requires config.collapse == true.
Chain run_collapsed(const McmcConfig& config, const Dataset& data, const DagWishartHyper& hyper);

/// Dispatches on config.collapse, reusing a caller-owned scorer.
Chain run_mcmc(const McmcConfig& config, const DagWishartScorer& scorer);

/// Seed of chain k in a multi-chain run. Chain 0 keeps the base seed.
std::uint64_t chain_seed(std::uint64_t base, std::size_t k);

/// Runs `nchains` independent chains on worker threads, sharing one scorer.
std::vector<Chain> run_chains(const McmcConfig& config, const Dataset& data, const DagWishartHyper& hyper,
                              std::size_t nchains);

}  // namespace gaussdag
