#include "gaussdag/mcmc.hpp"

#include "gaussdag/errors.hpp"

#include <cmath>
#include <exception>
#include <thread>

namespace gaussdag {

double acceptance_log_ratio(const Dag& dag, const Dag& next, const Operator& op, const DagWishartScorer& scorer,
                            EdgePriorProb w, double log_qratio) {
  double log_r = scorer.node(op.v, next) - scorer.node(op.v, dag);
  // A reversal is a delete of u → v followed by an insert of v → u, so the
  // parent set of u changes as well.
  if (op.kind == OpKind::Reverse) log_r += scorer.node(op.u, next) - scorer.node(op.u, dag);
  return log_r + log_prior_ratio(op, w) + log_qratio;
}

double acceptance_log_ratio(const Dag& dag, const Dag& next, const Operator& op, const Matrix& tXX, std::size_t n,
                            const DagWishartHyper& hyper, EdgePriorProb w, double log_qratio) {
  const DagWishartScorer scorer(hyper, tXX, n);
  return acceptance_log_ratio(dag, next, op, scorer, w, log_qratio);
}

namespace {

void validate(const McmcConfig& config, const DagWishartScorer& scorer) {
  if (!(config.w > 0.0 && config.w < 1.0)) throw ConfigError("w must lie strictly between 0 and 1");
  if (scorer.n() < 1) throw ConfigError("the sampler needs at least one observation");
  if (config.init && config.init->q() != scorer.q()) throw ConfigError("initial DAG has the wrong number of nodes");
}

}  // namespace

Chain run_mcmc(const McmcConfig& config, const DagWishartScorer& scorer) {
  validate(config, scorer);
  const int q = scorer.q();
  const EdgePriorProb w(config.w);
  Chain chain(q, config);
  chain.proposals.reserve(q >= 2 ? config.burn + config.S : 0);

  // Separate streams: moves and accept/reject draw from one, parameter
  // updates from the other, so the DAG trajectory does not depend on whether
  // parameters are sampled.
  Rng move_rng = Rng::split(config.seed, 0);
  Rng param_rng = Rng::split(config.seed, 1);

  Dag current = config.init ? *config.init : Dag(q);
  std::size_t current_valid = (q >= 2 && !config.fast) ? count_valid_operators(current) : 0;

  const std::size_t total = config.burn + config.S;
  for (std::size_t it = 0; it < total; ++it) {
    try {
      if (q >= 2) {
        Proposal p = config.fast ? propose_fast(current, move_rng) : propose_exact(current, move_rng);
        double log_qratio = 0.0;
        std::size_t next_valid = 0;
        if (!config.fast) {
          next_valid = count_valid_operators(p.next);
          log_qratio = std::log(static_cast<double>(current_valid)) - std::log(static_cast<double>(next_valid));
        }
        const double log_r = acceptance_log_ratio(current, p.next, p.op, scorer, w, log_qratio);
        if (std::isnan(log_r)) throw SamplerError(it, "acceptance ratio is not a number");
        const bool accept = std::log(move_rng.uniform()) <= log_r;
        chain.proposals.push_back({p.op, accept});
        if (accept) {
          current = std::move(p.next);
          current_valid = next_valid;
          ++chain.accept_count;
        }
      }
      if (it >= config.burn) {
        if (config.collapse) {
          chain.push(current, nullptr);
        } else {
          const CholParams params = scorer.sample_posterior(current, param_rng);
          chain.push(current, &params);
        }
      }
    } catch (const SamplerError&) {
      throw;
    } catch (const std::exception& e) {
      throw SamplerError(it, e.what());
    }
  }
  return chain;
}

Chain run_pas(const McmcConfig& config, const Dataset& data, const DagWishartHyper& hyper) {
  if (config.collapse) throw ConfigError("run_pas requires collapse = false");
  if (data.q() != hyper.q()) throw ConfigError("data and hyperparameters have different dimensions");
  const DagWishartScorer scorer(hyper, data.tXX, data.n());
  return run_mcmc(config, scorer);
}

Chain run_collapsed(const McmcConfig& config, const Dataset& data, const DagWishartHyper& hyper) {
  if (!config.collapse) throw ConfigError("run_collapsed requires collapse = true");
  if (data.q() != hyper.q()) throw ConfigError("data and hyperparameters have different dimensions");
  const DagWishartScorer scorer(hyper, data.tXX, data.n());
  return run_mcmc(config, scorer);
}

std::uint64_t chain_seed(std::uint64_t base, std::size_t k) {
  if (k == 0) return base;
  return splitmix64(base ^ splitmix64(0xC4A1'0000ULL + k));
}

std::vector<Chain> run_chains(const McmcConfig& config, const Dataset& data, const DagWishartHyper& hyper,
                              std::size_t nchains) {
  if (nchains == 0) throw ConfigError("need at least one chain");
  if (data.q() != hyper.q()) throw ConfigError("data and hyperparameters have different dimensions");
  const DagWishartScorer scorer(hyper, data.tXX, data.n());
  std::vector<Chain> chains(nchains);
  std::vector<std::exception_ptr> errors(nchains);
  std::vector<std::thread> workers;
  for (std::size_t k = 0; k < nchains; ++k) {
    workers.emplace_back([&, k] {
      try {
        McmcConfig c = config;
        c.seed = chain_seed(config.seed, k);
        chains[k] = run_mcmc(c, scorer);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    });
  }
  for (auto& t : workers) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return chains;
}

}  // namespace gaussdag
