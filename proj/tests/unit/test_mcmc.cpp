#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gaussdag/errors.hpp"
#include "gaussdag/mcmc.hpp"
#include "gaussdag/oracle.hpp"
#include "gaussdag/simulate.hpp"
#include "gaussdag/summaries.hpp"

#include <cmath>
#include <map>

using namespace gaussdag;

namespace {

Dataset synthetic(int q, std::size_t n, double w, std::uint64_t seed) {
  Rng rng(seed);
  const Dag d = rand_dag(q, w, rng);
  return sample_data(n, rand_sem_params(d, 0.3, 1.0, Vector::Ones(q), rng), rng);
}

McmcConfig config(std::size_t S, std::size_t burn, bool fast, bool collapse, std::uint64_t seed) {
  McmcConfig c;
  c.S = S;
  c.burn = burn;
  c.fast = fast;
  c.collapse = collapse;
  c.seed = seed;
  return c;
}

Chain run(const McmcConfig& c, const Dataset& data, const DagWishartHyper& h) {
  return c.collapse ? run_collapsed(c, data, h) : run_pas(c, data, h);
}

// Batch-means standard error of the mean of a 0/1 series.
double batch_se(const std::vector<double>& x, int batches = 25) {
  const std::size_t b = x.size() / batches;
  std::vector<double> means(batches, 0.0);
  double overall = 0.0;
  for (int k = 0; k < batches; ++k) {
    for (std::size_t i = 0; i < b; ++i) means[k] += x[k * b + i];
    means[k] /= static_cast<double>(b);
    overall += means[k] / batches;
  }
  double v = 0.0;
  for (double m : means) v += (m - overall) * (m - overall);
  return std::sqrt(v / (batches - 1) / batches);
}

}  // namespace

TEST_CASE("acceptance_log_ratio") {
  const auto h = DagWishartHyper::make(2, Matrix::Identity(2, 2));
  const Dag empty(2);
  const Operator ins{OpKind::Insert, 0, 1};
  const Dag one = apply_operator(empty, ins);
  const double lq = std::log(count_valid_operators(empty)) - std::log(count_valid_operators(one));
  CHECK(acceptance_log_ratio(empty, one, ins, Matrix::Zero(2, 2), 0, h, EdgePriorProb(0.5), lq) == 0.0);

  const Dataset data = synthetic(4, 30, 0.5, 3);
  const auto h4 = DagWishartHyper::make(4, Matrix::Identity(4, 4));
  const DagWishartScorer scorer(h4, data.tXX, data.n());
  Rng rng(4);
  Dag d(4);
  for (int step = 0; step < 200; ++step) {
    const Proposal p = propose_exact(d, rng);
    const double qf = std::log(p.num_valid) - std::log(count_valid_operators(p.next));
    const double fwd = acceptance_log_ratio(d, p.next, p.op, scorer, EdgePriorProb(0.3), qf);
    const double bwd = acceptance_log_ratio(p.next, d, inverse(p.op), scorer, EdgePriorProb(0.3), -qf);
    REQUIRE(std::abs(fwd + bwd) < 1e-9);
    // Free-function and scorer overloads agree.
    REQUIRE(fwd == acceptance_log_ratio(d, p.next, p.op, data.tXX, data.n(), h4, EdgePriorProb(0.3), qf));
    // Marginal-likelihood part equals the full DAG score difference.
    const double ml = scorer.dag(p.next) - scorer.dag(d);
    const double prior = log_prior(p.next, EdgePriorProb(0.3)) - log_prior(d, EdgePriorProb(0.3));
    REQUIRE(std::abs(fwd - (ml + prior + qf)) < 1e-8);
    d = p.next;
  }
}

TEST_CASE("acceptance ratio favors the better-scoring DAG on correlated data") {
  Rng rng(5);
  Matrix X(50, 2);
  for (int i = 0; i < 50; ++i) {
    X(i, 0) = rng.normal();
    X(i, 1) = 0.9 * X(i, 0) + 0.3 * rng.normal();
  }
  const Dataset data = Dataset::from_matrix(X);
  const auto h = DagWishartHyper::make(2, Matrix::Identity(2, 2));
  const Dag empty(2);
  const Dag one = Dag::from_edges(2, {{0, 1}});
  const double lr = acceptance_log_ratio(empty, one, {OpKind::Insert, 0, 1}, data.tXX, 50, h, EdgePriorProb(0.5), 0.0);
  const double diff = dag_log_marginal(one, data.tXX, 50, h) - dag_log_marginal(empty, data.tXX, 50, h);
  CHECK(lr > 0.0);
  CHECK(lr == doctest::Approx(diff).epsilon(1e-12));
}

TEST_CASE("configuration errors") {
  const Dataset data = synthetic(3, 20, 0.5, 1);
  const auto h = DagWishartHyper::make(3, Matrix::Identity(3, 3));
  CHECK_THROWS_AS(run_pas(config(10, 0, false, true, 1), data, h), ConfigError);
  CHECK_THROWS_AS(run_collapsed(config(10, 0, false, false, 1), data, h), ConfigError);
  auto c = config(10, 0, false, false, 1);
  c.w = 1.0;
  CHECK_THROWS_AS(run_pas(c, data, h), ConfigError);
  c.w = 0.1;
  c.init = Dag(4);
  CHECK_THROWS_AS(run_pas(c, data, h), ConfigError);
  CHECK_THROWS_AS(run_pas(config(1, 0, false, false, 1), data, DagWishartHyper::make(4, Matrix::Identity(4, 4))),
                  ConfigError);
}

TEST_CASE("S = 0, q = 1 and initial DAG") {
  const Dataset data = synthetic(3, 20, 0.5, 1);
  const auto h = DagWishartHyper::make(3, Matrix::Identity(3, 3));
  const Chain empty = run_pas(config(0, 50, false, false, 1), data, h);
  CHECK(empty.size() == 0);
  CHECK(empty.proposals.size() == 50);

  Rng rng(2);
  Matrix X(10, 1);
  for (int i = 0; i < 10; ++i) X(i, 0) = rng.normal();
  const Chain one = run_pas(config(7, 3, false, false, 2), Dataset::from_matrix(X), DagWishartHyper::make(1, Matrix::Identity(1, 1)));
  CHECK(one.size() == 7);
  CHECK(one.proposals.empty());
  CHECK(one.accept_count == 0);
  for (std::size_t s = 0; s < 7; ++s) CHECK(one.dag(s).num_edges() == 0);

  auto c = config(1, 0, false, true, 3);
  const Dag init = Dag::from_edges(3, {{0, 1}, {1, 2}});
  c.init = init;
  const Chain started = run_collapsed(c, data, h);
  CHECK(started.size() == 1);
  const Dag& s0 = started.dag(0);
  const bool moved = started.proposals.front().accepted;
  CHECK((moved ? s0 == apply_operator(init, started.proposals.front().op) : s0 == init));
}

TEST_CASE("determinism, stream separation and state validity") {
  const Dataset data = synthetic(5, 60, 0.4, 7);
  const auto h = DagWishartHyper::make(5, Matrix::Identity(5, 5));
  for (bool fast : {false, true}) {
    const Chain a = run_pas(config(500, 100, fast, false, 11), data, h);
    const Chain b = run_pas(config(500, 100, fast, false, 11), data, h);
    CHECK(a == b);
    CHECK(encode_compact(a) == encode_compact(b));
    const Chain c = run_collapsed(config(500, 100, fast, true, 11), data, h);
    REQUIRE(c.size() == a.size());
    for (std::size_t s = 0; s < a.size(); ++s) {
      REQUIRE(a.dag(s) == c.dag(s));
      const CholParams p = a.params(s);
      REQUIRE(p.supported_on(a.dag(s)));
      REQUIRE((p.variances().array() > 0).all());
    }
    CHECK(a.proposals == c.proposals);
    CHECK(edge_probabilities(a) == edge_probabilities(c));
    CHECK_THROWS_AS(c.params(0), CollapsedChainError);
  }
  const Chain other = run_pas(config(500, 100, false, false, 12), data, h);
  CHECK_FALSE(other == run_pas(config(500, 100, false, false, 11), data, h));
}

TEST_CASE("logged proposals replay the chain and paired moves invert") {
  const Dataset data = synthetic(4, 40, 0.5, 8);
  const auto h = DagWishartHyper::make(4, Matrix::Identity(4, 4));
  const std::size_t burn = 20;
  const Chain chain = run_collapsed(config(300, burn, false, true, 5), data, h);
  const DagWishartScorer scorer(h, data.tXX, data.n());
  Dag d(4);
  std::uint64_t accepted = 0;
  for (std::size_t it = 0; it < chain.proposals.size(); ++it) {
    const auto& rec = chain.proposals[it];
    const Dag next = apply_operator(d, rec.op);
    const double qf = std::log(count_valid_operators(d)) - std::log(count_valid_operators(next));
    const double fwd = acceptance_log_ratio(d, next, rec.op, scorer, EdgePriorProb(0.1), qf);
    const double bwd = acceptance_log_ratio(next, d, inverse(rec.op), scorer, EdgePriorProb(0.1), -qf);
    REQUIRE(std::abs(fwd + bwd) < 1e-9);
    if (rec.accepted) {
      d = next;
      ++accepted;
    }
    if (it >= burn) REQUIRE(chain.dag(it - burn) == d);
  }
  CHECK(accepted == chain.accept_count);
}

TEST_CASE("q = 2 detailed-balance smoke test") {
  Rng rng(9);
  Matrix X(20, 2);
  for (int i = 0; i < 20; ++i) {
    const double z = rng.normal();
    X(i, 0) = z + 0.4 * rng.normal();
    X(i, 1) = z + 0.4 * rng.normal();
  }
  const Dataset data = Dataset::from_matrix(X);
  const auto h = DagWishartHyper::make(2, Matrix::Identity(2, 2));
  auto c = config(60000, 1000, false, true, 13);
  c.w = 0.5;
  const Chain chain = run_collapsed(c, data, h);
  const auto exact = oracle::exact_posterior(data.tXX, data.n(), h, EdgePriorProb(0.5));
  for (const auto& d : exact.dags) {
    std::vector<double> ind(chain.size());
    for (std::size_t s = 0; s < chain.size(); ++s) ind[s] = chain.dag(s) == d ? 1.0 : 0.0;
    double freq = 0.0;
    for (double x : ind) freq += x;
    freq /= static_cast<double>(chain.size());
    CHECK(std::abs(freq - exact.prob(d)) < 3 * std::max(batch_se(ind), 1e-3));
  }
}

TEST_CASE("weak data: edge frequencies follow the exact posterior") {
  Matrix X(1, 3);
  X << 0.2, -0.1, 0.3;
  const Dataset data = Dataset::from_matrix(X);
  const auto h = DagWishartHyper::make(3, Matrix::Identity(3, 3));
  auto c = config(40000, 2000, false, true, 17);
  c.w = 0.3;
  const Matrix p = edge_probabilities(run_collapsed(c, data, h));
  const Matrix exact = oracle::exact_posterior(data.tXX, 1, h, EdgePriorProb(0.3)).edge_marginals();
  CHECK((p - exact).cwiseAbs().maxCoeff() < 0.03);
}

TEST_CASE("fast and exact proposals agree on edge probabilities at q = 10") {
  const Dataset data = synthetic(10, 100, 0.2, 19);
  const auto h = DagWishartHyper::make(10, Matrix::Identity(10, 10));
  const std::size_t S = 40000;
  const Chain exact = run_collapsed(config(S, 2000, false, true, 23), data, h);
  const Chain fast = run_collapsed(config(S, 2000, true, true, 29), data, h);
  const Matrix pe = edge_probabilities(exact), pf = edge_probabilities(fast);
  int outside = 0;
  for (int u = 0; u < 10; ++u)
    for (int v = 0; v < 10; ++v) {
      if (u == v) continue;
      std::vector<double> ie(S), iff(S);
      for (std::size_t s = 0; s < S; ++s) {
        ie[s] = exact.dag(s).has_edge(u, v);
        iff[s] = fast.dag(s).has_edge(u, v);
      }
      const double se = std::hypot(batch_se(ie), batch_se(iff));
      if (std::abs(pe(u, v) - pf(u, v)) > 3 * std::max(se, 0.005)) ++outside;
    }
  // At 3 s.e., at most a handful of the 90 entries may fall outside by chance.
  CHECK(outside <= 3);
}

TEST_CASE("multiple chains") {
  const Dataset data = synthetic(4, 40, 0.5, 8);
  const auto h = DagWishartHyper::make(4, Matrix::Identity(4, 4));
  const auto c = config(200, 50, false, false, 31);
  const auto chains = run_chains(c, data, h, 3);
  REQUIRE(chains.size() == 3);
  CHECK(chains[0] == run_pas(c, data, h));
  auto c1 = c;
  c1.seed = chain_seed(31, 1);
  CHECK(chains[1] == run_pas(c1, data, h));
  CHECK(chain_seed(31, 0) == 31);
  CHECK(chain_seed(31, 1) != chain_seed(31, 2));
}

TEST_CASE("compact encoding round trip") {
  McmcConfig cfg = config(0, 0, false, false, 1);
  const Chain empty(3, cfg);
  CHECK(decode_compact(encode_compact(empty)) == empty);

  const Dataset data = synthetic(8, 50, 0.3, 37);
  const auto h = DagWishartHyper::make(8, Matrix::Identity(8, 8));
  for (bool collapse : {false, true})
    for (bool save : {false, true}) {
      auto c = config(100, 10, false, collapse, 41);
      c.save_memory = save;
      c.init = Dag::from_edges(8, {{0, 1}});
      const Chain chain = run(c, data, h);
      CHECK(chain.packed() == save);
      const std::string bytes = encode_compact(chain);
      const Chain back = decode_compact(bytes);
      CHECK(back == chain);
      CHECK(back.config() == chain.config());
      CHECK(encode_compact(back) == bytes);
      if (!collapse) CHECK(bytes.size() < dense_size_bytes(chain));
    }

  auto c = config(50, 0, false, false, 43);
  const Chain dense = run_pas(c, data, h);
  c.save_memory = true;
  const Chain packed = run_pas(c, data, h);
  for (std::size_t s = 0; s < 50; ++s) {
    CHECK(dense.dag(s) == packed.dag(s));
    CHECK(dense.params(s) == packed.params(s));
  }
}

TEST_CASE("corrupt encodings are rejected") {
  const Dataset data = synthetic(4, 30, 0.5, 47);
  const auto h = DagWishartHyper::make(4, Matrix::Identity(4, 4));
  const std::string bytes = encode_compact(run_pas(config(20, 5, false, false, 53), data, h));
  CHECK_THROWS_AS(decode_compact(""), CorruptEncodingError);
  CHECK_THROWS_AS(decode_compact("GDCHAIN2" + bytes.substr(8)), CorruptEncodingError);
  CHECK_THROWS_AS(decode_compact(bytes + "x"), CorruptEncodingError);
  for (std::size_t cut : {9ul, 20ul, 40ul, bytes.size() / 2, bytes.size() - 1})
    CHECK_THROWS_AS(decode_compact(bytes.substr(0, cut)), CorruptEncodingError);
  std::string flags = bytes;
  flags[12] = static_cast<char>(0x40);
  CHECK_THROWS_AS(decode_compact(flags), CorruptEncodingError);

  // A 2-cycle in the first DAG record: q = 2 chain, state bits 0110.
  Chain tiny(2, config(0, 0, false, true, 1));
  tiny.push(Dag::from_edges(2, {{0, 1}}), nullptr);
  std::string t = encode_compact(tiny);
  t.back() = static_cast<char>(0x06);
  CHECK_THROWS_AS(decode_compact(t), CorruptEncodingError);
  t.back() = static_cast<char>(0x12);
  CHECK_THROWS_AS(decode_compact(t), CorruptEncodingError);
}
