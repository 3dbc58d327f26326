#pragma once

#include "gaussdag/graph.hpp"
#include "gaussdag/numkernel.hpp"

#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace gaussdag {

/// Compatible DAG-Wishart hyperparameters: common shape a > q − 1 and s.p.d. rate U.
struct DagWishartHyper {
  double a = 0.0;
  Matrix U;

  int q() const { return static_cast<int>(U.rows()); }
  /// Symmetrizes U and checks a > q − 1 and positive definiteness.
  /// Throws HyperError or NotSpdError.
  static DagWishartHyper make(double a, const Matrix& U);
  void validate() const;
};

/// Nonzero off-diagonal entry of L: the coefficient attached to edge u → v.
struct Coefficient {
  int u = 0;
  int v = 0;
  double value = 0.0;
  friend bool operator==(const Coefficient&, const Coefficient&) = default;
};

/// Modified-Cholesky parameters (D, L) of a Gaussian DAG model, with
/// Ω = L D⁻¹ Lᵀ. Only the diagonal of D and the edge entries of L are stored;
/// `L()` and `D()` expand to dense matrices.
class CholParams {
 public:
  CholParams() = default;
  /// Coefficients are sorted by (u, v). Throws DomainError if a variance is not
  /// positive and IndexError for out-of-range or diagonal coefficients.
  CholParams(Vector variances, std::vector<Coefficient> coefficients);
  /// Keeps the off-diagonal nonzeros of L. Throws ShapeError if L is not unit-diagonal.
  static CholParams from_dense(const Matrix& L, const Matrix& D);

  int q() const { return static_cast<int>(variances_.size()); }
  const Vector& variances() const { return variances_; }
  const std::vector<Coefficient>& coefficients() const { return coefficients_; }

  Matrix L() const;
  Matrix D() const;

  /// Every coefficient sits on an edge of dag.
  bool supported_on(const Dag& dag) const;

  friend bool operator==(const CholParams& a, const CholParams& b) {
    return a.variances_ == b.variances_ && a.coefficients_ == b.coefficients_;
  }

 private:
  Vector variances_;
  std::vector<Coefficient> coefficients_;
};

/// Node-j conditional of an s.p.d. matrix M given a parent set:
/// Cholesky factor of M[pa,pa], regression mean −M[pa,pa]⁻¹ M[pa,j],
/// Schur complement M_jj|pa and log|M[pa,pa]|.
struct NodeConditional {
  std::vector<int> parents;
  Matrix chol;
  Vector mean;
  double schur = 0.0;
  double logdet = 0.0;
};

NodeConditional node_conditional(const Matrix& M, int j, std::vector<int> parents);

/// a_j = a + |pa(j)| − q + 1. Throws HyperError when a ≤ q − 1.
std::vector<double> node_shapes(const Dag& dag, double a);

/// Draws n independent (D, L) from the compatible DAG-Wishart on dag.
std::vector<CholParams> sample_prior(const Dag& dag, const DagWishartHyper& hyper, Rng& rng, std::size_t n);

/// (a + n, U + tXX).
DagWishartHyper posterior_hyper(const DagWishartHyper& hyper, const Matrix& tXX, std::size_t n);

/// log m(X_j | X_pa(j), D) in closed form.
double node_log_marginal(int j, const Dag& dag, const Matrix& tXX, std::size_t n, const DagWishartHyper& hyper);
double dag_log_marginal(const Dag& dag, const Matrix& tXX, std::size_t n, const DagWishartHyper& hyper);

/// Ω = L D⁻¹ Lᵀ.
Matrix omega_from_chol(const CholParams& p);

/// Marginal-likelihood evaluator bound to one dataset. Prior and posterior
/// node conditionals are cached by (node, parent set); lookups are
/// mutex-guarded so one scorer may serve several threads. Results are
/// bitwise equal to the uncached free functions.
class DagWishartScorer {
 public:
  DagWishartScorer(DagWishartHyper hyper, const Matrix& tXX, std::size_t n);

  int q() const { return prior_.q(); }
  std::size_t n() const { return n_; }
  const DagWishartHyper& prior() const { return prior_; }
  const DagWishartHyper& posterior() const { return posterior_; }

  double node(int j, const std::vector<int>& parents) const;
  double node(int j, const Dag& dag) const { return node(j, dag.parents(j)); }
  double dag(const Dag& dag) const;

  /// One draw from the DAG-Wishart posterior on dag; consumes rng exactly as
  /// sample_prior would under the posterior hyperparameters.
  CholParams sample_posterior(const Dag& dag, Rng& rng) const;

  std::size_t cache_size() const;

 private:
  const NodeConditional& cached(bool post, int j, const std::vector<int>& parents) const;

  DagWishartHyper prior_;
  DagWishartHyper posterior_;
  std::size_t n_;
  mutable std::mutex mutex_;
  mutable std::unordered_map<std::string, std::unique_ptr<NodeConditional>> cache_;
};

}  // namespace gaussdag
