#include "gaussdag/simulate.hpp"

#include "gaussdag/errors.hpp"

#include <cmath>

namespace gaussdag {

namespace {

Dag support_dag(const CholParams& params) {
  std::vector<std::pair<int, int>> edges;
  for (const auto& c : params.coefficients()) edges.emplace_back(c.u, c.v);
  return Dag::from_edges(params.q(), edges);
}

// Fills row i of X in topological order; `fixed` (size q, NaN = free) pins nodes.
void propagate_row(const Dag& dag, const std::vector<int>& order, const Matrix& L, const Vector& sd, Matrix& X,
                   Eigen::Index i, const Vector* fixed, Rng& rng) {
  for (int j : order) {
    if (fixed && !std::isnan((*fixed)(j))) {
      X(i, j) = (*fixed)(j);
      continue;
    }
    double mean = 0.0;
    for (int u : dag.parents(j)) mean -= L(u, j) * X(i, u);
    X(i, j) = mean + sd(j) * rng.normal();
  }
}

}  // namespace

Dag rand_dag(int q, double w, Rng& rng) {
  if (q < 1) throw DomainError("rand_dag requires q >= 1");
  if (!(w >= 0.0 && w <= 1.0)) throw DomainError("rand_dag requires 0 <= w <= 1");
  std::vector<std::pair<int, int>> edges;
  for (int u = 0; u < q; ++u)
    for (int v = 0; v < u; ++v)
      if (rng.uniform() < w) edges.emplace_back(u, v);
  return Dag::from_edges(q, edges);
}

CholParams rand_sem_params(const Dag& dag, double l_min, double l_max, const Vector& dvals, Rng& rng) {
  if (!std::isfinite(l_min) || !std::isfinite(l_max) || l_min > l_max)
    throw DomainError("coefficient range must satisfy l_min <= l_max");
  if (dvals.size() != dag.q()) throw DomainError("need one variance per node");
  for (Eigen::Index j = 0; j < dvals.size(); ++j)
    if (!(dvals(j) > 0.0)) throw DomainError("variances must be positive");
  std::vector<Coefficient> coefs;
  for (auto [u, v] : dag.edges()) coefs.push_back({u, v, l_min + (l_max - l_min) * rng.uniform()});
  return CholParams(dvals, std::move(coefs));
}

Dataset sample_data(std::size_t n, const CholParams& params, Rng& rng) {
  if (n < 1) throw DomainError("sample_data requires n >= 1");
  const Dag dag = support_dag(params);
  const std::vector<int> order = dag.topological_order();
  const Matrix L = params.L();
  const Vector sd = params.variances().cwiseSqrt();
  Matrix X(static_cast<Eigen::Index>(n), params.q());
  for (Eigen::Index i = 0; i < X.rows(); ++i) propagate_row(dag, order, L, sd, X, i, nullptr, rng);
  return Dataset::from_matrix(std::move(X));
}

Dataset sample_data_cholesky(std::size_t n, const CholParams& params, Rng& rng) {
  if (n < 1) throw DomainError("sample_data requires n >= 1");
  const int q = params.q();
  const Matrix omega = omega_from_chol(params);
  const Matrix sigma = omega.llt().solve(Matrix::Identity(q, q));
  const Matrix c = cholesky_lower(0.5 * (sigma + sigma.transpose()));
  Matrix Z(static_cast<Eigen::Index>(n), q);
  for (Eigen::Index i = 0; i < Z.rows(); ++i)
    for (int j = 0; j < q; ++j) Z(i, j) = rng.normal();
  return Dataset::from_matrix(Z * c.transpose());
}

Matrix sample_post_intervention(const CholParams& params, const std::vector<int>& targets, const Matrix& levels,
                                Rng& rng) {
  const int q = params.q();
  if (levels.cols() != static_cast<Eigen::Index>(targets.size()))
    throw ShapeError("one intervention level column per target");
  for (int t : targets)
    if (t < 0 || t >= q) throw IndexError("target index out of range");
  const Dag dag = support_dag(params);
  const std::vector<int> order = dag.topological_order();
  const Matrix L = params.L();
  const Vector sd = params.variances().cwiseSqrt();
  Matrix X(levels.rows(), q);
  Vector fixed = Vector::Constant(q, std::nan(""));
  for (Eigen::Index i = 0; i < levels.rows(); ++i) {
    for (std::size_t k = 0; k < targets.size(); ++k) fixed(targets[k]) = levels(i, static_cast<Eigen::Index>(k));
    propagate_row(dag, order, L, sd, X, i, &fixed, rng);
  }
  return X;
}

}  // namespace gaussdag
