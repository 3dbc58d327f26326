#pragma once

#include "gaussdag/dagwishart.hpp"
#include "gaussdag/dataset.hpp"
#include "gaussdag/graph.hpp"

#include <vector>

namespace gaussdag {

/// A structural equation model: Lᵀ X = ε, ε ~ N(0, D).
struct SemSpec {
  Dag dag;
  CholParams params;
  double l_min = 0.0;
  double l_max = 0.0;
};

/// Random DAG with edges u → v only for u > v, each present with probability w.
/// No node relabeling is applied, so the adjacency matrix is strictly lower triangular.
Dag rand_dag(int q, double w, Rng& rng);

/// L entries on the DAG's edges ~ Uniform(l_min, l_max), unit diagonal; D = diag(dvals).
/// Draws happen in row-major edge order. Throws DomainError for l_min > l_max,
/// non-finite bounds, or non-positive variances.
CholParams rand_sem_params(const Dag& dag, double l_min, double l_max, const Vector& dvals, Rng& rng);

/// n rows from N(0, (L D⁻¹ Lᵀ)⁻¹) by ancestral propagation:
/// X_j = −Σ_{u ∈ pa(j)} L[u][j] X_u + √D_jj z.
Dataset sample_data(std::size_t n, const CholParams& params, Rng& rng);

/// Same distribution as sample_data, drawn through the Cholesky factor of Σ.
Dataset sample_data_cholesky(std::size_t n, const CholParams& params, Rng& rng);

/// Post-intervention samples under do(X_I = levels): row i fixes X_{targets[k]}
/// to levels(i, k) and propagates every other node through its structural
/// equation. Returns an n × q matrix.
Matrix sample_post_intervention(const CholParams& params, const std::vector<int>& targets, const Matrix& levels,
                                Rng& rng);

}  // namespace gaussdag
