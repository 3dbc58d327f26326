#pragma once

#include "gaussdag/chain.hpp"
#include "gaussdag/numkernel.hpp"

#include <vector>

namespace gaussdag {

/// Joint hard intervention on `targets` with `response` as the outcome.
struct CausalQuery {
  std::vector<int> targets;
  int response = 0;

  /// Throws IndexError for out-of-range labels, QueryError for an empty or
  /// duplicated target set or a response that is itself a target.
  void validate(int q) const;
};

/// Per-draw effects: row s holds θ_{h,Y} for each target h, in target order.
struct CausalDraws {
  std::vector<int> targets;
  Matrix values;
};

/// L with every column v ∈ I zeroed off the diagonal (edges into I removed).
Matrix intervention_L(const Matrix& L, const std::vector<int>& targets);

/// θ_{h,Y} = Σᴵ[h][Y] / Σᴵ[h][h] with Σᴵ = (Lᴵ D⁻¹ Lᴵᵀ)⁻¹, one entry per target.
Vector causal_effect(const std::vector<int>& targets, int response, const Matrix& L, const Matrix& D);
Vector causal_effect(const std::vector<int>& targets, int response, const CholParams& params);

/// Throws CollapsedChainError for chains without parameter draws.
CausalDraws posterior_causal_effects(const Chain& chain, const CausalQuery& query);

/// Column means. Throws EmptyChainError for zero rows.
Vector bma_causal_effect(const CausalDraws& draws);

}  // namespace gaussdag
