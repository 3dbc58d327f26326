#include "gaussdag/causal.hpp"

#include "gaussdag/errors.hpp"

#include <algorithm>
#include <set>

namespace gaussdag {

void CausalQuery::validate(int q) const {
  if (targets.empty()) throw QueryError("intervention target set is empty");
  if (response < 0 || response >= q) throw IndexError("response index out of range");
  std::set<int> seen;
  for (int t : targets) {
    if (t < 0 || t >= q) throw IndexError("target index out of range");
    if (!seen.insert(t).second) throw QueryError("duplicate intervention target");
  }
  if (seen.count(response)) throw QueryError("the response variable is also an intervention target");
}

Matrix intervention_L(const Matrix& L, const std::vector<int>& targets) {
  const auto q = L.rows();
  if (L.cols() != q) throw ShapeError("L is not square");
  Matrix out = L;
  for (int v : targets) {
    if (v < 0 || v >= q) throw IndexError("target index out of range");
    for (Eigen::Index u = 0; u < q; ++u)
      if (u != v) out(u, v) = 0.0;
  }
  return out;
}

Vector causal_effect(const std::vector<int>& targets, int response, const Matrix& L, const Matrix& D) {
  const int q = static_cast<int>(L.rows());
  if (L.cols() != q || D.rows() != q || D.cols() != q) throw ShapeError("L and D must be q x q");
  CausalQuery{targets, response}.validate(q);
  const Matrix LI = intervention_L(L, targets);
  const Matrix omega = LI * D.diagonal().cwiseInverse().asDiagonal() * LI.transpose();
  const Matrix chol = cholesky_lower(0.5 * (omega + omega.transpose()));
  Vector theta(static_cast<Eigen::Index>(targets.size()));
  for (std::size_t k = 0; k < targets.size(); ++k) {
    const int h = targets[k];
    // Column h of Σᴵ = (Ωᴵ)⁻¹.
    const Vector sigma_h = solve_lower_transpose(chol, solve_lower(chol, Vector::Unit(q, h)));
    theta(static_cast<Eigen::Index>(k)) = sigma_h(response) / sigma_h(h);
  }
  return theta;
}

Vector causal_effect(const std::vector<int>& targets, int response, const CholParams& params) {
  return causal_effect(targets, response, params.L(), params.D());
}

CausalDraws posterior_causal_effects(const Chain& chain, const CausalQuery& query) {
  if (!chain.has_params())
    throw CollapsedChainError("causal effects need parameter draws; rerun the sampler without collapse");
  query.validate(chain.q());
  CausalDraws out{query.targets, Matrix(static_cast<Eigen::Index>(chain.size()),
                                        static_cast<Eigen::Index>(query.targets.size()))};
  for (std::size_t s = 0; s < chain.size(); ++s)
    out.values.row(static_cast<Eigen::Index>(s)) = causal_effect(query.targets, query.response, chain.params(s)).transpose();
  return out;
}

Vector bma_causal_effect(const CausalDraws& draws) {
  if (draws.values.rows() == 0) throw EmptyChainError("no draws to average");
  return draws.values.colwise().mean().transpose();
}

}  // namespace gaussdag
