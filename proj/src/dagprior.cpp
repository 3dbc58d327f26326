#include "gaussdag/dagprior.hpp"

#include "gaussdag/errors.hpp"

#include <cmath>

namespace gaussdag {

EdgePriorProb::EdgePriorProb(double w) : w_(w) {
  if (!(w >= 0.0 && w <= 1.0)) throw DomainError("edge inclusion probability must lie in [0, 1]");
}

void EdgePriorProb::require_interior() const {
  if (w_ == 0.0 || w_ == 1.0)
    throw DegenerateError("edge inclusion probability must lie strictly between 0 and 1");
}

double log_prior(const Dag& dag, EdgePriorProb w) {
  w.require_interior();
  const double q = dag.q();
  const double edges = dag.num_edges();
  return edges * std::log(w.value()) + (q * (q - 1.0) / 2.0 - edges) * std::log1p(-w.value());
}

double log_prior_ratio(const Operator& op, EdgePriorProb w) {
  w.require_interior();
  const double log_odds = std::log(w.value()) - std::log1p(-w.value());
  switch (op.kind) {
    case OpKind::Insert: return log_odds;
    case OpKind::Delete: return -log_odds;
    case OpKind::Reverse: return 0.0;
  }
  return 0.0;
}

}  // namespace gaussdag
