#include "gaussdag/dagwishart.hpp"

#include "gaussdag/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <tuple>

namespace gaussdag {

namespace {

double node_shape(double a, std::size_t num_parents, int q) {
  return a + static_cast<double>(num_parents) - q + 1.0;
}

double log_marginal_from_conditionals(const NodeConditional& prior, const NodeConditional& post,
                                      double a, double a_post, int q, std::size_t n) {
  const std::size_t k = prior.parents.size();
  const double aj = node_shape(a, k, q);
  const double atj = node_shape(a_post, k, q);
  return -0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi) +
         0.5 * prior.logdet - 0.5 * post.logdet +
         std::lgamma(0.5 * atj) - std::lgamma(0.5 * aj) +
         0.5 * aj * std::log(0.5 * prior.schur) - 0.5 * atj * std::log(0.5 * post.schur);
}

// D_jj ~ I-Ga(shape/2, schur/2), then L[pa, j] | D_jj ~ N(mean, D_jj · M[pa,pa]⁻¹).
void draw_node(const NodeConditional& c, double shape, Rng& rng, int j, Vector& variances,
               std::vector<Coefficient>& coefs) {
  const double d = sample_inverse_gamma(0.5 * shape, 0.5 * c.schur, rng);
  variances(j) = d;
  if (c.parents.empty()) return;
  Vector z(static_cast<Eigen::Index>(c.parents.size()));
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.normal();
  // Cov(C⁻ᵀ z) = (C Cᵀ)⁻¹.
  const Vector l = c.mean + std::sqrt(d) * solve_lower_transpose(c.chol, z);
  for (std::size_t i = 0; i < c.parents.size(); ++i)
    coefs.push_back({c.parents[i], j, l(static_cast<Eigen::Index>(i))});
}

template <typename ConditionalFor>
CholParams draw_params(const Dag& dag, double a, Rng& rng, ConditionalFor&& conditional_for) {
  const int q = dag.q();
  Vector variances(q);
  std::vector<Coefficient> coefs;
  for (int j = 0; j < q; ++j) {
    const std::vector<int> pa = dag.parents(j);
    const NodeConditional& c = conditional_for(j, pa);
    draw_node(c, node_shape(a, pa.size(), q), rng, j, variances, coefs);
  }
  return CholParams(std::move(variances), std::move(coefs));
}

void check_dims(const Dag& dag, const DagWishartHyper& hyper) {
  if (dag.q() != hyper.q()) throw ShapeError("DAG and hyperparameter dimensions differ");
}

}  // namespace

DagWishartHyper DagWishartHyper::make(double a, const Matrix& U) {
  DagWishartHyper h{a, symmetrize(U)};
  h.validate();
  return h;
}

void DagWishartHyper::validate() const {
  if (U.rows() != U.cols()) throw ShapeError("U is not square");
  const int q = this->q();
  if (!(a > q - 1.0) || !std::isfinite(a))
    throw HyperError("shape hyperparameter must satisfy a > q - 1 (a = " + std::to_string(a) +
                     ", q = " + std::to_string(q) + ")");
  cholesky_lower(U);
}

CholParams::CholParams(Vector variances, std::vector<Coefficient> coefficients)
    : variances_(std::move(variances)), coefficients_(std::move(coefficients)) {
  const int q = this->q();
  for (Eigen::Index i = 0; i < variances_.size(); ++i)
    if (!(variances_(i) > 0.0)) throw DomainError("conditional variances must be positive");
  for (const auto& c : coefficients_) {
    if (c.u < 0 || c.u >= q || c.v < 0 || c.v >= q) throw IndexError("coefficient index out of range");
    if (c.u == c.v) throw IndexError("coefficient on the diagonal of L");
  }
  std::sort(coefficients_.begin(), coefficients_.end(),
            [](const Coefficient& x, const Coefficient& y) { return std::tie(x.u, x.v) < std::tie(y.u, y.v); });
}

CholParams CholParams::from_dense(const Matrix& L, const Matrix& D) {
  if (L.rows() != L.cols() || D.rows() != D.cols() || L.rows() != D.rows())
    throw ShapeError("L and D must be square of equal size");
  const auto q = L.rows();
  std::vector<Coefficient> coefs;
  for (Eigen::Index u = 0; u < q; ++u) {
    if (L(u, u) != 1.0) throw ShapeError("L must have a unit diagonal");
    for (Eigen::Index v = 0; v < q; ++v)
      if (u != v && L(u, v) != 0.0) coefs.push_back({static_cast<int>(u), static_cast<int>(v), L(u, v)});
  }
  return CholParams(D.diagonal(), std::move(coefs));
}

Matrix CholParams::L() const {
  Matrix l = Matrix::Identity(q(), q());
  for (const auto& c : coefficients_) l(c.u, c.v) = c.value;
  return l;
}

Matrix CholParams::D() const { return variances_.asDiagonal(); }

bool CholParams::supported_on(const Dag& dag) const {
  if (dag.q() != q()) return false;
  return std::all_of(coefficients_.begin(), coefficients_.end(),
                     [&](const Coefficient& c) { return dag.has_edge(c.u, c.v); });
}

NodeConditional node_conditional(const Matrix& M, int j, std::vector<int> parents) {
  NodeConditional c;
  c.parents = std::move(parents);
  if (c.parents.empty()) {
    c.schur = M(j, j);
    if (!(c.schur > 0.0)) throw NotSpdError(static_cast<std::size_t>(j), c.schur);
    return c;
  }
  c.chol = cholesky_lower(principal_submatrix(M, c.parents));
  const Vector w = solve_lower(c.chol, column_subvector(M, c.parents, j));
  c.mean = -solve_lower_transpose(c.chol, w);
  c.schur = M(j, j) - w.squaredNorm();
  if (!(c.schur > 0.0)) throw NotSpdError(static_cast<std::size_t>(j), c.schur);
  c.logdet = logdet_from_cholesky(c.chol);
  return c;
}

std::vector<double> node_shapes(const Dag& dag, double a) {
  const int q = dag.q();
  if (!(a > q - 1.0)) throw HyperError("shape hyperparameter must satisfy a > q - 1");
  std::vector<double> out;
  for (int j = 0; j < q; ++j) out.push_back(node_shape(a, dag.parents(j).size(), q));
  return out;
}

std::vector<CholParams> sample_prior(const Dag& dag, const DagWishartHyper& hyper, Rng& rng, std::size_t n) {
  hyper.validate();
  check_dims(dag, hyper);
  if (n == 0) throw DomainError("sample_prior requires n >= 1");
  std::vector<NodeConditional> conds;
  for (int j = 0; j < dag.q(); ++j) conds.push_back(node_conditional(hyper.U, j, dag.parents(j)));
  std::vector<CholParams> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    out.push_back(draw_params(dag, hyper.a, rng,
                              [&](int j, const std::vector<int>&) -> const NodeConditional& {
                                return conds[static_cast<std::size_t>(j)];
                              }));
  return out;
}

DagWishartHyper posterior_hyper(const DagWishartHyper& hyper, const Matrix& tXX, std::size_t n) {
  if (tXX.rows() != hyper.U.rows() || tXX.cols() != hyper.U.cols())
    throw ShapeError("tXX dimensions do not match U");
  DagWishartHyper post{hyper.a + static_cast<double>(n), hyper.U + tXX};
  post.U = 0.5 * (post.U + post.U.transpose());
  return post;
}

double node_log_marginal(int j, const Dag& dag, const Matrix& tXX, std::size_t n, const DagWishartHyper& hyper) {
  hyper.validate();
  check_dims(dag, hyper);
  const DagWishartHyper post = posterior_hyper(hyper, tXX, n);
  const std::vector<int> pa = dag.parents(j);
  return log_marginal_from_conditionals(node_conditional(hyper.U, j, pa), node_conditional(post.U, j, pa),
                                        hyper.a, post.a, dag.q(), n);
}

double dag_log_marginal(const Dag& dag, const Matrix& tXX, std::size_t n, const DagWishartHyper& hyper) {
  double s = 0.0;
  for (int j = 0; j < dag.q(); ++j) s += node_log_marginal(j, dag, tXX, n, hyper);
  return s;
}

Matrix omega_from_chol(const CholParams& p) {
  const Matrix L = p.L();
  Matrix omega = L * p.variances().cwiseInverse().asDiagonal() * L.transpose();
  return 0.5 * (omega + omega.transpose());
}

DagWishartScorer::DagWishartScorer(DagWishartHyper hyper, const Matrix& tXX, std::size_t n)
    : prior_(std::move(hyper)), n_(n) {
  prior_.validate();
  posterior_ = posterior_hyper(prior_, tXX, n);
}

const NodeConditional& DagWishartScorer::cached(bool post, int j, const std::vector<int>& parents) const {
  std::string key;
  key.reserve(2 + parents.size() * 2);
  key.push_back(post ? 'p' : 'u');
  auto put = [&](int x) {
    key.push_back(static_cast<char>(x & 0xff));
    key.push_back(static_cast<char>((x >> 8) & 0xff));
  };
  put(j);
  for (int p : parents) put(p);
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = cache_.find(key);
  if (it != cache_.end()) return *it->second;
  auto c = std::make_unique<NodeConditional>(node_conditional(post ? posterior_.U : prior_.U, j, parents));
  return *cache_.emplace(std::move(key), std::move(c)).first->second;
}

double DagWishartScorer::node(int j, const std::vector<int>& parents) const {
  return log_marginal_from_conditionals(cached(false, j, parents), cached(true, j, parents), prior_.a,
                                        posterior_.a, q(), n_);
}

double DagWishartScorer::dag(const Dag& dag) const {
  check_dims(dag, prior_);
  double s = 0.0;
  for (int j = 0; j < dag.q(); ++j) s += node(j, dag);
  return s;
}

CholParams DagWishartScorer::sample_posterior(const Dag& dag, Rng& rng) const {
  check_dims(dag, prior_);
  return draw_params(dag, posterior_.a, rng, [&](int j, const std::vector<int>& pa) -> const NodeConditional& {
    return cached(true, j, pa);
  });
}

std::size_t DagWishartScorer::cache_size() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return cache_.size();
}

}  // namespace gaussdag
