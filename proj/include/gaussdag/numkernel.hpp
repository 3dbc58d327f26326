#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <span>

namespace gaussdag {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Seeded random source. Built on mt19937_64, whose output sequence is fixed
/// by the standard; uniform, normal and gamma variates are derived here rather
/// than through <random> distributions so draws are identical across standard
/// library implementations.
///
/// A handle is single-owner. Independent streams for parallel chains (or for
/// separate purposes inside one chain) come from `Rng::split`.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  /// Stream `stream` derived from `seed` by splitmix64 mixing.
  static Rng split(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on the open interval (0, 1).
  double uniform();
  /// Uniform integer in [0, n). n must be positive.
  std::size_t uniform_index(std::size_t n);
  double normal();
  /// Gamma(shape, rate = 1). Marsaglia-Tsang, with the usual boost for shape < 1.
  double gamma(double shape);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x);

/// (m + mᵀ)/2 after checking that m is square and symmetric to 1e-12 relative.
/// Throws ShapeError otherwise.
Matrix symmetrize(const Matrix& m);

/// Lower-triangular C with C Cᵀ = m. Only the lower triangle of m is read.
/// Throws NotSpdError naming the first non-positive pivot.
Matrix cholesky_lower(const Matrix& m);

/// log|m| for s.p.d. m; the 0×0 matrix has log-determinant 0.
double logdet_spd(const Matrix& m);
double logdet_from_cholesky(const Matrix& chol);

/// m[j][j] − m[j,A] m[A,A]⁻¹ m[A,j]; m[j][j] when A is empty.
double schur_scalar(const Matrix& m, int j, std::span<const int> A);

Matrix principal_submatrix(const Matrix& m, std::span<const int> idx);
Vector column_subvector(const Matrix& m, std::span<const int> rows, int col);

/// Solve C x = b with C lower triangular.
Vector solve_lower(const Matrix& chol, const Vector& b);
/// Solve Cᵀ x = b with C lower triangular.
Vector solve_lower_transpose(const Matrix& chol, const Vector& b);

/// mean + C z, C = cholesky_lower(cov). Dimension 0 returns an empty vector.
Vector sample_mvn(const Vector& mean, const Matrix& cov, Rng& rng);

/// Inverse-Gamma(shape, rate): density ∝ x^(−shape−1) exp(−rate/x),
/// mean rate/(shape−1) for shape > 1.
double sample_inverse_gamma(double shape, double rate, Rng& rng);

/// XᵀX, symmetrized after accumulation.
Matrix gram(const Matrix& X);

}  // namespace gaussdag
