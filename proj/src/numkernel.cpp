#include "gaussdag/numkernel.hpp"

#include "gaussdag/errors.hpp"

#include <cmath>
#include <limits>

namespace gaussdag {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

Rng Rng::split(std::uint64_t seed, std::uint64_t stream) {
  return Rng(splitmix64(seed ^ splitmix64(stream + 0x5851F42D4C957F2DULL)));
}

double Rng::uniform() {
  // 53 random bits, shifted by half an ulp so neither endpoint is reachable.
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

std::size_t Rng::uniform_index(std::size_t n) {
  const std::uint64_t range = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % range;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return static_cast<std::size_t>(x % range);
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  has_spare_ = true;
  return u * f;
}

double Rng::gamma(double shape) {
  if (shape < 1.0) {
    const double g = gamma(shape + 1.0);
    return g * std::pow(uniform(), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

Matrix symmetrize(const Matrix& m) {
  if (m.rows() != m.cols()) throw ShapeError("matrix is not square");
  const double scale = m.cwiseAbs().maxCoeff();
  if (m.size() > 0) {
    const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12 * scale) throw ShapeError("matrix is not symmetric");
  }
  return 0.5 * (m + m.transpose());
}

Matrix cholesky_lower(const Matrix& m) {
  if (m.rows() != m.cols()) throw ShapeError("matrix is not square");
  const Eigen::Index n = m.rows();
  Matrix c = Matrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double d = m(j, j);
    for (Eigen::Index k = 0; k < j; ++k) d -= c(j, k) * c(j, k);
    if (!(d > 0.0)) throw NotSpdError(static_cast<std::size_t>(j), d);
    const double djj = std::sqrt(d);
    c(j, j) = djj;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      double s = m(i, j);
      for (Eigen::Index k = 0; k < j; ++k) s -= c(i, k) * c(j, k);
      c(i, j) = s / djj;
    }
  }
  return c;
}

double logdet_from_cholesky(const Matrix& chol) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < chol.rows(); ++i) s += std::log(chol(i, i));
  return 2.0 * s;
}

double logdet_spd(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return logdet_from_cholesky(cholesky_lower(m));
}

Matrix principal_submatrix(const Matrix& m, std::span<const int> idx) {
  const auto k = static_cast<Eigen::Index>(idx.size());
  Matrix out(k, k);
  for (Eigen::Index a = 0; a < k; ++a)
    for (Eigen::Index b = 0; b < k; ++b) out(a, b) = m(idx[a], idx[b]);
  return out;
}

Vector column_subvector(const Matrix& m, std::span<const int> rows, int col) {
  Vector out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t a = 0; a < rows.size(); ++a) out(static_cast<Eigen::Index>(a)) = m(rows[a], col);
  return out;
}

Vector solve_lower(const Matrix& chol, const Vector& b) {
  const Eigen::Index n = chol.rows();
  Vector x(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double s = b(i);
    for (Eigen::Index k = 0; k < i; ++k) s -= chol(i, k) * x(k);
    x(i) = s / chol(i, i);
  }
  return x;
}

Vector solve_lower_transpose(const Matrix& chol, const Vector& b) {
  const Eigen::Index n = chol.rows();
  Vector x(n);
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    double s = b(i);
    for (Eigen::Index k = i + 1; k < n; ++k) s -= chol(k, i) * x(k);
    x(i) = s / chol(i, i);
  }
  return x;
}

double schur_scalar(const Matrix& m, int j, std::span<const int> A) {
  const int q = static_cast<int>(m.rows());
  if (m.rows() != m.cols()) throw ShapeError("matrix is not square");
  if (j < 0 || j >= q) throw IndexError("schur_scalar: index out of range");
  for (int a : A) {
    if (a < 0 || a >= q) throw IndexError("schur_scalar: conditioning index out of range");
    if (a == j) throw IndexError("schur_scalar: conditioning set contains j");
  }
  if (A.empty()) return m(j, j);
  const Matrix chol = cholesky_lower(principal_submatrix(m, A));
  const Vector z = solve_lower(chol, column_subvector(m, A, j));
  return m(j, j) - z.squaredNorm();
}

Vector sample_mvn(const Vector& mean, const Matrix& cov, Rng& rng) {
  if (cov.rows() != mean.size() || cov.cols() != mean.size())
    throw ShapeError("sample_mvn: mean and covariance dimensions differ");
  if (mean.size() == 0) return Vector();
  const Matrix c = cholesky_lower(cov);
  Vector z(mean.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.normal();
  return mean + c.triangularView<Eigen::Lower>() * z;
}

double sample_inverse_gamma(double shape, double rate, Rng& rng) {
  if (!(shape > 0.0) || !(rate > 0.0) || !std::isfinite(shape) || !std::isfinite(rate))
    throw DomainError("inverse gamma requires shape > 0 and rate > 0");
  return rate / rng.gamma(shape);
}

Matrix gram(const Matrix& X) {
  const Eigen::Index q = X.cols();
  Matrix g = Matrix::Zero(q, q);
  for (Eigen::Index u = 0; u < q; ++u)
    for (Eigen::Index v = 0; v <= u; ++v) {
      const double s = X.col(u).dot(X.col(v));
      g(u, v) = s;
      g(v, u) = s;
    }
  return g;
}

}  // namespace gaussdag
