#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gaussdag {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input validation.
class ShapeError : public Error { public: using Error::Error; };
class IndexError : public Error { public: using Error::Error; };
class DomainError : public Error { public: using Error::Error; };
class TooLargeError : public Error { public: using Error::Error; };

// Graph structure.
class CycleError : public Error { public: using Error::Error; };
class NotApplicableError : public Error { public: using Error::Error; };
class NoMoveError : public Error { public: using Error::Error; };

// Priors and samplers.
class HyperError : public Error { public: using Error::Error; };
class DegenerateError : public Error { public: using Error::Error; };
class ConfigError : public Error { public: using Error::Error; };

// Chains and queries.
class CorruptEncodingError : public Error { public: using Error::Error; };
class QueryError : public Error { public: using Error::Error; };
class CollapsedChainError : public Error { public: using Error::Error; };
class EmptyChainError : public Error { public: using Error::Error; };

/// Cholesky pivot was not strictly positive. `pivot()` is the 0-based index.
class NotSpdError : public Error {
 public:
  NotSpdError(std::size_t pivot, double value);
  std::size_t pivot() const { return pivot_; }

 private:
  std::size_t pivot_;
};

/// Numeric failure inside a sampler, tagged with the iteration it happened at.
class SamplerError : public Error {
 public:
  SamplerError(std::size_t iteration, const std::string& what);
  std::size_t iteration() const { return iteration_; }

 private:
  std::size_t iteration_;
};

}  // namespace gaussdag
