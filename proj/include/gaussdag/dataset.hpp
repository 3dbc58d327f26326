#pragma once

#include "gaussdag/numkernel.hpp"

#include <cstddef>

namespace gaussdag {

/// n × q observations with their cached Gram matrix XᵀX.
struct Dataset {
  Matrix X;
  Matrix tXX;

  std::size_t n() const { return static_cast<std::size_t>(X.rows()); }
  int q() const { return static_cast<int>(X.cols()); }

  static Dataset from_matrix(Matrix X) {
    Dataset d;
    d.tXX = gram(X);
    d.X = std::move(X);
    return d;
  }
};

}  // namespace gaussdag
