#include "gaussdag/errors.hpp"

#include <sstream>

namespace gaussdag {

namespace {
std::string pivot_message(std::size_t pivot, double value) {
  std::ostringstream os;
  os << "matrix is not positive definite: pivot " << pivot << " has value " << value;
  return os.str();
}
}  // namespace

NotSpdError::NotSpdError(std::size_t pivot, double value)
    : Error(pivot_message(pivot, value)), pivot_(pivot) {}

SamplerError::SamplerError(std::size_t iteration, const std::string& what)
    : Error("iteration " + std::to_string(iteration) + ": " + what), iteration_(iteration) {}

}  // namespace gaussdag
