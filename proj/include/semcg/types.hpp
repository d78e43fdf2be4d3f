#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace semcg {

using index_t = std::int64_t;

// Which form of the local Laplacian streams through memory: the six
// precomputed geometric-factor arrays, or the per-point Jacobian-weight
// scalar with factors rebuilt on the fly.
enum class Variant { stored, remat };

constexpr const char* variant_name(Variant v) {
  return v == Variant::stored ? "stored" : "remat";
}

// Nonpositive Jacobian determinant, either for a whole deformation map
// (element < 0) or for a specific element.
class InvertedElementError : public std::runtime_error {
 public:
  InvertedElementError(index_t element, const std::string& what)
      : std::runtime_error(what), element_(element) {}
  index_t element() const { return element_; }

 private:
  index_t element_ = -1;
};

// <p, Ap> came out nonpositive; the assembled operator is not SPD, which
// signals a masking or geometry bug rather than a solver failure.
class OperatorNotSpdError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace semcg
