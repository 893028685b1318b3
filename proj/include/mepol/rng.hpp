#pragma once

#include <cstdint>
#include <random>

#include "mepol/types.hpp"

namespace mepol {

// Deterministic random source.  std::normal_distribution is implementation
// defined, so Gaussians are generated by an explicit Box-Muller transform to
// keep serialized outputs byte-identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform();         // [0, 1)
  double normal();          // standard normal
  Complex complex_normal(); // independent N(0,1) real and imaginary parts

  // Haar-like random unitary from the QR decomposition of a complex
  // Gaussian matrix, with the R diagonal phases absorbed.
  MatrixXc random_unitary(int n);

 private:
  std::mt19937_64 engine_;
};

}  // namespace mepol
