#pragma once

// Halton low-discrepancy points, used for all sampled suprema and
// plurisubharmonicity spot checks. Deterministic by construction.

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "kr/complex_poly.hpp"

namespace kr {

class HaltonSequence {
 public:
  explicit HaltonSequence(int dimension, std::uint64_t start_index = 1);

  /// Next point in [0,1)^dim.
  std::vector<double> next();

  int dimension() const { return dim_; }

 private:
  int dim_;
  std::uint64_t index_;
  std::vector<int> bases_;
};

/// Next point of the sequence mapped to the complex ball ||z|| < radius in C^n
/// (rejection from the bounding cube; consumes sequence elements as needed).
CVector next_in_complex_ball(HaltonSequence& seq, int n, double radius);

}  // namespace kr
