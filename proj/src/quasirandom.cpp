#include "kr/quasirandom.hpp"

namespace kr {

namespace {
constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
}

HaltonSequence::HaltonSequence(int dimension, std::uint64_t start_index)
    : dim_(dimension), index_(start_index) {
  if (dimension < 1 || dimension > static_cast<int>(std::size(kPrimes)))
    throw std::invalid_argument("HaltonSequence: unsupported dimension");
  if (start_index == 0) index_ = 1;  // index 0 is the origin in every base
  bases_.assign(kPrimes, kPrimes + dimension);
}

std::vector<double> HaltonSequence::next() {
  std::vector<double> p(dim_);
  for (int d = 0; d < dim_; ++d) {
    double f = 1.0, value = 0.0;
    std::uint64_t i = index_;
    while (i > 0) {
      f /= bases_[d];
      value += f * static_cast<double>(i % bases_[d]);
      i /= bases_[d];
    }
    p[d] = value;
  }
  ++index_;
  return p;
}

CVector next_in_complex_ball(HaltonSequence& seq, int n, double radius) {
  if (seq.dimension() != 2 * n) throw std::invalid_argument("next_in_complex_ball: sequence dimension must be 2n");
  for (;;) {
    std::vector<double> u = seq.next();
    CVector z(n);
    double norm2 = 0.0;
    for (int i = 0; i < n; ++i) {
      double re = (2.0 * u[2 * i] - 1.0) * radius;
      double im = (2.0 * u[2 * i + 1] - 1.0) * radius;
      z[i] = Complex(re, im);
      norm2 += re * re + im * im;
    }
    if (norm2 < radius * radius) return z;
  }
}

}  // namespace kr
