#include <doctest.h>

#include <numbers>
#include <random>

#include "kr/complex_poly.hpp"
#include "kr/domain.hpp"

using namespace kr;

namespace {

std::mt19937_64 g_rng(20260810);

Complex rand_coeff() {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  return {u(g_rng), u(g_rng)};
}

CVector rand_point(int n, double radius) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (;;) {
    CVector z(n);
    for (int i = 0; i < n; ++i) z[i] = radius * Complex(u(g_rng), u(g_rng));
    if (z.norm() < radius) return z;
  }
}

MultiIndex rand_index(int n, int degree) {
  MultiIndex m(static_cast<std::size_t>(n), 0);
  std::uniform_int_distribution<int> pick(0, n - 1);
  for (int i = 0; i < degree; ++i) m[static_cast<std::size_t>(pick(g_rng))]++;
  return m;
}

// Random homogeneous polynomial of total degree j with <= max_terms terms.
MixedPolynomial rand_homogeneous(int n, int j, int max_terms) {
  MixedPolynomial p(n);
  std::uniform_int_distribution<int> split(0, j);
  for (int t = 0; t < max_terms; ++t) {
    int da = split(g_rng);
    p.add_term(rand_index(n, da), rand_index(n, j - da), rand_coeff());
  }
  return p;
}

MixedPolynomial rand_real_valued(int n, int j, int max_terms) {
  MixedPolynomial p = rand_homogeneous(n, j, max_terms);
  MixedPolynomial q = p.conjugate();
  p += q;
  p *= 0.5;
  return p;
}

}  // namespace

TEST_CASE("eval on monomials and the zero polynomial") {
  MixedPolynomial p = MixedPolynomial::abs2(2, 0);  // |z_1|^2
  CHECK(p.eval(cvec({2.0, 0.0})).real() == doctest::Approx(4.0).epsilon(1e-14));
  MixedPolynomial zero(2);
  CHECK(zero.eval(cvec({1.0, 2.0})) == Complex(0.0));
  CHECK_THROWS_AS((void)p.eval(cvec({1.0})), std::invalid_argument);
}

TEST_CASE("eval matches the closed angular form of the obstruction polynomial") {
  // |z|^{2m} (4 m^2 cos(2 l theta) + 4 (m^2 - l^2)) for m=2, l=1
  MixedPolynomial p = remark5_p(2, 1);
  Complex z1 = std::polar(1.0, std::numbers::pi / 2.0);
  CHECK(p.eval(cvec({z1})).real() == doctest::Approx(-4.0).epsilon(1e-12));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    double rho = u(g_rng), theta = 2.0 * std::numbers::pi * u(g_rng);
    double closed = std::pow(rho, 4) * (16.0 * std::cos(2.0 * theta) + 12.0);
    CHECK(p.eval(cvec({std::polar(rho, theta)})).real() == doctest::Approx(closed).epsilon(1e-12));
  }
}

TEST_CASE("real-valued tables evaluate with negligible imaginary part") {
  for (int trial = 0; trial < 30; ++trial) {
    MixedPolynomial p = rand_real_valued(3, 2 + trial % 3, 6);
    REQUIRE(p.is_real_valued());
    CVector z = rand_point(3, 1.0);
    Complex v = p.eval(z);
    CHECK(std::abs(v.imag()) <= 1e-12 * (1.0 + std::abs(v)));
    CHECK(p.eval_real(z) == v.real());
  }
}

TEST_CASE("homogeneity under real scaling") {
  for (int trial = 0; trial < 20; ++trial) {
    int j = 2 + trial % 3;
    MixedPolynomial q = rand_homogeneous(2, j, 5);
    int deg = 0;
    REQUIRE(q.is_homogeneous(&deg));
    if (q.empty()) continue;
    REQUIRE(deg == j);
    CVector z = rand_point(2, 1.0);
    for (double t : {2.0, 0.5}) {
      Complex lhs = q.eval(t * z);
      Complex rhs = std::pow(t, j) * q.eval(z);
      CHECK(std::abs(lhs - rhs) <= 1e-12 * (1.0 + std::abs(rhs)));
    }
  }
}

TEST_CASE("product, conjugate and real part behave pointwise") {
  for (int trial = 0; trial < 15; ++trial) {
    MixedPolynomial a = rand_homogeneous(2, 2, 4);
    MixedPolynomial b = rand_homogeneous(2, 1 + trial % 2, 3);
    CVector z = rand_point(2, 1.0);
    Complex va = a.eval(z), vb = b.eval(z);
    CHECK(std::abs((a * b).eval(z) - va * vb) <= 1e-12 * (1.0 + std::abs(va * vb)));
    CHECK(std::abs(a.conjugate().eval(z) - std::conj(va)) <= 1e-13 * (1.0 + std::abs(va)));
    CHECK(std::abs(a.real_part().eval(z) - Complex(va.real())) <= 1e-13 * (1.0 + std::abs(va)));
  }
}

TEST_CASE("wirtinger derivatives on explicit monomials") {
  // d/dz1 (z1^2 zbar1) = 2 z1 zbar1, d/dzbar1 = z1^2
  MixedPolynomial p = MixedPolynomial::monomial({2}, {1}, 1.0);
  CVector z = cvec({Complex(0.3, 0.7)});
  Complex z1 = z[0];
  CHECK(std::abs(p.wirtinger_dz(0).eval(z) - 2.0 * z1 * std::conj(z1)) < 1e-14);
  CHECK(std::abs(p.wirtinger_dzbar(0).eval(z) - z1 * z1) < 1e-14);
  CHECK(p.is_holomorphic() == false);
  CHECK(MixedPolynomial::variable(2, 0).is_holomorphic());
}

TEST_CASE("affine substitution agrees with composed evaluation") {
  MixedPolynomial p(2);
  p.add_term({1, 0}, {0, 1}, Complex(0.5, -1.0));  // z1 zbar2
  p.add_term({0, 2}, {0, 0}, 1.0);                 // z2^2
  Eigen::MatrixXcd a(2, 2);
  a << Complex(0.2, 0.1), Complex(-0.3, 0.0), Complex(0.0, 0.4), Complex(1.0, -0.2);
  CVector b = cvec({Complex(0.1, 0.0), Complex(0.0, -0.2)});
  MixedPolynomial q = p.substitute_affine(a, b);
  for (int trial = 0; trial < 20; ++trial) {
    CVector w = rand_point(2, 1.0);
    Complex direct = p.eval(b + a * w);
    CHECK(std::abs(q.eval(w) - direct) <= 1e-12 * (1.0 + std::abs(direct)));
  }
}

TEST_CASE("term bookkeeping drops zeros and accumulates") {
  MixedPolynomial p(1);
  p.add_term({1}, {0}, 1.0);
  p.add_term({1}, {0}, -1.0);
  CHECK(p.empty());
  p.add_term({2}, {1}, Complex(0.0, 0.0));
  CHECK(p.empty());
  p.add_term({2}, {1}, 2.0);
  CHECK(p.coefficient({2}, {1}) == Complex(2.0));
  CHECK(p.total_degree() == 3);
}
