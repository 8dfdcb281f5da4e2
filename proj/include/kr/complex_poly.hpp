#pragma once

// Sparse polynomials in (z, conj z) over C^n and the Wirtinger calculus on them.
// A MixedPolynomial stores finitely many terms a_{alpha,beta} z^alpha zbar^beta
// keyed by the pair of multi-indices; everything downstream (Taylor data, Levi
// forms, defining functions of the model domains) is built on this algebra.

#include <complex>
#include <functional>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace kr {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using HermitianMatrix = Eigen::MatrixXcd;

/// Real-valued function on C^n (identified with R^{2n}).
using RealFn = std::function<double(const CVector&)>;

/// Exponent vector; length must equal the ambient dimension.
using MultiIndex = std::vector<int>;

int multi_degree(const MultiIndex& a);

/// Builds a CVector from a braced list, e.g. cvec({1.0, {0.0, 2.0}}).
CVector cvec(std::initializer_list<Complex> entries);

bool all_finite(const CVector& z);

class MixedPolynomial {
 public:
  using Key = std::pair<MultiIndex, MultiIndex>;  // (alpha, beta)
  using TermMap = std::map<Key, Complex>;

  explicit MixedPolynomial(int dimension);

  static MixedPolynomial constant(int dimension, Complex value);
  static MixedPolynomial monomial(MultiIndex alpha, MultiIndex beta, Complex coeff);
  /// z_i as a polynomial in n variables.
  static MixedPolynomial variable(int dimension, int i);
  /// |z_i|^2.
  static MixedPolynomial abs2(int dimension, int i);
  /// Re z_i.
  static MixedPolynomial re_variable(int dimension, int i);
  /// |z_0|^2 + ... + |z_{n-1}|^2.
  static MixedPolynomial norm2(int dimension);

  int dimension() const { return dim_; }
  const TermMap& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  /// Inserts (accumulates) a term; zero coefficients are never stored.
  void add_term(const MultiIndex& alpha, const MultiIndex& beta, Complex coeff);
  Complex coefficient(const MultiIndex& alpha, const MultiIndex& beta) const;

  MixedPolynomial& operator+=(const MixedPolynomial& other);
  MixedPolynomial& operator-=(const MixedPolynomial& other);
  MixedPolynomial& operator*=(Complex scalar);
  friend MixedPolynomial operator+(MixedPolynomial a, const MixedPolynomial& b) { return a += b; }
  friend MixedPolynomial operator-(MixedPolynomial a, const MixedPolynomial& b) { return a -= b; }
  friend MixedPolynomial operator*(MixedPolynomial a, Complex s) { return a *= s; }
  friend MixedPolynomial operator*(Complex s, MixedPolynomial a) { return a *= s; }
  MixedPolynomial operator*(const MixedPolynomial& other) const;

  /// Complex conjugate: a_{alpha,beta} -> conj(a_{beta,alpha}).
  MixedPolynomial conjugate() const;
  /// (P + conj P)/2.
  MixedPolynomial real_part() const;

  /// Conjugate symmetry a_{alpha,beta} = conj(a_{beta,alpha}) of the stored table.
  bool is_real_valued(double tol = 1e-12) const;
  /// True when every term has beta = 0.
  bool is_holomorphic() const;

  int total_degree() const;
  /// True when all terms share total degree |alpha|+|beta|; degree returned via out param.
  bool is_homogeneous(int* degree = nullptr) const;

  Complex eval(const CVector& z) const;
  /// eval() for conjugate-symmetric tables; throws if a nontrivial imaginary part shows up.
  double eval_real(const CVector& z) const;

  MixedPolynomial wirtinger_dz(int i) const;
  MixedPolynomial wirtinger_dzbar(int i) const;

  /// Holomorphic gradient (d/dz_0, ..., d/dz_{n-1}) evaluated at z.
  CVector holomorphic_gradient(const CVector& z) const;

  /// Exact composition with the affine map z = offset + A w (w has A.cols() variables).
  MixedPolynomial substitute_affine(const Eigen::MatrixXcd& a, const CVector& offset) const;

  /// Terms of exact total degree j as a new polynomial.
  MixedPolynomial degree_part(int j) const;

  RealFn as_real_fn() const;

 private:
  int dim_;
  TermMap terms_;
};

}  // namespace kr
