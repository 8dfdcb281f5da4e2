#include "kr/complex_poly.hpp"

#include <algorithm>
#include <cmath>

namespace kr {

namespace {

// exact zeros only; callers decide about rounding
bool near_zero(Complex c) { return c == Complex(0.0, 0.0); }

void check_index(const MultiIndex& m, int dim, const char* what) {
  if (static_cast<int>(m.size()) != dim)
    throw std::invalid_argument(std::string(what) + ": multi-index length does not match dimension");
  for (int e : m)
    if (e < 0) throw std::invalid_argument(std::string(what) + ": negative exponent");
}

}  // namespace

int multi_degree(const MultiIndex& a) {
  int d = 0;
  for (int e : a) d += e;
  return d;
}

CVector cvec(std::initializer_list<Complex> entries) {
  CVector z(static_cast<Eigen::Index>(entries.size()));
  Eigen::Index i = 0;
  for (Complex c : entries) z[i++] = c;
  return z;
}

bool all_finite(const CVector& z) {
  for (Eigen::Index i = 0; i < z.size(); ++i)
    if (!std::isfinite(z[i].real()) || !std::isfinite(z[i].imag())) return false;
  return true;
}

MixedPolynomial::MixedPolynomial(int dimension) : dim_(dimension) {
  if (dimension < 1) throw std::invalid_argument("MixedPolynomial: dimension must be >= 1");
}

MixedPolynomial MixedPolynomial::constant(int dimension, Complex value) {
  MixedPolynomial p(dimension);
  p.add_term(MultiIndex(dimension, 0), MultiIndex(dimension, 0), value);
  return p;
}

MixedPolynomial MixedPolynomial::monomial(MultiIndex alpha, MultiIndex beta, Complex coeff) {
  if (alpha.size() != beta.size()) throw std::invalid_argument("monomial: alpha/beta length mismatch");
  MixedPolynomial p(static_cast<int>(alpha.size()));
  p.add_term(alpha, beta, coeff);
  return p;
}

MixedPolynomial MixedPolynomial::variable(int dimension, int i) {
  MultiIndex alpha(dimension, 0), beta(dimension, 0);
  alpha.at(i) = 1;
  return monomial(alpha, beta, 1.0);
}

MixedPolynomial MixedPolynomial::abs2(int dimension, int i) {
  MultiIndex alpha(dimension, 0), beta(dimension, 0);
  alpha.at(i) = 1;
  beta.at(i) = 1;
  return monomial(alpha, beta, 1.0);
}

MixedPolynomial MixedPolynomial::re_variable(int dimension, int i) {
  MixedPolynomial p(dimension);
  MultiIndex alpha(dimension, 0), beta(dimension, 0);
  alpha.at(i) = 1;
  p.add_term(alpha, beta, 0.5);
  std::swap(alpha, beta);
  p.add_term(alpha, beta, 0.5);
  return p;
}

MixedPolynomial MixedPolynomial::norm2(int dimension) {
  MixedPolynomial p(dimension);
  for (int i = 0; i < dimension; ++i) p += abs2(dimension, i);
  return p;
}

void MixedPolynomial::add_term(const MultiIndex& alpha, const MultiIndex& beta, Complex coeff) {
  check_index(alpha, dim_, "add_term(alpha)");
  check_index(beta, dim_, "add_term(beta)");
  if (near_zero(coeff)) return;
  auto key = Key(alpha, beta);
  auto it = terms_.find(key);
  if (it == terms_.end()) {
    terms_.emplace(std::move(key), coeff);
  } else {
    it->second += coeff;
    if (near_zero(it->second)) terms_.erase(it);
  }
}

Complex MixedPolynomial::coefficient(const MultiIndex& alpha, const MultiIndex& beta) const {
  auto it = terms_.find(Key(alpha, beta));
  return it == terms_.end() ? Complex(0.0) : it->second;
}

MixedPolynomial& MixedPolynomial::operator+=(const MixedPolynomial& other) {
  if (other.dim_ != dim_) throw std::invalid_argument("operator+=: dimension mismatch");
  for (const auto& [key, c] : other.terms_) add_term(key.first, key.second, c);
  return *this;
}

MixedPolynomial& MixedPolynomial::operator-=(const MixedPolynomial& other) {
  if (other.dim_ != dim_) throw std::invalid_argument("operator-=: dimension mismatch");
  for (const auto& [key, c] : other.terms_) add_term(key.first, key.second, -c);
  return *this;
}

MixedPolynomial& MixedPolynomial::operator*=(Complex scalar) {
  if (near_zero(scalar)) {
    terms_.clear();
    return *this;
  }
  for (auto& [key, c] : terms_) c *= scalar;
  return *this;
}

MixedPolynomial MixedPolynomial::operator*(const MixedPolynomial& other) const {
  if (other.dim_ != dim_) throw std::invalid_argument("operator*: dimension mismatch");
  MixedPolynomial out(dim_);
  for (const auto& [ka, ca] : terms_) {
    for (const auto& [kb, cb] : other.terms_) {
      MultiIndex alpha(dim_), beta(dim_);
      for (int i = 0; i < dim_; ++i) {
        alpha[i] = ka.first[i] + kb.first[i];
        beta[i] = ka.second[i] + kb.second[i];
      }
      out.add_term(alpha, beta, ca * cb);
    }
  }
  return out;
}

MixedPolynomial MixedPolynomial::conjugate() const {
  MixedPolynomial out(dim_);
  for (const auto& [key, c] : terms_) out.add_term(key.second, key.first, std::conj(c));
  return out;
}

MixedPolynomial MixedPolynomial::real_part() const {
  MixedPolynomial out = *this;
  out += conjugate();
  out *= 0.5;
  return out;
}

bool MixedPolynomial::is_real_valued(double tol) const {
  double scale = 0.0;
  for (const auto& [key, c] : terms_) scale = std::max(scale, std::abs(c));
  for (const auto& [key, c] : terms_) {
    Complex mirror = coefficient(key.second, key.first);
    if (std::abs(c - std::conj(mirror)) > tol * (1.0 + scale)) return false;
  }
  return true;
}

bool MixedPolynomial::is_holomorphic() const {
  for (const auto& [key, c] : terms_)
    if (multi_degree(key.second) != 0) return false;
  return true;
}

int MixedPolynomial::total_degree() const {
  int d = 0;
  for (const auto& [key, c] : terms_)
    d = std::max(d, multi_degree(key.first) + multi_degree(key.second));
  return d;
}

bool MixedPolynomial::is_homogeneous(int* degree) const {
  int d = -1;
  for (const auto& [key, c] : terms_) {
    int dj = multi_degree(key.first) + multi_degree(key.second);
    if (d < 0) d = dj;
    if (dj != d) return false;
  }
  if (degree) *degree = std::max(d, 0);
  return true;
}

Complex MixedPolynomial::eval(const CVector& z) const {
  if (z.size() != dim_) throw std::invalid_argument("eval: dimension mismatch");
  // Per-coordinate power tables up to the largest exponent in use.
  std::vector<int> max_a(dim_, 0), max_b(dim_, 0);
  for (const auto& [key, c] : terms_) {
    for (int i = 0; i < dim_; ++i) {
      max_a[i] = std::max(max_a[i], key.first[i]);
      max_b[i] = std::max(max_b[i], key.second[i]);
    }
  }
  std::vector<std::vector<Complex>> zp(dim_), zbp(dim_);
  for (int i = 0; i < dim_; ++i) {
    zp[i].resize(max_a[i] + 1);
    zbp[i].resize(max_b[i] + 1);
    zp[i][0] = 1.0;
    zbp[i][0] = 1.0;
    for (int e = 1; e <= max_a[i]; ++e) zp[i][e] = zp[i][e - 1] * z[i];
    Complex zc = std::conj(z[i]);
    for (int e = 1; e <= max_b[i]; ++e) zbp[i][e] = zbp[i][e - 1] * zc;
  }
  Complex sum = 0.0;
  for (const auto& [key, c] : terms_) {
    Complex t = c;
    for (int i = 0; i < dim_; ++i) {
      if (key.first[i]) t *= zp[i][key.first[i]];
      if (key.second[i]) t *= zbp[i][key.second[i]];
    }
    sum += t;
  }
  return sum;
}

double MixedPolynomial::eval_real(const CVector& z) const {
  Complex v = eval(z);
  if (std::abs(v.imag()) > 1e-12 * (1.0 + std::abs(v)))
    throw std::runtime_error("eval_real: nontrivial imaginary part (table not conjugate-symmetric?)");
  return v.real();
}

MixedPolynomial MixedPolynomial::wirtinger_dz(int i) const {
  if (i < 0 || i >= dim_) throw std::invalid_argument("wirtinger_dz: bad variable index");
  MixedPolynomial out(dim_);
  for (const auto& [key, c] : terms_) {
    if (key.first[i] == 0) continue;
    MultiIndex alpha = key.first;
    alpha[i] -= 1;
    out.add_term(alpha, key.second, c * static_cast<double>(key.first[i]));
  }
  return out;
}

MixedPolynomial MixedPolynomial::wirtinger_dzbar(int i) const {
  if (i < 0 || i >= dim_) throw std::invalid_argument("wirtinger_dzbar: bad variable index");
  MixedPolynomial out(dim_);
  for (const auto& [key, c] : terms_) {
    if (key.second[i] == 0) continue;
    MultiIndex beta = key.second;
    beta[i] -= 1;
    out.add_term(key.first, beta, c * static_cast<double>(key.second[i]));
  }
  return out;
}

CVector MixedPolynomial::holomorphic_gradient(const CVector& z) const {
  CVector g(dim_);
  for (int i = 0; i < dim_; ++i) g[i] = wirtinger_dz(i).eval(z);
  return g;
}

MixedPolynomial MixedPolynomial::substitute_affine(const Eigen::MatrixXcd& a, const CVector& offset) const {
  if (a.rows() != dim_ || offset.size() != dim_)
    throw std::invalid_argument("substitute_affine: map shape does not match dimension");
  const int m = static_cast<int>(a.cols());

  // Affine images of each coordinate and their conjugates, with cached powers.
  std::vector<MixedPolynomial> lin, lin_conj;
  lin.reserve(dim_);
  for (int i = 0; i < dim_; ++i) {
    MixedPolynomial li = MixedPolynomial::constant(m, offset[i]);
    for (int j = 0; j < m; ++j) li += a(i, j) * MixedPolynomial::variable(m, j);
    lin.push_back(li);
    lin_conj.push_back(li.conjugate());
  }
  std::vector<std::vector<MixedPolynomial>> pow_lin(dim_), pow_conj(dim_);
  auto power_of = [m](std::vector<MixedPolynomial>& cache, const MixedPolynomial& base, int e) -> const MixedPolynomial& {
    if (cache.empty()) cache.push_back(MixedPolynomial::constant(m, 1.0));
    while (static_cast<int>(cache.size()) <= e) cache.push_back(cache.back() * base);
    return cache[e];
  };

  MixedPolynomial out(m);
  for (const auto& [key, c] : terms_) {
    MixedPolynomial t = MixedPolynomial::constant(m, c);
    for (int i = 0; i < dim_; ++i) {
      if (key.first[i]) t = t * power_of(pow_lin[i], lin[i], key.first[i]);
      if (key.second[i]) t = t * power_of(pow_conj[i], lin_conj[i], key.second[i]);
    }
    out += t;
  }
  return out;
}

MixedPolynomial MixedPolynomial::degree_part(int j) const {
  MixedPolynomial out(dim_);
  for (const auto& [key, c] : terms_)
    if (multi_degree(key.first) + multi_degree(key.second) == j) out.add_term(key.first, key.second, c);
  return out;
}

RealFn MixedPolynomial::as_real_fn() const {
  MixedPolynomial copy = *this;
  return [copy](const CVector& z) { return copy.eval(z).real(); };
}

}  // namespace kr
