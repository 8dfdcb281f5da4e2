#include "kr/levi.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace kr {

namespace {

double checked(const RealFn& f, const CVector& z) {
  double v = f(z);
  if (!std::isfinite(v)) throw std::runtime_error("levi_form: non-finite function value on stencil");
  return v;
}

}  // namespace

double default_levi_step(const CVector& z) { return 1e-4 * (1.0 + z.norm()); }

double levi_form(const RealFn& f, const CVector& z, const CVector& x, double h) {
  if (z.size() != x.size()) throw std::invalid_argument("levi_form: dimension mismatch");
  if (h <= 0.0) h = default_levi_step(z);
  const Complex ih(0.0, h);
  // d2/dt dtbar of t -> f(z + tX) equals the directional Levi form; a 5-point
  // Laplacian stencil in t gives it to O(h^2).
  double vp = checked(f, z + h * x);
  double vm = checked(f, z - h * x);
  double vip = checked(f, z + ih * x);
  double vim = checked(f, z - ih * x);
  double v0 = checked(f, z);
  return (vp + vm + vip + vim - 4.0 * v0) / (4.0 * h * h);
}

Complex levi_form_exact(const MixedPolynomial& p, const CVector& z, const CVector& x) {
  if (z.size() != p.dimension() || x.size() != p.dimension())
    throw std::invalid_argument("levi_form_exact: dimension mismatch");
  Complex sum = 0.0;
  for (int i = 0; i < p.dimension(); ++i) {
    MixedPolynomial di = p.wirtinger_dz(i);
    for (int j = 0; j < p.dimension(); ++j) {
      MixedPolynomial dij = di.wirtinger_dzbar(j);
      if (dij.empty()) continue;
      sum += dij.eval(z) * x[i] * std::conj(x[j]);
    }
  }
  return sum;
}

HermitianMatrix levi_matrix(const RealFn& f, const CVector& z, double h) {
  const int n = static_cast<int>(z.size());
  HermitianMatrix m(n, n);
  Eigen::VectorXd diag(n);
  for (int i = 0; i < n; ++i) {
    CVector ei = CVector::Zero(n);
    ei[i] = 1.0;
    diag[i] = levi_form(f, z, ei, h);
    m(i, i) = diag[i];
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      CVector e_re = CVector::Zero(n), e_im = CVector::Zero(n);
      e_re[i] = 1.0;
      e_re[j] = 1.0;
      e_im[i] = 1.0;
      e_im[j] = Complex(0.0, 1.0);
      // L(e_i+e_j) = L_ii + L_jj + 2 Re L_ij,  L(e_i + i e_j) = L_ii + L_jj + 2 Im L_ij.
      double s_re = levi_form(f, z, e_re, h);
      double s_im = levi_form(f, z, e_im, h);
      Complex lij(0.5 * (s_re - diag[i] - diag[j]), 0.5 * (s_im - diag[i] - diag[j]));
      m(i, j) = lij;
      m(j, i) = std::conj(lij);
    }
  }
  return m;
}

HermitianMatrix levi_matrix_exact(const MixedPolynomial& p, const CVector& z) {
  const int n = p.dimension();
  HermitianMatrix m(n, n);
  for (int i = 0; i < n; ++i) {
    MixedPolynomial di = p.wirtinger_dz(i);
    for (int j = 0; j < n; ++j) m(i, j) = di.wirtinger_dzbar(j).eval(z);
  }
  return m;
}

double hermitian_defect(const HermitianMatrix& h) {
  double d = 0.0;
  for (Eigen::Index i = 0; i < h.rows(); ++i)
    for (Eigen::Index j = 0; j < h.cols(); ++j)
      d = std::max(d, std::abs(h(i, j) - std::conj(h(j, i))));
  return d;
}

double min_levi_eigenvalue(const HermitianMatrix& h) {
  HermitianMatrix sym = 0.5 * (h + h.adjoint().eval());
  Eigen::SelfAdjointEigenSolver<HermitianMatrix> solver(sym, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw std::runtime_error("min_levi_eigenvalue: eigensolver failed");
  return solver.eigenvalues().minCoeff();
}

double min_levi_eigenvalue(const RealFn& f, const CVector& z, double h) {
  return min_levi_eigenvalue(levi_matrix(f, z, h));
}

MixedPolynomial levi_radial(const MixedPolynomial& q) {
  int degree = 0;
  if (!q.is_homogeneous(&degree)) throw std::invalid_argument("levi_radial: input is not homogeneous");
  MixedPolynomial out(q.dimension());
  for (const auto& [key, c] : q.terms()) {
    int nu = multi_degree(key.first);
    int mu = multi_degree(key.second);
    if (nu == 0 || mu == 0) continue;
    out.add_term(key.first, key.second, c * static_cast<double>(nu * mu));
  }
  return out;
}

}  // namespace kr
