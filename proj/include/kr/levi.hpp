#pragma once

// Levi forms: exact Wirtinger route for MixedPolynomial inputs, central
// finite differences for black-box real functions, and the radial identity
// L Q_j(z)(z) = sum_nu nu(j-nu) (mixed part) for homogeneous Q_j.

#include "kr/complex_poly.hpp"

namespace kr {

/// Default finite-difference step 1e-4 * (1 + ||z||).
double default_levi_step(const CVector& z);

/// Directional Levi form sum_{i,j} d2f/dz_i dzbar_j X_i conj(X_j), central
/// differences on t -> f(z + tX). h <= 0 selects the default step.
double levi_form(const RealFn& f, const CVector& z, const CVector& x, double h = 0.0);

/// Exact Levi form of a mixed polynomial (complex in general; real for
/// conjugate-symmetric tables).
Complex levi_form_exact(const MixedPolynomial& p, const CVector& z, const CVector& x);

/// Full complex Hessian (d2f/dz_i dzbar_j) by polarization of directional forms.
HermitianMatrix levi_matrix(const RealFn& f, const CVector& z, double h = 0.0);

HermitianMatrix levi_matrix_exact(const MixedPolynomial& p, const CVector& z);

/// Hermitian deviation max_ij |H(i,j) - conj(H(j,i))|.
double hermitian_defect(const HermitianMatrix& h);

/// Least eigenvalue of the (symmetrized) numeric complex Hessian.
double min_levi_eigenvalue(const RealFn& f, const CVector& z, double h = 0.0);

double min_levi_eigenvalue(const HermitianMatrix& h);

/// Radial Levi polynomial of a homogeneous Q: every mixed term a_{alpha,beta}
/// picks up the factor |alpha|*|beta|; pure terms drop out. Throws on
/// non-homogeneous input.
MixedPolynomial levi_radial(const MixedPolynomial& q);

}  // namespace kr
