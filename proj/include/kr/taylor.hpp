#pragma once

// Boundary normalization and Taylor data of a defining function: the affine
// frame that turns the linear part into Re w_n, the degree split
// r = Re w_n + sum Q_j + R_k with Q_j = Qtilde_j + 2 Re H_j, and the sampled
// remainder/inclusion constants feeding the staged lower bounds.

#include <vector>

#include "kr/complex_poly.hpp"
#include "kr/domain.hpp"

namespace kr {

struct NormalFrame {
  CVector base;          // boundary point P
  Eigen::MatrixXcd u;    // unitary
  double scale = 1.0;    // s > 0; w = s U (z - P)

  CVector to_frame(const CVector& z) const { return scale * (u * (z - base)); }
  CVector from_frame(const CVector& w) const { return base + u.adjoint() * w / scale; }
  CVector push_vector(const CVector& x) const { return scale * (u * x); }
  bool is_identity(double tol = 1e-12) const;
};

/// Frame with the transformed linear part exactly Re w_n; the interior normal
/// segment P - delta*n maps onto the negative Re w_n axis, with depth scaled
/// by `scale`.
NormalFrame normalize_at_boundary(const Domain& d, const CVector& p);

/// Framed defining function as a plain callable.
RealFn framed_fn(const Domain& d, const NormalFrame& frame);

/// Exact framed polynomial (requires d.poly).
MixedPolynomial framed_poly(const Domain& d, const NormalFrame& frame);

struct TaylorModel {
  int dim = 0;
  int degree = 0;                       // k
  std::vector<MixedPolynomial> q;       // Q_2 .. Q_k
  std::vector<MixedPolynomial> q_mixed; // Qtilde_j (|alpha|,|beta| > 0 terms)
  std::vector<MixedPolynomial> h;       // H_j (pure z terms; hat Q_j = 2 Re H_j)
  // sampled constants (with safety margin); set by remainder_constants
  double c1 = 0.0, c2 = 0.0, c3 = 0.0;
  double sample_radius = 0.0;           // R_U
  bool inclusion_global = false;        // R_U covered the whole domain

  const MixedPolynomial& q_at(int j) const { return q.at(static_cast<std::size_t>(j - 2)); }
  const MixedPolynomial& q_mixed_at(int j) const { return q_mixed.at(static_cast<std::size_t>(j - 2)); }
  const MixedPolynomial& h_at(int j) const { return h.at(static_cast<std::size_t>(j - 2)); }
};

/// Exact degree split of a framed polynomial (k >= 3; constant ~0 and linear
/// part Re w_n are verified).
TaylorModel decompose(const MixedPolynomial& framed, int k);

/// Black-box variant: jets by iterated central differences with Richardson
/// extrapolation on a stencil of radius `jet_step`.
TaylorModel decompose(const RealFn& framed, int n, int k, double jet_step = 1e-2);

/// Degree <= k jet of f at 0 as a mixed polynomial (finite differences in the
/// 2n real coordinates, then exact monomial conversion).
MixedPolynomial extract_jet(const RealFn& f, int n, int k, double jet_step = 1e-2);

struct RemainderConstants {
  double c1 = 0.0, c2 = 0.0, c3 = 0.0;
  double min_levi_rel = 0.0;  // worst sampled Levi margin of the framed r
};

/// Sampled constants over B(0, radius): C1 from the radial Levi defect of
/// Qtilde_2 + 2 Qtilde_3, C2 from the order-4 Taylor remainder, C3 from the
/// inclusion Re Psi < C3 ||z||^4 on D. Safety factor 1.5 on each supremum.
/// Errors when the sampled Levi form of r dips below -1e-6 (input not psh).
/// Results are also stored into `model`.
RemainderConstants remainder_constants(const RealFn& framed, TaylorModel& model,
                                       double radius, int n_samples,
                                       bool covers_domain = false);

/// Psi = z_n + 2 H_2 + 2 H_3 (holomorphic).
MixedPolynomial make_psi(const TaylorModel& model);

}  // namespace kr
