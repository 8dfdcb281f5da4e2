#pragma once

// Domains D = {r < 0} ∩ B(0, R) with a uniform query surface: membership,
// gradients/outward normals, normal rays, and a string-addressable registry
// of built-in examples (ball, half-space and 2m-power models, the degenerate
// angular-obstruction example, Fornaess-Lee descriptors).

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "kr/complex_poly.hpp"

namespace kr {

struct Domain {
  int dim = 0;
  double bounding_radius = 0.0;
  RealFn r;                              // defining function
  std::optional<MixedPolynomial> poly;   // exact form when available
  CVector witness;                       // an interior point
  int smoothness = -1;                   // C^k tag; -1 means C-infinity
  double diameter = 0.0;                 // diam of D (upper estimate is fine)
  std::string name;
  CVector default_boundary_point;
  // Exact Kobayashi value when the domain is ball-equivalent (else empty).
  std::function<double(const CVector&, const CVector&)> exact_kappa;

  double eval(const CVector& z) const { return r(z); }
};

bool contains(const Domain& d, const CVector& z);

/// Real gradient of r at z, encoded as a complex vector (equals 2*conj(dr/dz)).
CVector real_gradient(const Domain& d, const CVector& z);

/// Unit outward normal at a boundary point (|r(p)| <= 1e-10 enforced).
CVector unit_outward_normal(const Domain& d, const CVector& p);

struct NormalRay {
  CVector base;       // boundary point P
  CVector normal;     // unit outward normal
  std::vector<double> depths;  // decreasing positive deltas

  CVector point_at(double delta) const { return base - delta * normal; }
};

/// Builds the ray and verifies every listed depth stays inside D; the first
/// offending depth is named in the error.
NormalRay normal_ray(const Domain& d, const CVector& p, std::vector<double> depths);

/// Three-term angular-obstruction polynomial in one variable,
/// 2m^2 z^{m+l} zbar^{m-l} + 4(m^2-l^2)|z|^{2m} + 2m^2 z^{m-l} zbar^{m+l};
/// valid for m >= 1, m/2 <= l < m.
MixedPolynomial remark5_p(int m, int l);

struct ObstructionReport {
  double min_laplacian;       // over the polar grid |z| <= 1
  double min_angular_factor;  // min_theta 4m^2 cos(2 l theta) + 4(m^2 - l^2)
  double argmin_theta;
  double scale;               // sup |p| over the grid, for relative tolerances
};

/// Samples the Laplacian of remark5_p (subharmonicity check) and the angular
/// factor (negativity = the obstruction) on a polar grid.
ObstructionReport remark5_checks(int m, int l, int n_radii = 64, int n_angles = 256);

/// Registry lookup. Names: "ball" | "ball:<n>" | "halfspace" |
/// "model-2m:<m1>,<m2>,..." | "model-psh" | "remark5:<m>,<l>" |
/// "fl:<descriptor.json>" | "fl:part1:<a>,<eps>,<N>" | "fl:part2:<a>,<alpha>,<N>".
Domain make_domain(const std::string& name);

}  // namespace kr
