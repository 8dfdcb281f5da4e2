#pragma once

// Kobayashi-Royden machinery: closed forms on the model targets, analytic-disc
// upper bounds (linear disc + derivative-free polynomial search with sampled
// feasibility certificates), the two-stage certified lower bound, and the
// inequality-chain verifier.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "kr/complex_poly.hpp"
#include "kr/domain.hpp"
#include "kr/taylor.hpp"

namespace kr {

enum class BoundKind { lower, upper, exact };

struct AnalyticDisc {
  int dim = 0;
  std::vector<CVector> coeffs;  // f(lambda) = sum c_j lambda^j, c_0 = base point
  double alpha = 0.0;           // alpha * f'(0) = X for the queried direction
  int boundary_samples = 0;
  double margin = 0.0;
  double min_slack = 0.0;  // min over samples of (-r(f(lambda_i)) - margin)

  CVector eval(Complex lambda) const;
  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
};

struct Bound {
  double value = 0.0;
  BoundKind kind = BoundKind::upper;
  std::string method;
  std::map<std::string, double> constants;
};

/// Half-plane {Re < c}: |X| / (2 (c - Re z)).
Bound kappa_halfplane(double c, Complex z, Complex x);
/// Unit disc: |X| / (1 - |lambda|^2).
Bound kappa_unit_disc(Complex lambda, Complex x);
/// Unit ball at the center: ||X||.
Bound kappa_ball(int n, const CVector& x);
/// Ball B(center, radius) at any interior point (affine transport of the
/// classical formula).
double kappa_ball_general(const CVector& center, double radius, const CVector& z, const CVector& x);

/// sup |g'(0)| over holomorphic g: D -> {Re < c} with g(0) = g0, namely
/// 2 (c - Re g0); attained by the Moebius extremal.
double schwarz_halfplane_bound(double c, Complex g0);

struct DiscSearchParams {
  int degree = 6;
  int boundary_samples = 256;
  int budget = 2000;  // max feasible-radius solves
  int restarts = 3;
  std::uint64_t seed = 0;
};

/// Largest straight disc z + lambda * rho * X/||X|| kept inside D (sampled on
/// the boundary circle); value ||X||/rho.
Bound linear_disc_upper(const Domain& d, const CVector& z, const CVector& x,
                        int boundary_samples = 256, AnalyticDisc* disc_out = nullptr);

/// Coordinate-descent search over higher disc coefficients, warm-started at
/// the linear disc; never worse than it. The returned disc carries its
/// sampled feasibility certificate.
Bound disc_search_upper(const Domain& d, const CVector& z, const CVector& x,
                        const DiscSearchParams& params = {}, AnalyticDisc* disc_out = nullptr);

/// Sampled feasibility of a disc for a domain (r <= -margin and the bounding
/// ball constraint at the given number of boundary samples).
bool disc_feasible(const Domain& d, const AnalyticDisc& disc, int samples, double margin);

struct StageConstants {
  double c3 = 0.0;  // inclusion Re Psi < c3 ||z||^4 on D (sampled, x1.5)
  double c4 = 0.0;  // disc Lipschitz constant, 2 diam(D)
  double c5 = 0.0;  // c3 * max(1, c4)^4, half-plane level in (delta + r)^4 form
  double c7 = 0.0;  // second-order disc constant, 2 diam(D)
  double kappa_geom = 0.1;  // threshold in ||X|| <= kappa_geom |X_n| / delta
  double delta_max = 0.0;
  double sample_radius = 0.0;
  bool inclusion_global = false;
};

StageConstants assemble_stage_constants(const TaylorModel& model, const Domain& d);

/// Certified lower bound at base point (0,...,0,-delta) in the model frame.
/// Stage 1 shrinks competitors by r = delta^{1/4} and pushes them through the
/// half-plane target Re < c5 (delta+r)^4; stage 2 reruns with r = delta^{1/8}
/// and the second-order envelope delta + r||X||/kappa_1 + c7 r^2.
Bound stage_lower_bound(const TaylorModel& model, double delta, const CVector& x,
                        int stage, const StageConstants& sc);

struct ChainReport {
  double sup_re_phi_r = 0.0;
  double half_plane_level = 0.0;
  bool half_plane_ok = false;
  double dphi_abs = 0.0;      // |phi_r'(0)|
  double schwarz_bound = 0.0;
  bool schwarz_ok = false;
  double implied_alpha = 0.0;
  double alpha = 0.0;
  bool implied_le_alpha = false;
};

/// Pushes a feasible disc with base (0,...,0,-delta) through psi_r = f(r l),
/// phi_r = Psi o psi_r and checks every inequality of the lower-bound chain.
ChainReport verify_chain(const AnalyticDisc& disc, const TaylorModel& model,
                         const StageConstants& sc, double delta, double r_shrink);

}  // namespace kr
