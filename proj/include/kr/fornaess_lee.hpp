#pragma once

// Counterexample machinery: parameter schedules (kept in log space; the raw
// numbers underflow doubles past n = 4), 1-D subharmonic blocks with their
// mollification, the lift over the cusp variety V = {s^2 = t^3}, the
// plurisubharmonic corrector q, and the C^k / C-infinity convergence
// certificates.

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "kr/complex_poly.hpp"
#include "kr/domain.hpp"

namespace kr {

// ---------------------------------------------------------------------------
// Schedules
// ---------------------------------------------------------------------------

struct ScheduleEntry {
  double log_a = 0.0;      // log a_n
  double log_r = 0.0;      // log r_n
  double log_delta = 0.0;  // log delta_n
  double log_big_a = 0.0;  // log A_n, A_n = 1/2 + a_n/r_n + log(1/r_n)/(4 log a_n)
  double b = std::numeric_limits<double>::quiet_NaN();  // b_n; NaN when unsolvable

  // Derived exponents, all integer multiples of log r_n so the bookkeeping
  // identities (K_n c_n = C_n, d_n = beta_n = r_n^9) hold bit-exactly when
  // the exponents are combined as integers first.
  double log_r_pow(int k) const { return k * log_r; }
  double log_beta() const { return log_r_pow(9); }
  double log_d() const { return log_r_pow(9); }
  double log_c() const { return log_r_pow(18); }
  double log_cap_c() const { return log_r_pow(-20); }
  double log_cap_k() const { return log_r_pow(-38); }

  double a() const { return std::exp(log_a); }
  double r() const { return std::exp(log_r); }
  double delta() const { return std::exp(log_delta); }
  bool b_solvable() const { return std::isfinite(b); }
};

struct Schedule {
  enum class Mode { part1, part2 };
  Mode mode = Mode::part1;
  double base = 0.0;   // a > 1
  double eps = 0.0;    // part1 parameter, in (0, 1/3)
  double alpha = 0.0;  // part2 parameter, > 0
  int n_max = 0;
  std::vector<ScheduleEntry> entries;  // entries[i] is index n = i+1
  std::vector<int> selected;           // S

  const ScheduleEntry& at(int n) const;  // n in 1..n_max
};

Schedule make_schedule_part1(double a, double eps, int n_max);
Schedule make_schedule_part2(double a, double alpha, int n_max);

/// Smallest root in (0, 1] of 1/8 - b + log(b)/(4 log a_n) = 0, located by
/// bisection below the critical point 1/(4 log a_n); |f(root)| <= 1e-12.
/// Throws when no root exists (a_n too small for the construction).
double solve_bn_log(double log_an);
double solve_bn(double a_n);

/// Smallest n0 such that delta_n <= delta_{n-1} / (A_n 2^n) for every
/// n0 <= n <= n_max (delta_0 := 1/a). Throws if the inequality fails at n_max.
int check_delta_inequality(const Schedule& s);

/// Index set S: all of 1..N for part1 (equality case of r_{n+1} <= r_n^2/a_n);
/// for part2 a greedy scan keeping n' with r_{n'} <= r_last^2/a_last and the
/// delta/A inequality relative to the last kept index. Throws when fewer than
/// two indices survive.
std::vector<int> subsequence_select(const Schedule& s);

// ---------------------------------------------------------------------------
// 1-D blocks and mollification
// ---------------------------------------------------------------------------

/// u_n(z) = 1/8 - Re z + log|z| / (4 log a_n)   (-inf at z = 0).
double u_block(Complex z, double log_an);

/// R_n: max(u_n, 0) where Re z <= b_n, u_n where Re z > b_n.
double clipped_block(Complex z, double log_an, double bn);

/// Smoothing by the radial bump exp(1/(|w|^2-1)) on |w| < 1: polar product
/// quadrature of integral f(z - eps*w) chi(w) dmu(w) with unit-mass weights.
class Mollifier {
 public:
  using Profile = std::function<double(Complex)>;

  Mollifier(Profile f, double eps, int n_radial = 32, int n_angular = 64);

  double operator()(Complex z) const { return eval_with(n_radial_, n_angular_, z); }

  /// Order-doubling convergence check; throws on non-convergence.
  double value_checked(Complex z, double rel_tol = 1e-8) const;

  double smoothing_radius() const { return eps_; }

  static double kernel(double t);
  static double kernel_mass();        // integral of chi over C
  static double kernel_abs_moment();  // integral of |w| chi dmu

 private:
  double eval_with(int nr, int na, Complex z) const;

  Profile f_;
  double eps_;
  int n_radial_, n_angular_;
};

/// rho_n(z) = (mollified R_n)(a_n z / r_n) with eps_n = r_n/4.
class ScaledBlock {
 public:
  ScaledBlock(double log_an, double bn, double eps_n, double arg_scale,
              int n_radial = 32, int n_angular = 64);

  static ScaledBlock for_schedule(const Schedule& s, int n,
                                  int n_radial = 32, int n_angular = 64);

  double operator()(Complex zeta) const { return moll_(arg_scale_ * zeta); }
  double checked(Complex zeta, double rel_tol = 1e-8) const {
    return moll_.value_checked(arg_scale_ * zeta, rel_tol);
  }

  double arg_scale() const { return arg_scale_; }  // a_n / r_n
  double bn() const { return bn_; }

 private:
  Mollifier moll_;
  double arg_scale_;
  double bn_;
};

// ---------------------------------------------------------------------------
// The variety V = {s^2 = t^3} and the tube extension
// ---------------------------------------------------------------------------

struct VProjection {
  Complex s, t;            // projected point (s, s^{2/3}), nearest branch
  double dist = 0.0;       // distance to the input (attained in the t slot)
  int branch = 0;
  bool inside_tube = false;  // dist < d_n
};

/// Projection onto V keeping s and choosing the cube-root branch of s^{2/3}
/// nearest to t. Throws inside B'_n = {|| || <= (3/4) beta}.
VProjection project_to_v(Complex s, Complex t, double beta, double tube_d);

/// C-infinity cutoff, 1 on [0, 1/2], 0 on [1, inf).
double cutoff_chi(double x);

/// Four-case tube extension of rho over V: 0 on B(0, beta); rho(s'/t') where
/// dist^2 <= d^2/2; cutoff-weighted by chi(dist^2/d^2) on the shell; 0 outside.
template <typename Rho>
double p_layer_eval(const Rho& rho, double beta, double d, Complex s, Complex t) {
  double norm = std::sqrt(std::norm(s) + std::norm(t));
  if (norm < beta) return 0.0;
  VProjection proj = project_to_v(s, t, beta, d);
  double x = (proj.dist * proj.dist) / (d * d);
  if (x >= 1.0) return 0.0;
  if (std::abs(proj.t) == 0.0) return 0.0;  // cusp-origin branch: no usable projection
  Complex zeta = proj.s / proj.t;
  double v = rho(zeta);
  return x <= 0.5 ? v : v * cutoff_chi(x);
}

/// p_n for a schedule index (builds the block; heavier users should hold an
/// FLDomain and use its evaluators).
double p_n_eval(const Schedule& s, int n, Complex sv, Complex tv);

/// q(s,t) = e^{||(s,t)||^2} |s^2 - t^3|^2.
double q_eval(Complex s, Complex t);
/// The certified factor in L q(s,t)(X) >= |s^2-t^3|^2 ||X||^2.
double q_levi_lower(Complex s, Complex t);

// ---------------------------------------------------------------------------
// The assembled domain
// ---------------------------------------------------------------------------

struct FLDomain {
  Schedule schedule;
  int truncation = 0;  // N
  double tail_tol = 1e-12;
  std::vector<int> active;   // selected, <= N, with solvable b_n
  std::vector<int> skipped;  // indices <= N dropped for unsolvable b_n
  double log_tail_bound = -std::numeric_limits<double>::infinity();
  double sup_rho = 0.0;  // sampled sup |rho_tilde| on B(0,2)
  double sup_q = 0.0;    // sampled sup q on B(0,2)

  double rho_tilde(Complex s, Complex t) const;
  /// delta_n * (p_n + K_n q) for active[idx]; products formed in log space.
  double scaled_g(std::size_t idx, Complex s, Complex t) const;
  const ScaledBlock& block(std::size_t idx) const { return blocks.at(idx); }

  Domain as_domain() const;
  nlohmann::json descriptor() const;

  // populated by build_fl_domain
  std::vector<ScaledBlock> blocks;
  std::vector<double> delta_n;    // delta for active indices
  std::vector<double> delta_k_n;  // exp(log delta + log K)
  std::vector<double> beta_n;
  std::vector<double> d_n;
};

FLDomain build_fl_domain(const Schedule& s, int truncation, double tail_tol);
FLDomain fl_from_descriptor(const nlohmann::json& j);
FLDomain fl_from_file(const std::string& path);

/// Worst sampled Levi margin of rho_tilde (in the (s,t) plane): minimum over
/// sample points of min_eig / (1 + |value| + ||H||_F).
struct PshSampleReport {
  double worst_rel = 0.0;
  double min_eig = 0.0;
  int points = 0;
};
PshSampleReport sample_psh_margin(const std::function<double(Complex, Complex)>& f,
                                  double radius, int n_points);

// ---------------------------------------------------------------------------
// Smoothness certificates
// ---------------------------------------------------------------------------

struct SmoothnessCertificate {
  int k = 0;
  int m_k = 0;  // max(38, 9k+2)
  bool converges = false;
  std::vector<double> log_terms;  // log(delta_n / r_n^{m_k})
  std::vector<double> partial_sums;
  int one_d_exponent = 0;  // 3k+2
  bool one_d_converges = false;

  double term_ratio(int n) const;  // T_n / T_{n-1}, n in 2..N
};

/// Part-1 certificate for C^k smoothness of the sum; throws on part2 input.
SmoothnessCertificate smoothness_certificate(const Schedule& s, int k);

/// Part-2 certificate: sum delta_n a_n^k converges for every k <= k_max.
bool part2_certificate(const Schedule& s, int k_max);

}  // namespace kr
