#include "kr/kobayashi.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace kr {

namespace {

std::vector<Complex> roots_of_unity(int m) {
  std::vector<Complex> out(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    double phi = 2.0 * std::numbers::pi * i / m;
    out[static_cast<std::size_t>(i)] = Complex(std::cos(phi), std::sin(phi));
  }
  return out;
}

// Disc family z + rho * (lambda xhat + sum_j gamma_j lambda^j); scaling rho
// keeps the shape fixed, so the feasible radius comes from one bisection.
class DiscProblem {
 public:
  DiscProblem(const Domain& d, CVector z, CVector xhat, int degree, int samples)
      : d_(d), z_(std::move(z)), xhat_(std::move(xhat)), degree_(degree),
        lambdas_(roots_of_unity(samples)) {
    ybuf_ = CVector::Zero(z_.size());
    margin_ = 1e-8 * (1.0 + std::abs(d_.r(z_)));
    if (d_.r(z_) > -2.0 * margin_)
      throw std::invalid_argument("disc search: base point is on or too close to the boundary");
    lambda_pows_.resize(lambdas_.size());
    for (std::size_t i = 0; i < lambdas_.size(); ++i) {
      lambda_pows_[i].resize(static_cast<std::size_t>(degree_ + 1));
      lambda_pows_[i][0] = 1.0;
      for (int j = 1; j <= degree_; ++j) lambda_pows_[i][static_cast<std::size_t>(j)] = lambda_pows_[i][static_cast<std::size_t>(j - 1)] * lambdas_[i];
    }
  }

  // gamma[j-2] multiplies lambda^j, j = 2..degree
  bool feasible(double rho, const std::vector<CVector>& gamma) const {
    const Eigen::Index n = z_.size();
    for (std::size_t i = 0; i < lambdas_.size(); ++i) {
      const auto& pows = lambda_pows_[i];
      for (Eigen::Index d = 0; d < n; ++d) {
        Complex acc = z_[d] + rho * pows[1] * xhat_[d];
        for (int j = 2; j <= degree_; ++j)
          acc += rho * pows[static_cast<std::size_t>(j)] * gamma[static_cast<std::size_t>(j - 2)][d];
        ybuf_[d] = acc;
      }
      if (!(d_.r(ybuf_) <= -margin_)) return false;
      if (!(ybuf_.norm() <= d_.bounding_radius - margin_)) return false;
    }
    return true;
  }

  double max_radius(const std::vector<CVector>& gamma, int* budget) const {
    if (budget && *budget <= 0) return 0.0;
    double lo = 0.0, hi = d_.bounding_radius;
    while (feasible(hi, gamma)) {  // domains are bounded, so this terminates fast
      lo = hi;
      hi *= 2.0;
      if (hi > 64.0 * d_.bounding_radius) break;
    }
    for (int it = 0; it < 44; ++it) {
      double mid = 0.5 * (lo + hi);
      if (feasible(mid, gamma))
        lo = mid;
      else
        hi = mid;
    }
    if (budget) *budget -= 1;  // one radius solve
    return lo;
  }

  int samples() const { return static_cast<int>(lambdas_.size()); }

  AnalyticDisc make_disc(double rho, const std::vector<CVector>& gamma, double xnorm) const {
    AnalyticDisc disc;
    disc.dim = static_cast<int>(z_.size());
    disc.coeffs.push_back(z_);
    disc.coeffs.push_back(rho * xhat_);
    for (int j = 2; j <= degree_; ++j) disc.coeffs.push_back(rho * gamma[static_cast<std::size_t>(j - 2)]);
    disc.alpha = rho > 0.0 ? xnorm / rho : 0.0;
    disc.boundary_samples = samples();
    disc.margin = margin_;
    double slack = std::numeric_limits<double>::infinity();
    for (const Complex& l : lambdas_) slack = std::min(slack, -d_.r(disc.eval(l)) - margin_);
    disc.min_slack = slack;
    return disc;
  }

 private:
  const Domain& d_;
  CVector z_;
  CVector xhat_;
  int degree_;
  std::vector<Complex> lambdas_;
  std::vector<std::vector<Complex>> lambda_pows_;
  double margin_ = 0.0;
  mutable CVector ybuf_;
};

Complex dot_plain(const CVector& a, const CVector& b) {
  return (a.transpose() * b)(0, 0);  // no conjugation
}

// Unit direction with the largest component rotated onto the positive real
// axis. Phase is a disc-reparameterization, so kappa is unchanged, and the
// search path then depends on the ray of X only (exact homogeneity).
CVector canonical_direction(const CVector& x, double xnorm) {
  CVector xhat = x / xnorm;
  Eigen::Index k = 0;
  double best = -1.0;
  for (Eigen::Index i = 0; i < xhat.size(); ++i) {
    double m = std::abs(xhat[i]);
    if (m > best * (1.0 + 1e-14)) {
      best = m;
      k = i;
    }
  }
  Complex phase = xhat[k] / std::abs(xhat[k]);
  return xhat * std::conj(phase);
}

}  // namespace

CVector AnalyticDisc::eval(Complex lambda) const {
  CVector y = CVector::Zero(dim);
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) y = lambda * y + *it;
  return y;
}

Bound kappa_halfplane(double c, Complex z, Complex x) {
  if (!(z.real() < c)) throw std::invalid_argument("kappa_halfplane: z outside {Re < c}");
  Bound b;
  b.value = std::abs(x) / (2.0 * (c - z.real()));
  b.kind = BoundKind::exact;
  b.method = "halfplane-exact";
  return b;
}

Bound kappa_unit_disc(Complex lambda, Complex x) {
  if (!(std::abs(lambda) < 1.0)) throw std::invalid_argument("kappa_unit_disc: point outside the disc");
  Bound b;
  b.value = std::abs(x) / (1.0 - std::norm(lambda));
  b.kind = BoundKind::exact;
  b.method = "disc-exact";
  return b;
}

Bound kappa_ball(int n, const CVector& x) {
  if (x.size() != n) throw std::invalid_argument("kappa_ball: dimension mismatch");
  Bound b;
  b.value = x.norm();
  b.kind = BoundKind::exact;
  b.method = "ball-exact";
  return b;
}

double kappa_ball_general(const CVector& center, double radius, const CVector& z, const CVector& x) {
  CVector w = (z - center) / radius;
  CVector y = x / radius;
  double t = 1.0 - w.squaredNorm();
  if (!(t > 0.0)) throw std::invalid_argument("kappa_ball_general: point outside the ball");
  double inner = std::abs(w.dot(y));  // sum conj(w_i) y_i
  return std::sqrt(y.squaredNorm() / t + inner * inner / (t * t));
}

double schwarz_halfplane_bound(double c, Complex g0) {
  if (!(g0.real() < c)) throw std::invalid_argument("schwarz_halfplane_bound: g0 outside {Re < c}");
  return 2.0 * (c - g0.real());
}

Bound linear_disc_upper(const Domain& d, const CVector& z, const CVector& x,
                        int boundary_samples, AnalyticDisc* disc_out) {
  if (!contains(d, z)) throw std::invalid_argument("linear_disc_upper: base point not inside the domain");
  double xnorm = x.norm();
  Bound b;
  b.kind = BoundKind::upper;
  b.method = "linear-disc";
  if (xnorm == 0.0) {
    if (disc_out) *disc_out = AnalyticDisc{static_cast<int>(z.size()), {z}, 0.0, 0, 0.0, 0.0};
    return b;
  }
  CVector xhat = canonical_direction(x, xnorm);
  DiscProblem prob(d, z, xhat, 1, boundary_samples);
  std::vector<CVector> gamma;
  double rho = prob.max_radius(gamma, nullptr);
  if (!(rho > 0.0)) throw std::runtime_error("linear_disc_upper: no feasible radius found");
  b.value = xnorm / rho;
  b.constants["rho"] = rho;
  if (disc_out) *disc_out = prob.make_disc(rho, gamma, xnorm);
  return b;
}

Bound disc_search_upper(const Domain& d, const CVector& z, const CVector& x,
                        const DiscSearchParams& params, AnalyticDisc* disc_out) {
  if (!contains(d, z)) throw std::invalid_argument("disc_search_upper: base point not inside the domain");
  if (params.degree < 1) throw std::invalid_argument("disc_search_upper: degree >= 1 required");
  double xnorm = x.norm();
  Bound b;
  b.kind = BoundKind::upper;
  b.method = "disc-search";
  if (xnorm == 0.0) {
    if (disc_out) *disc_out = AnalyticDisc{static_cast<int>(z.size()), {z}, 0.0, 0, 0.0, 0.0};
    return b;
  }
  CVector xhat = canonical_direction(x, xnorm);
  const int n = static_cast<int>(z.size());
  const int n_gamma = std::max(0, params.degree - 1);
  DiscProblem prob(d, z, xhat, params.degree, params.boundary_samples);

  int budget = params.budget;
  std::vector<CVector> gamma(static_cast<std::size_t>(n_gamma), CVector::Zero(n));
  double best_rho = prob.max_radius(gamma, &budget);
  std::vector<CVector> best_gamma = gamma;
  if (n_gamma == 0) {  // degree 1: nothing to search
    b.value = xnorm / best_rho;
    b.constants["rho"] = best_rho;
    if (disc_out) *disc_out = prob.make_disc(best_rho, best_gamma, xnorm);
    return b;
  }

  std::mt19937_64 rng(params.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);

  // One real coordinate of one gamma entry, everything else held fixed.
  auto axis_value = [&](std::size_t j, int i, int part, double val) {
    Complex saved = gamma[j][i];
    gamma[j][i] = part == 0 ? Complex(val, saved.imag()) : Complex(saved.real(), val);
    double rho = prob.max_radius(gamma, &budget);
    gamma[j][i] = saved;
    return rho;
  };
  auto axis_refine = [&](std::size_t j, int i, int part, double rho_now) {
    Complex cur = gamma[j][i];
    double x0 = part == 0 ? cur.real() : cur.imag();
    double span = 1.2;
    double best_x = x0, best_v = rho_now;
    for (double x : {x0 - span, x0 - 0.5 * span, x0 + 0.5 * span, x0 + span}) {
      double v = axis_value(j, i, part, x);
      if (v > best_v) {
        best_v = v;
        best_x = x;
      }
    }
    double lo = best_x - 0.5 * span, hi = best_x + 0.5 * span;
    const double gr = 0.6180339887498949;
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = axis_value(j, i, part, x1), f2 = axis_value(j, i, part, x2);
    for (int it = 0; it < 12 && budget > 0; ++it) {
      if (f1 < f2) {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + gr * (hi - lo);
        f2 = axis_value(j, i, part, x2);
      } else {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - gr * (hi - lo);
        f1 = axis_value(j, i, part, x1);
      }
    }
    if (f1 > best_v) {
      best_v = f1;
      best_x = x1;
    }
    if (f2 > best_v) {
      best_v = f2;
      best_x = x2;
    }
    if (best_v > rho_now * (1.0 + 1e-12)) {
      gamma[j][i] = part == 0 ? Complex(best_x, cur.imag()) : Complex(cur.real(), best_x);
      return best_v;
    }
    return rho_now;
  };

  // Start points: the linear disc, alternating Moebius-truncation shapes
  // gamma_j = (-1)^{j+1} t^{j-1} xhat (the half-plane extremal pattern), and
  // random perturbations of the best shape found so far.
  std::vector<std::vector<CVector>> starts;
  starts.push_back(gamma);
  for (double t : {0.5, 0.75, 1.0}) {
    std::vector<CVector> seed(static_cast<std::size_t>(n_gamma), CVector::Zero(n));
    double c = -1.0;
    for (int j = 2; j <= params.degree; ++j) {
      seed[static_cast<std::size_t>(j - 2)] = c * std::pow(t, j - 2) * xhat;
      c = -c;
    }
    starts.push_back(std::move(seed));
  }
  for (int restart = 1; restart < params.restarts; ++restart) starts.push_back({});

  for (std::size_t attempt = 0; attempt < starts.size() && budget > 0; ++attempt) {
    if (!starts[attempt].empty()) {
      gamma = starts[attempt];
    } else {
      gamma = best_gamma;  // perturbed restart around the incumbent
      for (auto& g : gamma)
        for (int i = 0; i < n; ++i) g[i] += 0.15 * Complex(unit(rng), unit(rng));
    }
    double rho = prob.max_radius(gamma, &budget);
    if (!(rho > 0.0)) continue;  // infeasible start shape
    for (int cycle = 0; cycle < 4 && budget > 0; ++cycle) {
      double before = rho;
      for (std::size_t j = 0; j < gamma.size() && budget > 0; ++j)
        for (int i = 0; i < n && budget > 0; ++i)
          for (int part = 0; part < 2 && budget > 0; ++part) rho = axis_refine(j, i, part, rho);
      if (rho > best_rho) {
        best_rho = rho;
        best_gamma = gamma;
      }
      if (rho <= before * (1.0 + 1e-3)) break;  // the cycle stalled
    }
  }

  b.value = xnorm / best_rho;
  b.constants["rho"] = best_rho;
  b.constants["budget_left"] = budget;
  if (disc_out) *disc_out = prob.make_disc(best_rho, best_gamma, xnorm);
  return b;
}

bool disc_feasible(const Domain& d, const AnalyticDisc& disc, int samples, double margin) {
  for (const Complex& l : roots_of_unity(samples)) {
    CVector y = disc.eval(l);
    if (!(d.r(y) <= -margin)) return false;
    if (!(y.norm() <= d.bounding_radius - margin)) return false;
  }
  return true;
}

StageConstants assemble_stage_constants(const TaylorModel& model, const Domain& d) {
  StageConstants sc;
  sc.c3 = model.c3;
  sc.c4 = 2.0 * d.diameter;
  sc.c5 = model.c3 * std::pow(std::max(1.0, sc.c4), 4);
  sc.c7 = 2.0 * d.diameter;
  sc.kappa_geom = 0.1;
  sc.delta_max = 0.1 * model.sample_radius;
  sc.sample_radius = model.sample_radius;
  sc.inclusion_global = model.inclusion_global;
  return sc;
}

namespace {

// Value for a unit direction; scaling by ||X|| afterwards keeps homogeneity exact.
double stage_value_unit(const TaylorModel& model, double delta, const CVector& xhat,
                        int stage, const StageConstants& sc) {
  const int n = model.dim;
  CVector z_delta = CVector::Zero(n);
  z_delta[n - 1] = -delta;
  MixedPolynomial psi = make_psi(model);
  double re_at = psi.eval(z_delta).real();  // -delta + O(delta^2)
  CVector grad = psi.holomorphic_gradient(z_delta);
  double dpsi = std::abs(dot_plain(grad, xhat));

  double r1 = std::pow(delta, 0.25);
  if (!sc.inclusion_global && delta + sc.c4 * r1 > sc.sample_radius)
    throw std::runtime_error("stage_lower_bound: shrunk disc escapes the sampled inclusion radius");
  double level1 = sc.c5 * std::pow(delta + r1, 4);
  double gap1 = level1 - re_at;
  if (!(gap1 > 0.0)) throw std::runtime_error("stage_lower_bound: empty half-plane gap at stage 1");
  double k1 = r1 * dpsi / (2.0 * gap1);
  if (stage == 1) return k1;

  double r2 = std::pow(delta, 0.125);
  double s2 = delta + r2 / k1 + sc.c7 * r2 * r2;  // ||xhat|| = 1
  if (!sc.inclusion_global && s2 > sc.sample_radius)
    throw std::runtime_error("stage_lower_bound: stage-2 envelope escapes the sampled inclusion radius");
  double level2 = sc.c3 * std::pow(s2, 4);
  double gap2 = level2 - re_at;
  if (!(gap2 > 0.0)) throw std::runtime_error("stage_lower_bound: empty half-plane gap at stage 2");
  return r2 * dpsi / (2.0 * gap2);
}

}  // namespace

Bound stage_lower_bound(const TaylorModel& model, double delta, const CVector& x,
                        int stage, const StageConstants& sc) {
  if (stage != 1 && stage != 2) throw std::invalid_argument("stage_lower_bound: stage must be 1 or 2");
  if (x.size() != model.dim) throw std::invalid_argument("stage_lower_bound: dimension mismatch");
  if (!(delta > 0.0)) throw std::invalid_argument("stage_lower_bound: need delta > 0");
  if (delta > sc.delta_max * (1.0 + 1e-12))
    throw std::invalid_argument("stage_lower_bound: delta above delta_max for this model");
  double xnorm = x.norm();
  double xn = std::abs(x[model.dim - 1]);
  if (!(xn > 0.0)) throw std::invalid_argument("stage_lower_bound: |X_n| must be positive");
  if (xnorm > sc.kappa_geom * xn / delta * (1.0 + 1e-12))
    throw std::invalid_argument("stage_lower_bound: ||X|| <= kappa_geom |X_n| / delta fails");

  CVector xhat = canonical_direction(x, xnorm);
  Bound b;
  b.kind = BoundKind::lower;
  b.method = stage == 1 ? "stage1" : "stage2";
  b.value = xnorm * stage_value_unit(model, delta, xhat, stage, sc);
  b.constants = {{"c3", sc.c3},      {"c4", sc.c4},
                 {"c5", sc.c5},      {"c7", sc.c7},
                 {"delta", delta},   {"kappa_geom", sc.kappa_geom},
                 {"r", stage == 1 ? std::pow(delta, 0.25) : std::pow(delta, 0.125)}};
  return b;
}

ChainReport verify_chain(const AnalyticDisc& disc, const TaylorModel& model,
                         const StageConstants& sc, double delta, double r_shrink) {
  if (disc.dim != model.dim) throw std::invalid_argument("verify_chain: dimension mismatch");
  CVector z_delta = CVector::Zero(model.dim);
  z_delta[model.dim - 1] = -delta;
  if ((disc.coeffs.at(0) - z_delta).norm() > 1e-9)
    throw std::invalid_argument("verify_chain: disc base is not (0,...,0,-delta)");
  if (!(r_shrink > 0.0 && r_shrink < 1.0))
    throw std::invalid_argument("verify_chain: r_shrink must lie in (0,1)");

  MixedPolynomial psi = make_psi(model);
  ChainReport rep;
  rep.half_plane_level = sc.c5 * std::pow(delta + r_shrink, 4);
  rep.sup_re_phi_r = -std::numeric_limits<double>::infinity();
  for (const Complex& l : roots_of_unity(256)) {
    CVector y = disc.eval(r_shrink * l);
    rep.sup_re_phi_r = std::max(rep.sup_re_phi_r, psi.eval(y).real());
  }
  rep.half_plane_ok = rep.sup_re_phi_r < rep.half_plane_level;

  Complex phi0 = psi.eval(disc.eval(0.0));
  rep.schwarz_bound = 2.0 * (rep.half_plane_level - phi0.real());
  CVector grad = psi.holomorphic_gradient(z_delta);
  CVector f1 = disc.coeffs.size() > 1 ? CVector(disc.coeffs[1]) : CVector(CVector::Zero(model.dim));
  rep.dphi_abs = r_shrink * std::abs(dot_plain(grad, f1));
  rep.schwarz_ok = rep.dphi_abs <= rep.schwarz_bound * (1.0 + 1e-12);

  rep.alpha = disc.alpha;
  rep.implied_alpha = rep.schwarz_bound > 0.0 ? disc.alpha * rep.dphi_abs / rep.schwarz_bound : 0.0;
  rep.implied_le_alpha = rep.implied_alpha <= disc.alpha * (1.0 + 1e-12);
  return rep;
}

}  // namespace kr
