#include "kr/taylor.hpp"

#include <cmath>

#include "kr/levi.hpp"
#include "kr/quasirandom.hpp"

namespace kr {

namespace {

// Second-order-accurate central stencils for d^p/dx^p, offsets in units of h.
const std::vector<std::pair<int, double>>& stencil_for(int p) {
  static const std::vector<std::vector<std::pair<int, double>>> table = {
      {{0, 1.0}},
      {{-1, -0.5}, {1, 0.5}},
      {{-1, 1.0}, {0, -2.0}, {1, 1.0}},
      {{-2, -0.5}, {-1, 1.0}, {1, -1.0}, {2, 0.5}},
      {{-2, 1.0}, {-1, -4.0}, {0, 6.0}, {1, -4.0}, {2, 1.0}},
      {{-3, -0.5}, {-2, 2.0}, {-1, -2.5}, {1, 2.5}, {2, -2.0}, {3, 0.5}},
      {{-3, 1.0}, {-2, -6.0}, {-1, 15.0}, {0, -20.0}, {1, 15.0}, {2, -6.0}, {3, 1.0}},
  };
  if (p < 0 || p >= static_cast<int>(table.size()))
    throw std::invalid_argument("stencil_for: derivative order out of range (0..6)");
  return table[static_cast<std::size_t>(p)];
}

// gamma indexes the 2n real coordinates (x_0, y_0, x_1, y_1, ...).
double fd_partial(const RealFn& f, int n, const std::vector<int>& gamma, double h) {
  std::vector<int> active;
  int order = 0;
  for (int v = 0; v < 2 * n; ++v) {
    if (gamma[static_cast<std::size_t>(v)] > 0) active.push_back(v);
    order += gamma[static_cast<std::size_t>(v)];
  }
  double sum = 0.0;
  std::vector<std::size_t> tap(active.size(), 0);
  for (;;) {
    double coeff = 1.0;
    CVector z = CVector::Zero(n);
    for (std::size_t a = 0; a < active.size(); ++a) {
      int v = active[a];
      const auto& st = stencil_for(gamma[static_cast<std::size_t>(v)]);
      coeff *= st[tap[a]].second;
      double off = st[tap[a]].first * h;
      if (v % 2 == 0)
        z[v / 2] += off;
      else
        z[v / 2] += Complex(0.0, off);
    }
    sum += coeff * f(z);
    // odometer over the tensor product of stencils
    std::size_t a = 0;
    for (; a < active.size(); ++a) {
      const auto& st = stencil_for(gamma[static_cast<std::size_t>(active[a])]);
      if (++tap[a] < st.size()) break;
      tap[a] = 0;
    }
    if (a == active.size()) break;
  }
  return sum / std::pow(h, order);
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

void enumerate_multi(int len, int budget, std::vector<int>& cur, int pos,
                     const std::function<void(const std::vector<int>&)>& emit) {
  if (pos == len) {
    emit(cur);
    return;
  }
  for (int e = 0; e <= budget; ++e) {
    cur[static_cast<std::size_t>(pos)] = e;
    enumerate_multi(len, budget - e, cur, pos + 1, emit);
  }
  cur[static_cast<std::size_t>(pos)] = 0;
}

void split_degree_part(const MixedPolynomial& part, MixedPolynomial& q_mixed, MixedPolynomial& h) {
  for (const auto& [key, c] : part.terms()) {
    int da = multi_degree(key.first);
    int db = multi_degree(key.second);
    if (da > 0 && db > 0) {
      q_mixed.add_term(key.first, key.second, c);
    } else if (db == 0 && da > 0) {
      h.add_term(key.first, key.second, 0.5 * c);
    } else if (da == 0 && db > 0) {
      h.add_term(key.second, key.first, 0.5 * std::conj(c));
    }
  }
}

TaylorModel decompose_poly(const MixedPolynomial& framed, int k, double normal_tol) {
  if (k < 3) throw std::invalid_argument("decompose: need k >= 3");
  const int n = framed.dimension();
  MultiIndex zero(static_cast<std::size_t>(n), 0);
  if (std::abs(framed.coefficient(zero, zero)) > normal_tol)
    throw std::invalid_argument("decompose: nonzero constant term (point not on the boundary?)");
  const MixedPolynomial linear = framed.degree_part(1);
  for (const auto& [key, c] : linear.terms()) {
    bool is_zn = (key.first[static_cast<std::size_t>(n - 1)] + key.second[static_cast<std::size_t>(n - 1)]) == 1;
    Complex expect = is_zn ? Complex(0.5) : Complex(0.0);
    if (std::abs(c - expect) > normal_tol)
      throw std::invalid_argument("decompose: linear part is not Re w_n (input not in a normal frame)");
  }

  TaylorModel model;
  model.dim = n;
  model.degree = k;
  for (int j = 2; j <= k; ++j) {
    MixedPolynomial qt(n), h(n);
    split_degree_part(framed.degree_part(j), qt, h);
    MixedPolynomial qj = qt;
    qj += h;
    qj += h.conjugate();  // + 2 Re H_j
    model.q.push_back(std::move(qj));
    model.q_mixed.push_back(std::move(qt));
    model.h.push_back(std::move(h));
  }
  return model;
}

}  // namespace

bool NormalFrame::is_identity(double tol) const {
  return std::abs(scale - 1.0) <= tol && base.norm() <= tol &&
         (u - Eigen::MatrixXcd::Identity(u.rows(), u.cols())).norm() <= tol;
}

NormalFrame normalize_at_boundary(const Domain& d, const CVector& p) {
  if (std::abs(d.r(p)) > 1e-10)
    throw std::invalid_argument("normalize_at_boundary: |r(P)| > 1e-10");
  CVector g = real_gradient(d, p);
  double gn = g.norm();
  if (gn < 1e-8)
    throw std::runtime_error("normalize_at_boundary: vanishing gradient (degenerate boundary point)");
  const int n = static_cast<int>(p.size());

  // Orthonormal basis with first vector the unit outward normal; U sends it to e_n.
  CVector u1 = g / gn;
  std::vector<CVector> basis{u1};
  for (int cand = 0; cand < n && static_cast<int>(basis.size()) < n; ++cand) {
    CVector v = CVector::Zero(n);
    v[cand] = 1.0;
    for (const CVector& b : basis) v -= b.dot(v) * b;  // b.dot(v) = conj(b)^T v
    double vn = v.norm();
    if (vn > 0.5) basis.push_back(v / vn);
  }
  if (static_cast<int>(basis.size()) != n)
    throw std::runtime_error("normalize_at_boundary: failed to complete a unitary basis");

  Eigen::MatrixXcd u_adj(n, n);  // columns of U^*
  for (int i = 1; i < n; ++i) u_adj.col(i - 1) = basis[static_cast<std::size_t>(i)];
  u_adj.col(n - 1) = basis[0];

  NormalFrame frame;
  frame.base = p;
  frame.u = u_adj.adjoint();
  frame.scale = gn;  // = 2 ||dr/dz||, makes the Re w_n coefficient exactly 1
  return frame;
}

RealFn framed_fn(const Domain& d, const NormalFrame& frame) {
  RealFn r = d.r;
  NormalFrame fr = frame;
  return [r, fr](const CVector& w) { return r(fr.from_frame(w)); };
}

MixedPolynomial framed_poly(const Domain& d, const NormalFrame& frame) {
  if (!d.poly) throw std::invalid_argument("framed_poly: domain has no polynomial form");
  Eigen::MatrixXcd a = frame.u.adjoint() / frame.scale;
  return d.poly->substitute_affine(a, frame.base);
}

TaylorModel decompose(const MixedPolynomial& framed, int k) {
  return decompose_poly(framed, k, 1e-10);
}

MixedPolynomial extract_jet(const RealFn& f, int n, int k, double jet_step) {
  if (n < 1 || k < 1) throw std::invalid_argument("extract_jet: need n >= 1, k >= 1");
  if (k > 6) throw std::invalid_argument("extract_jet: jets above order 6 are not supported");

  // Real-coordinate Taylor coefficients by Richardson-extrapolated differences.
  std::vector<std::pair<std::vector<int>, double>> real_terms;
  std::vector<int> cur(static_cast<std::size_t>(2 * n), 0);
  enumerate_multi(2 * n, k, cur, 0, [&](const std::vector<int>& gamma) {
    double dh = fd_partial(f, n, gamma, jet_step);
    double dh2 = fd_partial(f, n, gamma, 0.5 * jet_step);
    double deriv = (4.0 * dh2 - dh) / 3.0;
    if (!std::isfinite(deriv)) throw std::runtime_error("extract_jet: non-finite derivative sample");
    double fact = 1.0;
    for (int e : gamma) fact *= factorial(e);
    real_terms.emplace_back(gamma, deriv / fact);
  });

  // x_i = (z_i + zbar_i)/2, y_i = (z_i - zbar_i)/(2i), expanded exactly.
  std::vector<MixedPolynomial> var_poly;
  for (int v = 0; v < 2 * n; ++v) {
    int i = v / 2;
    MixedPolynomial pv(n);
    MultiIndex a(static_cast<std::size_t>(n), 0), b(static_cast<std::size_t>(n), 0);
    a[static_cast<std::size_t>(i)] = 1;
    if (v % 2 == 0) {
      pv.add_term(a, b, 0.5);
      pv.add_term(b, a, 0.5);
    } else {
      pv.add_term(a, b, Complex(0.0, -0.5));
      pv.add_term(b, a, Complex(0.0, 0.5));
    }
    var_poly.push_back(pv);
  }

  MixedPolynomial jet(n);
  double biggest = 0.0;
  for (const auto& [gamma, t] : real_terms) biggest = std::max(biggest, std::abs(t));
  const double noise_floor = 1e-9 * (1.0 + biggest);
  for (const auto& [gamma, t] : real_terms) {
    if (std::abs(t) <= noise_floor) continue;
    MixedPolynomial term = MixedPolynomial::constant(n, t);
    for (int v = 0; v < 2 * n; ++v)
      for (int e = 0; e < gamma[static_cast<std::size_t>(v)]; ++e)
        term = term * var_poly[static_cast<std::size_t>(v)];
    jet += term;
  }
  // drop sub-noise coefficients produced by cancellation in the conversion
  MixedPolynomial cleaned(n);
  for (const auto& [key, c] : jet.terms())
    if (std::abs(c) > noise_floor) cleaned.add_term(key.first, key.second, c);
  return cleaned;
}

TaylorModel decompose(const RealFn& framed, int n, int k, double jet_step) {
  MixedPolynomial jet = extract_jet(framed, n, k, jet_step);
  return decompose_poly(jet, k, 1e-6);
}

RemainderConstants remainder_constants(const RealFn& framed, TaylorModel& model,
                                       double radius, int n_samples, bool covers_domain) {
  if (!(radius > 0.0)) throw std::invalid_argument("remainder_constants: need radius > 0");
  if (n_samples < 16) throw std::invalid_argument("remainder_constants: need at least 16 samples");
  if (model.degree < 3) throw std::invalid_argument("remainder_constants: model degree >= 3 required");
  const int n = model.dim;

  MixedPolynomial psi = make_psi(model);
  MixedPolynomial q23 = model.q_at(2);
  q23 += model.q_at(3);
  MixedPolynomial qt = model.q_mixed_at(2);
  qt += 2.0 * model.q_mixed_at(3);

  HaltonSequence seq(2 * n, 11);
  double sup1 = 0.0, sup2 = 0.0, sup3 = 0.0;
  double worst_rel = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n_samples; ++i) {
    CVector z = next_in_complex_ball(seq, n, radius);
    double nz = z.norm();
    if (nz < 1e-8 * radius) continue;
    double n4 = nz * nz * nz * nz;

    HermitianMatrix hm = levi_matrix(framed, z);
    double eig = min_levi_eigenvalue(hm);
    double scale = 1.0 + std::abs(framed(z)) + hm.norm();
    worst_rel = std::min(worst_rel, eig / scale);
    if (eig / scale < -1e-6)
      throw std::runtime_error(
          "remainder_constants: sampled Levi eigenvalue below -1e-6 "
          "(defining function is not plurisubharmonic)");

    double rz = framed(z);
    sup1 = std::max(sup1, -qt.eval(z).real() / n4);
    double lin = z[n - 1].real();
    sup2 = std::max(sup2, (lin + q23.eval(z).real() - rz) / n4);
    if (rz < 0.0) sup3 = std::max(sup3, psi.eval(z).real() / n4);
  }

  RemainderConstants out;
  out.c1 = 1.5 * std::max(0.0, sup1);
  out.c2 = 1.5 * std::max(0.0, sup2);
  out.c3 = 1.5 * std::max(0.0, sup3);
  out.min_levi_rel = worst_rel;
  model.c1 = out.c1;
  model.c2 = out.c2;
  model.c3 = out.c3;
  model.sample_radius = radius;
  model.inclusion_global = covers_domain;
  return out;
}

MixedPolynomial make_psi(const TaylorModel& model) {
  if (model.degree < 3) throw std::invalid_argument("make_psi: model degree >= 3 required");
  MixedPolynomial psi = MixedPolynomial::variable(model.dim, model.dim - 1);
  psi += 2.0 * model.h_at(2);
  psi += 2.0 * model.h_at(3);
  return psi;
}

}  // namespace kr
