#include <doctest.h>

#include <cmath>
#include <random>

#include "kr/domain.hpp"
#include "kr/harness.hpp"
#include "kr/kobayashi.hpp"
#include "kr/taylor.hpp"

using namespace kr;

namespace {

std::mt19937_64 g_rng(987654);

double urand(double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  return u(g_rng);
}

// Independent oracle: transport {Re < c} to the unit disc by the involution
// mu(z) = (z+1)/(z-1) (applied after shifting by c) and use the disc metric.
double halfplane_oracle(double c, Complex z, Complex x) {
  Complex w = z - c;
  Complex mu = (w + 1.0) / (w - 1.0);
  Complex dmu = -2.0 / ((w - 1.0) * (w - 1.0));
  return std::abs(dmu * x) / (1.0 - std::norm(mu));
}

// Disc automorphism oracle for an interior base point.
double disc_oracle(Complex a, Complex x) {
  // phi_a(z) = (z-a)/(1-conj(a) z) sends a to 0; kappa(a;X) = |phi_a'(a) X|
  Complex dphi = 1.0 / (1.0 - std::norm(a));
  return std::abs(dphi * x);
}

TaylorModel flat_model(int dim) {
  TaylorModel m;
  m.dim = dim;
  m.degree = 3;
  m.q.assign(2, MixedPolynomial(dim));
  m.q_mixed.assign(2, MixedPolynomial(dim));
  m.h.assign(2, MixedPolynomial(dim));
  return m;
}

StageConstants unit_constants() {
  StageConstants sc;
  sc.c3 = 1.0;
  sc.c4 = 1.0;
  sc.c5 = 1.0;
  sc.c7 = 1.0;
  sc.kappa_geom = 1e9;  // hypothesis check disabled for the synthetic identity
  sc.delta_max = 1.0;
  sc.sample_radius = 1.0;
  sc.inclusion_global = true;
  return sc;
}

}  // namespace

TEST_CASE("half-plane closed form against the Moebius oracle") {
  CHECK(kappa_halfplane(0.0, Complex(-1.0), Complex(1.0)).value == doctest::Approx(0.5));
  double delta = 0.01;
  CHECK(kappa_halfplane(0.0, Complex(-delta), Complex(1.0)).value ==
        doctest::Approx(1.0 / (2.0 * delta)));
  CHECK(kappa_halfplane(1.0, Complex(0.0), Complex(0.0, 2.0)).value == doctest::Approx(1.0));
  for (int i = 0; i < 100; ++i) {
    double c = urand(-1.0, 1.0);
    Complex z(c - std::exp(urand(-3.0, 1.0)), urand(-2.0, 2.0));
    Complex x(urand(-2.0, 2.0), urand(-2.0, 2.0));
    CHECK(kappa_halfplane(c, z, x).value ==
          doctest::Approx(halfplane_oracle(c, z, x)).epsilon(1e-12));
  }
  CHECK_THROWS_AS((void)kappa_halfplane(0.0, Complex(0.1), Complex(1.0)), std::invalid_argument);
}

TEST_CASE("unit disc and ball closed forms") {
  CHECK(kappa_unit_disc(Complex(0.0), Complex(1.0)).value == doctest::Approx(1.0));
  CHECK(kappa_unit_disc(Complex(0.5), Complex(1.0)).value == doctest::Approx(4.0 / 3.0));
  CHECK(kappa_ball(3, cvec({1.0, 2.0, 2.0})).value == doctest::Approx(3.0));
  for (int i = 0; i < 100; ++i) {
    Complex a = std::polar(urand(0.0, 0.95), urand(0.0, 6.28));
    Complex x(urand(-2.0, 2.0), urand(-2.0, 2.0));
    CHECK(kappa_unit_disc(a, x).value == doctest::Approx(disc_oracle(a, x)).epsilon(1e-12));
  }
  CHECK_THROWS_AS((void)kappa_unit_disc(Complex(1.0), Complex(1.0)), std::invalid_argument);
  // the general ball formula reduces to the disc metric on a complex slice
  for (int i = 0; i < 20; ++i) {
    double t = urand(-0.9, 0.9);
    CVector z = cvec({Complex(t), 0.0});
    CVector x = cvec({1.0, 0.0});
    CHECK(kappa_ball_general(CVector::Zero(2), 1.0, z, x) ==
          doctest::Approx(1.0 / (1.0 - t * t)).epsilon(1e-12));
  }
}

TEST_CASE("sharp half-plane derivative bound") {
  CHECK(schwarz_halfplane_bound(0.0, Complex(-1.0)) == doctest::Approx(2.0));
  CHECK(schwarz_halfplane_bound(5.0, Complex(5.0 - 1e-3)) == doctest::Approx(2e-3));
  CHECK_THROWS_AS((void)schwarz_halfplane_bound(0.0, Complex(1.0)), std::invalid_argument);

  // extremal map attains it: g(l) = c - (c - Re g0)(1+l)/(1-l) + i Im g0
  for (int i = 0; i < 10; ++i) {
    double c = urand(-1.0, 1.0);
    Complex g0(c - std::exp(urand(-2.0, 0.5)), urand(-1.0, 1.0));
    auto g = [&](Complex l) {
      return c - (c - g0.real()) * (1.0 + l) / (1.0 - l) + Complex(0.0, g0.imag());
    };
    double h = 1e-4;
    auto central = [&](double step) { return (g(Complex(step)) - g(Complex(-step))) / (2.0 * step); };
    Complex d1 = (4.0 * central(0.5 * h) - central(h)) / 3.0;
    CHECK(std::abs(std::abs(d1) - schwarz_halfplane_bound(c, g0)) < 1e-10);
    CHECK(g(Complex(0.0)) == g0);
  }
}

TEST_CASE("linear disc bounds on the reference geometries") {
  Domain ball = make_domain("ball");
  CVector x = cvec({Complex(1.0, 2.0), Complex(0.0, -1.0)});
  double v = linear_disc_upper(ball, CVector::Zero(2), x).value;
  CHECK(v == doctest::Approx(x.norm()).epsilon(1e-6));

  Domain half = make_domain("halfspace");
  double delta = 0.003;
  CHECK(linear_disc_upper(half, cvec({0.0, -delta}), cvec({0.0, 1.0})).value ==
        doctest::Approx(1.0 / delta).epsilon(1e-4));

  AnalyticDisc disc;
  double v2 = linear_disc_upper(ball, cvec({0.0, -0.5}), cvec({0.0, 1.0}), 256, &disc).value;
  CHECK(v2 == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(disc.degree() == 1);
  CHECK(disc.min_slack >= 0.0);
  CHECK_THROWS_AS((void)linear_disc_upper(ball, cvec({0.0, 1.5}), x), std::invalid_argument);
}

TEST_CASE("disc search improves on the linear disc and stays an upper bound") {
  Domain ball = make_domain("ball");
  CVector x = cvec({1.0, 1.0});
  DiscSearchParams params;
  params.budget = 400;
  params.degree = 4;
  params.boundary_samples = 128;
  double vs = disc_search_upper(ball, CVector::Zero(2), x, params).value;
  double vl = linear_disc_upper(ball, CVector::Zero(2), x, 128).value;
  CHECK(vs <= vl + 1e-12);
  CHECK(vs <= x.norm() * (1.0 + 1e-6));

  // half-space at degree 6: within the stated factor of 1/(2 delta)
  Domain half = make_domain("halfspace");
  double delta = 0.01;
  DiscSearchParams p6;
  p6.degree = 6;
  AnalyticDisc best;
  double v6 = disc_search_upper(half, cvec({0.0, -delta}), cvec({0.0, 1.0}), p6, &best).value;
  CHECK(v6 >= 1.0 / (2.0 * delta));  // never below the true metric
  CHECK(v6 <= 0.6 / delta);
  CHECK(best.min_slack >= 0.0);
  CHECK(disc_feasible(half, best, 512, 0.0));

  // degenerate direction
  double v0 = disc_search_upper(ball, CVector::Zero(2), CVector::Zero(2)).value;
  CHECK(v0 == 0.0);
}

TEST_CASE("homogeneity in the direction argument") {
  Domain ball = make_domain("ball");
  CVector z = cvec({Complex(0.1, 0.2), Complex(-0.3, 0.0)});
  CVector x = cvec({Complex(0.7, -0.1), Complex(0.2, 0.4)});
  DiscSearchParams params;
  params.budget = 200;
  params.degree = 3;
  params.boundary_samples = 64;
  double base_lin = linear_disc_upper(ball, z, x, 64).value;
  double base_search = disc_search_upper(ball, z, x, params).value;
  for (Complex c : {Complex(2.0), Complex(0.5), Complex(0.0, 2.0)}) {
    CVector cx = c * x;
    CHECK(linear_disc_upper(ball, z, cx, 64).value == std::abs(c) * base_lin);
    CHECK(disc_search_upper(ball, z, cx, params).value == std::abs(c) * base_search);
  }
  Complex c(1.7, -0.3);  // general phases agree to rounding
  CHECK(linear_disc_upper(ball, z, c * x, 64).value ==
        doctest::Approx(std::abs(c) * base_lin).epsilon(1e-12));
}

TEST_CASE("feasibility transfers to enclosing domains") {
  Domain small = make_domain("ball");
  Domain big;
  big.dim = 2;
  big.bounding_radius = 3.0;
  MixedPolynomial r2 = MixedPolynomial::norm2(2);
  r2 += MixedPolynomial::constant(2, -4.0);  // radius-2 ball
  big.poly = r2;
  big.r = r2.as_real_fn();
  big.witness = CVector::Zero(2);
  big.diameter = 4.0;
  big.default_boundary_point = cvec({0.0, 2.0});

  AnalyticDisc disc;
  (void)linear_disc_upper(small, cvec({0.0, -0.25}), cvec({1.0, 1.0}), 128, &disc);
  CHECK(disc_feasible(small, disc, 256, disc.margin));
  CHECK(disc_feasible(big, disc, 256, disc.margin));
  // domain monotonicity of the searched bound on nested balls
  DiscSearchParams params;
  params.budget = 300;
  params.degree = 3;
  double vs = disc_search_upper(small, cvec({0.0, -0.25}), cvec({1.0, 1.0}), params).value;
  double vb = disc_search_upper(big, cvec({0.0, -0.25}), cvec({1.0, 1.0}), params).value;
  CHECK(vb <= vs * (1.0 + 1e-9));
}

TEST_CASE("synthetic stage values reproduce the two reference slopes") {
  TaylorModel model = flat_model(2);
  StageConstants sc = unit_constants();
  std::vector<double> deltas = {1e-3, 1e-4, 1e-5, 1e-6};
  std::vector<double> v1, v2;
  CVector x = cvec({0.0, 1.0});
  for (double d : deltas) {
    v1.push_back(stage_lower_bound(model, d, x, 1, sc).value);
    v2.push_back(stage_lower_bound(model, d, x, 2, sc).value);
  }
  // stage 1: r/(2((delta+r)^4 + delta)) with r = delta^{1/4}
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    double d = deltas[i], r = std::pow(d, 0.25);
    CHECK(v1[i] == doctest::Approx(r / (2.0 * (std::pow(d + r, 4) + d))).epsilon(1e-12));
  }
  ExponentFit f1 = fit_exponent(deltas, v1);
  CHECK(f1.slope >= 0.745);
  CHECK(f1.slope <= 0.755);
  ExponentFit f2 = fit_exponent(deltas, v2);
  CHECK(f2.slope >= 0.865);
  CHECK(f2.slope <= 0.92);
  // asymptotic slope between the two smallest depths approaches 7/8
  double tail_slope = std::log(v2[3] / v2[2]) / std::log(deltas[2] / deltas[3]);
  CHECK(tail_slope == doctest::Approx(0.875).epsilon(0.006));
}

TEST_CASE("stage bounds scale exactly in the direction") {
  TaylorModel model = flat_model(2);
  StageConstants sc = unit_constants();
  CVector x = cvec({Complex(0.01, 0.02), Complex(1.0, -0.5)});
  for (int stage : {1, 2}) {
    double base = stage_lower_bound(model, 1e-3, x, stage, sc).value;
    for (Complex c : {Complex(2.0), Complex(0.5), Complex(0.0, 2.0)}) {
      CHECK(stage_lower_bound(model, 1e-3, c * x, stage, sc).value == std::abs(c) * base);
    }
  }
}

TEST_CASE("stage ratio grows like delta^{-1/8} on a dyadic grid") {
  TaylorModel model = flat_model(2);
  StageConstants sc = unit_constants();
  CVector x = cvec({0.0, 1.0});
  double prev_ratio = 0.0;
  for (int k = 14; k <= 22; ++k) {
    double d = std::pow(2.0, -k);
    double ratio = stage_lower_bound(model, d, x, 2, sc).value /
                   stage_lower_bound(model, d, x, 1, sc).value;
    if (prev_ratio > 0.0) {
      double growth = ratio / prev_ratio;
      CHECK(growth == doctest::Approx(std::pow(2.0, 0.125)).epsilon(0.05));
    }
    prev_ratio = ratio;
  }
}

TEST_CASE("stage preconditions") {
  TaylorModel model = flat_model(2);
  StageConstants sc = unit_constants();
  sc.kappa_geom = 0.1;
  sc.delta_max = 0.05;
  CVector x = cvec({0.0, 1.0});
  CHECK_THROWS_AS((void)stage_lower_bound(model, 0.2, x, 1, sc), std::invalid_argument);
  CHECK_THROWS_AS((void)stage_lower_bound(model, 0.01, cvec({1.0, 0.0}), 1, sc),
                  std::invalid_argument);
  CVector sideways = cvec({5.0, 1.0});  // ||X|| too large for the cone at this delta
  CHECK_THROWS_AS((void)stage_lower_bound(model, 0.04, sideways, 1, sc), std::invalid_argument);
  CHECK_THROWS_AS((void)stage_lower_bound(model, 0.01, x, 3, sc), std::invalid_argument);
}

TEST_CASE("lower bounds stay under searched upper bounds on the model domain") {
  Domain dom = make_domain("model-psh");
  NormalFrame frame = normalize_at_boundary(dom, dom.default_boundary_point);
  MixedPolynomial fp = framed_poly(dom, frame);
  TaylorModel model = decompose(fp, 3);
  remainder_constants(fp.as_real_fn(), model, dom.bounding_radius, 1024, true);
  StageConstants sc = assemble_stage_constants(model, dom);
  CVector normal = unit_outward_normal(dom, dom.default_boundary_point);
  DiscSearchParams params;
  params.budget = 300;
  params.degree = 4;
  params.boundary_samples = 128;
  for (double delta : {1e-2, 1e-3}) {
    CVector z = dom.default_boundary_point - delta * normal;
    double lower = stage_lower_bound(model, frame.scale * delta,
                                     frame.push_vector(normal), 2, sc).value;
    double upper = disc_search_upper(dom, z, normal, params).value;
    CHECK(lower <= upper * (1.0 + 1e-9));
  }
}

TEST_CASE("chain verification on discs into the model domains") {
  Domain half = make_domain("halfspace");
  NormalFrame frame = normalize_at_boundary(half, half.default_boundary_point);
  MixedPolynomial fp = framed_poly(half, frame);
  TaylorModel model = decompose(fp, 3);
  remainder_constants(fp.as_real_fn(), model, half.bounding_radius, 512, true);
  StageConstants sc = assemble_stage_constants(model, half);

  double delta = 0.01;
  AnalyticDisc disc;
  (void)linear_disc_upper(half, cvec({0.0, -delta}), cvec({0.0, 1.0}), 256, &disc);
  ChainReport rep = verify_chain(disc, model, sc, delta, 0.99);
  CHECK(rep.half_plane_ok);
  CHECK(rep.schwarz_ok);
  CHECK(rep.implied_le_alpha);
  CHECK(rep.implied_alpha >= disc.alpha / 2.2);  // near the factor-2 mark at r ~ 1

  // a near-extremal searched disc passes the whole chain as well
  DiscSearchParams params;
  params.degree = 6;
  params.budget = 600;
  AnalyticDisc searched;
  (void)disc_search_upper(half, cvec({0.0, -delta}), cvec({0.0, 1.0}), params, &searched);
  ChainReport rep2 = verify_chain(searched, model, sc, delta, std::pow(delta, 0.25));
  CHECK(rep2.half_plane_ok);
  CHECK(rep2.schwarz_ok);
  CHECK(rep2.implied_le_alpha);

  // degenerate disc: zero direction, zero implied bound
  AnalyticDisc constant;
  constant.dim = 2;
  constant.coeffs = {cvec({0.0, -delta})};
  constant.alpha = 0.0;
  ChainReport rep3 = verify_chain(constant, model, sc, delta, 0.5);
  CHECK(rep3.implied_alpha == 0.0);
  CHECK(rep3.implied_le_alpha);

  AnalyticDisc misplaced;
  misplaced.dim = 2;
  misplaced.coeffs = {cvec({0.0, -2.0 * delta})};
  CHECK_THROWS_AS((void)verify_chain(misplaced, model, sc, delta, 0.5), std::invalid_argument);
}
