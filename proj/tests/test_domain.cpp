#include <doctest.h>

#include <numbers>

#include "kr/domain.hpp"
#include "kr/levi.hpp"
#include "kr/quasirandom.hpp"

using namespace kr;

TEST_CASE("membership on the built-in models") {
  Domain ball = make_domain("ball");
  CHECK(contains(ball, cvec({0.0, 0.0})));
  CHECK_FALSE(contains(ball, cvec({1.0, 0.0})));  // boundary point
  Domain half = make_domain("halfspace");
  CHECK(contains(half, cvec({0.0, -0.1})));
  CHECK_FALSE(contains(half, cvec({0.0, 0.1})));
  CHECK_THROWS_AS((void)contains(ball, cvec({1.0})), std::invalid_argument);
}

TEST_CASE("obstruction polynomial values and parameter range") {
  MixedPolynomial p = remark5_p(2, 1);
  CHECK(p.eval(cvec({std::polar(1.0, std::numbers::pi / 2.0)})).real() ==
        doctest::Approx(-4.0).epsilon(1e-12));
  CHECK(p.eval(cvec({1.0})).real() == doctest::Approx(28.0).epsilon(1e-12));
  CHECK(p.is_real_valued());
  CHECK_THROWS_AS((void)remark5_p(2, 2), std::invalid_argument);  // l < m fails
  CHECK_THROWS_AS((void)remark5_p(4, 1), std::invalid_argument);  // m/2 <= l fails
  CHECK_THROWS_AS((void)remark5_p(0, 0), std::invalid_argument);
}

TEST_CASE("obstruction report: subharmonic but angularly negative") {
  ObstructionReport rep = remark5_checks(2, 1);
  CHECK(rep.min_laplacian >= -1e-6 * rep.scale);
  CHECK(rep.min_angular_factor == doctest::Approx(-4.0).epsilon(1e-12));
  CHECK(rep.argmin_theta == doctest::Approx(std::numbers::pi / 2.0).epsilon(1e-12));

  ObstructionReport rep32 = remark5_checks(3, 2);
  CHECK(rep32.min_angular_factor == doctest::Approx(-16.0).epsilon(1e-10));
  CHECK(rep32.min_laplacian >= -1e-6 * rep32.scale);
}

TEST_CASE("normal rays on the models") {
  Domain half = make_domain("halfspace");
  NormalRay ray = normal_ray(half, cvec({0.0, 0.0}), {0.1, 0.01, 0.001});
  CHECK(std::abs(ray.normal[0]) < 1e-12);
  CHECK(std::abs(ray.normal[1] - Complex(1.0)) < 1e-12);
  CHECK(contains(half, ray.point_at(0.01)));

  Domain ball = make_domain("ball");
  NormalRay bray = normal_ray(ball, cvec({0.0, 1.0}), {0.5, 0.1});
  CHECK(std::abs(bray.normal[1] - Complex(1.0)) < 1e-12);
  CHECK(contains(ball, bray.point_at(0.5)));

  // a depth beyond the domain is reported with its value
  try {
    (void)normal_ray(ball, cvec({0.0, 1.0}), {3.0, 0.1});
    FAIL("expected normal_ray to throw");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("3") != std::string::npos);
  }
  CHECK_THROWS_AS((void)normal_ray(ball, cvec({0.0, 1.0}), {0.1, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS((void)normal_ray(ball, cvec({0.0, 0.5}), {0.1}), std::invalid_argument);
}

TEST_CASE("penetration is monotone for small depths") {
  for (const char* name : {"halfspace", "ball", "model-psh", "model-2m:1,2"}) {
    Domain d = make_domain(name);
    CVector p = d.default_boundary_point;
    std::vector<double> depths = {0.05, 0.02, 0.01, 0.005};
    NormalRay ray = normal_ray(d, p, depths);
    double prev = 0.0;
    for (auto it = depths.rbegin(); it != depths.rend(); ++it) {
      double pen = std::abs(d.r(ray.point_at(*it)));
      CHECK(pen > prev);
      prev = pen;
    }
  }
}

TEST_CASE("model defining functions are plurisubharmonic on samples") {
  for (const char* name : {"ball", "model-psh", "model-2m:1,2", "remark5:2,1"}) {
    Domain d = make_domain(name);
    HaltonSequence seq(2 * d.dim, 3);
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
      CVector z = next_in_complex_ball(seq, d.dim, 0.9 * d.bounding_radius);
      HermitianMatrix h = levi_matrix(d.r, z);
      double scale = 1.0 + std::abs(d.r(z)) + h.norm();
      worst = std::min(worst, min_levi_eigenvalue(h) / scale);
    }
    CHECK(worst >= -1e-8);
  }
}

TEST_CASE("registry names parse and reject unknowns") {
  CHECK(make_domain("ball:3").dim == 3);
  CHECK(make_domain("model-2m:1").dim == 2);
  CHECK(make_domain("remark5:3,2").dim == 2);
  CHECK_THROWS_AS((void)make_domain("torus"), std::invalid_argument);
  CHECK_THROWS_AS((void)make_domain("model-2m"), std::invalid_argument);
  Domain d = make_domain("model-2m:1,2");
  CHECK(d.dim == 3);
  CHECK(d.r(cvec({0.0, 0.0, -0.1})) == doctest::Approx(-0.1));
}

TEST_CASE("witness points are interior") {
  for (const char* name : {"ball", "halfspace", "model-psh", "model-2m:1,2", "remark5:2,1"}) {
    Domain d = make_domain(name);
    CHECK(contains(d, d.witness));
  }
}
