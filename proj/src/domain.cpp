#include "kr/domain.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "kr/fornaess_lee.hpp"
#include "kr/kobayashi.hpp"
#include "kr/levi.hpp"

namespace kr {

namespace {

constexpr double kBoundaryTol = 1e-10;

CVector fd_real_gradient(const RealFn& f, const CVector& z) {
  const int n = static_cast<int>(z.size());
  CVector g(n);
  auto partial = [&](const CVector& dir) {
    auto central = [&](double h) { return (f(z + h * dir) - f(z - h * dir)) / (2.0 * h); };
    double h = 1e-5 * (1.0 + z.norm());
    return (4.0 * central(0.5 * h) - central(h)) / 3.0;  // Richardson, O(h^4)
  };
  for (int i = 0; i < n; ++i) {
    CVector ex = CVector::Zero(n), ey = CVector::Zero(n);
    ex[i] = 1.0;
    ey[i] = Complex(0.0, 1.0);
    g[i] = Complex(partial(ex), partial(ey));
  }
  return g;
}

std::vector<double> parse_numbers(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    // allow "2^30" style bases
    auto caret = item.find('^');
    if (caret != std::string::npos) {
      double b = std::stod(item.substr(0, caret));
      double e = std::stod(item.substr(caret + 1));
      out.push_back(std::pow(b, e));
    } else {
      out.push_back(std::stod(item));
    }
  }
  return out;
}

Domain make_ball(int n) {
  Domain d;
  d.dim = n;
  d.bounding_radius = 2.0;
  d.name = "ball";
  MixedPolynomial r = MixedPolynomial::norm2(n);
  r += MixedPolynomial::constant(n, -1.0);
  d.poly = r;
  d.r = r.as_real_fn();
  d.witness = CVector::Zero(n);
  d.diameter = 2.0;
  d.default_boundary_point = CVector::Zero(n);
  d.default_boundary_point[n - 1] = 1.0;
  CVector center = CVector::Zero(n);
  d.exact_kappa = [center](const CVector& z, const CVector& x) {
    return kappa_ball_general(center, 1.0, z, x);
  };
  return d;
}

Domain make_halfspace() {
  Domain d;
  d.dim = 2;
  d.bounding_radius = 2.0;
  d.name = "halfspace";
  MixedPolynomial r = MixedPolynomial::re_variable(2, 1);
  d.poly = r;
  d.r = r.as_real_fn();
  d.witness = cvec({0.0, -0.5});
  d.diameter = 4.0;
  d.default_boundary_point = cvec({0.0, 0.0});
  d.exact_kappa = [](const CVector& z, const CVector& x) {
    // closed form for the untruncated half-space {Re z_2 < 0}
    return kappa_halfplane(0.0, z[1], x[1]).value;
  };
  return d;
}

Domain make_model_psh() {
  // Re z_2 + |z_1|^2 + |z_2|^2 < 0 is the ball of radius 1/2 about (0, -1/2).
  Domain d;
  d.dim = 2;
  d.bounding_radius = 1.25;
  d.name = "model-psh";
  MixedPolynomial r = MixedPolynomial::re_variable(2, 1);
  r += MixedPolynomial::abs2(2, 0);
  r += MixedPolynomial::abs2(2, 1);
  d.poly = r;
  d.r = r.as_real_fn();
  d.witness = cvec({0.0, -0.5});
  d.diameter = 1.0;
  d.default_boundary_point = cvec({0.0, 0.0});
  CVector center = cvec({0.0, -0.5});
  d.exact_kappa = [center](const CVector& z, const CVector& x) {
    return kappa_ball_general(center, 0.5, z, x);
  };
  return d;
}

Domain make_model_2m(const std::vector<double>& exponents) {
  const int n = static_cast<int>(exponents.size()) + 1;
  Domain d;
  d.dim = n;
  d.bounding_radius = 1.0;
  d.name = "model-2m";
  MixedPolynomial r = MixedPolynomial::re_variable(n, n - 1);
  for (int j = 0; j < n - 1; ++j) {
    int m = static_cast<int>(exponents[j]);
    if (m < 1) throw std::invalid_argument("model-2m: exponents must be positive integers");
    MultiIndex alpha(n, 0), beta(n, 0);
    alpha[j] = m;
    beta[j] = m;
    r.add_term(alpha, beta, 1.0);
  }
  d.poly = r;
  d.r = r.as_real_fn();
  d.witness = CVector::Zero(n);
  d.witness[n - 1] = -0.25;
  d.diameter = 2.0;
  d.default_boundary_point = CVector::Zero(n);
  return d;
}

Domain make_remark5(int m, int l) {
  Domain d;
  d.dim = 2;
  d.bounding_radius = 1.0;
  d.name = "remark5";
  MixedPolynomial p1 = remark5_p(m, l);
  MixedPolynomial r = MixedPolynomial::re_variable(2, 1);
  for (const auto& [key, c] : p1.terms()) {
    MultiIndex alpha = {key.first[0], 0}, beta = {key.second[0], 0};
    r.add_term(alpha, beta, c);
  }
  d.poly = r;
  d.r = r.as_real_fn();
  d.witness = cvec({0.0, -0.5});
  d.diameter = 2.0;
  d.default_boundary_point = cvec({0.0, 0.0});
  return d;
}

}  // namespace

bool contains(const Domain& d, const CVector& z) {
  if (z.size() != d.dim) throw std::invalid_argument("contains: dimension mismatch");
  return d.r(z) < 0.0 && z.norm() < d.bounding_radius;
}

CVector real_gradient(const Domain& d, const CVector& z) {
  if (d.poly) {
    CVector v = d.poly->holomorphic_gradient(z);
    return 2.0 * v.conjugate();
  }
  return fd_real_gradient(d.r, z);
}

CVector unit_outward_normal(const Domain& d, const CVector& p) {
  if (std::abs(d.r(p)) > kBoundaryTol)
    throw std::invalid_argument("unit_outward_normal: point is not on the boundary (|r| > 1e-10)");
  CVector g = real_gradient(d, p);
  double gn = g.norm();
  if (gn < 1e-8) throw std::runtime_error("unit_outward_normal: vanishing gradient (degenerate boundary point)");
  return g / gn;
}

NormalRay normal_ray(const Domain& d, const CVector& p, std::vector<double> depths) {
  NormalRay ray;
  ray.base = p;
  ray.normal = unit_outward_normal(d, p);
  for (std::size_t i = 0; i + 1 < depths.size(); ++i)
    if (!(depths[i] > depths[i + 1]))
      throw std::invalid_argument("normal_ray: depths must be strictly decreasing");
  for (double delta : depths) {
    if (!(delta > 0.0)) throw std::invalid_argument("normal_ray: depths must be positive");
    CVector q = p - delta * ray.normal;
    if (!contains(d, q)) {
      std::ostringstream os;
      os << "normal_ray: ray exits the domain at depth delta=" << delta;
      throw std::runtime_error(os.str());
    }
  }
  ray.depths = std::move(depths);
  return ray;
}

MixedPolynomial remark5_p(int m, int l) {
  if (m < 1 || 2 * l < m || l >= m)
    throw std::invalid_argument("remark5_p: need m >= 1 and m/2 <= l < m");
  MixedPolynomial p(1);
  double m2 = 2.0 * m * m;
  p.add_term({m + l}, {m - l}, m2);
  p.add_term({m}, {m}, 4.0 * (m * m - l * l));
  p.add_term({m - l}, {m + l}, m2);
  return p;
}

ObstructionReport remark5_checks(int m, int l, int n_radii, int n_angles) {
  MixedPolynomial p = remark5_p(m, l);
  RealFn f = p.as_real_fn();

  ObstructionReport rep;
  rep.min_laplacian = std::numeric_limits<double>::infinity();
  rep.scale = 0.0;
  const double two_pi = 2.0 * std::numbers::pi;
  CVector e1 = cvec({1.0});
  for (int k = 1; k <= n_radii; ++k) {
    double rho = static_cast<double>(k) / n_radii;
    for (int j = 0; j < n_angles; ++j) {
      double theta = two_pi * j / n_angles;
      CVector z = cvec({Complex(rho * std::cos(theta), rho * std::sin(theta))});
      rep.min_laplacian = std::min(rep.min_laplacian, 4.0 * levi_form(f, z, e1));
      rep.scale = std::max(rep.scale, std::abs(f(z)));
    }
  }
  rep.min_angular_factor = std::numeric_limits<double>::infinity();
  rep.argmin_theta = 0.0;
  for (int j = 0; j < n_angles; ++j) {
    double theta = two_pi * j / n_angles;
    double factor = 4.0 * m * m * std::cos(2.0 * l * theta) + 4.0 * (m * m - l * l);
    if (factor < rep.min_angular_factor) {
      rep.min_angular_factor = factor;
      rep.argmin_theta = theta;
    }
  }
  return rep;
}

Domain make_domain(const std::string& name) {
  auto colon = name.find(':');
  std::string head = name.substr(0, colon);
  std::string rest = colon == std::string::npos ? "" : name.substr(colon + 1);

  if (head == "ball") return make_ball(rest.empty() ? 2 : static_cast<int>(parse_numbers(rest).at(0)));
  if (head == "halfspace") return make_halfspace();
  if (head == "model-psh") return make_model_psh();
  if (head == "model-2m") {
    if (rest.empty()) throw std::invalid_argument("model-2m needs exponents, e.g. model-2m:1,2");
    return make_model_2m(parse_numbers(rest));
  }
  if (head == "remark5") {
    auto v = parse_numbers(rest);
    if (v.size() != 2) throw std::invalid_argument("remark5 needs m,l");
    return make_remark5(static_cast<int>(v[0]), static_cast<int>(v[1]));
  }
  if (head == "fl") {
    if (rest.rfind("part1:", 0) == 0) {
      auto v = parse_numbers(rest.substr(6));
      if (v.size() != 3) throw std::invalid_argument("fl:part1 needs a,eps,N");
      Schedule s = make_schedule_part1(v[0], v[1], static_cast<int>(v[2]));
      return build_fl_domain(s, static_cast<int>(v[2]), 1e-12).as_domain();
    }
    if (rest.rfind("part2:", 0) == 0) {
      auto v = parse_numbers(rest.substr(6));
      if (v.size() != 3) throw std::invalid_argument("fl:part2 needs a,alpha,N");
      Schedule s = make_schedule_part2(v[0], v[1], static_cast<int>(v[2]));
      return build_fl_domain(s, static_cast<int>(v[2]), 1e-12).as_domain();
    }
    return fl_from_file(rest).as_domain();
  }
  throw std::invalid_argument("make_domain: unknown domain name '" + name + "'");
}

}  // namespace kr
