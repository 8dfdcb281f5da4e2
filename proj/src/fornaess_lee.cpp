#include "kr/fornaess_lee.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

#include "kr/levi.hpp"
#include "kr/quasirandom.hpp"

namespace kr {

namespace {

constexpr double kLn2 = 0.6931471805599453;

const std::pair<std::vector<double>, std::vector<double>>& gl_nodes_01(int n) {
  static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
  static std::mutex mutex;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  std::vector<double> x(n), w(n);
  for (int i = 0; i < n; ++i) {
    double t = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int iter = 0; iter < 100; ++iter) {
      double pk_1 = 1.0, pk = t;
      for (int k = 2; k <= n; ++k) {
        double pk1 = ((2.0 * k - 1.0) * t * pk - (k - 1.0) * pk_1) / k;
        pk_1 = pk;
        pk = pk1;
      }
      dp = n * (t * pk - pk_1) / (t * t - 1.0);
      double dt = pk / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    x[i] = 0.5 * (t + 1.0);
    w[i] = 1.0 / ((1.0 - t * t) * dp * dp);  // already includes the [0,1] rescale
  }
  return cache.emplace(n, std::make_pair(std::move(x), std::move(w))).first->second;
}

double log_big_a(double log_a, double log_r) {
  double big = log_a - log_r;  // log of the dominant a_n/r_n term
  double rest = 0.5 + (-log_r) / (4.0 * log_a);
  return big + std::log1p(rest * std::exp(-big));
}

// Schedule formulas for an arbitrary index (used past n_max by the tail bound).
void schedule_logs(const Schedule& s, int n, double& log_a, double& log_r, double& log_delta) {
  double p3 = std::pow(3.0, n);
  double ln_a = std::log(s.base);
  log_delta = -p3 * ln_a;
  if (s.mode == Schedule::Mode::part1) {
    log_r = s.eps * log_delta;
    log_a = -log_r;
  } else {
    log_a = s.alpha * std::log(p3 * ln_a);
    log_r = -log_a;
  }
}

int part1_smoothness(double eps) {
  int k = 0;
  while (std::max(38, 9 * (k + 1) + 2) * eps < 1.0) ++k;
  return k;
}

}  // namespace

const ScheduleEntry& Schedule::at(int n) const {
  if (n < 1 || n > n_max) throw std::out_of_range("Schedule::at: index outside 1..n_max");
  return entries[static_cast<std::size_t>(n - 1)];
}

static Schedule make_schedule(double a, Schedule::Mode mode, double param, int n_max) {
  if (!(a > 1.0)) throw std::invalid_argument("schedule: need a > 1");
  if (n_max < 1) throw std::invalid_argument("schedule: need N >= 1");
  Schedule s;
  s.mode = mode;
  s.base = a;
  s.n_max = n_max;
  if (mode == Schedule::Mode::part1) {
    if (!(param > 0.0 && param < 1.0 / 3.0))
      throw std::invalid_argument("schedule part1: need eps in (0, 1/3)");
    s.eps = param;
  } else {
    if (!(param > 0.0)) throw std::invalid_argument("schedule part2: need alpha > 0");
    s.alpha = param;
  }
  for (int n = 1; n <= n_max; ++n) {
    ScheduleEntry e;
    schedule_logs(s, n, e.log_a, e.log_r, e.log_delta);
    e.log_big_a = log_big_a(e.log_a, e.log_r);
    if (e.log_a > 0.0) {
      try {
        e.b = solve_bn_log(e.log_a);
      } catch (const std::runtime_error&) {
        // left NaN; the index is unusable and gets skipped downstream
      }
    }
    s.entries.push_back(e);
  }
  s.selected = subsequence_select(s);
  return s;
}

Schedule make_schedule_part1(double a, double eps, int n_max) {
  return make_schedule(a, Schedule::Mode::part1, eps, n_max);
}

Schedule make_schedule_part2(double a, double alpha, int n_max) {
  return make_schedule(a, Schedule::Mode::part2, alpha, n_max);
}

double solve_bn_log(double log_an) {
  if (!(log_an > 0.0)) throw std::invalid_argument("solve_bn: need a_n > 1");
  auto f = [log_an](double b) { return 0.125 - b + std::log(b) / (4.0 * log_an); };
  double bcrit = std::min(1.0, 1.0 / (4.0 * log_an));
  if (!(f(bcrit) >= 0.0))
    throw std::runtime_error("solve_bn: no root in (0,1]; the construction needs larger a_n");
  double hi = bcrit;
  double lo = bcrit;
  while (f(lo) >= 0.0) {
    lo *= 0.5;
    if (lo < 5e-300) return lo;  // root indistinguishable from 0
  }
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    double fm = f(mid);
    if (std::abs(fm) <= 1e-12) return mid;
    (fm < 0.0 ? lo : hi) = mid;
  }
  return hi;
}

double solve_bn(double a_n) {
  if (!(a_n > 1.0)) throw std::invalid_argument("solve_bn: need a_n > 1");
  return solve_bn_log(std::log(a_n));
}

int check_delta_inequality(const Schedule& s) {
  std::vector<char> ok(static_cast<std::size_t>(s.n_max) + 1, 0);
  for (int n = 1; n <= s.n_max; ++n) {
    double log_delta_prev = (n == 1) ? -std::log(s.base) : s.at(n - 1).log_delta;
    const ScheduleEntry& e = s.at(n);
    ok[static_cast<std::size_t>(n)] = e.log_delta <= log_delta_prev - e.log_big_a - n * kLn2;
  }
  int n0 = -1;
  for (int n = s.n_max; n >= 1 && ok[static_cast<std::size_t>(n)]; --n) n0 = n;
  if (n0 < 0)
    throw std::runtime_error(
        "check_delta_inequality: delta_n <= delta_{n-1}/(A_n 2^n) fails at n = N "
        "(eps too large?)");
  return n0;
}

std::vector<int> subsequence_select(const Schedule& s) {
  std::vector<int> keep;
  if (s.mode == Schedule::Mode::part1) {
    // r_{n+1} = r_n^2 / a_n holds with equality by construction
    for (int n = 1; n <= s.n_max; ++n) keep.push_back(n);
    return keep;
  }
  keep.push_back(1);
  int last = 1;
  for (int n = 2; n <= s.n_max; ++n) {
    const ScheduleEntry& e = s.at(n);
    const ScheduleEntry& el = s.at(last);
    double rhs_r = 2.0 * el.log_r - el.log_a;
    double slack = 1e-9 * (1.0 + std::abs(rhs_r));
    bool shrinks = e.log_r <= rhs_r + slack;
    bool delta_ok = e.log_delta <= el.log_delta - e.log_big_a - n * kLn2;
    if (shrinks && delta_ok) {
      keep.push_back(n);
      last = n;
    }
  }
  if (keep.size() < 2)
    throw std::runtime_error("subsequence_select: fewer than 2 indices selected up to N (increase N)");
  return keep;
}

// ---------------------------------------------------------------------------

double u_block(Complex z, double log_an) {
  double az = std::abs(z);
  if (az == 0.0) return -std::numeric_limits<double>::infinity();
  return 0.125 - z.real() + std::log(az) / (4.0 * log_an);
}

double clipped_block(Complex z, double log_an, double bn) {
  double u = u_block(z, log_an);
  return z.real() <= bn ? std::max(u, 0.0) : u;
}

Mollifier::Mollifier(Profile f, double eps, int n_radial, int n_angular)
    : f_(std::move(f)), eps_(eps), n_radial_(n_radial), n_angular_(n_angular) {
  if (!(eps > 0.0)) throw std::invalid_argument("Mollifier: need eps > 0");
  if (n_radial < 4 || n_angular < 8) throw std::invalid_argument("Mollifier: quadrature order too low");
}

double Mollifier::kernel(double t) {
  if (t >= 1.0) return 0.0;
  return std::exp(1.0 / (t * t - 1.0));
}

double Mollifier::eval_with(int nr, int na, Complex z) const {
  const auto& [x, g] = gl_nodes_01(nr);
  double total = 0.0, acc = 0.0;
  const double dphi = 2.0 * std::numbers::pi / na;
  for (int i = 0; i < nr; ++i) {
    double wi = g[i] * x[i] * kernel(x[i]);
    if (wi == 0.0) continue;
    total += wi;
    double ring = 0.0;
    for (int j = 0; j < na; ++j) {
      double phi = dphi * j;
      ring += f_(z - eps_ * x[i] * Complex(std::cos(phi), std::sin(phi)));
    }
    acc += wi * ring / na;
  }
  return acc / total;
}

double Mollifier::value_checked(Complex z, double rel_tol) const {
  double v1 = eval_with(n_radial_, n_angular_, z);
  double v2 = eval_with(2 * n_radial_, 2 * n_angular_, z);
  if (std::abs(v1 - v2) <= rel_tol * (1.0 + std::abs(v2))) return v2;
  double v3 = eval_with(4 * n_radial_, 4 * n_angular_, z);
  if (std::abs(v2 - v3) <= rel_tol * (1.0 + std::abs(v3))) return v3;
  throw std::runtime_error("Mollifier: quadrature did not converge at doubled orders");
}

double Mollifier::kernel_mass() {
  static const double mass = [] {
    const auto& [x, g] = gl_nodes_01(128);
    double m = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) m += g[i] * x[i] * kernel(x[i]);
    return 2.0 * std::numbers::pi * m;
  }();
  return mass;
}

double Mollifier::kernel_abs_moment() {
  static const double moment = [] {
    const auto& [x, g] = gl_nodes_01(128);
    double m1 = 0.0, m0 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      double k = kernel(x[i]);
      m0 += g[i] * x[i] * k;
      m1 += g[i] * x[i] * x[i] * k;
    }
    return m1 / m0;
  }();
  return moment;
}

ScaledBlock::ScaledBlock(double log_an, double bn, double eps_n, double arg_scale,
                         int n_radial, int n_angular)
    : moll_([log_an, bn](Complex z) { return clipped_block(z, log_an, bn); }, eps_n,
            n_radial, n_angular),
      arg_scale_(arg_scale),
      bn_(bn) {}

ScaledBlock ScaledBlock::for_schedule(const Schedule& s, int n, int n_radial, int n_angular) {
  const ScheduleEntry& e = s.at(n);
  if (!e.b_solvable())
    throw std::runtime_error("ScaledBlock: b_n has no positive root at index " + std::to_string(n) +
                             " (a_n too small)");
  double eps_n = 0.25 * e.r();
  double arg_scale = std::exp(e.log_a - e.log_r);
  return ScaledBlock(e.log_a, e.b, eps_n, arg_scale, n_radial, n_angular);
}

// ---------------------------------------------------------------------------

VProjection project_to_v(Complex s, Complex t, double beta, double tube_d) {
  double norm = std::sqrt(std::norm(s) + std::norm(t));
  if (norm <= 0.75 * beta)
    throw std::invalid_argument("project_to_v: projection undefined inside B'_n");
  Complex s2 = s * s;
  double rho = std::cbrt(std::abs(s2));
  double base_arg = std::arg(s2) / 3.0;
  VProjection best;
  best.dist = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 3; ++k) {
    Complex cand = std::polar(rho, base_arg + k * (2.0 * std::numbers::pi / 3.0));
    double dist = std::abs(t - cand);
    if (dist < best.dist) {
      best.s = s;
      best.t = cand;
      best.dist = dist;
      best.branch = k;
    }
  }
  best.inside_tube = best.dist < tube_d;
  return best;
}

double cutoff_chi(double x) {
  auto phi = [](double u) { return u > 0.0 ? std::exp(-1.0 / u) : 0.0; };
  double up = phi(1.0 - x);
  double down = phi(x - 0.5);
  return up / (up + down);
}

double p_n_eval(const Schedule& s, int n, Complex sv, Complex tv) {
  const ScheduleEntry& e = s.at(n);
  double beta = std::exp(e.log_beta());
  double d = std::exp(e.log_d());
  double norm = std::sqrt(std::norm(sv) + std::norm(tv));
  if (norm < beta) return 0.0;
  if (!project_to_v(sv, tv, beta, d).inside_tube) return 0.0;
  ScaledBlock block = ScaledBlock::for_schedule(s, n);
  return p_layer_eval(block, beta, d, sv, tv);
}

double q_eval(Complex s, Complex t) {
  return std::exp(std::norm(s) + std::norm(t)) * std::norm(s * s - t * t * t);
}

double q_levi_lower(Complex s, Complex t) { return std::norm(s * s - t * t * t); }

// ---------------------------------------------------------------------------

double FLDomain::rho_tilde(Complex s, Complex t) const {
  double q = q_eval(s, t);
  double sum = 0.0;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    sum += delta_k_n[i] * q;
    sum += delta_n[i] * p_layer_eval(blocks[i], beta_n[i], d_n[i], s, t);
  }
  return sum;
}

double FLDomain::scaled_g(std::size_t idx, Complex s, Complex t) const {
  return delta_k_n.at(idx) * q_eval(s, t) +
         delta_n.at(idx) * p_layer_eval(blocks.at(idx), beta_n.at(idx), d_n.at(idx), s, t);
}

Domain FLDomain::as_domain() const {
  Domain d;
  d.dim = 3;
  d.bounding_radius = 2.0;
  d.name = "fl";
  FLDomain copy = *this;
  d.r = [copy](const CVector& z) { return z[2].real() + copy.rho_tilde(z[0], z[1]); };
  d.witness = cvec({0.0, 0.0, -0.1});
  d.smoothness = schedule.mode == Schedule::Mode::part1 ? part1_smoothness(schedule.eps) : -1;
  d.diameter = 4.0;
  d.default_boundary_point = cvec({0.0, 0.0, 0.0});
  return d;
}

nlohmann::json FLDomain::descriptor() const {
  nlohmann::json j;
  j["a"] = schedule.base;
  j["mode"] = schedule.mode == Schedule::Mode::part1 ? "part1" : "part2";
  if (schedule.mode == Schedule::Mode::part1)
    j["eps"] = schedule.eps;
  else
    j["alpha"] = schedule.alpha;
  j["n_max"] = schedule.n_max;
  j["truncation"] = truncation;
  j["tail_tol"] = tail_tol;
  j["active"] = active;
  j["skipped"] = skipped;
  return j;
}

FLDomain build_fl_domain(const Schedule& s, int truncation, double tail_tol) {
  if (truncation < 1 || truncation > s.n_max)
    throw std::invalid_argument("build_fl_domain: truncation must be in 1..n_max");
  FLDomain fl;
  fl.schedule = s;
  fl.truncation = truncation;
  fl.tail_tol = tail_tol;
  for (int n : s.selected) {
    if (n > truncation) break;
    if (s.at(n).b_solvable())
      fl.active.push_back(n);
    else
      fl.skipped.push_back(n);
  }
  if (fl.active.empty())
    throw std::runtime_error("build_fl_domain: no usable indices up to N (all b_n unsolvable)");

  for (int n : fl.active) {
    const ScheduleEntry& e = s.at(n);
    fl.blocks.push_back(ScaledBlock::for_schedule(s, n));
    fl.delta_n.push_back(std::exp(e.log_delta));
    fl.delta_k_n.push_back(std::exp(e.log_delta + e.log_cap_k()));
    fl.beta_n.push_back(std::exp(e.log_beta()));
    fl.d_n.push_back(std::exp(e.log_d()));
  }

  HaltonSequence seq_q(4, 1);
  fl.sup_q = 0.0;
  for (int i = 0; i < 2000; ++i) {
    CVector z = next_in_complex_ball(seq_q, 2, 2.0);
    fl.sup_q = std::max(fl.sup_q, q_eval(z[0], z[1]));
  }

  // Tail over every n > N: delta_n sup|g_n| <= delta_n (3 a_n/r_n + K_n sup q),
  // assembled in log space (the raw factors overflow).
  double tail = 0.0;
  double log_sup_q = std::log(std::max(fl.sup_q, 1.0));
  for (int n = truncation + 1; n <= truncation + 60; ++n) {
    double la, lr, ld;
    schedule_logs(s, n, la, lr, ld);
    tail += std::exp(ld + (la - lr) + std::log(3.0));
    tail += std::exp(ld - 38.0 * lr + log_sup_q);
  }

  HaltonSequence seq_r(4, 101);
  fl.sup_rho = 0.0;
  for (int i = 0; i < 500; ++i) {
    CVector z = next_in_complex_ball(seq_r, 2, 2.0);
    fl.sup_rho = std::max(fl.sup_rho, std::abs(fl.rho_tilde(z[0], z[1])));
  }
  fl.log_tail_bound = std::log(std::max(tail, 5e-324));
  if (tail > tail_tol * std::max(fl.sup_rho, 1e-300))
    throw std::runtime_error("build_fl_domain: tail bound above tolerance; increase N");

  PshSampleReport rep = sample_psh_margin(
      [&fl](Complex a, Complex b) { return fl.rho_tilde(a, b); }, 2.0, 200);
  if (rep.worst_rel < -1e-6)
    throw std::runtime_error("build_fl_domain: sampled Levi eigenvalue below tolerance");
  return fl;
}

FLDomain fl_from_descriptor(const nlohmann::json& j) {
  double a = j.at("a").get<double>();
  std::string mode = j.at("mode").get<std::string>();
  int n_max = j.at("n_max").get<int>();
  int truncation = j.value("truncation", n_max);
  double tail_tol = j.value("tail_tol", 1e-12);
  Schedule s = mode == "part1" ? make_schedule_part1(a, j.at("eps").get<double>(), n_max)
                               : make_schedule_part2(a, j.at("alpha").get<double>(), n_max);
  return build_fl_domain(s, truncation, tail_tol);
}

FLDomain fl_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("fl_from_file: cannot open '" + path + "'");
  nlohmann::json j;
  in >> j;
  return fl_from_descriptor(j);
}

PshSampleReport sample_psh_margin(const std::function<double(Complex, Complex)>& f,
                                  double radius, int n_points) {
  HaltonSequence seq(4, 7);
  RealFn fn = [&f](const CVector& z) { return f(z[0], z[1]); };
  PshSampleReport rep;
  rep.worst_rel = std::numeric_limits<double>::infinity();
  rep.min_eig = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n_points; ++i) {
    CVector z = next_in_complex_ball(seq, 2, radius);
    HermitianMatrix h = levi_matrix(fn, z);
    double eig = min_levi_eigenvalue(h);
    double scale = 1.0 + std::abs(fn(z)) + h.norm();
    rep.worst_rel = std::min(rep.worst_rel, eig / scale);
    rep.min_eig = std::min(rep.min_eig, eig);
  }
  rep.points = n_points;
  return rep;
}

// ---------------------------------------------------------------------------

double SmoothnessCertificate::term_ratio(int n) const {
  if (n < 2 || n > static_cast<int>(log_terms.size()))
    throw std::out_of_range("term_ratio: n in 2..N");
  return std::exp(log_terms[static_cast<std::size_t>(n - 1)] - log_terms[static_cast<std::size_t>(n - 2)]);
}

SmoothnessCertificate smoothness_certificate(const Schedule& s, int k) {
  if (s.mode != Schedule::Mode::part1)
    throw std::invalid_argument("smoothness_certificate: part1 schedule required (use part2_certificate)");
  if (k < 1) throw std::invalid_argument("smoothness_certificate: need k >= 1");
  SmoothnessCertificate c;
  c.k = k;
  c.m_k = std::max(38, 9 * k + 2);
  c.one_d_exponent = 3 * k + 2;
  double sum = 0.0;
  for (const ScheduleEntry& e : s.entries) {
    double lt = e.log_delta - c.m_k * e.log_r;
    c.log_terms.push_back(lt);
    sum += std::exp(lt);
    c.partial_sums.push_back(sum);
  }
  auto last_ratio = [&](auto log_term) {
    int nn = s.n_max;
    if (nn < 2) return 0.0;
    return log_term(nn) - log_term(nn - 1);
  };
  if (s.n_max >= 2) {
    c.converges = last_ratio([&](int n) {
                    const ScheduleEntry& e = s.at(n);
                    return e.log_delta - c.m_k * e.log_r;
                  }) < 0.0;
    c.one_d_converges = last_ratio([&](int n) {
                          const ScheduleEntry& e = s.at(n);
                          return e.log_delta + (k + 1) * e.log_a - (2 * k + 1) * e.log_r;
                        }) < 0.0;
  } else {
    c.converges = c.m_k * s.eps < 1.0;
    c.one_d_converges = (3 * k + 2) * s.eps < 1.0;
  }
  return c;
}

bool part2_certificate(const Schedule& s, int k_max) {
  if (s.mode != Schedule::Mode::part2)
    throw std::invalid_argument("part2_certificate: part2 schedule required");
  if (s.n_max < 3) throw std::invalid_argument("part2_certificate: need n_max >= 3");
  if (k_max < 0) throw std::invalid_argument("part2_certificate: need k_max >= 0");
  for (int k = 0; k <= k_max; ++k) {
    auto lt = [&](int n) {
      const ScheduleEntry& e = s.at(n);
      return e.log_delta + k * e.log_a;
    };
    double tail_ratio = lt(s.n_max) - lt(s.n_max - 1);
    double prev_ratio = lt(s.n_max - 1) - lt(s.n_max - 2);
    if (!(tail_ratio < 0.0 && tail_ratio < prev_ratio)) return false;
  }
  return true;
}

}  // namespace kr
