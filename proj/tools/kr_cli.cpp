// Command-line driver: delta sweeps, single estimates, Fornaess-Lee
// certificates and descriptors, and the angular-obstruction report.

#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "kr/domain.hpp"
#include "kr/fornaess_lee.hpp"
#include "kr/harness.hpp"
#include "kr/kobayashi.hpp"
#include "kr/taylor.hpp"

namespace {

using nlohmann::json;

int run_sweep(const kr::ExperimentConfig& config) {
  kr::ExperimentResult result = kr::run_experiment(config);
  kr::write_outputs(config, result);
  for (const auto& [name, fit] : result.fits)
    std::printf("fit %-12s slope %.6f  (+/- %.4f, residual %.3e)\n", name.c_str(), fit.slope,
                fit.half_width, fit.residual_norm);
  bool all = true;
  for (const kr::Verdict& v : result.verdicts) {
    std::printf("verdict %-14s %s  %s\n", v.name.c_str(), v.pass ? "pass" : "FAIL",
                v.detail.c_str());
    all = all && v.pass;
  }
  std::printf("outputs written to %s\n", config.out_dir.c_str());
  return all ? 0 : 2;
}

int run_estimate(const std::string& domain_name, double delta, int degree, int samples,
                 int budget, std::uint64_t seed) {
  kr::Domain dom = kr::make_domain(domain_name);
  kr::CVector p = dom.default_boundary_point;
  kr::NormalRay ray = kr::normal_ray(dom, p, {delta});
  kr::CVector z = ray.point_at(delta);

  json out;
  out["domain"] = domain_name;
  out["delta"] = delta;
  out["upper_lin"] = kr::linear_disc_upper(dom, z, ray.normal, samples).value;
  kr::DiscSearchParams params;
  params.degree = degree;
  params.boundary_samples = samples;
  params.budget = budget;
  params.seed = seed;
  out["upper_search"] = kr::disc_search_upper(dom, z, ray.normal, params).value;
  if (dom.poly) {
    kr::NormalFrame frame = kr::normalize_at_boundary(dom, p);
    kr::TaylorModel model = kr::decompose(kr::framed_poly(dom, frame), 3);
    kr::remainder_constants(kr::framed_poly(dom, frame).as_real_fn(), model, dom.bounding_radius,
                            4096, true);
    kr::StageConstants sc = kr::assemble_stage_constants(model, dom);
    double df = frame.scale * delta;
    kr::CVector xf = frame.push_vector(ray.normal);
    out["lower1"] = kr::stage_lower_bound(model, df, xf, 1, sc).value;
    out["lower2"] = kr::stage_lower_bound(model, df, xf, 2, sc).value;
  }
  if (dom.exact_kappa) out["exact"] = dom.exact_kappa(z, ray.normal);
  std::cout << out.dump(2) << '\n';
  return 0;
}

int run_certify(double a, const std::string& mode, double eps, double alpha, int n_max, int k,
                int points) {
  bool ok = true;
  if (mode == "part1") {
    kr::Schedule s = kr::make_schedule_part1(a, eps, n_max);
    kr::SmoothnessCertificate cert = kr::smoothness_certificate(s, k);
    std::printf("C%d certificate: m_k = %d, %s", k, cert.m_k,
                cert.converges ? "converges" : "DIVERGES");
    if (s.n_max >= 2) std::printf(" (last term ratio %.3e)", cert.term_ratio(s.n_max));
    std::printf("\n1-D certificate: exponent %d, %s\n", cert.one_d_exponent,
                cert.one_d_converges ? "converges" : "DIVERGES");
    ok = ok && cert.converges;

    kr::FLDomain fl = kr::build_fl_domain(s, n_max, 1e-12);
    std::printf("active indices:");
    for (int n : fl.active) std::printf(" %d", n);
    if (!fl.skipped.empty()) {
      std::printf("  (skipped, no b_n:");
      for (int n : fl.skipped) std::printf(" %d", n);
      std::printf(")");
    }
    std::printf("\n");
    kr::PshSampleReport rep = kr::sample_psh_margin(
        [&fl](kr::Complex sv, kr::Complex tv) { return fl.rho_tilde(sv, tv); }, 2.0, points);
    bool psh = rep.worst_rel >= -1e-8;
    std::printf("psh verdict: %s (worst relative Levi margin %.3e over %d points)\n",
                psh ? "pass" : "FAIL", rep.worst_rel, rep.points);
    ok = ok && psh;
  } else if (mode == "part2") {
    kr::Schedule s = kr::make_schedule_part2(a, alpha, n_max);
    bool conv = kr::part2_certificate(s, k);
    std::printf("part2 certificate: sum delta_n a_n^j converges for j <= %d: %s\n", k,
                conv ? "yes" : "NO");
    std::vector<int> sel = kr::subsequence_select(s);
    std::printf("selected subsequence:");
    for (int n : sel) std::printf(" %d", n);
    std::printf("\n");
    ok = ok && conv;
  } else {
    throw std::invalid_argument("certify: mode must be part1 or part2");
  }
  return ok ? 0 : 2;
}

int run_fl_build(double a, const std::string& mode, double eps, double alpha, int n_max,
                 double tail_tol, const std::string& out_path) {
  kr::Schedule s = mode == "part1" ? kr::make_schedule_part1(a, eps, n_max)
                                   : kr::make_schedule_part2(a, alpha, n_max);
  kr::FLDomain fl = kr::build_fl_domain(s, n_max, tail_tol);
  json j = fl.descriptor();
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("fl-build: cannot open '" + out_path + "'");
  out << j.dump(2) << '\n';
  std::printf("descriptor written to %s\n", out_path.c_str());
  std::printf("sup q = %.6e, sup |rho~| = %.6e, log tail bound = %.3f\n", fl.sup_q, fl.sup_rho,
              fl.log_tail_bound);
  return 0;
}

int run_remark5(int m, int l) {
  kr::ObstructionReport rep = kr::remark5_checks(m, l);
  std::printf("min sampled Laplacian: %.6e (scale %.3e)\n", rep.min_laplacian, rep.scale);
  std::printf("min angular factor:    %.6f at theta = %.6f\n", rep.min_angular_factor,
              rep.argmin_theta);
  bool subharmonic = rep.min_laplacian >= -1e-6 * rep.scale;
  bool obstructed = rep.min_angular_factor < 0.0;
  std::printf("subharmonic: %s, obstruction present: %s\n", subharmonic ? "yes" : "NO",
              obstructed ? "yes" : "no");
  return subharmonic && obstructed ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kobayashi-Royden boundary asymptotics toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_dir, grid_spec, domain = "model-psh";
  std::uint64_t seed = 1234;
  bool seed_set = false, out_set = false;
  app.add_option("--config", config_path, "experiment config (JSON)");
  app.add_option("--out-dir", out_dir, "output directory")->each([&](const std::string&) { out_set = true; });
  app.add_option("--seed", seed, "run seed")->each([&](const std::string&) { seed_set = true; });
  app.add_option("--grid", grid_spec, "delta grid as delta0,factor,count");

  auto* sweep = app.add_subcommand("sweep", "full experiment over a delta grid");
  sweep->add_option("--domain", domain, "registry domain name");

  auto* estimate = app.add_subcommand("estimate", "all bounds at a single depth");
  double delta = 1e-3;
  int degree = 6, samples = 256, budget = 2000;
  estimate->add_option("--domain", domain, "registry domain name");
  estimate->add_option("--delta", delta, "depth along the inward normal");
  estimate->add_option("--degree", degree, "disc search degree");
  estimate->add_option("--samples", samples, "boundary samples");
  estimate->add_option("--budget", budget, "disc search budget");

  auto* certify = app.add_subcommand("certify", "smoothness + psh certificates");
  double a = std::pow(2.0, 30), eps = 0.02, alpha = 1.0, tail_tol = 1e-12;
  int n_max = 3, k = 1, points = 1000;
  std::string mode = "part1";
  certify->add_option("--a", a, "schedule base a > 1");
  certify->add_option("--mode", mode, "part1 or part2");
  certify->add_option("--eps", eps, "part1 epsilon");
  certify->add_option("--alpha", alpha, "part2 alpha");
  certify->add_option("-N,--n-max", n_max, "schedule length");
  certify->add_option("--k", k, "smoothness order to certify");
  certify->add_option("--points", points, "psh sample points");

  auto* fl_build = app.add_subcommand("fl-build", "emit a domain descriptor JSON");
  std::string fl_out = "fl.json";
  fl_build->add_option("--a", a, "schedule base a > 1");
  fl_build->add_option("--mode", mode, "part1 or part2");
  fl_build->add_option("--eps", eps, "part1 epsilon");
  fl_build->add_option("--alpha", alpha, "part2 alpha");
  fl_build->add_option("-N,--n-max", n_max, "schedule length");
  fl_build->add_option("--tail-tol", tail_tol, "relative tail tolerance");
  fl_build->add_option("--out", fl_out, "output path");

  auto* remark5 = app.add_subcommand("remark5", "angular-obstruction checks");
  int m = 2, l = 1;
  remark5->add_option("--m", m, "order parameter m");
  remark5->add_option("--l", l, "angular parameter l, m/2 <= l < m");

  for (CLI::App* sub : {sweep, estimate, certify, fl_build, remark5}) sub->fallthrough(true);

  CLI11_PARSE(app, argc, argv);

  try {
    if (sweep->parsed()) {
      kr::ExperimentConfig config;
      if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw std::runtime_error("cannot open config '" + config_path + "'");
        json j;
        in >> j;
        config = kr::ExperimentConfig::from_json(j);
      }
      if (sweep->count("--domain")) config.domain = domain;
      if (seed_set) config.seed = seed;
      if (out_set) config.out_dir = out_dir;
      if (!grid_spec.empty()) {
        double d0, f;
        int c;
        if (std::sscanf(grid_spec.c_str(), "%lf,%lf,%d", &d0, &f, &c) != 3)
          throw std::invalid_argument("--grid expects delta0,factor,count");
        config.grid = {d0, f, c};
      }
      return run_sweep(config);
    }
    if (estimate->parsed()) return run_estimate(domain, delta, degree, samples, budget, seed);
    if (certify->parsed()) return run_certify(a, mode, eps, alpha, n_max, k, points);
    if (fl_build->parsed()) return run_fl_build(a, mode, eps, alpha, n_max, tail_tol, fl_out);
    if (remark5->parsed()) return run_remark5(m, l);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
