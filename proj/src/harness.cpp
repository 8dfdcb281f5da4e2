#include "kr/harness.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>

#include <nlohmann/json.hpp>

namespace kr {

std::vector<double> DeltaGrid::values() const {
  if (!(delta0 > 0.0) || !(factor > 0.0 && factor < 1.0) || count < 1)
    throw std::invalid_argument("DeltaGrid: need delta0 > 0, factor in (0,1), count >= 1");
  std::vector<double> v;
  double d = delta0;
  for (int i = 0; i < count; ++i, d *= factor) v.push_back(d);
  return v;
}

double SampleRow::column(const std::string& name) const {
  if (name == "delta") return delta;
  if (name == "lower1") return lower1;
  if (name == "lower2") return lower2;
  if (name == "upper_lin") return upper_lin;
  if (name == "upper_search") return upper_search;
  if (name == "exact") return exact;
  throw std::invalid_argument("SampleRow: unknown column '" + name + "'");
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  c.domain = j.value("domain", c.domain);
  if (j.contains("boundary_point")) {
    const auto& arr = j.at("boundary_point");
    CVector p(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i)
      p[static_cast<Eigen::Index>(i)] = Complex(arr[i].at(0).get<double>(), arr[i].at(1).get<double>());
    c.boundary_point = p;
  }
  c.direction = j.value("direction", c.direction);
  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    c.grid.delta0 = g.value("delta0", c.grid.delta0);
    c.grid.factor = g.value("factor", c.grid.factor);
    c.grid.count = g.value("count", c.grid.count);
  }
  if (j.contains("estimators")) c.estimators = j.at("estimators").get<std::vector<std::string>>();
  c.disc_degree = j.value("disc_degree", c.disc_degree);
  c.disc_samples = j.value("disc_samples", c.disc_samples);
  c.disc_budget = j.value("disc_budget", c.disc_budget);
  c.taylor_samples = j.value("taylor_samples", c.taylor_samples);
  c.out_dir = j.value("out_dir", c.out_dir);
  c.seed = j.value("seed", c.seed);
  return c;
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j;
  j["domain"] = domain;
  if (boundary_point) {
    nlohmann::json arr = nlohmann::json::array();
    for (Eigen::Index i = 0; i < boundary_point->size(); ++i)
      arr.push_back({(*boundary_point)[i].real(), (*boundary_point)[i].imag()});
    j["boundary_point"] = arr;
  }
  j["direction"] = direction;
  j["grid"] = {{"delta0", grid.delta0}, {"factor", grid.factor}, {"count", grid.count}};
  j["estimators"] = estimators;
  j["disc_degree"] = disc_degree;
  j["disc_samples"] = disc_samples;
  j["disc_budget"] = disc_budget;
  j["taylor_samples"] = taylor_samples;
  j["out_dir"] = out_dir;
  j["seed"] = seed;
  return j;
}

ExponentFit fit_exponent(const std::vector<double>& deltas, const std::vector<double>& values) {
  const std::size_t n = deltas.size();
  if (n != values.size() || n < 4) throw std::invalid_argument("fit_exponent: need >= 4 rows");
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(deltas[i] > 0.0)) throw std::invalid_argument("fit_exponent: deltas must be positive");
    if (!(values[i] > 0.0)) throw std::invalid_argument("fit_exponent: values must be positive");
    x[i] = std::log(1.0 / deltas[i]);
    y[i] = std::log(values[i]);
  }
  double xm = 0.0, ym = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    xm += x[i];
    ym += y[i];
  }
  xm /= n;
  ym /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - xm) * (x[i] - xm);
    sxy += (x[i] - xm) * (y[i] - ym);
  }
  if (!(sxx > 1e-12)) throw std::invalid_argument("fit_exponent: degenerate delta grid");
  ExponentFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = ym - fit.slope * xm;
  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double e = y[i] - (fit.intercept + fit.slope * x[i]);
    rss += e * e;
  }
  fit.residual_norm = std::sqrt(rss);
  if (n > 2) fit.half_width = 1.96 * std::sqrt(rss / (n - 2) / sxx);
  return fit;
}

ExponentFit fit_exponent(const std::vector<SampleRow>& rows, const std::string& column) {
  std::vector<double> d, v;
  for (const SampleRow& r : rows) {
    double val = r.column(column);
    if (std::isnan(val)) continue;
    d.push_back(r.delta);
    v.push_back(val);
  }
  return fit_exponent(d, v);
}

double fit_log_correction(const std::vector<double>& deltas, const std::vector<double>& values,
                          const std::vector<double>& alpha_grid) {
  const std::size_t n = deltas.size();
  if (n != values.size() || n < 4) throw std::invalid_argument("fit_log_correction: need >= 4 rows");
  if (alpha_grid.empty()) throw std::invalid_argument("fit_log_correction: empty alpha grid");
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(deltas[i] > 0.0 && deltas[i] < std::exp(-1.0)))
      throw std::invalid_argument("fit_log_correction: need 0 < delta < 1/e");
    if (!(values[i] > 0.0)) throw std::invalid_argument("fit_log_correction: values must be positive");
    x[i] = std::log(-std::log(deltas[i]));
    y[i] = std::log(values[i] * deltas[i]);
  }
  double best_alpha = alpha_grid.front();
  double best_rss = std::numeric_limits<double>::infinity();
  for (double alpha : alpha_grid) {
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double e = y[i] + alpha * x[i];
      rss += e * e;
    }
    if (rss < best_rss) {
      best_rss = rss;
      best_alpha = alpha;
    }
  }
  return best_alpha;
}

double fit_log_correction(const std::vector<SampleRow>& rows, const std::string& column,
                          const std::vector<double>& alpha_grid) {
  std::vector<double> d, v;
  for (const SampleRow& r : rows) {
    double val = r.column(column);
    if (std::isnan(val)) continue;
    d.push_back(r.delta);
    v.push_back(val);
  }
  return fit_log_correction(d, v, alpha_grid);
}

bool ExperimentResult::all_pass() const {
  for (const Verdict& v : verdicts)
    if (!v.pass) return false;
  return true;
}

namespace {

bool wants(const ExperimentConfig& c, const std::string& est) {
  for (const std::string& e : c.estimators)
    if (e == est) return true;
  return false;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
  Domain dom = make_domain(config.domain);
  CVector p = config.boundary_point ? *config.boundary_point : dom.default_boundary_point;
  if (config.direction != "normal")
    throw std::invalid_argument("run_experiment: only the 'normal' direction policy is implemented");
  std::vector<double> deltas = config.grid.values();
  NormalRay ray = normal_ray(dom, p, deltas);

  ExperimentResult result;
  bool want_lower = wants(config, "lower1") || wants(config, "lower2");

  std::optional<NormalFrame> frame;
  std::optional<TaylorModel> model;
  std::optional<StageConstants> sc;
  if (want_lower) {
    frame = normalize_at_boundary(dom, p);
    TaylorModel tm = dom.poly ? decompose(framed_poly(dom, *frame), 3)
                              : decompose(framed_fn(dom, *frame), dom.dim, 3);
    RealFn framed = dom.poly ? framed_poly(dom, *frame).as_real_fn() : framed_fn(dom, *frame);
    // Sample the inclusion constant over the whole domain so the chain stays
    // valid for every delta on the grid.
    remainder_constants(framed, tm, dom.bounding_radius, config.taylor_samples, true);
    model = tm;
    sc = assemble_stage_constants(tm, dom);
    result.constants["c1"] = tm.c1;
    result.constants["c2"] = tm.c2;
    result.constants["c3"] = tm.c3;
    result.constants["c4"] = sc->c4;
    result.constants["c5"] = sc->c5;
    result.constants["c7"] = sc->c7;
    result.constants["kappa_geom"] = sc->kappa_geom;
    result.constants["frame_scale"] = frame->scale;
  }

  result.rows.resize(deltas.size());
  auto compute_row = [&](std::size_t i) {
    double delta = deltas[i];
    SampleRow row;
    row.delta = delta;
    CVector z = ray.point_at(delta);
    const CVector& x = ray.normal;
    if (want_lower) {
      double delta_f = frame->scale * delta;
      CVector x_f = frame->push_vector(x);
      // Rows where the bound's hypotheses fail (delta too large for the
      // frame, direction outside the kappa_geom cone) stay NaN.
      try {
        if (wants(config, "lower1")) row.lower1 = stage_lower_bound(*model, delta_f, x_f, 1, *sc).value;
        if (wants(config, "lower2")) row.lower2 = stage_lower_bound(*model, delta_f, x_f, 2, *sc).value;
      } catch (const std::invalid_argument&) {
      }
    }
    if (wants(config, "upper_lin")) row.upper_lin = linear_disc_upper(dom, z, x, config.disc_samples).value;
    if (wants(config, "upper_search")) {
      DiscSearchParams params;
      params.degree = config.disc_degree;
      params.boundary_samples = config.disc_samples;
      params.budget = config.disc_budget;
      params.seed = config.seed + i;
      row.upper_search = disc_search_upper(dom, z, x, params).value;
    }
    if (wants(config, "exact") && dom.exact_kappa) row.exact = dom.exact_kappa(z, x);
    return row;
  };

  std::vector<std::future<SampleRow>> futures;
  for (std::size_t i = 0; i < deltas.size(); ++i)
    futures.push_back(std::async(std::launch::async, compute_row, i));
  for (std::size_t i = 0; i < deltas.size(); ++i) result.rows[i] = futures[i].get();

  for (const std::string col : {"lower1", "lower2", "upper_lin", "upper_search", "exact"}) {
    bool usable = false;
    for (const SampleRow& r : result.rows) usable = usable || !std::isnan(r.column(col));
    if (!usable) continue;
    try {
      result.fits[col] = fit_exponent(result.rows, col);
    } catch (const std::invalid_argument&) {
      // non-positive or too few values; no fit for this column
    }
  }

  // Verdicts
  if (wants(config, "lower1") || wants(config, "lower2")) {
    bool sandwich = true;
    std::ostringstream detail;
    for (const SampleRow& r : result.rows) {
      double up = r.upper_search;
      if (std::isnan(up)) up = r.upper_lin;
      if (std::isnan(up)) continue;
      for (double lo : {r.lower1, r.lower2}) {
        if (!std::isnan(lo) && !(lo <= up * (1.0 + 1e-9))) {
          sandwich = false;
          detail << "lower " << lo << " > upper " << up << " at delta " << r.delta << "; ";
        }
      }
    }
    result.verdicts.push_back({"sandwich", sandwich, detail.str()});
    if (result.fits.count("lower1")) {
      double s = result.fits["lower1"].slope;
      std::ostringstream os;
      os << "slope " << s << " vs reference " << reference_exponents::stage1;
      result.verdicts.push_back({"stage1-slope", s >= 0.74 && s <= 0.80, os.str()});
    }
    if (result.fits.count("lower2")) {
      double s = result.fits["lower2"].slope;
      std::ostringstream os;
      os << "slope " << s << " vs reference " << reference_exponents::stage2;
      result.verdicts.push_back({"stage2", s >= reference_exponents::stage2 - 0.02 && sandwich, os.str()});
    }
  }
  if (result.fits.count("upper_search")) {
    double s = result.fits["upper_search"].slope;
    std::ostringstream os;
    os << "slope " << s << " vs reference " << reference_exponents::linear;
    result.verdicts.push_back({"upper-slope", std::abs(s - reference_exponents::linear) <= 0.02, os.str()});
  }
  return result;
}

namespace {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_csv(const std::string& path, const std::vector<SampleRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_csv: cannot open '" + path + "'");
  out << "delta,lower1,lower2,upper_lin,upper_search,exact\n";
  for (const SampleRow& r : rows) {
    out << fmt17(r.delta) << ',' << fmt17(r.lower1) << ',' << fmt17(r.lower2) << ','
        << fmt17(r.upper_lin) << ',' << fmt17(r.upper_search) << ',' << fmt17(r.exact) << '\n';
  }
}

std::vector<SampleRow> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_csv: cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("read_csv: empty file");
  if (line != "delta,lower1,lower2,upper_lin,upper_search,exact")
    throw std::runtime_error("read_csv: unexpected header");
  std::vector<SampleRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    double vals[6];
    for (int i = 0; i < 6; ++i) {
      if (!std::getline(ss, cell, ',')) throw std::runtime_error("read_csv: short row");
      vals[i] = std::strtod(cell.c_str(), nullptr);
    }
    rows.push_back({vals[0], vals[1], vals[2], vals[3], vals[4], vals[5]});
  }
  return rows;
}

nlohmann::json summary_json(const ExperimentConfig& config, const ExperimentResult& result) {
  nlohmann::json j;
  j["config"] = config.to_json();
  nlohmann::json fits = nlohmann::json::object();
  for (const auto& [name, fit] : result.fits)
    fits[name] = {{"slope", fit.slope},
                  {"intercept", fit.intercept},
                  {"residual_norm", fit.residual_norm},
                  {"half_width", fit.half_width}};
  j["fits"] = fits;
  nlohmann::json verdicts = nlohmann::json::array();
  for (const Verdict& v : result.verdicts)
    verdicts.push_back({{"name", v.name}, {"pass", v.pass}, {"detail", v.detail}});
  j["verdicts"] = verdicts;
  j["constants"] = result.constants;
  j["reference_exponents"] = {{"tangential_lower", reference_exponents::tangential_lower},
                              {"normal_lower", reference_exponents::normal_lower},
                              {"stage1", reference_exponents::stage1},
                              {"stage2", reference_exponents::stage2},
                              {"linear", reference_exponents::linear}};
  return j;
}

void write_outputs(const ExperimentConfig& config, const ExperimentResult& result) {
  std::filesystem::create_directories(config.out_dir);
  write_csv(config.out_dir + "/sweep.csv", result.rows);
  {
    std::ofstream out(config.out_dir + "/summary.json");
    out << summary_json(config, result).dump(2) << '\n';
  }
  for (const std::string col : {"lower1", "lower2", "upper_lin", "upper_search", "exact"}) {
    bool usable = false;
    for (const SampleRow& r : result.rows) usable = usable || !std::isnan(r.column(col));
    if (!usable) continue;
    std::ofstream out(config.out_dir + "/plot_" + col + ".dat");
    out << "# delta " << col << '\n';
    for (const SampleRow& r : result.rows)
      if (!std::isnan(r.column(col))) out << fmt17(r.delta) << ' ' << fmt17(r.column(col)) << '\n';
  }
}

}  // namespace kr
