#pragma once

// Experiment driver: delta sweeps along normal rays, exponent fits against
// the reference slopes, verdicts, and the flat-file outputs (CSV / JSON /
// gnuplot data).

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "kr/domain.hpp"
#include "kr/kobayashi.hpp"
#include "kr/taylor.hpp"

namespace kr {

namespace reference_exponents {
inline constexpr double tangential_lower = 2.0 / 3.0;  // general-direction literature slope
inline constexpr double normal_lower = 5.0 / 6.0;      // normal-direction literature slope
inline constexpr double stage1 = 0.75;
inline constexpr double stage2 = 0.875;
inline constexpr double linear = 1.0;
inline constexpr double conjectured(int k) { return 1.0 - 1.0 / (2.0 * k); }
}  // namespace reference_exponents

struct DeltaGrid {
  double delta0 = 0.1;
  double factor = 0.31622776601683794;  // 10^{-1/2}
  int count = 9;

  std::vector<double> values() const;
};

struct ExperimentConfig {
  std::string domain = "model-psh";
  std::optional<CVector> boundary_point;  // registry default when absent
  std::string direction = "normal";
  DeltaGrid grid;
  std::vector<std::string> estimators = {"lower1", "lower2", "upper_lin", "upper_search", "exact"};
  int disc_degree = 6;
  int disc_samples = 256;
  int disc_budget = 2000;
  int taylor_samples = 4096;
  std::string out_dir = ".";
  std::uint64_t seed = 1234;

  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct SampleRow {
  double delta = 0.0;
  double lower1 = std::numeric_limits<double>::quiet_NaN();
  double lower2 = std::numeric_limits<double>::quiet_NaN();
  double upper_lin = std::numeric_limits<double>::quiet_NaN();
  double upper_search = std::numeric_limits<double>::quiet_NaN();
  double exact = std::numeric_limits<double>::quiet_NaN();

  double column(const std::string& name) const;
};

struct ExponentFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual_norm = 0.0;
  double half_width = 0.0;  // 1.96 * stderr of the slope
};

/// Least-squares slope of log(value) against log(1/delta). Needs >= 4 rows,
/// strictly positive values, a non-degenerate grid.
ExponentFit fit_exponent(const std::vector<double>& deltas, const std::vector<double>& values);
ExponentFit fit_exponent(const std::vector<SampleRow>& rows, const std::string& column);

/// Best alpha on the grid for the model value = 1/(delta (-log delta)^alpha),
/// i.e. minimizing the residual of log(value*delta) against -alpha log(-log delta).
double fit_log_correction(const std::vector<double>& deltas, const std::vector<double>& values,
                          const std::vector<double>& alpha_grid);
double fit_log_correction(const std::vector<SampleRow>& rows, const std::string& column,
                          const std::vector<double>& alpha_grid);

struct Verdict {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct ExperimentResult {
  std::vector<SampleRow> rows;
  std::map<std::string, ExponentFit> fits;
  std::vector<Verdict> verdicts;
  std::map<std::string, double> constants;  // sampled C1..C3, C4, C5, frame scale

  bool all_pass() const;
};

ExperimentResult run_experiment(const ExperimentConfig& config);

/// Columns exactly: delta,lower1,lower2,upper_lin,upper_search,exact with a
/// mandatory header; 17 significant digits (bit-exact round trip).
void write_csv(const std::string& path, const std::vector<SampleRow>& rows);
std::vector<SampleRow> read_csv(const std::string& path);

nlohmann::json summary_json(const ExperimentConfig& config, const ExperimentResult& result);

/// Writes sweep.csv, summary.json and plot_<column>.dat under config.out_dir.
void write_outputs(const ExperimentConfig& config, const ExperimentResult& result);

}  // namespace kr
