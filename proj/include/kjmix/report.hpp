#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "kjmix/em.hpp"
#include "kjmix/mixture.hpp"
#include "kjmix/moments.hpp"

namespace kjmix {

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class TimeFormat { hhmm, hhmmss, hours, radians };

TimeFormat parse_time_format(const std::string& name);  // throws std::invalid_argument
std::string time_format_name(TimeFormat fmt);

/// Parses one timestamp in the given format into an angle.
/// Hour-based formats reject values outside [0, 24).
Angle parse_angle(const std::string& text, TimeFormat fmt);

std::string format_angle(Angle a, TimeFormat fmt);

/// Reads one value per line; blank lines and '#' comments are skipped.
/// Throws DataError carrying the offending line number.
std::vector<Angle> ingest(const std::string& path, TimeFormat fmt);

/// Everything one fit produces: the estimate in all three parametrizations,
/// fit quality, per-component modes, and run metadata.
struct FitReport {
  std::string method;  // "mmm" | "mle" | "both"
  std::size_t m = 0;
  std::size_t n = 0;
  ReparamMixture reparam;
  OriginalMixture original;
  std::vector<ShapeParams> shape;
  double etm_value = 0.0;
  double loglik = 0.0;
  double aic = 0.0;
  double bic = 0.0;
  std::vector<Angle> modes;
  int mmm_iterations = 0;  // iterations of the winning start
  double mmm_etm = 0.0;
  int em_iterations = 0;
  std::vector<double> em_loglik_trace;
  int starts = 0;
  std::uint64_t seed = 0;
  double wall_time_ms = 0.0;
  double c = 0.9;
  int q = 0;
};

/// Runs the full fit workflow on a sample: multi-start moment fit, then
/// (method "mle"/"both") EM refinement seeded at the moment estimate.
FitReport fit_report(const std::vector<Angle>& sample, std::size_t m, const std::string& method,
                     const EtmConfig& mmm_cfg, const EmConfig& em_cfg);

std::string report_to_json(const FitReport& report);
FitReport report_from_json(const std::string& text);

/// Extracts a reparametrized mixture from a model document: either a full fit
/// report or a bare {"components": [{mu, rho, lambda}...], "weights": [...]}.
ReparamMixture mixture_from_json(const std::string& text);

/// Grid of `grid` points: theta, clock label, total density, each component's
/// weighted density, and the uniform share. Floats at 17 significant digits.
void write_density_csv(std::ostream& os, const ReparamMixture& mix, int grid);

/// Empirical vs theoretical moments for p = 1..q with squared differences.
void write_moments_table(std::ostream& os, const TrigMoments& emp, const ReparamMixture& model);

/// Histogram of the sample over `bins` equal angle bins.
void write_histogram_csv(std::ostream& os, const std::vector<Angle>& sample, int bins);

}  // namespace kjmix
