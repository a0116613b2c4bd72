#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "kjmix/em.hpp"
#include "kjmix/mixture.hpp"
#include "kjmix/moments.hpp"

namespace kjmix {

struct DimensionMismatchError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ZeroDenominatorError : std::domain_error {
  using std::domain_error::domain_error;
};

/// Deviation of a canonicalized estimate from the truth, laid out as
/// (mu_1..mu_m, rho_1..rho_m, lambda_1..lambda_m, pi'_1..pi'_m); angular
/// entries are wrapped differences in (-pi, pi].
std::vector<double> error_vector(const ReparamMixture& estimate, const ReparamMixture& truth);

struct GmseResult {
  std::vector<double> sigma;  // d x d row-major, symmetric PSD
  std::size_t dim = 0;
  double det = 0.0;  // clamped at 0 when roundoff drives it negative
};

/// Sigma-hat = r^{-1} sum_j e_j e_j^T and its determinant.
GmseResult gmse(const std::vector<std::vector<double>>& errors);

/// det(Sigma_MM) / det(Sigma_ML); throws ZeroDenominatorError when det_ml = 0.
double rgmse(double det_mm, double det_ml);

/// Determinant by LU decomposition with partial pivoting (a is consumed as
/// scratch).
double lu_determinant(std::vector<double> a, std::size_t dim);

struct StudyConfig {
  ReparamMixture truth;
  std::vector<std::size_t> sizes;
  int replicates = 200;
  std::uint64_t seed = 0;
  EtmConfig mmm;  // starts default 100
  EmConfig em;    // outer_tol 0 picks n*1e-6 per sample size
};

struct StudyRow {
  std::size_t n = 0;
  double det_mm = 0.0;
  double det_ml = 0.0;
  double rgmse = 0.0;  // NaN if det_ml collapsed to 0
  int failures_mm = 0;
  int failures_ml = 0;
  int replicates = 0;
};

struct StudyTable {
  std::vector<StudyRow> rows;
};

/// Per (n, replicate): sample from the truth, fit by multi-start moment
/// minimization, refine by EM initialized at that estimate, record both error
/// vectors. Replicates run as independent tasks with seeds
/// mix_seed(cfg.seed, n, replicate); aggregation folds in index order, so the
/// table is identical for any thread count. Failed fits are excluded and
/// counted.
StudyTable run_study(const StudyConfig& cfg);

/// CSV columns: n, det_mm, det_ml, rgmse, failures_mm, failures_ml.
void write_study_csv(std::ostream& os, const StudyTable& table);

}  // namespace kjmix
