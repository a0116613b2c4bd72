#include "kjmix/simulation.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "kjmix/kernels.hpp"
#include "kjmix/rng.hpp"
#include "kjmix/sampling.hpp"

namespace kjmix {

std::vector<double> error_vector(const ReparamMixture& estimate, const ReparamMixture& truth) {
  const std::size_t m = truth.size();
  if (estimate.size() != m)
    throw DimensionMismatchError("estimate and truth have different component counts");
  std::vector<double> e(4 * m);
  for (std::size_t k = 0; k < m; ++k) {
    e[k] = angular_difference(estimate.components[k].mu, truth.components[k].mu);
    e[m + k] = estimate.components[k].rho - truth.components[k].rho;
    e[2 * m + k] =
        angular_difference(estimate.components[k].lambda, truth.components[k].lambda);
    e[3 * m + k] = estimate.weights[k] - truth.weights[k];
  }
  return e;
}

double lu_determinant(std::vector<double> a, std::size_t dim) {
  if (a.size() != dim * dim) throw DimensionMismatchError("matrix size does not match dim");
  double det = 1.0;
  for (std::size_t col = 0; col < dim; ++col) {
    std::size_t pivot = col;
    double best = std::abs(a[col * dim + col]);
    for (std::size_t r = col + 1; r < dim; ++r) {
      const double v = std::abs(a[r * dim + col]);
      if (v > best) {
        best = v;
        pivot = r;
      }
    }
    if (best == 0.0) return 0.0;
    if (pivot != col) {
      for (std::size_t c = 0; c < dim; ++c) std::swap(a[pivot * dim + c], a[col * dim + c]);
      det = -det;
    }
    det *= a[col * dim + col];
    for (std::size_t r = col + 1; r < dim; ++r) {
      const double f = a[r * dim + col] / a[col * dim + col];
      for (std::size_t c = col; c < dim; ++c) a[r * dim + c] -= f * a[col * dim + c];
    }
  }
  return det;
}

GmseResult gmse(const std::vector<std::vector<double>>& errors) {
  if (errors.empty()) throw std::invalid_argument("gmse needs at least one error vector");
  const std::size_t d = errors.front().size();
  for (const auto& e : errors)
    if (e.size() != d) throw DimensionMismatchError("error vectors of unequal dimension");

  GmseResult out;
  out.dim = d;
  out.sigma.assign(d * d, 0.0);
  const double inv_r = 1.0 / static_cast<double>(errors.size());
  for (const auto& e : errors)
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) out.sigma[i * d + j] += e[i] * e[j];
  for (double& v : out.sigma) v *= inv_r;
  const double raw = lu_determinant(out.sigma, d);
  out.det = raw < 0.0 ? 0.0 : raw;  // roundoff can push a PSD determinant barely negative
  return out;
}

double rgmse(double det_mm, double det_ml) {
  if (det_ml == 0.0) throw ZeroDenominatorError("RGMSE undefined: det of the ML matrix is 0");
  return det_mm / det_ml;
}

StudyTable run_study(const StudyConfig& cfg) {
  cfg.truth.validate();
  if (cfg.sizes.empty()) throw std::invalid_argument("run_study: sizes must be non-empty");
  if (cfg.replicates < 2) throw std::invalid_argument("run_study: at least 2 replicates");

  const ReparamMixture truth = sorted_by_mu(cfg.truth);
  const std::size_t m = truth.size();

  struct ReplicateOutcome {
    std::vector<double> err_mm;
    std::vector<double> err_ml;
    bool ok_mm = false;
    bool ok_ml = false;
  };

  const std::size_t nsizes = cfg.sizes.size();
  const std::size_t r = static_cast<std::size_t>(cfg.replicates);
  std::vector<ReplicateOutcome> outcomes(nsizes * r);

  kernels::parallel_tasks(outcomes.size(), [&](std::size_t task) {
    const std::size_t size_idx = task / r;
    const std::size_t rep = task % r;
    const std::size_t n = cfg.sizes[size_idx];
    ReplicateOutcome& out = outcomes[task];
    const std::uint64_t rep_seed = mix_seed(cfg.seed, n, rep);

    ReparamMixture mm_estimate;
    try {
      const std::vector<Angle> data = sample(truth, n, mix_seed(rep_seed, 0));
      EtmConfig mmm = cfg.mmm;
      mmm.seed = mix_seed(rep_seed, 1);
      const MmmFit mm = fit_mmm(data, m, mmm);
      mm_estimate = mm.estimate;
      out.err_mm = error_vector(mm_estimate, truth);
      out.ok_mm = true;

      EmConfig em = cfg.em;
      if (em.outer_tol <= 0.0) em.outer_tol = static_cast<double>(n) * 1e-6;
      const EmFit ml = em_fit(data, mm_estimate, em);
      out.err_ml = error_vector(ml.estimate, truth);
      out.ok_ml = true;
    } catch (const std::exception&) {
      // a failed fit leaves the replicate excluded for the remaining estimators
    }
  });

  StudyTable table;
  table.rows.reserve(nsizes);
  for (std::size_t s = 0; s < nsizes; ++s) {
    StudyRow row;
    row.n = cfg.sizes[s];
    row.replicates = cfg.replicates;
    std::vector<std::vector<double>> errs_mm, errs_ml;
    errs_mm.reserve(r);
    errs_ml.reserve(r);
    for (std::size_t rep = 0; rep < r; ++rep) {
      const ReplicateOutcome& out = outcomes[s * r + rep];
      if (out.ok_mm)
        errs_mm.push_back(out.err_mm);
      else
        ++row.failures_mm;
      if (out.ok_ml)
        errs_ml.push_back(out.err_ml);
      else
        ++row.failures_ml;
    }
    row.det_mm = errs_mm.empty() ? 0.0 : gmse(errs_mm).det;
    row.det_ml = errs_ml.empty() ? 0.0 : gmse(errs_ml).det;
    row.rgmse = row.det_ml > 0.0 ? row.det_mm / row.det_ml
                                 : std::numeric_limits<double>::quiet_NaN();
    table.rows.push_back(row);
  }
  return table;
}

void write_study_csv(std::ostream& os, const StudyTable& table) {
  os << "n,det_mm,det_ml,rgmse,failures_mm,failures_ml\n";
  char buf[128];
  for (const StudyRow& row : table.rows) {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%.17g,%d,%d\n", row.n, row.det_mm,
                  row.det_ml, row.rgmse, row.failures_mm, row.failures_ml);
    os << buf;
  }
}

}  // namespace kjmix
