#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "kjmix/angle.hpp"
#include "kjmix/em.hpp"

namespace kjmix {

struct UnboundedConcentrationError : std::domain_error {
  using std::domain_error::domain_error;
};

struct VonMisesComponent {
  Angle mu;
  double kappa = 0.0;

  void validate() const;  // kappa >= 0 and finite
};

struct MovMixture {
  std::vector<VonMisesComponent> components;
  std::vector<double> weights;  // m entries, no uniform share

  std::size_t size() const { return components.size(); }
  void validate() const;
};

/// Scaled modified Bessel functions e^{-kappa} I_0(kappa), e^{-kappa} I_1(kappa);
/// power series below kappa = 15, asymptotic expansion above. Safe for any
/// kappa a fit can produce (no overflow).
double bessel_i0_scaled(double kappa);
double bessel_i1_scaled(double kappa);

/// A(kappa) = I_1(kappa) / I_0(kappa), strictly increasing from 0 toward 1.
double bessel_ratio(double kappa);

/// Inverse of A, by safeguarded Newton to |A(kappa) - r| < 1e-12.
/// Throws UnboundedConcentrationError for r >= 1.
double inv_bessel_ratio(double r);

/// exp(kappa cos(theta - mu)) / (2 pi I_0(kappa)), evaluated in the scaled
/// form exp(kappa (cos(theta - mu) - 1)) / (2 pi e^{-kappa} I_0(kappa)).
double vm_density(Angle theta, const VonMisesComponent& comp);

double movm_density(Angle theta, const MovMixture& mix);

double movm_log_likelihood(const std::vector<Angle>& sample, const MovMixture& mix);

/// Moment-based start: k-means on the unit-circle embedding of the angles,
/// concentrations from each cluster's mean resultant length.
MovMixture movm_init(const std::vector<Angle>& sample, std::size_t m, std::uint64_t seed);

struct MovmFit {
  MovMixture estimate;  // sorted by ascending mu
  std::vector<double> loglik_trace;
  int outer_iterations = 0;
  bool converged = false;
};

/// EM with closed-form M-step: mu_k from the responsibility-weighted
/// resultant direction, kappa_k = inv_bessel_ratio(weighted mean resultant
/// length). Uses cfg.outer_tol / cfg.max_outer; inner settings are unused.
MovmFit movm_em_fit(const std::vector<Angle>& sample, const MovMixture& init,
                    const EmConfig& cfg);

/// movm_init plus `restarts` random-seed restarts, keeping the best final
/// log-likelihood.
MovmFit movm_fit(const std::vector<Angle>& sample, std::size_t m, std::uint64_t seed,
                 const EmConfig& cfg, int restarts = 5);

MovMixture sorted_by_mu(const MovMixture& mix);

}  // namespace kjmix
