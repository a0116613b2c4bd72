#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kjmix/mixture.hpp"
#include "kjmix/optimize.hpp"

namespace kjmix {

struct EmptySampleError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct AllStartsFailedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Trigonometric moments phi(p) = E(e^{ip Theta}) for p = 1..q, either the
/// empirical means over a sample or the theoretical values of a mixture.
struct TrigMoments {
  int q = 0;
  std::vector<ComplexMoment> values;  // values[p-1] is the p-th moment
  std::size_t sample_size = 0;        // 0 marks theoretical moments

  bool empirical() const { return sample_size > 0; }
};

/// (1/n) sum_j e^{ip theta_j}; throws EmptySampleError for an empty sample.
TrigMoments empirical_trig_moments(const std::vector<Angle>& sample, int q);

TrigMoments theoretical_trig_moments(const ReparamMixture& mix, int q);

/// Weighted squared error between empirical and theoretical moments:
/// sum_{p=1}^{q} c^p [ (cos residual)^2 + (sin residual)^2 ].
double etm(const ReparamMixture& psi, const TrigMoments& emp, double c);

/// Random feasible starting point: mu_k, lambda_k ~ U[0, 2pi), rho_k ~ U[0, 1),
/// weights from the spacings of m sorted U[0, 1) draws.
ReparamMixture random_init(std::size_t m, std::uint64_t seed);

struct EtmConfig {
  int q = 0;            // 0 picks 2m at fit time
  double c = 0.9;
  double tol = 1e-10;
  int starts = 100;
  std::uint64_t seed = 0;
  int max_iter = 500;
};

struct StartRecord {
  int index = 0;
  std::uint64_t seed = 0;
  double init_etm = 0.0;
  double final_etm = 0.0;
  int iterations = 0;
  bool failed = false;
  std::string error;
};

struct MmmFit {
  ReparamMixture estimate;  // canonicalized by ascending mu
  double etm_value = 0.0;
  int best_start = -1;
  std::vector<StartRecord> starts;
  std::vector<std::string> warnings;
};

/// Multi-start minimization of the moment error. Start s draws its initial
/// point from seed mix_seed(cfg.seed, s); runs are independent and execute in
/// parallel, and the winner is the smallest final value (ties to the lower
/// start index). Starts whose optimization fails are recorded and skipped;
/// AllStartsFailedError only if none survive.
MmmFit fit_mmm(const TrigMoments& emp, std::size_t m, const EtmConfig& cfg);
MmmFit fit_mmm(const std::vector<Angle>& sample, std::size_t m, const EtmConfig& cfg);

}  // namespace kjmix
