#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "kjmix/mixture.hpp"

namespace kjmix {

struct EmConfig {
  double inner_tol = 1e-6;   // M-step objective change tolerance
  double outer_tol = 0.0;    // log-likelihood change tolerance; 0 picks n*1e-6
  int max_outer = 200;
  int inner_max_iter = 200;
};

struct DeadComponentError : std::runtime_error {
  DeadComponentError(std::size_t k, int iter)
      : std::runtime_error("component " + std::to_string(k + 1) +
                           " lost all responsibility at EM iteration " + std::to_string(iter)),
        component(k),
        iteration(iter) {}
  std::size_t component;
  int iteration;
};

struct NonFiniteLikelihoodError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Posterior component memberships w_{kj}, k = 1..m, j = 1..n, stored
/// row-major. Column sums fall short of 1 by the uniform component's share.
struct Responsibilities {
  std::size_t m = 0;
  std::size_t n = 0;
  std::vector<double> w;

  double& at(std::size_t k, std::size_t j) { return w[k * n + j]; }
  double at(std::size_t k, std::size_t j) const { return w[k * n + j]; }
  std::span<const double> row(std::size_t k) const { return {w.data() + k * n, n}; }
};

/// Sum of log mixture densities. Throws NonFiniteLikelihoodError if any
/// density underflows to a non-positive value.
double log_likelihood(const std::vector<Angle>& sample, const ReparamMixture& mix);

/// w_{kj} = pi'_k g_k(theta_j) / (sum_h pi'_h g_h(theta_j) + pi'_{m+1}/(2 pi));
/// denominators floored at 1e-300.
Responsibilities e_step(const std::vector<Angle>& sample, const ReparamMixture& mix);

/// Closed-form weight update: row means, uniform share is the remainder.
std::vector<double> m_step_weights(const Responsibilities& resp);

/// Numerical maximization of sum_j w_j log g(theta_j; mu, gamma_bar, lambda, rho)
/// over (mu, lambda, rho). Throws DeadComponentError when sum_j w_j < 1e-10.
ReparamComponent m_step_component(const std::vector<Angle>& sample,
                                  std::span<const double> resp_row,
                                  const ReparamComponent& init, const EmConfig& cfg);

struct EmFit {
  ReparamMixture estimate;  // canonicalized by ascending mu
  std::vector<double> loglik_trace;
  int outer_iterations = 0;
  bool converged = false;  // false when max_outer was hit first
};

/// Alternates e_step and the two M-step updates from the given feasible
/// initial value until the log-likelihood change drops below the outer
/// tolerance.
EmFit em_fit(const std::vector<Angle>& sample, const ReparamMixture& init, const EmConfig& cfg);

/// Information criteria with 4m free parameters per fitted mixture.
double aic(double loglik, std::size_t m);
double bic(double loglik, std::size_t m, std::size_t n);

}  // namespace kjmix
