#include "kjmix/em.hpp"

#include <cmath>

#include "kjmix/kernels.hpp"
#include "kjmix/moments.hpp"
#include "kjmix/optimize.hpp"

namespace kjmix {

namespace {

constexpr double kDensityFloor = 1e-300;
constexpr double kDeadWeight = 1e-10;

}  // namespace

double log_likelihood(const std::vector<Angle>& sample, const ReparamMixture& mix) {
  if (sample.empty()) throw EmptySampleError("log-likelihood of an empty sample");
  const std::size_t m = mix.size();
  std::vector<double> gbar(m);
  for (std::size_t k = 0; k < m; ++k)
    gbar[k] = gamma_bar(mix.components[k].rho, mix.components[k].lambda);

  const double total = kernels::blocked_sum(sample.size(), [&](std::size_t j) {
    const double th = sample[j].radians();
    double d = mix.weights[m] * inv_two_pi;
    for (std::size_t k = 0; k < m; ++k) {
      const ReparamComponent& c = mix.components[k];
      d += mix.weights[k] *
           kj_density_raw(th, c.mu.radians(), gbar[k], c.rho, c.lambda.radians());
    }
    return std::log(d);  // d <= 0 poisons the sum; reported below
  });
  if (!std::isfinite(total))
    throw NonFiniteLikelihoodError("log-likelihood is not finite: a density underflowed");
  return total;
}

Responsibilities e_step(const std::vector<Angle>& sample, const ReparamMixture& mix) {
  const std::size_t m = mix.size();
  const std::size_t n = sample.size();
  Responsibilities resp{m, n, std::vector<double>(m * n)};
  std::vector<double> gbar(m);
  for (std::size_t k = 0; k < m; ++k)
    gbar[k] = gamma_bar(mix.components[k].rho, mix.components[k].lambda);
  const double uniform_term = mix.weights[m] * inv_two_pi;

  kernels::parallel_for(n, [&](std::size_t j) {
    const double th = sample[j].radians();
    double denom = uniform_term;
    for (std::size_t k = 0; k < m; ++k) {
      const ReparamComponent& c = mix.components[k];
      const double v = mix.weights[k] *
                       kj_density_raw(th, c.mu.radians(), gbar[k], c.rho, c.lambda.radians());
      resp.at(k, j) = v;
      denom += v;
    }
    denom = std::max(denom, kDensityFloor);
    for (std::size_t k = 0; k < m; ++k) resp.at(k, j) /= denom;
  });
  return resp;
}

std::vector<double> m_step_weights(const Responsibilities& resp) {
  std::vector<double> weights(resp.m + 1);
  const double inv_n = 1.0 / static_cast<double>(resp.n);
  double used = 0.0;
  for (std::size_t k = 0; k < resp.m; ++k) {
    const auto row = resp.row(k);
    weights[k] = kernels::blocked_sum(resp.n, [&](std::size_t j) { return row[j]; }) * inv_n;
    used += weights[k];
  }
  weights[resp.m] = std::max(0.0, 1.0 - used);
  return weights;
}

ReparamComponent m_step_component(const std::vector<Angle>& sample,
                                  std::span<const double> resp_row,
                                  const ReparamComponent& init, const EmConfig& cfg) {
  const std::size_t n = sample.size();
  const double mass = kernels::blocked_sum(n, [&](std::size_t j) { return resp_row[j]; });
  if (mass < kDeadWeight) throw DeadComponentError(0, 0);

  auto objective = [&](const std::vector<double>& x) {
    const double mu = wrap_radians(x[0]);
    const double lambda = wrap_radians(x[1]);
    const double rho = std::min(logistic(x[2]), rho_max);
    const double gbar = gamma_bar(rho, lambda);
    return -kernels::blocked_sum(n, [&](std::size_t j) {
      const double g = kj_density_raw(sample[j].radians(), mu, gbar, rho, lambda);
      return resp_row[j] * std::log(std::max(g, kDensityFloor));
    });
  };

  OptimizeConfig opt;
  opt.tol = cfg.inner_tol;
  opt.max_iter = cfg.inner_max_iter;
  const auto start = component_to_unconstrained(init);
  MinimizeResult res =
      minimize(objective, std::vector<double>(start.begin(), start.end()), opt);
  return component_from_unconstrained({res.point[0], res.point[1], res.point[2]});
}

EmFit em_fit(const std::vector<Angle>& sample, const ReparamMixture& init, const EmConfig& cfg) {
  init.validate();
  if (sample.empty()) throw EmptySampleError("EM on an empty sample");
  const std::size_t m = init.size();
  const double outer_tol =
      cfg.outer_tol > 0.0 ? cfg.outer_tol : static_cast<double>(sample.size()) * 1e-6;

  ReparamMixture current = init;
  EmFit fit;
  fit.loglik_trace.push_back(log_likelihood(sample, current));

  for (int iter = 1; iter <= cfg.max_outer; ++iter) {
    const Responsibilities resp = e_step(sample, current);
    current.weights = m_step_weights(resp);
    for (std::size_t k = 0; k < m; ++k) {
      try {
        current.components[k] = m_step_component(sample, resp.row(k), current.components[k], cfg);
      } catch (const DeadComponentError&) {
        throw DeadComponentError(k, iter);
      }
    }
    const double ll = log_likelihood(sample, current);
    fit.loglik_trace.push_back(ll);
    fit.outer_iterations = iter;
    if (std::abs(ll - fit.loglik_trace[fit.loglik_trace.size() - 2]) < outer_tol) {
      fit.converged = true;
      break;
    }
  }
  fit.estimate = sorted_by_mu(current);
  return fit;
}

double aic(double loglik, std::size_t m) {
  return -2.0 * loglik + 2.0 * (4.0 * static_cast<double>(m));
}

double bic(double loglik, std::size_t m, std::size_t n) {
  if (n < 1) throw std::invalid_argument("bic: n must be at least 1");
  return -2.0 * loglik + 4.0 * static_cast<double>(m) * std::log(static_cast<double>(n));
}

}  // namespace kjmix
