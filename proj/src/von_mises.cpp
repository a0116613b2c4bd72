#include "kjmix/von_mises.hpp"

#include <algorithm>
#include <cmath>

#include "kjmix/kernels.hpp"
#include "kjmix/moments.hpp"
#include "kjmix/rng.hpp"

namespace kjmix {

namespace {

constexpr double kSeriesCutoff = 15.0;
constexpr double kDensityFloor = 1e-300;
constexpr double kDeadWeight = 1e-10;

// e^{-k} I_nu(k) by the power series, nu in {0, 1}. All terms are positive,
// so there is no cancellation; safe below the overflow range.
double series_scaled(int nu, double kappa) {
  const double half = 0.5 * kappa;
  double term = nu == 0 ? 1.0 : half;
  double sum = term;
  for (int j = 1; j < 200; ++j) {
    term *= half * half / (static_cast<double>(j) * (j + nu));
    sum += term;
    if (term < sum * 1e-17) break;
  }
  return sum * std::exp(-kappa);
}

// e^{-k} I_nu(k) ~ (2 pi k)^{-1/2} sum of the alternating asymptotic series;
// truncated at the smallest term.
double asymptotic_scaled(int nu, double kappa) {
  const double mu = 4.0 * nu * nu;
  double term = 1.0;
  double sum = 1.0;
  double prev = std::abs(term);
  for (int j = 1; j <= 14; ++j) {
    term *= -(mu - (2.0 * j - 1.0) * (2.0 * j - 1.0)) / (8.0 * kappa * j);
    if (std::abs(term) >= prev) break;
    sum += term;
    prev = std::abs(term);
  }
  return sum / std::sqrt(two_pi * kappa);
}

double scaled_bessel(int nu, double kappa) {
  if (!(kappa >= 0.0) || !std::isfinite(kappa))
    throw std::domain_error("Bessel argument must be finite and non-negative");
  return kappa < kSeriesCutoff ? series_scaled(nu, kappa) : asymptotic_scaled(nu, kappa);
}

}  // namespace

double bessel_i0_scaled(double kappa) { return scaled_bessel(0, kappa); }
double bessel_i1_scaled(double kappa) { return scaled_bessel(1, kappa); }

double bessel_ratio(double kappa) {
  return bessel_i1_scaled(kappa) / bessel_i0_scaled(kappa);
}

double inv_bessel_ratio(double r) {
  if (!(r >= 0.0 && r < 1.0))
    throw UnboundedConcentrationError("mean resultant length must lie in [0, 1), got " +
                                      std::to_string(r));
  if (r == 0.0) return 0.0;

  // standard starting approximations (Fisher 1993, Banerjee et al. 2005)
  double kappa;
  if (r < 0.53)
    kappa = 2.0 * r + r * r * r + 5.0 * std::pow(r, 5) / 6.0;
  else if (r < 0.85)
    kappa = -0.4 + 1.39 * r + 0.43 / (1.0 - r);
  else
    kappa = 1.0 / (r * r * r - 4.0 * r * r + 3.0 * r);

  double lo = 0.0;
  double hi = std::max(kappa * 4.0, 1.0);
  while (bessel_ratio(hi) < r) {
    lo = hi;
    hi *= 4.0;
  }
  kappa = std::clamp(kappa, lo, hi);

  for (int it = 0; it < 100; ++it) {
    const double a = bessel_ratio(kappa);
    const double err = a - r;
    if (std::abs(err) < 1e-12) return kappa;
    if (err > 0.0)
      hi = kappa;
    else
      lo = kappa;
    const double da = 1.0 - a * a - (kappa > 0.0 ? a / kappa : 0.0);  // A'(kappa)
    double next = kappa - err / da;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);  // bisection safeguard
    kappa = next;
  }
  return kappa;
}

void VonMisesComponent::validate() const {
  if (!(kappa >= 0.0) || !std::isfinite(kappa))
    throw std::invalid_argument("kappa must be finite and non-negative");
}

void MovMixture::validate() const {
  if (components.empty()) throw std::invalid_argument("mixture needs at least one component");
  if (weights.size() != components.size())
    throw std::invalid_argument("one weight per component required");
  for (const auto& c : components) c.validate();
  check_simplex(weights, "von Mises mixture");
}

namespace {

inline double vm_density_raw(double theta, double mu, double kappa, double inv_norm) {
  return std::exp(kappa * (std::cos(theta - mu) - 1.0)) * inv_norm;
}

}  // namespace

double vm_density(Angle theta, const VonMisesComponent& comp) {
  comp.validate();
  const double inv_norm = inv_two_pi / bessel_i0_scaled(comp.kappa);
  return vm_density_raw(theta.radians(), comp.mu.radians(), comp.kappa, inv_norm);
}

double movm_density(Angle theta, const MovMixture& mix) {
  double total = 0.0;
  for (std::size_t k = 0; k < mix.size(); ++k)
    total += mix.weights[k] * vm_density(theta, mix.components[k]);
  return total;
}

double movm_log_likelihood(const std::vector<Angle>& sample, const MovMixture& mix) {
  if (sample.empty()) throw EmptySampleError("log-likelihood of an empty sample");
  const std::size_t m = mix.size();
  std::vector<double> inv_norm(m);
  for (std::size_t k = 0; k < m; ++k)
    inv_norm[k] = inv_two_pi / bessel_i0_scaled(mix.components[k].kappa);
  const double total = kernels::blocked_sum(sample.size(), [&](std::size_t j) {
    const double th = sample[j].radians();
    double d = 0.0;
    for (std::size_t k = 0; k < m; ++k)
      d += mix.weights[k] * vm_density_raw(th, mix.components[k].mu.radians(),
                                           mix.components[k].kappa, inv_norm[k]);
    return std::log(std::max(d, kDensityFloor));
  });
  if (!std::isfinite(total)) throw NonFiniteLikelihoodError("log-likelihood is not finite");
  return total;
}

MovMixture movm_init(const std::vector<Angle>& sample, std::size_t m, std::uint64_t seed) {
  if (sample.empty()) throw EmptySampleError("initialization from an empty sample");
  if (m < 1) throw std::invalid_argument("m must be at least 1");
  const std::size_t n = sample.size();
  Rng rng(seed);

  // k-means on the unit-circle embedding, centers seeded from the sample
  std::vector<double> cx(m), cy(m);
  for (std::size_t k = 0; k < m; ++k) {
    const Angle a = sample[rng.next_u64() % n];
    cx[k] = std::cos(a.radians());
    cy[k] = std::sin(a.radians());
  }
  std::vector<std::size_t> assign(n, 0);
  for (int pass = 0; pass < 25; ++pass) {
    bool changed = false;
    for (std::size_t j = 0; j < n; ++j) {
      const double x = std::cos(sample[j].radians());
      const double y = std::sin(sample[j].radians());
      std::size_t best = 0;
      double best_d = 1e300;
      for (std::size_t k = 0; k < m; ++k) {
        const double d = (x - cx[k]) * (x - cx[k]) + (y - cy[k]) * (y - cy[k]);
        if (d < best_d) {
          best_d = d;
          best = k;
        }
      }
      if (assign[j] != best) {
        assign[j] = best;
        changed = true;
      }
    }
    std::vector<double> sx(m, 0.0), sy(m, 0.0);
    std::vector<std::size_t> count(m, 0);
    for (std::size_t j = 0; j < n; ++j) {
      sx[assign[j]] += std::cos(sample[j].radians());
      sy[assign[j]] += std::sin(sample[j].radians());
      ++count[assign[j]];
    }
    for (std::size_t k = 0; k < m; ++k) {
      if (count[k] == 0) {  // respawn an empty cluster on a random point
        const Angle a = sample[rng.next_u64() % n];
        cx[k] = std::cos(a.radians());
        cy[k] = std::sin(a.radians());
        continue;
      }
      cx[k] = sx[k] / count[k];
      cy[k] = sy[k] / count[k];
    }
    if (!changed) break;
  }

  MovMixture mix;
  mix.components.resize(m);
  mix.weights.resize(m);
  std::vector<double> sx(m, 0.0), sy(m, 0.0);
  std::vector<std::size_t> count(m, 0);
  for (std::size_t j = 0; j < n; ++j) {
    sx[assign[j]] += std::cos(sample[j].radians());
    sy[assign[j]] += std::sin(sample[j].radians());
    ++count[assign[j]];
  }
  double wsum = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double ck = std::max<double>(count[k], 1);
    const double rbar = std::min(std::hypot(sx[k], sy[k]) / ck, 0.999999);
    mix.components[k].mu = Angle(std::atan2(sy[k], sx[k]));
    mix.components[k].kappa = inv_bessel_ratio(rbar);
    mix.weights[k] = std::max(static_cast<double>(count[k]) / n, 0.05 / m);
    wsum += mix.weights[k];
  }
  for (double& w : mix.weights) w /= wsum;
  return mix;
}

MovmFit movm_em_fit(const std::vector<Angle>& sample, const MovMixture& init,
                    const EmConfig& cfg) {
  init.validate();
  if (sample.empty()) throw EmptySampleError("EM on an empty sample");
  const std::size_t m = init.size();
  const std::size_t n = sample.size();
  const double outer_tol =
      cfg.outer_tol > 0.0 ? cfg.outer_tol : static_cast<double>(n) * 1e-6;

  MovMixture current = init;
  MovmFit fit;
  fit.loglik_trace.push_back(movm_log_likelihood(sample, current));

  std::vector<double> resp(m * n);
  for (int iter = 1; iter <= cfg.max_outer; ++iter) {
    std::vector<double> inv_norm(m);
    for (std::size_t k = 0; k < m; ++k)
      inv_norm[k] = inv_two_pi / bessel_i0_scaled(current.components[k].kappa);
    kernels::parallel_for(n, [&](std::size_t j) {
      const double th = sample[j].radians();
      double denom = 0.0;
      for (std::size_t k = 0; k < m; ++k) {
        const double v = current.weights[k] *
                         vm_density_raw(th, current.components[k].mu.radians(),
                                        current.components[k].kappa, inv_norm[k]);
        resp[k * n + j] = v;
        denom += v;
      }
      denom = std::max(denom, kDensityFloor);
      for (std::size_t k = 0; k < m; ++k) resp[k * n + j] /= denom;
    });

    for (std::size_t k = 0; k < m; ++k) {
      const auto sums = kernels::blocked_sum_array<3>(n, [&](std::size_t j) {
        const double w = resp[k * n + j];
        const double th = sample[j].radians();
        return std::array<double, 3>{w, w * std::cos(th), w * std::sin(th)};
      });
      if (sums[0] < kDeadWeight) throw DeadComponentError(k, iter);
      current.weights[k] = sums[0] / static_cast<double>(n);
      current.components[k].mu = Angle(std::atan2(sums[2], sums[1]));
      const double rbar = std::hypot(sums[1], sums[2]) / sums[0];
      current.components[k].kappa = inv_bessel_ratio(std::min(rbar, 1.0 - 1e-12));
    }
    double wsum = 0.0;
    for (double w : current.weights) wsum += w;
    for (double& w : current.weights) w /= wsum;

    const double ll = movm_log_likelihood(sample, current);
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

MovmFit movm_fit(const std::vector<Angle>& sample, std::size_t m, std::uint64_t seed,
                 const EmConfig& cfg, int restarts) {
  MovmFit best;
  bool have = false;
  for (int t = 0; t <= restarts; ++t) {
    try {
      const MovMixture init = movm_init(sample, m, mix_seed(seed, static_cast<std::uint64_t>(t)));
      MovmFit fit = movm_em_fit(sample, init, cfg);
      if (!have || fit.loglik_trace.back() > best.loglik_trace.back()) {
        best = std::move(fit);
        have = true;
      }
    } catch (const DeadComponentError&) {
      continue;  // restart with the next seed
    }
  }
  if (!have) throw AllStartsFailedError("every von Mises EM start failed");
  return best;
}

MovMixture sorted_by_mu(const MovMixture& mix) {
  std::vector<std::size_t> idx(mix.size());
  for (std::size_t k = 0; k < idx.size(); ++k) idx[k] = k;
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return mix.components[a].mu.radians() < mix.components[b].mu.radians();
  });
  MovMixture out;
  out.components.reserve(mix.size());
  out.weights.reserve(mix.size());
  for (std::size_t k : idx) {
    out.components.push_back(mix.components[k]);
    out.weights.push_back(mix.weights[k]);
  }
  return out;
}

}  // namespace kjmix
