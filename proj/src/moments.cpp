#include "kjmix/moments.hpp"

#include <algorithm>
#include <cmath>

#include "kjmix/kernels.hpp"
#include "kjmix/rng.hpp"

namespace kjmix {

TrigMoments empirical_trig_moments(const std::vector<Angle>& sample, int q) {
  if (sample.empty()) throw EmptySampleError("empirical moments of an empty sample");
  if (q < 1) throw std::invalid_argument("moment order q must be at least 1");
  TrigMoments out;
  out.q = q;
  out.sample_size = sample.size();
  out.values.reserve(q);
  const double inv_n = 1.0 / static_cast<double>(sample.size());
  for (int p = 1; p <= q; ++p) {
    const auto cs = kernels::blocked_sum_array<2>(sample.size(), [&](std::size_t j) {
      const double a = p * sample[j].radians();
      return std::array<double, 2>{std::cos(a), std::sin(a)};
    });
    out.values.emplace_back(cs[0] * inv_n, cs[1] * inv_n);
  }
  return out;
}

TrigMoments theoretical_trig_moments(const ReparamMixture& mix, int q) {
  if (q < 1) throw std::invalid_argument("moment order q must be at least 1");
  TrigMoments out;
  out.q = q;
  out.sample_size = 0;
  out.values.reserve(q);
  for (int p = 1; p <= q; ++p) out.values.push_back(mixture_trig_moment(p, mix));
  return out;
}

double etm(const ReparamMixture& psi, const TrigMoments& emp, double c) {
  if (emp.q < 1) throw std::invalid_argument("etm: empirical moments must have q >= 1");
  if (!(c > 0.0 && c < 1.0)) throw std::invalid_argument("etm: weight base c must be in (0, 1)");
  const std::size_t m = psi.size();
  // running term pi'_k gamma_bar_k rho^{p-1} e^{i(p mu + (p-1) lambda)},
  // advanced by one factor rho e^{i(mu + lambda)} per order
  std::vector<ComplexMoment> term(m), factor(m);
  for (std::size_t k = 0; k < m; ++k) {
    const ReparamComponent& comp = psi.components[k];
    term[k] = psi.weights[k] * gamma_bar(comp.rho, comp.lambda) *
              std::polar(1.0, comp.mu.radians());
    factor[k] = std::polar(comp.rho, comp.mu.radians() + comp.lambda.radians());
  }
  double total = 0.0;
  double weight = 1.0;
  for (int p = 1; p <= emp.q; ++p) {
    ComplexMoment theo{0.0, 0.0};
    for (std::size_t k = 0; k < m; ++k) theo += term[k];
    const double dcos = emp.values[p - 1].real() - theo.real();
    const double dsin = emp.values[p - 1].imag() - theo.imag();
    weight *= c;
    total += weight * (dcos * dcos + dsin * dsin);
    for (std::size_t k = 0; k < m; ++k) term[k] *= factor[k];
  }
  return total;
}

ReparamMixture random_init(std::size_t m, std::uint64_t seed) {
  if (m < 1) throw std::invalid_argument("random_init: m must be at least 1");
  Rng rng(seed);
  ReparamMixture mix;
  mix.components.resize(m);
  for (std::size_t k = 0; k < m; ++k) mix.components[k].mu = Angle(rng.uniform01() * two_pi);
  for (std::size_t k = 0; k < m; ++k) mix.components[k].rho = rng.uniform01();
  for (std::size_t k = 0; k < m; ++k) mix.components[k].lambda = Angle(rng.uniform01() * two_pi);
  // weights are the spacings of m sorted uniform draws
  std::vector<double> u(m);
  for (std::size_t k = 0; k < m; ++k) u[k] = rng.uniform01();
  std::sort(u.begin(), u.end());
  mix.weights.resize(m + 1);
  double prev = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    mix.weights[k] = u[k] - prev;
    prev = u[k];
  }
  mix.weights[m] = 1.0 - prev;
  return mix;
}

MmmFit fit_mmm(const TrigMoments& emp, std::size_t m, const EtmConfig& cfg) {
  if (m < 1) throw std::invalid_argument("fit_mmm: m must be at least 1");
  if (cfg.starts < 1) throw std::invalid_argument("fit_mmm: starts must be at least 1");

  MmmFit fit;
  if (emp.q < 2 * static_cast<int>(m))
    fit.warnings.push_back("q = " + std::to_string(emp.q) + " below 2m = " +
                           std::to_string(2 * m) + "; multiple minimizers are possible");

  OptimizeConfig opt;
  opt.tol = cfg.tol;
  opt.max_iter = cfg.max_iter;
  const double c = cfg.c;

  struct Slot {
    StartRecord record;
    ReparamMixture estimate;
  };
  std::vector<Slot> slots(static_cast<std::size_t>(cfg.starts));

  kernels::parallel_tasks(slots.size(), [&](std::size_t s) {
    Slot& slot = slots[s];
    slot.record.index = static_cast<int>(s);
    slot.record.seed = mix_seed(cfg.seed, s);
    try {
      const ReparamMixture init = random_init(m, slot.record.seed);
      slot.record.init_etm = etm(init, emp, c);
      auto objective = [&](const std::vector<double>& x) {
        return etm(from_unconstrained(x, m), emp, c);
      };
      MinimizeResult res = minimize(objective, to_unconstrained(init), opt);
      slot.estimate = from_unconstrained(res.point, m);
      slot.record.final_etm = res.value;
      slot.record.iterations = res.iterations;
    } catch (const std::exception& e) {
      slot.record.failed = true;
      slot.record.error = e.what();
    }
  });

  int best = -1;
  for (std::size_t s = 0; s < slots.size(); ++s) {
    if (slots[s].record.failed) continue;
    if (best < 0 || slots[s].record.final_etm < slots[static_cast<std::size_t>(best)].record.final_etm)
      best = static_cast<int>(s);
  }
  if (best < 0) throw AllStartsFailedError("every optimization start failed");

  fit.estimate = sorted_by_mu(slots[static_cast<std::size_t>(best)].estimate);
  fit.etm_value = slots[static_cast<std::size_t>(best)].record.final_etm;
  fit.best_start = best;
  fit.starts.reserve(slots.size());
  for (auto& slot : slots) fit.starts.push_back(std::move(slot.record));
  return fit;
}

MmmFit fit_mmm(const std::vector<Angle>& sample, std::size_t m, const EtmConfig& cfg) {
  const int q = cfg.q > 0 ? cfg.q : 2 * static_cast<int>(m);
  return fit_mmm(empirical_trig_moments(sample, q), m, cfg);
}

}  // namespace kjmix
