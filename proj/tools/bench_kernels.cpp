// Timing comparison of the OpenMP kernels against the serial reference path
// on the workloads that dominate a fit: empirical moments, log-likelihood,
// responsibilities, sampling-scale density sweeps, and a multi-start fit.

#include <chrono>
#include <cstdio>
#include <vector>

#include <omp.h>

#include "kjmix/em.hpp"
#include "kjmix/kernels.hpp"
#include "kjmix/moments.hpp"
#include "kjmix/sampling.hpp"

using kjmix::kernels::Exec;

namespace {

kjmix::ReparamMixture demo_mixture() {
  kjmix::ReparamMixture mix;
  mix.components = {kjmix::ReparamComponent{kjmix::Angle(2.7572), 0.7266, kjmix::Angle(5.3136)},
                    kjmix::ReparamComponent{kjmix::Angle(4.0107), 0.1970, kjmix::Angle(1.1895)}};
  mix.weights = {0.4536, 0.4825, 0.0639};
  return mix;
}

template <class F>
double time_ms(F&& f, int reps) {
  f();  // warm-up
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i) f();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

void report(const char* name, double serial_ms, double parallel_ms) {
  std::printf("%-28s serial %9.3f ms   parallel %9.3f ms   speedup %.2fx\n", name, serial_ms,
              parallel_ms, serial_ms / parallel_ms);
}

}  // namespace

int main(int argc, char** argv) {
  std::size_t n = 1000000;
  int reps = 5;
  if (argc > 1) n = static_cast<std::size_t>(std::atoll(argv[1]));
  if (argc > 2) reps = std::atoi(argv[2]);
  std::printf("n = %zu, %d reps, omp_get_max_threads() = %d\n", n, reps, omp_get_max_threads());

  const kjmix::ReparamMixture mix = demo_mixture();
  const std::vector<kjmix::Angle> data = kjmix::sample(mix, n, 1234);

  volatile double sink = 0.0;

  {
    auto body = [&](Exec exec) {
      return kjmix::kernels::blocked_sum(
          n, [&](std::size_t j) { return std::cos(3.0 * data[j].radians()); }, exec);
    };
    const double s = time_ms([&] { sink = body(Exec::serial); }, reps);
    const double p = time_ms([&] { sink = body(Exec::parallel); }, reps);
    report("blocked_sum cos(3 theta)", s, p);
  }

  {
    // empirical moments run through the same kernel; time the q = 4 sweep
    auto body = [&](Exec exec) {
      double acc = 0.0;
      for (int p = 1; p <= 4; ++p) {
        const auto cs = kjmix::kernels::blocked_sum_array<2>(
            n,
            [&](std::size_t j) {
              const double a = p * data[j].radians();
              return std::array<double, 2>{std::cos(a), std::sin(a)};
            },
            exec);
        acc += cs[0] + cs[1];
      }
      return acc;
    };
    const double s = time_ms([&] { sink = body(Exec::serial); }, reps);
    const double p = time_ms([&] { sink = body(Exec::parallel); }, reps);
    report("trig moments q=4", s, p);
  }

  {
    std::vector<double> gbar(mix.size());
    for (std::size_t k = 0; k < mix.size(); ++k)
      gbar[k] = kjmix::gamma_bar(mix.components[k].rho, mix.components[k].lambda);
    auto body = [&](Exec exec) {
      return kjmix::kernels::blocked_sum(
          n,
          [&](std::size_t j) {
            double d = mix.weights[2] * kjmix::inv_two_pi;
            for (std::size_t k = 0; k < mix.size(); ++k) {
              const auto& c = mix.components[k];
              d += mix.weights[k] * kjmix::kj_density_raw(data[j].radians(), c.mu.radians(),
                                                          gbar[k], c.rho, c.lambda.radians());
            }
            return std::log(d);
          },
          exec);
    };
    const double s = time_ms([&] { sink = body(Exec::serial); }, reps);
    const double p = time_ms([&] { sink = body(Exec::parallel); }, reps);
    report("log-likelihood", s, p);
  }

  {
    // whole-fit comparison: thread count toggled around the same call
    kjmix::EtmConfig cfg;
    cfg.starts = 32;
    cfg.seed = 99;
    const kjmix::TrigMoments emp = kjmix::empirical_trig_moments(data, 4);
    const int max_threads = omp_get_max_threads();
    omp_set_num_threads(1);
    const double s = time_ms([&] { sink = kjmix::fit_mmm(emp, 2, cfg).etm_value; }, 1);
    omp_set_num_threads(max_threads);
    const double p = time_ms([&] { sink = kjmix::fit_mmm(emp, 2, cfg).etm_value; }, 1);
    report("fit_mmm 32 starts", s, p);
  }

  (void)sink;
  return 0;
}
