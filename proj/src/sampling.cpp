#include "kjmix/sampling.hpp"

#include <atomic>
#include <cmath>

#include "kjmix/kernels.hpp"
#include "kjmix/rng.hpp"

namespace kjmix {

namespace {

constexpr int kEnvelopeGrid = 8192;
constexpr long kMaxProposals = 100000000L;

// Flat envelope height certified by a grid scan plus golden-section
// refinement around the grid argmax. The 1.001 factor covers the residual
// refinement error; if refinement raised the maximum above the grid value,
// an extra 1.05 headroom is applied.
double envelope_height(const KatoJonesParams& comp) {
  auto f = [&comp](double t) { return kj_density(Angle(t), comp); };
  const double step = two_pi / kEnvelopeGrid;
  double grid_max = f(0.0);
  double grid_arg = 0.0;
  for (int i = 1; i < kEnvelopeGrid; ++i) {
    const double v = f(i * step);
    if (v > grid_max) {
      grid_max = v;
      grid_arg = i * step;
    }
  }
  constexpr double invphi = 0.6180339887498949;
  double a = grid_arg - step, b = grid_arg + step;
  double c = b - invphi * (b - a), d = a + invphi * (b - a);
  double fc = f(c), fd = f(d);
  double refined = grid_max;
  while (b - a > 1e-10) {
    refined = std::max(refined, std::max(fc, fd));
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  double height = std::max(grid_max, refined) * 1.001;
  if (refined > grid_max) height *= 1.05;
  return height;
}

}  // namespace

std::vector<Angle> sample(const ReparamMixture& mix, std::size_t n, std::uint64_t seed) {
  mix.validate();
  if (n < 1) throw std::invalid_argument("sample: n must be at least 1");
  const std::size_t m = mix.size();

  std::vector<KatoJonesParams> comps(m);
  std::vector<double> heights(m);
  for (std::size_t k = 0; k < m; ++k) {
    comps[k] = at_gamma_bar(mix.components[k]);
    heights[k] = envelope_height(comps[k]);
  }
  std::vector<double> cumulative(m);
  double acc = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    acc += mix.weights[k];
    cumulative[k] = acc;
  }

  std::vector<Angle> out(n);
  std::atomic<bool> violated{false};

  kernels::parallel_for(n, [&](std::size_t i) {
    Rng rng(mix_seed(seed, i));
    const double u = rng.uniform01();
    std::size_t k = m;  // uniform component unless a cluster claims the draw
    for (std::size_t c = 0; c < m; ++c) {
      if (u < cumulative[c]) {
        k = c;
        break;
      }
    }
    if (k == m) {
      out[i] = Angle(rng.uniform01() * two_pi);
      return;
    }
    const double height = heights[k];
    for (long tries = 0; tries < kMaxProposals; ++tries) {
      const double theta = rng.uniform01() * two_pi;
      const double v = rng.uniform01() * height;
      const double dens = kj_density(Angle(theta), comps[k]);
      if (dens > height) {
        violated.store(true, std::memory_order_relaxed);
        return;
      }
      if (v <= dens) {
        out[i] = Angle(theta);
        return;
      }
    }
    violated.store(true, std::memory_order_relaxed);
  });

  if (violated.load())
    throw EnvelopeError("rejection envelope violated; grid-certified height too low");
  return out;
}

}  // namespace kjmix
