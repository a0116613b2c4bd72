#include "kjmix/optimize.hpp"

#include <cmath>

namespace kjmix {

namespace {

// Floors keep the log-ratio transforms finite at the simplex/interval
// boundaries; the roundtrip error they introduce stays below 1e-12.
constexpr double kWeightFloor = 1e-12;
constexpr double kRhoFloor = 1e-12;

double logit(double p) { return std::log(p / (1.0 - p)); }

}  // namespace

std::vector<double> to_unconstrained(const ReparamMixture& mix) {
  mix.validate();
  const std::size_t m = mix.size();
  std::vector<double> x(4 * m);
  for (std::size_t k = 0; k < m; ++k) {
    x[k] = mix.components[k].mu.radians();
    x[m + k] = mix.components[k].lambda.radians();
    const double rho = std::clamp(mix.components[k].rho, kRhoFloor, rho_max);
    x[2 * m + k] = logit(rho);
  }
  const double wm1 = std::max(mix.weights[m], kWeightFloor);
  for (std::size_t k = 0; k < m; ++k)
    x[3 * m + k] = std::log(std::max(mix.weights[k], kWeightFloor) / wm1);
  return x;
}

ReparamMixture from_unconstrained(const std::vector<double>& coords, std::size_t m) {
  if (coords.size() != 4 * m)
    throw std::invalid_argument("from_unconstrained: expected 4m coordinates");
  ReparamMixture mix;
  mix.components.resize(m);
  mix.weights.resize(m + 1);
  for (std::size_t k = 0; k < m; ++k) {
    mix.components[k].mu = Angle(coords[k]);
    mix.components[k].lambda = Angle(coords[m + k]);
    mix.components[k].rho = std::min(logistic(coords[2 * m + k]), rho_max);
  }
  // softmax with the (m+1)-th logit pinned at 0
  double top = 0.0;
  for (std::size_t k = 0; k < m; ++k) top = std::max(top, coords[3 * m + k]);
  double denom = std::exp(-top);
  for (std::size_t k = 0; k < m; ++k) denom += std::exp(coords[3 * m + k] - top);
  for (std::size_t k = 0; k < m; ++k)
    mix.weights[k] = std::exp(coords[3 * m + k] - top) / denom;
  mix.weights[m] = std::exp(-top) / denom;
  return mix;
}

std::array<double, 3> component_to_unconstrained(const ReparamComponent& c) {
  return {c.mu.radians(), c.lambda.radians(), logit(std::clamp(c.rho, kRhoFloor, rho_max))};
}

ReparamComponent component_from_unconstrained(const std::array<double, 3>& coords) {
  return ReparamComponent{Angle(coords[0]), std::min(logistic(coords[2]), rho_max),
                          Angle(coords[1])};
}

}  // namespace kjmix
