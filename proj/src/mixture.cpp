#include "kjmix/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace kjmix {

namespace {

constexpr double kSimplexTol = 1e-12;
constexpr double kConstraintSlack = 1e-12;
constexpr int kModeGrid = 8192;

void check_unit_interval(double v, const char* name) {
  if (!(v >= 0.0 && v < 1.0))
    throw std::invalid_argument(std::string(name) + " outside [0, 1): " + std::to_string(v));
}

// Golden-section maximization on [a, b]; f must be unimodal on the bracket.
template <class F>
std::pair<double, double> golden_max(F&& f, double a, double b, double tol) {
  constexpr double invphi = 0.6180339887498949;  // (sqrt(5) - 1) / 2
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
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
  const double mid = 0.5 * (a + b);
  return {mid, f(mid)};
}

}  // namespace

void check_simplex(const std::vector<double>& weights, const char* what) {
  if (weights.empty()) throw std::invalid_argument(std::string(what) + ": no weights");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw std::invalid_argument(std::string(what) + ": negative weight");
    sum += w;
  }
  if (std::abs(sum - 1.0) > kSimplexTol)
    throw std::invalid_argument(std::string(what) + ": weights sum to " + std::to_string(sum));
}

double gamma_bar(double rho, double lambda) {
  if (!(rho >= 0.0 && rho < 1.0))
    throw std::domain_error("gamma_bar requires 0 <= rho < 1, got " + std::to_string(rho));
  return (1.0 - rho * rho) / (2.0 * (1.0 - rho * std::cos(lambda)));
}

void KatoJonesParams::validate() const {
  check_unit_interval(gamma, "gamma");
  check_unit_interval(rho, "rho");
  const double a = rho * std::cos(lambda.radians()) - gamma;
  const double b = rho * std::sin(lambda.radians());
  const double rhs = (1.0 - gamma) * (1.0 - gamma);
  if (a * a + b * b > rhs + kConstraintSlack)
    throw std::invalid_argument("Kato-Jones parameters violate the feasibility constraint");
}

void ShapeParams::validate() const {
  check_unit_interval(gamma, "gamma");
  const double r = std::hypot(alpha_bar2, beta_bar2);
  if (gamma == 0.0) {
    if (r != 0.0)
      throw std::invalid_argument("gamma = 0 requires alpha_bar2 = beta_bar2 = 0");
    return;
  }
  if (r >= gamma)
    throw std::invalid_argument("|(alpha_bar2, beta_bar2)| >= gamma implies rho >= 1");
}

void ReparamComponent::validate() const { check_unit_interval(rho, "rho"); }

void ReparamMixture::validate() const {
  if (components.empty()) throw std::invalid_argument("mixture needs at least one component");
  if (weights.size() != components.size() + 1)
    throw std::invalid_argument("reparametrized mixture needs m+1 weights");
  for (const auto& c : components) c.validate();
  check_simplex(weights, "reparametrized mixture");
}

void OriginalMixture::validate() const {
  if (components.empty()) throw std::invalid_argument("mixture needs at least one component");
  if (weights.size() != components.size())
    throw std::invalid_argument("original mixture needs one weight per component");
  for (const auto& c : components) c.validate();
  for (double w : weights)
    if (!(w > 0.0 && w < 1.0))
      throw std::invalid_argument("original mixture weights must lie in (0, 1)");
  double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (std::abs(sum - 1.0) > kSimplexTol)
    throw std::invalid_argument("original mixture weights sum to " + std::to_string(sum));
}

KatoJonesParams at_gamma_bar(const ReparamComponent& c) {
  return KatoJonesParams{c.mu, gamma_bar(c.rho, c.lambda), c.rho, c.lambda};
}

double mixture_density_original(Angle theta, const OriginalMixture& mix) {
  double total = 0.0;
  for (std::size_t k = 0; k < mix.size(); ++k)
    total += mix.weights[k] * kj_density(theta, mix.components[k]);
  return total;
}

double mixture_density_reparam(Angle theta, const ReparamMixture& mix) {
  const std::size_t m = mix.size();
  double total = mix.weights[m] * inv_two_pi;
  for (std::size_t k = 0; k < m; ++k) {
    const ReparamComponent& c = mix.components[k];
    total += mix.weights[k] * kj_density_raw(theta.radians(), c.mu.radians(),
                                             gamma_bar(c.rho, c.lambda.radians()), c.rho,
                                             c.lambda.radians());
  }
  return total;
}

double shape_density(Angle theta, const std::vector<ShapeParams>& comps,
                     const std::vector<double>& weights) {
  if (comps.size() != weights.size())
    throw std::invalid_argument("shape_density: one weight per component required");
  check_simplex(weights, "shape mixture");
  double total = 0.0;
  for (std::size_t k = 0; k < comps.size(); ++k) {
    const ShapeParams& s = comps[k];
    s.validate();
    if (s.gamma == 0.0) {
      total += weights[k] * inv_two_pi;
      continue;
    }
    const double g = s.gamma;
    const double dc = std::cos(theta.radians() - s.mu.radians());
    const double ds = std::sin(theta.radians() - s.mu.radians());
    const double num = g * dc - s.alpha_bar2;
    const double den = g * g + s.alpha_bar2 * s.alpha_bar2 + s.beta_bar2 * s.beta_bar2 -
                       2.0 * g * (s.alpha_bar2 * dc + s.beta_bar2 * ds);
    total += weights[k] * (1.0 + 2.0 * g * g * num / den) * inv_two_pi;
  }
  return total;
}

KatoJonesParams params_from_shape(const ShapeParams& s) {
  const double r = std::hypot(s.alpha_bar2, s.beta_bar2);
  if (r >= s.gamma)
    throw std::domain_error("params_from_shape: |(alpha_bar2, beta_bar2)| >= gamma");
  return KatoJonesParams{s.mu, s.gamma, r / s.gamma, Angle(std::atan2(s.beta_bar2, s.alpha_bar2))};
}

ShapeParams shape_from_params(const KatoJonesParams& p) {
  return ShapeParams{p.mu, p.gamma, p.rho * p.gamma * std::cos(p.lambda.radians()),
                     p.rho * p.gamma * std::sin(p.lambda.radians())};
}

ReparamMixture to_reparam(const OriginalMixture& mix) {
  mix.validate();
  const std::size_t m = mix.size();
  ReparamMixture out;
  out.components.reserve(m);
  out.weights.resize(m + 1);
  double used = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const KatoJonesParams& c = mix.components[k];
    out.components.push_back(ReparamComponent{c.mu, c.rho, c.lambda});
    out.weights[k] = mix.weights[k] * c.gamma / gamma_bar(c.rho, c.lambda);
    used += out.weights[k];
  }
  out.weights[m] = std::max(0.0, 1.0 - used);
  return out;
}

OriginalMixture recover_original(const ReparamMixture& mix) {
  mix.validate();
  const std::size_t m = mix.size();
  const double uniform = mix.weights[m];
  if (uniform >= 1.0)
    throw DegenerateMixtureError("pure uniform mixture: no components recoverable");
  OriginalMixture out;
  out.components.reserve(m);
  out.weights.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    const ReparamComponent& c = mix.components[k];
    const double pik = mix.weights[k] / (1.0 - uniform);
    const double gbar = gamma_bar(c.rho, c.lambda);
    out.weights[k] = pik;
    out.components.push_back(
        KatoJonesParams{c.mu, mix.weights[k] * gbar / pik, c.rho, c.lambda});
  }
  return out;
}

ComplexMoment kj_trig_moment(int p, const KatoJonesParams& comp) {
  if (p < 1) throw std::invalid_argument("trigonometric moment order must be positive");
  // gamma rho^{p-1} e^{i(p mu + (p-1) lambda)}; the rho^{p-1} factor makes
  // rho = 0 with p >= 2 exactly zero, no division involved.
  const double mag = comp.gamma * std::pow(comp.rho, p - 1);
  return std::polar(mag, p * comp.mu.radians() + (p - 1) * comp.lambda.radians());
}

ComplexMoment mixture_trig_moment(int p, const ReparamMixture& mix) {
  if (p < 1) throw std::invalid_argument("trigonometric moment order must be positive");
  ComplexMoment total{0.0, 0.0};
  for (std::size_t k = 0; k < mix.size(); ++k)
    total += mix.weights[k] * kj_trig_moment(p, at_gamma_bar(mix.components[k]));
  return total;
}

Angle kj_mode(const KatoJonesParams& comp) {
  if (comp.gamma == 0.0) throw NoUniqueModeError("uniform component has no unique mode");
  auto f = [&comp](double t) { return kj_density(Angle(t), comp); };
  const double step = two_pi / kModeGrid;
  double best_t = 0.0;
  double best_f = f(0.0);
  for (int i = 1; i < kModeGrid; ++i) {
    const double v = f(i * step);
    if (v > best_f) {
      best_f = v;
      best_t = i * step;
    }
  }
  auto [t, ft] = golden_max(f, best_t - step, best_t + step, 1e-10);
  return ft >= best_f ? Angle(t) : Angle(best_t);
}

namespace {

std::vector<std::size_t> mu_order(std::size_t m, auto mu_of) {
  std::vector<std::size_t> idx(m);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return mu_of(a) < mu_of(b); });
  return idx;
}

}  // namespace

ReparamMixture sorted_by_mu(const ReparamMixture& mix) {
  const std::size_t m = mix.size();
  const auto idx =
      mu_order(m, [&](std::size_t k) { return mix.components[k].mu.radians(); });
  ReparamMixture out;
  out.components.reserve(m);
  out.weights.resize(m + 1);
  for (std::size_t k = 0; k < m; ++k) {
    out.components.push_back(mix.components[idx[k]]);
    out.weights[k] = mix.weights[idx[k]];
  }
  out.weights[m] = mix.weights[m];
  return out;
}

OriginalMixture sorted_by_mu(const OriginalMixture& mix) {
  const std::size_t m = mix.size();
  const auto idx =
      mu_order(m, [&](std::size_t k) { return mix.components[k].mu.radians(); });
  OriginalMixture out;
  out.components.reserve(m);
  out.weights.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    out.components.push_back(mix.components[idx[k]]);
    out.weights[k] = mix.weights[idx[k]];
  }
  return out;
}

}  // namespace kjmix
