#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "kjmix/angle.hpp"

namespace kjmix {

using ComplexMoment = std::complex<double>;

/// Fitted concentrations are kept strictly below 1 to stay away from the
/// wrapped-Cauchy singularity at rho = 1.
inline constexpr double rho_max = 1.0 - 1e-9;

struct NoUniqueModeError : std::domain_error {
  using std::domain_error::domain_error;
};

struct DegenerateMixtureError : std::domain_error {
  using std::domain_error::domain_error;
};

/// Upper bound of the feasible gamma range for given (rho, lambda):
/// (1 - rho^2) / (2 (1 - rho cos lambda)). Continuous through rho = 0,
/// where it equals 1/2.
double gamma_bar(double rho, double lambda);
inline double gamma_bar(double rho, Angle lambda) { return gamma_bar(rho, lambda.radians()); }

/// One four-parameter component: location mu, concentration gamma,
/// and the second-moment shape controls (rho, lambda).
struct KatoJonesParams {
  Angle mu;
  double gamma = 0.0;
  double rho = 0.0;
  Angle lambda;

  /// Throws std::invalid_argument unless gamma, rho lie in [0, 1) and
  /// (rho cos lambda - gamma)^2 + (rho sin lambda)^2 <= (1 - gamma)^2.
  void validate() const;
};

/// Location/concentration plus circular skewness (beta_bar2) and
/// kurtosis (alpha_bar2), with alpha_bar2 = rho gamma cos lambda and
/// beta_bar2 = rho gamma sin lambda.
struct ShapeParams {
  Angle mu;
  double gamma = 0.0;
  double alpha_bar2 = 0.0;
  double beta_bar2 = 0.0;

  void validate() const;
};

/// Component of the identifiable parametrization; gamma is implicit,
/// pinned at gamma_bar(rho, lambda).
struct ReparamComponent {
  Angle mu;
  double rho = 0.0;
  Angle lambda;

  void validate() const;
};

/// m components plus simplex weights pi'_1..pi'_{m+1}; the last weight is
/// the uniform share.
struct ReparamMixture {
  std::vector<ReparamComponent> components;
  std::vector<double> weights;

  std::size_t size() const { return components.size(); }
  double uniform_weight() const { return weights.back(); }
  void validate() const;
};

/// m components with explicit per-component gamma and weights pi_1..pi_m.
struct OriginalMixture {
  std::vector<KatoJonesParams> components;
  std::vector<double> weights;

  std::size_t size() const { return components.size(); }
  void validate() const;
};

// Core density, on raw radians; denominator is bounded below by (1-rho)^2 > 0.
inline double kj_density_raw(double theta, double mu, double gamma, double rho, double lambda) {
  const double num = std::cos(theta - mu) - rho * std::cos(lambda);
  const double den = 1.0 + rho * rho - 2.0 * rho * std::cos(theta - mu - lambda);
  return (1.0 + 2.0 * gamma * num / den) * inv_two_pi;
}

inline double kj_density(Angle theta, const KatoJonesParams& p) {
  return kj_density_raw(theta.radians(), p.mu.radians(), p.gamma, p.rho, p.lambda.radians());
}

/// The component pinned at its maximal concentration gamma_bar(rho, lambda).
KatoJonesParams at_gamma_bar(const ReparamComponent& c);

double mixture_density_original(Angle theta, const OriginalMixture& mix);
double mixture_density_reparam(Angle theta, const ReparamMixture& mix);

/// Mixture density in the shape parametrization; comps and weights must have
/// equal size and the weights must lie on the simplex.
double shape_density(Angle theta, const std::vector<ShapeParams>& comps,
                     const std::vector<double>& weights);

/// rho = |(alpha_bar2, beta_bar2)| / gamma, lambda = atan2(beta_bar2, alpha_bar2).
/// Throws std::domain_error when |(alpha_bar2, beta_bar2)| >= gamma (rho >= 1).
KatoJonesParams params_from_shape(const ShapeParams& s);
ShapeParams shape_from_params(const KatoJonesParams& p);

/// pi'_k = pi_k gamma_k / gamma_bar_k, uniform share = 1 - sum; densities are
/// pointwise equal.
ReparamMixture to_reparam(const OriginalMixture& mix);

/// pi_k = pi'_k / (1 - pi'_{m+1}), gamma_k = pi'_k gamma_bar_k / pi_k.
/// Throws DegenerateMixtureError when the uniform share is 1.
OriginalMixture recover_original(const ReparamMixture& mix);

/// p-th trigonometric moment of one component:
/// gamma rho^{p-1} e^{i (p mu + (p-1) lambda)}. rho = 0 with p >= 2 gives 0.
ComplexMoment kj_trig_moment(int p, const KatoJonesParams& comp);

/// Weighted sum of component moments; the uniform share contributes nothing.
ComplexMoment mixture_trig_moment(int p, const ReparamMixture& mix);

/// Density argmax: 8192-point grid scan refined by golden section to 1e-10.
/// Throws NoUniqueModeError when gamma = 0.
Angle kj_mode(const KatoJonesParams& comp);

/// Label canonicalization: components sorted by ascending mu (weights follow,
/// the uniform share stays last).
ReparamMixture sorted_by_mu(const ReparamMixture& mix);
OriginalMixture sorted_by_mu(const OriginalMixture& mix);

// Weight helpers shared by the mixture types.
void check_simplex(const std::vector<double>& weights, const char* what);

}  // namespace kjmix
