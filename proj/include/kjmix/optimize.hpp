#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "kjmix/mixture.hpp"

namespace kjmix {

struct OptimizeConfig {
  double tol = 1e-10;     // stop when successive objective values differ by less
  int max_iter = 500;
  double fd_step = 1e-6;  // central differences with h = fd_step * (1 + |x_i|)
};

struct MinimizeResult {
  std::vector<double> point;
  double value = 0.0;
  int iterations = 0;
};

struct NonFiniteObjectiveError : std::runtime_error {
  explicit NonFiniteObjectiveError(std::vector<double> at)
      : std::runtime_error("objective evaluated to a non-finite value"), point(std::move(at)) {}
  std::vector<double> point;
};

struct GradientMismatchError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Bijection between the feasible mixture parameter space and R^{4m}.
// Layout: [mu_1..mu_m, lambda_1..lambda_m, logit(rho_1)..logit(rho_m),
//          weight logits l_1..l_m] with the (m+1)-th logit pinned at 0.
// ---------------------------------------------------------------------------
std::vector<double> to_unconstrained(const ReparamMixture& mix);
ReparamMixture from_unconstrained(const std::vector<double>& coords, std::size_t m);

// Same transform restricted to one component: [mu, lambda, logit(rho)].
std::array<double, 3> component_to_unconstrained(const ReparamComponent& c);
ReparamComponent component_from_unconstrained(const std::array<double, 3>& coords);

inline double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

namespace detail {

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

template <class Eval>
std::vector<double> fd_gradient(Eval& eval, const std::vector<double>& x, double step) {
  std::vector<double> g(x.size());
  std::vector<double> p = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double h = step * (1.0 + std::abs(x[i]));
    p[i] = x[i] + h;
    const double fp = eval(p);
    p[i] = x[i] - h;
    const double fm = eval(p);
    p[i] = x[i];
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

// BFGS with backtracking Armijo line search. Accepted objective values are
// non-increasing; stops when the decrease between accepted values falls
// below tol, the line search stalls, or max_iter is reached.
template <class Eval, class Grad>
MinimizeResult bfgs_core(Eval& eval, Grad& grad, std::vector<double> x,
                         const OptimizeConfig& cfg) {
  const std::size_t n = x.size();
  double fx = eval(x);
  std::vector<double> g = grad(x);
  std::vector<double> hess_inv(n * n, 0.0);  // inverse Hessian approximation
  for (std::size_t i = 0; i < n; ++i) hess_inv[i * n + i] = 1.0;

  std::vector<double> d(n), trial(n), gn(n), s(n), y(n), hy(n);
  int iter = 0;
  while (iter < cfg.max_iter) {
    ++iter;
    for (std::size_t i = 0; i < n; ++i) {
      double v = 0.0;
      for (std::size_t j = 0; j < n; ++j) v += hess_inv[i * n + j] * g[j];
      d[i] = -v;
    }
    double gtd = dot(g, d);
    if (!std::isfinite(gtd) || gtd >= 0.0) {
      // reset to steepest descent
      std::fill(hess_inv.begin(), hess_inv.end(), 0.0);
      for (std::size_t i = 0; i < n; ++i) hess_inv[i * n + i] = 1.0;
      for (std::size_t i = 0; i < n; ++i) d[i] = -g[i];
      gtd = -dot(g, g);
    }
    if (gtd == 0.0) break;  // stationary

    double t = 1.0;
    double fn = fx;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = x[i] + t * d[i];
      fn = eval(trial);
      if (fn <= fx + 1e-4 * t * gtd) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;

    gn = grad(trial);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = trial[i] - x[i];
      y[i] = gn[i] - g[i];
    }
    const double sy = dot(s, y);
    if (sy > 1e-12 * norm2(s) * norm2(y)) {
      // H <- (I - r s y^T) H (I - r y s^T) + r s s^T, r = 1/sy
      const double r = 1.0 / sy;
      for (std::size_t i = 0; i < n; ++i) {
        double v = 0.0;
        for (std::size_t j = 0; j < n; ++j) v += hess_inv[i * n + j] * y[j];
        hy[i] = v;
      }
      const double yhy = dot(y, hy);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          hess_inv[i * n + j] += r * ((1.0 + r * yhy) * s[i] * s[j] - hy[i] * s[j] - s[i] * hy[j]);
    }

    const double drop = fx - fn;
    x = trial;
    fx = fn;
    g = gn;
    if (drop < cfg.tol) break;
  }
  return MinimizeResult{std::move(x), fx, iter};
}

}  // namespace detail

/// Quasi-Newton minimization with central-difference gradients.
/// Throws NonFiniteObjectiveError (with the offending point) if the objective
/// evaluates to NaN or infinity anywhere.
template <class F>
MinimizeResult minimize(F&& objective, std::vector<double> init, const OptimizeConfig& cfg = {}) {
  auto eval = [&objective](const std::vector<double>& p) {
    const double v = objective(p);
    if (!std::isfinite(v)) throw NonFiniteObjectiveError(p);
    return v;
  };
  auto grad = [&eval, &cfg](const std::vector<double>& p) {
    return detail::fd_gradient(eval, p, cfg.fd_step);
  };
  return detail::bfgs_core(eval, grad, std::move(init), cfg);
}

/// As minimize, with a user-supplied analytic gradient. The gradient is
/// validated against central differences at the initial point; a relative
/// disagreement above 1e-4 throws GradientMismatchError.
template <class F, class G>
MinimizeResult minimize_with_gradient(F&& objective, G&& gradient, std::vector<double> init,
                                      const OptimizeConfig& cfg = {}) {
  auto eval = [&objective](const std::vector<double>& p) {
    const double v = objective(p);
    if (!std::isfinite(v)) throw NonFiniteObjectiveError(p);
    return v;
  };
  auto grad = [&gradient](const std::vector<double>& p) { return gradient(p); };

  const std::vector<double> ga = grad(init);
  const std::vector<double> gf = detail::fd_gradient(eval, init, cfg.fd_step);
  double diff = 0.0, scale = 1.0;
  for (std::size_t i = 0; i < init.size(); ++i) {
    diff += (ga[i] - gf[i]) * (ga[i] - gf[i]);
    scale += gf[i] * gf[i];
  }
  if (std::sqrt(diff) > 1e-4 * std::sqrt(scale))
    throw GradientMismatchError("analytic gradient disagrees with central differences");

  return detail::bfgs_core(eval, grad, std::move(init), cfg);
}

}  // namespace kjmix
