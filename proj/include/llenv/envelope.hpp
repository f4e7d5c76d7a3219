#pragma once

// Core types of the double-envelope calculus: envelope parameters, the
// separable nonsmooth function abstraction, and the generic vector-level
// envelope/gradient/bound operations built on a function's 1-D surface.

#include <Eigen/Core>

#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

#include "llenv/oracle.hpp"

namespace llenv {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Parameters (lambda, mu) of the Lasry-Lions envelope h^{lambda,mu},
// restricted to 0 < mu < lambda.  The degenerate case mu == lambda is the
// proximal hull and has its own type below, since the gradient formulas
// blow up as 1/(lambda - mu).
struct EnvelopeParams {
  double lambda;
  double mu;

  EnvelopeParams(double lambda_, double mu_) : lambda(lambda_), mu(mu_) {
    if (!(mu > 0.0) || !(mu < lambda))
      throw std::invalid_argument(
          "EnvelopeParams: need 0 < mu < lambda, got lambda=" +
          std::to_string(lambda_) + " mu=" + std::to_string(mu_));
  }

  // c = lambda (lambda - mu) / mu, the curvature constant of the conjugate
  // representation.
  double c() const { return lambda * (lambda - mu) / mu; }
};

struct ProximalHullParams {
  double lambda;

  explicit ProximalHullParams(double lambda_) : lambda(lambda_) {
    if (!(lambda > 0.0))
      throw std::invalid_argument("ProximalHullParams: lambda must be positive");
  }
};

// Known regularity moduli of a function: the prox-boundedness threshold
// gamma (envelopes only exist below it), a hypoconvexity modulus sigma
// (h - sigma/2 |.|^2 convex) and a smoothness modulus L when available.
struct RegularityInfo {
  double prox_bound_gamma = kInf;
  std::optional<double> hypoconvexity_sigma;
  std::optional<double> smoothness_L;

  void check() const {
    if (!(prox_bound_gamma > 0.0))
      throw std::invalid_argument("RegularityInfo: gamma must be positive");
    if (smoothness_L && *smoothness_L < 0.0)
      throw std::invalid_argument("RegularityInfo: L must be nonnegative");
    if (hypoconvexity_sigma && smoothness_L &&
        *hypoconvexity_sigma > *smoothness_L)
      throw std::invalid_argument("RegularityInfo: sigma must not exceed L");
  }
};

// A separable nonsmooth function h(x) = sum_i h1(x_i), described by its 1-D
// surface.  Implementations provide closed forms for the 1-D value, prox,
// Moreau envelope, Lasry-Lions envelope and its derivative; the vector
// operations below lift them coordinatewise.
class SeparableFunction {
 public:
  virtual ~SeparableFunction() = default;

  virtual std::string name() const = 0;
  virtual const RegularityInfo& regularity() const = 0;

  virtual double eval_1d(double x) const = 0;
  virtual double prox_1d(double gamma, double x) const = 0;
  virtual double moreau_1d(double lambda, double x) const {
    // Exact whenever prox_1d is exact.
    const double w = prox_1d(lambda, x);
    const double d = w - x;
    return eval_1d(w) + d * d / (2.0 * lambda);
  }
  virtual double ll_value_1d(const EnvelopeParams& p, double x) const = 0;
  virtual double ll_grad_1d(const EnvelopeParams& p, double x) const = 0;

  // Proximal hull h^{lambda,lambda}.  Default: brute-force sup of the
  // Moreau envelope over the validation grid, for functions without a
  // closed form.
  virtual double hull_value_1d(double lambda, double x) const {
    double best = -kInf;
    const double inv = 1.0 / (2.0 * lambda);
    const std::size_t n = Grid1D::point_count(kOracleLo, kOracleHi, kOracleStep);
    for (std::size_t j = 0; j < n; ++j) {
      const double w = kOracleLo + static_cast<double>(j) * kOracleStep;
      const double d = w - x;
      const double v = moreau_1d(lambda, w) - d * d * inv;
      if (v > best) best = v;
    }
    return best;
  }

  double eval(const Vector& x) const {
    double s = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) s += eval_1d(x[i]);
    return s;
  }

  Vector prox(double gamma, const Vector& x) const {
    Vector out(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) out[i] = prox_1d(gamma, x[i]);
    return out;
  }
};

using FunctionPtr = std::shared_ptr<const SeparableFunction>;

namespace detail {

inline void check_moreau_params(const SeparableFunction& f, double lambda,
                                const char* op) {
  if (!(lambda > 0.0) || !(lambda < f.regularity().prox_bound_gamma))
    throw std::invalid_argument(std::string(op) +
                                ": lambda out of range (0, gamma)");
}

inline void check_ll_params(const SeparableFunction& f,
                            const EnvelopeParams& p, const char* op) {
  if (!(p.lambda < f.regularity().prox_bound_gamma))
    throw std::invalid_argument(std::string(op) + ": lambda must be < gamma");
}

inline void check_finite(const Vector& x, const char* op) {
  if (!x.allFinite())
    throw std::invalid_argument(std::string(op) + ": x must be finite");
}

}  // namespace detail

// Moreau envelope h^lambda(x) = sum_i inf_w { h1(w) + (w - x_i)^2/(2 lambda) }.
inline double moreau_value(const SeparableFunction& f, double lambda,
                           const Vector& x) {
  detail::check_moreau_params(f, lambda, "moreau_value");
  detail::check_finite(x, "moreau_value");
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) s += f.moreau_1d(lambda, x[i]);
  return s;
}

// Lasry-Lions envelope h^{lambda,mu}(x).
inline double ll_value(const SeparableFunction& f, const EnvelopeParams& p,
                       const Vector& x) {
  detail::check_ll_params(f, p, "ll_value");
  detail::check_finite(x, "ll_value");
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) s += f.ll_value_1d(p, x[i]);
  return s;
}

// Gradient of the Lasry-Lions envelope, elementwise.
inline Vector ll_gradient(const SeparableFunction& f, const EnvelopeParams& p,
                          const Vector& x) {
  detail::check_ll_params(f, p, "ll_gradient");
  detail::check_finite(x, "ll_gradient");
  Vector g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) g[i] = f.ll_grad_1d(p, x[i]);
  return g;
}

// Proximal hull h^{lambda,lambda}(x).
inline double proximal_hull_value(const SeparableFunction& f,
                                  const ProximalHullParams& p,
                                  const Vector& x) {
  detail::check_moreau_params(f, p.lambda, "proximal_hull_value");
  detail::check_finite(x, "proximal_hull_value");
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    s += f.hull_value_1d(p.lambda, x[i]);
  return s;
}

// Smallest Lipschitz bound on grad h^{lambda,mu} justified by the known
// regularity of h:
//   generic:            max(1/mu, 1/(lambda-mu))
//   sigma-hypoconvex:   max(|sigma|/(1+(lambda-mu) sigma), 1/(lambda-mu))
//   L-smooth:           L/(1+(lambda-mu) L)
inline double ll_lipschitz_bound(const SeparableFunction& f,
                                 const EnvelopeParams& p) {
  detail::check_ll_params(f, p, "ll_lipschitz_bound");
  const RegularityInfo& r = f.regularity();
  const double dm = p.lambda - p.mu;
  double bound = std::max(1.0 / p.mu, 1.0 / dm);
  if (r.hypoconvexity_sigma) {
    const double s = *r.hypoconvexity_sigma;
    const double denom = 1.0 + dm * s;
    if (denom > 0.0)
      bound = std::min(bound, std::max(std::abs(s) / denom, 1.0 / dm));
  }
  if (r.smoothness_L) {
    const double L = *r.smoothness_L;
    bound = std::min(bound, L / (1.0 + dm * L));
  }
  return bound;
}

// Curvature bracket (sigma_env, -sigma_{-env}) of the envelope: a lower and
// an upper bound on its second-order behaviour, tightened by the known
// moduli of h.
inline std::pair<double, double> curvature_bounds(const SeparableFunction& f,
                                                  const EnvelopeParams& p) {
  detail::check_ll_params(f, p, "curvature_bounds");
  const RegularityInfo& r = f.regularity();
  const double dm = p.lambda - p.mu;
  double lower = -1.0 / p.mu;
  double upper = 1.0 / dm;
  if (r.hypoconvexity_sigma) {
    const double s = *r.hypoconvexity_sigma;
    const double denom = 1.0 + dm * s;
    if (denom > 0.0) lower = std::max(lower, s / denom);
  }
  if (r.smoothness_L) {
    const double L = *r.smoothness_L;
    const double env_L = L / (1.0 + dm * L);
    upper = std::min(upper, env_L);
    lower = std::max(lower, -env_L);
  }
  if (lower > upper) lower = upper;
  return {lower, upper};
}

}  // namespace llenv
