#pragma once

// Concrete separable nonsmooth terms.  Each provides closed forms for the
// 1-D prox, Moreau envelope, Lasry-Lions envelope and its derivative; the
// envelopes were derived by solving the inner sup over each quadratic piece
// and are certified against the grid oracles in the test suite.

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

#include "llenv/envelope.hpp"

namespace llenv {

// Indicator of {0, 1} per coordinate.
//
// Moreau: min(x^2, (x-1)^2) / (2 lambda).
// Lasry-Lions, with tau = (lambda - mu) / (2 lambda) in (0, 1/2):
//   x <= tau:        x^2 / (2 (lambda - mu))
//   x >= 1 - tau:    (x-1)^2 / (2 (lambda - mu))
//   otherwise:       1/(8 lambda) - (x - 1/2)^2 / (2 mu)
// The pieces meet with matching value and slope at tau and 1 - tau.
class BinaryIndicator final : public SeparableFunction {
 public:
  std::string name() const override { return "binary"; }
  const RegularityInfo& regularity() const override { return reg_; }

  double eval_1d(double x) const override {
    return (x == 0.0 || x == 1.0) ? 0.0 : kInf;
  }

  // Nearest point of {0,1}; the tie x = 0.5 maps to 1, matching the
  // rounding rule used when projecting estimates.
  double prox_1d(double gamma, double x) const override {
    if (!(gamma > 0.0)) throw std::invalid_argument("prox_1d: gamma <= 0");
    return x < 0.5 ? 0.0 : 1.0;
  }

  double moreau_1d(double lambda, double x) const override {
    const double a = x * x;
    const double b = (x - 1.0) * (x - 1.0);
    return std::min(a, b) / (2.0 * lambda);
  }

  double ll_value_1d(const EnvelopeParams& p, double x) const override {
    const double dm = p.lambda - p.mu;
    const double tau = dm / (2.0 * p.lambda);
    if (x <= tau) return x * x / (2.0 * dm);
    if (x >= 1.0 - tau) return (x - 1.0) * (x - 1.0) / (2.0 * dm);
    const double d = x - 0.5;
    return 1.0 / (8.0 * p.lambda) - d * d / (2.0 * p.mu);
  }

  double ll_grad_1d(const EnvelopeParams& p, double x) const override {
    const double dm = p.lambda - p.mu;
    const double tau = dm / (2.0 * p.lambda);
    if (x <= tau) return x / dm;
    if (x >= 1.0 - tau) return (x - 1.0) / dm;
    return -(x - 0.5) / p.mu;
  }

  // Hull: x (1 - x) / (2 lambda) on [0, 1], +inf outside (the hull domain
  // is the convex hull of {0,1}).
  double hull_value_1d(double lambda, double x) const override {
    if (x < 0.0 || x > 1.0) return kInf;
    return x * (1.0 - x) / (2.0 * lambda);
  }

 private:
  RegularityInfo reg_{};
};

// Scaled counting norm beta * ||x||_0.
//
// Moreau: min(x^2 / (2 lambda), beta); prox is hard thresholding at
// r = sqrt(2 lambda beta).  Lasry-Lions, writing r = sqrt(2 lambda beta):
//   |x| <= r (lambda-mu)/lambda:   x^2 / (2 (lambda - mu))
//   |x| in the transition band:    beta - (r - |x|)^2 / (2 mu)
//   |x| >= r:                      beta
class ScaledL0 final : public SeparableFunction {
 public:
  explicit ScaledL0(double beta) : beta_(beta) {
    if (beta < 0.0) throw std::invalid_argument("ScaledL0: beta must be >= 0");
    if (beta == 0.0) {
      // Degenerates to the zero function.
      reg_.hypoconvexity_sigma = 0.0;
      reg_.smoothness_L = 0.0;
    }
  }

  std::string name() const override {
    std::ostringstream os;
    os << "l0:beta=" << beta_;
    return os.str();
  }
  const RegularityInfo& regularity() const override { return reg_; }
  double beta() const { return beta_; }

  double eval_1d(double x) const override { return x == 0.0 ? 0.0 : beta_; }

  // Hard threshold; the tie x^2 = 2 gamma beta keeps the sparser answer 0.
  double prox_1d(double gamma, double x) const override {
    if (!(gamma > 0.0)) throw std::invalid_argument("prox_1d: gamma <= 0");
    return x * x <= 2.0 * gamma * beta_ ? 0.0 : x;
  }

  double moreau_1d(double lambda, double x) const override {
    return std::min(x * x / (2.0 * lambda), beta_);
  }

  double ll_value_1d(const EnvelopeParams& p, double x) const override {
    const double dm = p.lambda - p.mu;
    const double r = std::sqrt(2.0 * p.lambda * beta_);
    const double ax = std::abs(x);
    if (ax >= r) return beta_;
    if (ax <= r * dm / p.lambda) return ax * ax / (2.0 * dm);
    const double d = r - ax;
    return beta_ - d * d / (2.0 * p.mu);
  }

  double ll_grad_1d(const EnvelopeParams& p, double x) const override {
    const double dm = p.lambda - p.mu;
    const double r = std::sqrt(2.0 * p.lambda * beta_);
    const double ax = std::abs(x);
    double g;
    if (ax >= r)
      g = 0.0;
    else if (ax <= r * dm / p.lambda)
      g = ax / dm;
    else
      g = (r - ax) / p.mu;
    return x < 0.0 ? -g : g;
  }

  double hull_value_1d(double lambda, double x) const override {
    const double r = std::sqrt(2.0 * lambda * beta_);
    const double ax = std::abs(x);
    if (ax >= r) return beta_;
    const double d = r - ax;
    return beta_ - d * d / (2.0 * lambda);
  }

 private:
  double beta_;
  RegularityInfo reg_{};
};

// Indicator of the interval [lo, hi].  Convex, so the Lasry-Lions envelope
// reduces to the Moreau envelope at lambda - mu.
class BoxIndicator final : public SeparableFunction {
 public:
  BoxIndicator(double lo = 0.0, double hi = 1.0) : lo_(lo), hi_(hi) {
    if (!(lo < hi)) throw std::invalid_argument("BoxIndicator: need lo < hi");
    reg_.hypoconvexity_sigma = 0.0;
  }

  std::string name() const override {
    std::ostringstream os;
    os << "box:" << lo_ << "," << hi_;
    return os.str();
  }
  const RegularityInfo& regularity() const override { return reg_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }

  double eval_1d(double x) const override {
    return (x >= lo_ && x <= hi_) ? 0.0 : kInf;
  }

  double prox_1d(double gamma, double x) const override {
    if (!(gamma > 0.0)) throw std::invalid_argument("prox_1d: gamma <= 0");
    return std::clamp(x, lo_, hi_);
  }

  double moreau_1d(double lambda, double x) const override {
    const double d = x - std::clamp(x, lo_, hi_);
    return d * d / (2.0 * lambda);
  }

  double ll_value_1d(const EnvelopeParams& p, double x) const override {
    return moreau_1d(p.lambda - p.mu, x);
  }

  double ll_grad_1d(const EnvelopeParams& p, double x) const override {
    return (x - std::clamp(x, lo_, hi_)) / (p.lambda - p.mu);
  }

  // A convex lsc function is its own proximal hull.
  double hull_value_1d(double /*lambda*/, double x) const override {
    return eval_1d(x);
  }

 private:
  double lo_, hi_;
  RegularityInfo reg_{};
};

// Weighted absolute value beta * |x|.  Convex; envelopes are Huber.
class L1Norm final : public SeparableFunction {
 public:
  explicit L1Norm(double beta) : beta_(beta) {
    if (beta < 0.0) throw std::invalid_argument("L1Norm: beta must be >= 0");
    reg_.hypoconvexity_sigma = 0.0;
  }

  std::string name() const override {
    std::ostringstream os;
    os << "l1:beta=" << beta_;
    return os.str();
  }
  const RegularityInfo& regularity() const override { return reg_; }
  double beta() const { return beta_; }

  double eval_1d(double x) const override { return beta_ * std::abs(x); }

  double prox_1d(double gamma, double x) const override {
    if (!(gamma > 0.0)) throw std::invalid_argument("prox_1d: gamma <= 0");
    const double t = gamma * beta_;
    if (x > t) return x - t;
    if (x < -t) return x + t;
    return 0.0;
  }

  double moreau_1d(double lambda, double x) const override {
    const double ax = std::abs(x);
    if (ax <= lambda * beta_) return x * x / (2.0 * lambda);
    return beta_ * ax - lambda * beta_ * beta_ / 2.0;
  }

  double ll_value_1d(const EnvelopeParams& p, double x) const override {
    return moreau_1d(p.lambda - p.mu, x);
  }

  double ll_grad_1d(const EnvelopeParams& p, double x) const override {
    const double dm = p.lambda - p.mu;
    if (std::abs(x) <= dm * beta_) return x / dm;
    return x > 0.0 ? beta_ : -beta_;
  }

  double hull_value_1d(double /*lambda*/, double x) const override {
    return eval_1d(x);
  }

 private:
  double beta_;
  RegularityInfo reg_{};
};

// The zero function; prox is the identity and all envelopes vanish.
class ZeroFunction final : public SeparableFunction {
 public:
  ZeroFunction() {
    reg_.hypoconvexity_sigma = 0.0;
    reg_.smoothness_L = 0.0;
  }

  std::string name() const override { return "zero"; }
  const RegularityInfo& regularity() const override { return reg_; }

  double eval_1d(double) const override { return 0.0; }
  double prox_1d(double gamma, double x) const override {
    if (!(gamma > 0.0)) throw std::invalid_argument("prox_1d: gamma <= 0");
    return x;
  }
  double moreau_1d(double, double) const override { return 0.0; }
  double ll_value_1d(const EnvelopeParams&, double) const override {
    return 0.0;
  }
  double ll_grad_1d(const EnvelopeParams&, double) const override {
    return 0.0;
  }
  double hull_value_1d(double, double) const override { return 0.0; }

 private:
  RegularityInfo reg_{};
};

// Builds a function from a descriptor: "binary", "l0:beta=<v>",
// "box:<lo>,<hi>", "l1:beta=<v>" or "zero".
inline FunctionPtr make_function(const std::string& descriptor) {
  const auto colon = descriptor.find(':');
  const std::string head = descriptor.substr(0, colon);
  const std::string args =
      colon == std::string::npos ? "" : descriptor.substr(colon + 1);

  auto parse_beta = [&](const std::string& s) {
    if (s.empty()) return 1.0;
    const std::string prefix = "beta=";
    if (s.rfind(prefix, 0) != 0)
      throw std::invalid_argument("function descriptor: expected beta=<v> in '" +
                                  s + "'");
    return std::stod(s.substr(prefix.size()));
  };

  if (head == "binary") return std::make_shared<BinaryIndicator>();
  if (head == "zero") return std::make_shared<ZeroFunction>();
  if (head == "l0") return std::make_shared<ScaledL0>(parse_beta(args));
  if (head == "l1") return std::make_shared<L1Norm>(parse_beta(args));
  if (head == "box") {
    double lo = 0.0, hi = 1.0;
    if (!args.empty()) {
      const auto comma = args.find(',');
      if (comma == std::string::npos)
        throw std::invalid_argument("function descriptor: box needs lo,hi");
      lo = std::stod(args.substr(0, comma));
      hi = std::stod(args.substr(comma + 1));
    }
    return std::make_shared<BoxIndicator>(lo, hi);
  }
  throw std::invalid_argument(
      "unknown function descriptor '" + descriptor +
      "'; valid: binary, l0:beta=<v>, box:<lo>,<hi>, l1:beta=<v>, zero");
}

}  // namespace llenv
