#pragma once

// Oracle-vs-closed-form and identity checks.  Each check compares an
// implemented closed form against the brute-force grid oracles, or tests
// one of the envelope identities through the discrete Legendre transform.
// The CLI `validate` subcommand runs everything here and reports a
// pass/fail table plus a CSV of maximum deviations.

#include <cmath>
#include <sstream>
#include <vector>

#include "llenv/envelope.hpp"
#include "llenv/functions.hpp"
#include "llenv/oracle.hpp"

namespace llenv {

struct CheckResult {
  std::string check;
  std::string function;
  std::string params;
  double max_dev = 0.0;
  double tol = 0.0;
  bool pass = false;
};

struct ValidationOptions {
  // Deliberate fault injection for testing the failure path: added to the
  // binary indicator's closed-form envelope inside the comparison.
  double perturb_binary_ll = 0.0;
  // Run only the identity checks (items 1-5).
  bool identities_only = false;
};

namespace vdetail {

inline std::string param_str(double lambda, double mu) {
  std::ostringstream os;
  os << "lambda=" << lambda << " mu=" << mu;
  return os.str();
}

inline std::string lambda_str(double lambda) {
  std::ostringstream os;
  os << "lambda=" << lambda;
  return os.str();
}

inline Grid1D sample_function(const SeparableFunction& f,
                              double step = kOracleStep) {
  return Grid1D::sample(kOracleLo, kOracleHi, step,
                        [&](double w) { return f.eval_1d(w); });
}

// Evenly spaced comparison points over [a, b].
inline std::vector<double> points_over(double a, double b, int n = 2201) {
  std::vector<double> pts;
  pts.reserve(n);
  for (int i = 0; i < n; ++i)
    pts.push_back(a + (b - a) * static_cast<double>(i) / (n - 1));
  return pts;
}

// The sup in the double envelope is attained at w* = a + kappa (x - a) for
// an anchor a of the function (kappa = lambda/(lambda-mu)), plus at most a
// mu-sized shift for linear tails.  The oracle only sees w inside its grid,
// so comparisons are restricted to the x-range whose maximizers stay in.
inline std::pair<double, double> oracle_valid_range(const SeparableFunction& f,
                                                    double lambda, double mu) {
  const double kappa = lambda / (lambda - mu);
  double a0 = 0.0, a1 = 0.0;
  if (f.name() == "binary") a1 = 1.0;
  if (auto* box = dynamic_cast<const BoxIndicator*>(&f)) {
    a0 = box->lo();
    a1 = box->hi();
  }
  const double margin = 0.15;
  const double shift = mu;  // linear-tail maximizer offset (beta <= 1 here)
  double lo = std::max(a0 + (kOracleLo + margin - a0) / kappa,
                       kOracleLo + margin + shift);
  double hi = std::min(a1 + (kOracleHi - margin - a1) / kappa,
                       kOracleHi - margin - shift);
  return {lo, hi};
}

inline const std::vector<std::pair<double, double>>& param_pairs() {
  static const std::vector<std::pair<double, double>> pairs = [] {
    std::vector<std::pair<double, double>> v;
    for (double lambda : {0.5, 1.0, 2.0})
      for (double frac : {0.1, 0.5, 0.9}) v.push_back({lambda, frac * lambda});
    return v;
  }();
  return pairs;
}

inline std::vector<FunctionPtr> all_functions() {
  return {std::make_shared<BinaryIndicator>(), std::make_shared<ScaledL0>(1.0),
          std::make_shared<BoxIndicator>(0.0, 1.0),
          std::make_shared<L1Norm>(1.0), std::make_shared<ZeroFunction>()};
}

}  // namespace vdetail

// Closed-form Moreau envelope against the grid oracle.
inline CheckResult check_moreau_vs_oracle(const SeparableFunction& f) {
  CheckResult r{"moreau_vs_oracle", f.name(), "lambda in 0.5|1|2", 0.0, 1e-4,
                false};
  const Grid1D g = vdetail::sample_function(f);
  for (double lambda : {0.5, 1.0, 2.0}) {
    const Grid1D m = grid_moreau(g, lambda);
    for (double x : vdetail::points_over(kOracleLo + 0.1, kOracleHi - 0.1))
      r.max_dev =
          std::max(r.max_dev, std::abs(f.moreau_1d(lambda, x) - m.value_at(x)));
  }
  r.pass = r.max_dev <= r.tol;
  return r;
}

// Closed-form Lasry-Lions envelope against the nested oracle.
inline CheckResult check_ll_vs_oracle(const SeparableFunction& f,
                                      double perturb = 0.0) {
  CheckResult r{"ll_vs_oracle", f.name(), "9 parameter pairs", 0.0, 1e-4, false};
  const Grid1D g = vdetail::sample_function(f);
  const bool is_binary = f.name() == "binary";
  for (const auto& [lambda, mu] : vdetail::param_pairs()) {
    const EnvelopeParams p(lambda, mu);
    const Grid1D env = grid_ll(g, lambda, mu);
    const auto [lo, hi] = vdetail::oracle_valid_range(f, lambda, mu);
    if (!(lo < hi)) continue;
    for (double x : vdetail::points_over(lo, hi)) {
      double closed = f.ll_value_1d(p, x);
      if (is_binary) closed += perturb;
      r.max_dev = std::max(r.max_dev, std::abs(closed - env.value_at(x)));
    }
  }
  r.pass = r.max_dev <= r.tol;
  return r;
}

// Closed-form envelope gradient against central differences of the oracle,
// taken between grid nodes so no interpolation enters.  The offset is kept
// small because the envelope is C^1 but not C^2: the truncation error of a
// central difference near a curvature break is (jump in f'') * step / 2.
inline CheckResult check_ll_grad_vs_oracle(const SeparableFunction& f) {
  CheckResult r{"ll_grad_vs_oracle_fd", f.name(), "9 parameter pairs", 0.0,
                1e-3, false};
  const Grid1D g = vdetail::sample_function(f);
  const std::size_t off = 5;
  for (const auto& [lambda, mu] : vdetail::param_pairs()) {
    const EnvelopeParams p(lambda, mu);
    const Grid1D env = grid_ll(g, lambda, mu);
    const auto [lo, hi] = vdetail::oracle_valid_range(f, lambda, mu);
    if (!(lo < hi)) continue;
    const std::size_t i_lo =
        static_cast<std::size_t>(std::ceil((lo - env.lo) / env.step)) + off;
    const std::size_t i_hi =
        static_cast<std::size_t>(std::floor((hi - env.lo) / env.step)) - off;
    const std::size_t stride = std::max<std::size_t>(1, (i_hi - i_lo) / 2200);
    for (std::size_t i = i_lo; i + off < env.size() && i <= i_hi; i += stride) {
      const double fd = (env.values[i + off] - env.values[i - off]) /
                        (2.0 * static_cast<double>(off) * env.step);
      r.max_dev =
          std::max(r.max_dev, std::abs(f.ll_grad_1d(p, env.x(i)) - fd));
    }
  }
  r.pass = r.max_dev <= r.tol;
  return r;
}

// Proximal hull against the brute-force sup of Moreau values, on points
// where the hull is finite.  The hull maximizers of these functions stay
// within a few units of the origin, so a central window suffices.
inline CheckResult check_hull_vs_oracle(const SeparableFunction& f) {
  CheckResult r{"hull_vs_oracle", f.name(), "lambda in 0.5|1|2", 0.0, 1e-4,
                false};
  const Grid1D g = vdetail::sample_function(f);
  for (double lambda : {0.5, 1.0, 2.0}) {
    const Grid1D hull = grid_sup_envelope(grid_moreau(g, lambda), lambda);
    for (double x : vdetail::points_over(-2.5, 3.5)) {
      const double closed = f.hull_value_1d(lambda, x);
      if (!(closed < kInfSentinel / 2)) continue;
      r.max_dev = std::max(r.max_dev, std::abs(closed - hull.value_at(x)));
    }
  }
  r.pass = r.max_dev <= r.tol;
  return r;
}

// prox_1d must attain a cost no worse than every grid candidate.
inline CheckResult check_prox_optimality(const SeparableFunction& f) {
  CheckResult r{"prox_optimality", f.name(), "gamma in 0.5|1|2", 0.0, 1e-9,
                false};
  const Grid1D g = vdetail::sample_function(f);
  for (double gamma : {0.5, 1.0, 2.0}) {
    const Grid1D m = grid_moreau(g, gamma);
    for (double x : vdetail::points_over(kOracleLo + 0.1, kOracleHi - 0.1, 551)) {
      const double w = f.prox_1d(gamma, x);
      const double cost = f.eval_1d(w) + (w - x) * (w - x) / (2.0 * gamma);
      r.max_dev = std::max(r.max_dev, cost - m.value_at(x));
    }
  }
  r.pass = r.max_dev <= r.tol;
  return r;
}

// Grid-level ordering h^lambda <= h^{lambda,mu} <= h^{lambda-mu} <= h.
inline CheckResult check_ordering_oracle(const SeparableFunction& f) {
  CheckResult r{"ordering_chain_oracle", f.name(), "9 parameter pairs", 0.0,
                1e-9, false};
  const Grid1D g = vdetail::sample_function(f);
  for (const auto& [lambda, mu] : vdetail::param_pairs()) {
    const Grid1D m_lam = grid_moreau(g, lambda);
    const Grid1D env = grid_sup_envelope(m_lam, mu);
    const Grid1D m_dm = grid_moreau(g, lambda - mu);
    const auto [lo, hi] = vdetail::oracle_valid_range(f, lambda, mu);
    if (!(lo < hi)) continue;
    for (double x : vdetail::points_over(lo, hi)) {
      const double a = m_lam.value_at(x);
      const double b = env.value_at(x);
      const double c = m_dm.value_at(x);
      const double top = f.eval_1d(x);
      r.max_dev = std::max({r.max_dev, a - b, b - c,
                            top < kInfSentinel / 2 ? c - top : 0.0});
    }
  }
  r.pass = r.max_dev <= r.tol;
  return r;
}

// Identity: the envelope equals a Moreau pass over the lambda-hull, and a
// mu-hull over the (lambda-mu)-Moreau envelope.
inline CheckResult check_identity1(const SeparableFunction& f, double lambda,
                                   double mu, double step = kOracleStep) {
  CheckResult r{"identity1_compositions", f.name(),
                vdetail::param_str(lambda, mu), 0.0, 1e-3, false};
  const EnvelopeParams p(lambda, mu);
  const Grid1D g = vdetail::sample_function(f, step);

  // (h^{lambda,lambda})^{lambda-mu}
  const Grid1D hull = grid_sup_envelope(grid_moreau(g, lambda), lambda);
  const Grid1D via_hull = grid_moreau(hull, lambda - mu);

  // (h^{lambda-mu})^{mu,mu}
  const Grid1D m_dm = grid_moreau(g, lambda - mu);
  const Grid1D via_moreau = grid_sup_envelope(grid_moreau(m_dm, mu), mu);

  for (double x : vdetail::points_over(-2.0, 3.0)) {
    const double expect = f.ll_value_1d(p, x);
    r.max_dev = std::max({r.max_dev, std::abs(via_hull.value_at(x) - expect),
                          std::abs(via_moreau.value_at(x) - expect)});
  }
  r.pass = r.max_dev <= r.tol;
  return r;
}

namespace vdetail {

// Slope resolution keeps the interpolation error across conjugate kinks
// (derivative jumps ~2) below the identity tolerances.
inline Grid1D default_slopes() { return Grid1D::axis(-20.0, 20.0, 1e-3); }

// Samples h + |.|^2 / (2 lambda) on the grid (sentinel-aware).
inline Grid1D sample_shifted(const SeparableFunction& f, double lambda) {
  return Grid1D::sample(kOracleLo, kOracleHi, kOracleStep, [&](double w) {
    const double v = f.eval_1d(w);
    return v >= kInfSentinel ? v : v + w * w / (2.0 * lambda);
  });
}

}  // namespace vdetail

// Identity: h^lambda = |.|^2/(2 lambda) - (h + |.|^2/(2 lambda))^*(./lambda).
inline CheckResult check_identity2(const SeparableFunction& f, double lambda) {
  CheckResult r{"identity2_conjugate", f.name(), vdetail::lambda_str(lambda),
                0.0, 2e-3, false};
  const Grid1D conj =
      grid_conjugate(vdetail::sample_shifted(f, lambda), vdetail::default_slopes());
  for (double x : vdetail::points_over(-3.9, 4.9)) {
    if (std::abs(x / lambda) > 19.0) continue;
    const double rhs = x * x / (2.0 * lambda) - conj.value_at(x / lambda);
    r.max_dev = std::max(r.max_dev, std::abs(rhs - f.moreau_1d(lambda, x)));
  }
  r.pass = r.max_dev <= r.tol;
  return r;
}

// Identity: h^{lambda,lambda} = (h + q/lambda)** - q/lambda, q = |.|^2/2.
inline CheckResult check_identity3(const SeparableFunction& f, double lambda) {
  CheckResult r{"identity3_biconjugate", f.name(), vdetail::lambda_str(lambda),
                0.0, 2e-3, false};
  const Grid1D conj =
      grid_conjugate(vdetail::sample_shifted(f, lambda), vdetail::default_slopes());
  const Grid1D biconj =
      grid_conjugate(conj, Grid1D::axis(kOracleLo, kOracleHi, kOracleStep));
  for (double x : vdetail::points_over(-2.0, 3.0)) {
    const double closed = f.hull_value_1d(lambda, x);
    if (!(closed < kInfSentinel / 2)) continue;
    const double rhs = biconj.value_at(x) - x * x / (2.0 * lambda);
    r.max_dev = std::max(r.max_dev, std::abs(rhs - closed));
  }
  r.pass = r.max_dev <= r.tol;
  return r;
}

// Identity: h^{lambda,mu} = q/(lambda-mu) - [(h+q/lambda)^*]^{1/c}(./(lambda-mu)).
inline CheckResult check_identity4(const SeparableFunction& f, double lambda,
                                   double mu) {
  CheckResult r{"identity4_conjugate_moreau", f.name(),
                vdetail::param_str(lambda, mu), 0.0, 2e-3, false};
  const EnvelopeParams p(lambda, mu);
  const double dm = lambda - mu;
  const Grid1D conj =
      grid_conjugate(vdetail::sample_shifted(f, lambda), vdetail::default_slopes());
  const Grid1D moreau_conj = grid_moreau(conj, 1.0 / p.c());
  for (double x : vdetail::points_over(-4.0, 5.0)) {
    if (std::abs(x / dm) > 18.0) continue;
    const double rhs = x * x / (2.0 * dm) - moreau_conj.value_at(x / dm);
    r.max_dev = std::max(r.max_dev, std::abs(rhs - f.ll_value_1d(p, x)));
  }
  r.pass = r.max_dev <= r.tol;
  return r;
}

// Identity: h^{lambda,mu} = [(h+q/lambda)**]^c((lambda/mu) .) - q/mu.
inline CheckResult check_identity5(const SeparableFunction& f, double lambda,
                                   double mu) {
  CheckResult r{"identity5_biconjugate_moreau", f.name(),
                vdetail::param_str(lambda, mu), 0.0, 2e-3, false};
  const EnvelopeParams p(lambda, mu);
  const double scale = lambda / mu;
  const Grid1D conj =
      grid_conjugate(vdetail::sample_shifted(f, lambda), vdetail::default_slopes());
  const Grid1D biconj =
      grid_conjugate(conj, Grid1D::axis(kOracleLo, kOracleHi, kOracleStep));
  const Grid1D moreau_biconj = grid_moreau(biconj, p.c());
  for (double x : vdetail::points_over(-4.0, 5.0)) {
    const double q = scale * x;
    if (q < kOracleLo + 1.5 || q > kOracleHi - 1.5) continue;
    const double rhs = moreau_biconj.value_at(q) - x * x / (2.0 * mu);
    r.max_dev = std::max(r.max_dev, std::abs(rhs - f.ll_value_1d(p, x)));
  }
  r.pass = r.max_dev <= r.tol;
  return r;
}

// The discrete Legendre transform must be convex along the slope axis.
inline CheckResult check_conjugate_convexity() {
  CheckResult r{"conjugate_convexity", "binary+l0", "slope grid", 0.0, 1e-9,
                false};
  for (const FunctionPtr& f :
       {FunctionPtr(std::make_shared<BinaryIndicator>()),
        FunctionPtr(std::make_shared<ScaledL0>(1.0))}) {
    const Grid1D conj = grid_conjugate(vdetail::sample_function(*f),
                                       vdetail::default_slopes());
    for (std::size_t i = 1; i + 1 < conj.size(); ++i) {
      const double second =
          conj.values[i - 1] - 2.0 * conj.values[i] + conj.values[i + 1];
      r.max_dev = std::max(r.max_dev, -second);
    }
  }
  r.pass = r.max_dev <= r.tol;
  return r;
}

// Double discrete conjugate of a sampled convex function recovers it on
// interior points.
inline CheckResult check_double_conjugate_roundtrip() {
  CheckResult r{"double_conjugate_roundtrip", "quadratic", "q = w^2/2", 0.0,
                1e-3, false};
  const Grid1D q = Grid1D::sample(kOracleLo, kOracleHi, kOracleStep,
                                  [](double w) { return 0.5 * w * w; });
  const Grid1D conj = grid_conjugate(q, vdetail::default_slopes());
  const Grid1D back =
      grid_conjugate(conj, Grid1D::axis(kOracleLo, kOracleHi, kOracleStep));
  for (double x : vdetail::points_over(-3.9, 4.9))
    r.max_dev = std::max(r.max_dev, std::abs(back.value_at(x) - 0.5 * x * x));
  r.pass = r.max_dev <= r.tol;
  return r;
}

inline std::vector<CheckResult> run_validation(const ValidationOptions& opt = {}) {
  std::vector<CheckResult> out;
  const auto funcs = vdetail::all_functions();

  if (!opt.identities_only) {
    for (const auto& f : funcs) {
      out.push_back(check_moreau_vs_oracle(*f));
      out.push_back(check_ll_vs_oracle(*f, opt.perturb_binary_ll));
      out.push_back(check_ll_grad_vs_oracle(*f));
      out.push_back(check_hull_vs_oracle(*f));
      out.push_back(check_prox_optimality(*f));
      out.push_back(check_ordering_oracle(*f));
    }
  }

  const std::vector<FunctionPtr> nonconvex = {
      std::make_shared<BinaryIndicator>(), std::make_shared<ScaledL0>(1.0)};
  for (const auto& f : nonconvex) {
    out.push_back(check_identity1(*f, 1.0, 0.5));
    out.push_back(check_identity1(*f, 2.0, 0.4));
    out.push_back(check_identity2(*f, 1.0));
    out.push_back(check_identity2(*f, 2.0));
    out.push_back(check_identity3(*f, 1.0));
    out.push_back(check_identity4(*f, 1.0, 0.5));
    out.push_back(check_identity5(*f, 1.0, 0.5));
  }
  out.push_back(check_conjugate_convexity());
  out.push_back(check_double_conjugate_roundtrip());
  return out;
}

}  // namespace llenv
