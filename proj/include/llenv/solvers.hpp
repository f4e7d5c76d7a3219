#pragma once

// Solvers for composite least-squares problems
//   phi(x) = ||y - H x||^2 + h(x)
// (note: no 1/2 on the fit term):
//   - a homotopy method running gradient descent on successively sharper
//     Lasry-Lions smoothings of h,
//   - ADMM with the prox of h (convex or not),
//   - plain minimum-norm least squares.

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include <chrono>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "llenv/envelope.hpp"

namespace llenv {

struct CompositeProblem {
  Matrix H;
  Vector y;
  FunctionPtr h;

  CompositeProblem(Matrix H_, Vector y_, FunctionPtr h_)
      : H(std::move(H_)), y(std::move(y_)), h(std::move(h_)) {
    if (H.rows() == 0 || H.cols() == 0)
      throw std::invalid_argument("CompositeProblem: H must be nonempty");
    if (y.size() != H.rows())
      throw std::invalid_argument("CompositeProblem: y length must match rows of H");
    if (!h) throw std::invalid_argument("CompositeProblem: missing function");
  }

  double objective(const Vector& x) const {
    return (y - H * x).squaredNorm() + h->eval(x);
  }
};

// ||H||^2 (squared spectral norm) by power iteration on the Gram matrix,
// deterministic start.  Relative accuracy ~1e-6 on the dominant eigenvalue.
inline double spectral_norm_sq(const Matrix& H, int max_iters = 10000,
                               double tol = 1e-9) {
  if (H.rows() == 0 || H.cols() == 0)
    throw std::invalid_argument("spectral_norm_sq: empty matrix");
  const bool tall = H.rows() >= H.cols();
  const Eigen::Index n = tall ? H.cols() : H.rows();
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i)
    v[i] = 1.0 + 1e-3 * static_cast<double>(i % 7);
  v.normalize();
  double eig = 0.0;
  for (int it = 0; it < max_iters; ++it) {
    Vector w = tall ? Vector(H.transpose() * (H * v)) : Vector(H * (H.transpose() * v));
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    w /= norm;
    const double next = norm;
    const bool done = std::abs(next - eig) <= tol * std::max(1.0, next);
    eig = next;
    v = w;
    if (done) return eig;
  }
  throw std::runtime_error("spectral_norm_sq: power iteration did not converge");
}

// Minimum-norm least-squares solution of ||y - H x||^2 via a rank-revealing
// complete orthogonal decomposition.
inline Vector solve_ls(const Matrix& H, const Vector& y) {
  if (H.rows() == 0 || H.cols() == 0)
    throw std::invalid_argument("solve_ls: empty matrix");
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(H);
  return cod.solve(y);
}

inline Vector solve_ls(const CompositeProblem& prob) {
  return solve_ls(prob.H, prob.y);
}

struct SolverResult {
  Vector x;
  std::vector<double> objective_trace;
  std::vector<double> grad_norm_trace;
  int outer_iterations = 0;
  bool converged = false;
  double wall_time = 0.0;
};

// Smoothing schedule: stage k uses lambda0 * lambda_decay^k and
// mu0 * mu_decay^k, stopping at lambda_floor or max_outer stages.
struct HomotopySchedule {
  double lambda0;
  double mu0;
  double lambda_decay = 0.1;
  double mu_decay = 0.1;
  double lambda_floor = 1e-8;
  int max_outer = 60;
  int inner_iters = 20;
  double grad_tol = 0.0;

  HomotopySchedule(double lambda0_, double mu0_) : lambda0(lambda0_), mu0(mu0_) {
    validate();
  }

  HomotopySchedule(double lambda0_, double mu0_, double lambda_decay_,
                   double mu_decay_, double lambda_floor_ = 1e-8,
                   int max_outer_ = 60, int inner_iters_ = 20,
                   double grad_tol_ = 0.0)
      : lambda0(lambda0_),
        mu0(mu0_),
        lambda_decay(lambda_decay_),
        mu_decay(mu_decay_),
        lambda_floor(lambda_floor_),
        max_outer(max_outer_),
        inner_iters(inner_iters_),
        grad_tol(grad_tol_) {
    validate();
  }

  void validate() const {
    if (!(lambda0 > 0.0) || !(mu0 > 0.0) || !(mu0 < lambda0))
      throw std::invalid_argument("HomotopySchedule: need 0 < mu0 < lambda0");
    if (!(lambda_decay > 0.0 && lambda_decay < 1.0) ||
        !(mu_decay > 0.0 && mu_decay < 1.0))
      throw std::invalid_argument("HomotopySchedule: decays must lie in (0,1)");
    if (!(lambda_floor > 0.0))
      throw std::invalid_argument("HomotopySchedule: lambda_floor must be > 0");
    if (max_outer < 1 || inner_iters < 1)
      throw std::invalid_argument("HomotopySchedule: iteration counts must be >= 1");
    if (grad_tol < 0.0)
      throw std::invalid_argument("HomotopySchedule: grad_tol must be >= 0");
    // Simulate the stages: mu_k < lambda_k must hold throughout.
    double lam = lambda0, mu = mu0;
    for (int k = 0; k < max_outer && lam > lambda_floor; ++k) {
      if (!(mu < lam))
        throw std::invalid_argument(
            "HomotopySchedule: mu_k >= lambda_k at stage " + std::to_string(k));
      lam *= lambda_decay;
      mu *= mu_decay;
    }
  }
};

// Optional per-inner-step observer: (stage, inner_step, stage_objective).
using HomotopyObserver = std::function<void(int, int, double)>;

// Homotopy solver.  Stage k runs inner_iters gradient steps on
//   F_k(x) = ||y - H x||^2 + h^{lambda_k, mu_k}(x),
// warm-started from the previous stage.  Steps are chosen by halving from
// the base step 1/(2||H||^2 + 1/(lambda-mu)) until F_k does not increase;
// halving stops at the guaranteed step 1/(2||H||^2 + L_env), where descent
// follows from the envelope's Lipschitz bound, so every accepted step is
// monotone.  For schedules with mu close to lambda the base and guaranteed
// steps coincide.
inline SolverResult solve_homotopy(const CompositeProblem& prob,
                                   const HomotopySchedule& sched,
                                   const Vector& x0,
                                   const HomotopyObserver& observe = {}) {
  if (x0.size() != prob.H.cols())
    throw std::invalid_argument("solve_homotopy: x0 length must match cols of H");
  sched.validate();
  const auto t0 = std::chrono::steady_clock::now();

  const SeparableFunction& h = *prob.h;
  const double fit_lipschitz = 2.0 * spectral_norm_sq(prob.H);
  const Matrix& H = prob.H;
  const Vector& y = prob.y;

  Vector x = x0;
  SolverResult res;
  double lam = sched.lambda0, mu = sched.mu0;
  bool grad_converged = false;

  for (int k = 0; k < sched.max_outer && lam > sched.lambda_floor; ++k) {
    const EnvelopeParams p(lam, mu);
    const double base_step = 1.0 / (fit_lipschitz + 1.0 / (lam - mu));
    const double safe_step = 1.0 / (fit_lipschitz + ll_lipschitz_bound(h, p));

    auto stage_obj = [&](const Vector& v) {
      return (y - H * v).squaredNorm() + ll_value(h, p, v);
    };

    Vector r = y - H * x;
    double fval = r.squaredNorm() + ll_value(h, p, x);
    double gnorm = 0.0;
    for (int t = 0; t < sched.inner_iters; ++t) {
      const Vector g = -2.0 * (H.transpose() * r) + ll_gradient(h, p, x);
      gnorm = g.norm();
      if (gnorm <= sched.grad_tol) {
        grad_converged = true;
        break;
      }
      double step = base_step;
      Vector xn = x - step * g;
      double fn = stage_obj(xn);
      while (fn > fval && step > safe_step) {
        step = std::max(0.5 * step, safe_step);
        xn = x - step * g;
        fn = stage_obj(xn);
      }
      if (!std::isfinite(fn))
        throw std::runtime_error("solve_homotopy: non-finite objective");
      x = std::move(xn);
      fval = fn;
      r = y - H * x;
      if (observe) observe(k, t, fval);
    }

    res.objective_trace.push_back(fval);
    res.grad_norm_trace.push_back(gnorm);
    res.outer_iterations = k + 1;
    if (grad_converged) break;
    lam *= sched.lambda_decay;
    mu *= sched.mu_decay;
  }

  res.x = std::move(x);
  res.converged = grad_converged || res.outer_iterations > 0;
  res.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

struct AdmmConfig {
  double rho0 = 1.0;
  int max_iters = 1000;
  double primal_tol = 1e-8;
  double dual_tol = 1e-8;
  bool residual_balance = true;
  double balance_ratio = 10.0;
  double balance_factor = 2.0;

  void validate() const {
    if (!(rho0 > 0.0)) throw std::invalid_argument("AdmmConfig: rho0 must be > 0");
    if (max_iters < 1) throw std::invalid_argument("AdmmConfig: max_iters >= 1");
    if (!(primal_tol > 0.0) || !(dual_tol > 0.0))
      throw std::invalid_argument("AdmmConfig: tolerances must be > 0");
    if (!(balance_ratio > 0.0) || !(balance_factor > 1.0))
      throw std::invalid_argument("AdmmConfig: bad balancing constants");
  }
};

// ADMM on phi(x) = ||y - Hx||^2 + h(z), consensus x = z:
//   x <- argmin ||y - Hx||^2 + rho/2 ||x - z + u||^2
//   z <- prox_{h, 1/rho}(x + u)
//   u <- u + x - z
// Residual balancing rescales u by the inverse of every rho change.  The
// reported point is z, which is feasible for indicator-type h.
inline SolverResult solve_admm(const CompositeProblem& prob,
                               const AdmmConfig& cfg, const Vector& x0) {
  cfg.validate();
  if (x0.size() != prob.H.cols())
    throw std::invalid_argument("solve_admm: x0 length must match cols of H");
  const auto t0 = std::chrono::steady_clock::now();

  const Matrix& H = prob.H;
  const Eigen::Index P = H.cols();
  const Matrix gram2 = 2.0 * (H.transpose() * H);
  const Vector rhs0 = 2.0 * (H.transpose() * prob.y);

  double rho = cfg.rho0;
  Eigen::LLT<Matrix> llt;
  auto refactor = [&]() {
    Matrix A = gram2;
    A.diagonal().array() += rho;
    llt.compute(A);
    if (llt.info() != Eigen::Success)
      throw std::runtime_error("solve_admm: factorization failed");
  };
  refactor();

  Vector z = x0;
  Vector u = Vector::Zero(P);
  Vector x = x0;
  SolverResult res;

  for (int it = 0; it < cfg.max_iters; ++it) {
    x = llt.solve(rhs0 + rho * (z - u));
    const Vector z_old = z;
    z = prob.h->prox(1.0 / rho, x + u);
    u += x - z;

    const double r_norm = (x - z).norm();
    const double s_norm = rho * (z - z_old).norm();
    res.objective_trace.push_back(prob.objective(z));
    res.grad_norm_trace.push_back(r_norm);
    res.outer_iterations = it + 1;

    if (r_norm <= cfg.primal_tol && s_norm <= cfg.dual_tol) {
      res.converged = true;
      break;
    }
    if (cfg.residual_balance) {
      if (r_norm > cfg.balance_ratio * s_norm) {
        rho *= cfg.balance_factor;
        u /= cfg.balance_factor;
        refactor();
      } else if (s_norm > cfg.balance_ratio * r_norm) {
        rho /= cfg.balance_factor;
        u *= cfg.balance_factor;
        refactor();
      }
    }
  }

  res.x = std::move(z);
  res.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

}  // namespace llenv
