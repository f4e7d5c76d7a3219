#pragma once

// Synthetic data generation, metrics and multi-trial experiment runners for
// the two benchmark problems: binary signal decoding and sparse spectral
// unmixing against a synthetic dictionary.

#include <Eigen/Cholesky>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "llenv/functions.hpp"
#include "llenv/solvers.hpp"

namespace llenv {

// Every trial owns an independent generator derived from (seed, trial), so
// trials can run in any order or in parallel without changing results.
inline std::mt19937_64 make_trial_rng(std::uint64_t seed, int trial) {
  std::seed_seq ss{static_cast<std::uint32_t>(seed),
                   static_cast<std::uint32_t>(seed >> 32),
                   static_cast<std::uint32_t>(trial), 0x9e3779b9u};
  return std::mt19937_64(ss);
}

struct DecodingConfig {
  int n = 20;
  int p = 40;
  double rho = 0.0;
  double snr_db = 30.0;
  int trials = 50;
  std::uint64_t seed = 1;

  void validate() const {
    if (n < 1 || p < 1) throw std::invalid_argument("DecodingConfig: n, p >= 1");
    if (!(rho >= 0.0 && rho < 1.0))
      throw std::invalid_argument("DecodingConfig: need 0 <= rho < 1");
    if (trials < 1) throw std::invalid_argument("DecodingConfig: trials >= 1");
  }
};

struct UnmixConfig {
  int n = 224;
  int p = 224;
  int sparsity = 5;
  double snr_db = 30.0;
  double beta = 1e-6;
  int trials = 50;
  std::uint64_t seed = 1;
  double lambda1 = 1e3;

  void validate() const {
    if (n < 1 || p < 1) throw std::invalid_argument("UnmixConfig: n, p >= 1");
    if (sparsity < 1 || sparsity > p)
      throw std::invalid_argument("UnmixConfig: need 1 <= sparsity <= p");
    if (trials < 1) throw std::invalid_argument("UnmixConfig: trials >= 1");
    if (beta < 0.0) throw std::invalid_argument("UnmixConfig: beta >= 0");
    if (!(lambda1 > 0.0)) throw std::invalid_argument("UnmixConfig: lambda1 > 0");
  }
};

struct DecodingInstance {
  Matrix H;
  Vector y;
  Vector x_true;
};

struct UnmixInstance {
  Matrix U;
  Vector y;
  Vector a_true;
};

namespace detail {

// Noise scaled so that 10 log10(||Hx||^2 / (N sigma^2)) equals snr_db;
// an infinite snr_db means noiseless.
inline Vector add_noise(std::mt19937_64& rng, const Vector& clean,
                        double snr_db) {
  if (std::isinf(snr_db)) return clean;
  const double n = static_cast<double>(clean.size());
  const double sigma2 =
      clean.squaredNorm() / (n * std::pow(10.0, snr_db / 10.0));
  std::normal_distribution<double> normal(0.0, std::sqrt(sigma2));
  Vector y = clean;
  for (Eigen::Index i = 0; i < y.size(); ++i) y[i] += normal(rng);
  return y;
}

}  // namespace detail

// Decoding instance: x_true ~ Bernoulli(1/2)^P, rows of H i.i.d. N(0, Sigma)
// with Sigma_ij = rho^|i-j| (realized through a dense Cholesky factor), and
// y = H x_true + noise at the requested SNR.  Draw order: x_true, H (row by
// row), noise.
inline DecodingInstance gen_decoding_instance(const DecodingConfig& cfg,
                                              int trial) {
  cfg.validate();
  std::mt19937_64 rng = make_trial_rng(cfg.seed, trial);

  Vector x_true(cfg.p);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int i = 0; i < cfg.p; ++i) x_true[i] = unif(rng) < 0.5 ? 0.0 : 1.0;

  Matrix H(cfg.n, cfg.p);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int i = 0; i < cfg.n; ++i)
    for (int j = 0; j < cfg.p; ++j) H(i, j) = normal(rng);

  if (cfg.rho != 0.0) {
    Matrix sigma(cfg.p, cfg.p);
    for (int i = 0; i < cfg.p; ++i)
      for (int j = 0; j < cfg.p; ++j)
        sigma(i, j) = std::pow(cfg.rho, std::abs(i - j));
    Eigen::LLT<Matrix> llt(sigma);
    if (llt.info() != Eigen::Success)
      throw std::runtime_error("gen_decoding_instance: covariance factorization failed");
    H = H * Matrix(llt.matrixL()).transpose();
  }

  DecodingInstance inst;
  inst.y = detail::add_noise(rng, H * x_true, cfg.snr_db);
  inst.H = std::move(H);
  inst.x_true = std::move(x_true);
  return inst;
}

// Unmixing instance: support of size `sparsity` drawn uniformly without
// replacement, abundances on it from a flat Dirichlet, dictionary U with
// i.i.d. standard normal entries and unit-norm columns, y = U a + noise.
// Draw order: support, abundances, U (column by column), noise.
inline UnmixInstance gen_unmix_instance(const UnmixConfig& cfg, int trial) {
  cfg.validate();
  std::mt19937_64 rng = make_trial_rng(cfg.seed, trial);

  std::vector<int> idx(cfg.p);
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = 0; i < cfg.sparsity; ++i) {
    std::uniform_int_distribution<int> pick(i, cfg.p - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }

  Vector a_true = Vector::Zero(cfg.p);
  std::exponential_distribution<double> expo(1.0);
  double total = 0.0;
  std::vector<double> w(cfg.sparsity);
  for (int i = 0; i < cfg.sparsity; ++i) {
    w[i] = expo(rng);
    total += w[i];
  }
  for (int i = 0; i < cfg.sparsity; ++i) a_true[idx[i]] = w[i] / total;

  Matrix U(cfg.n, cfg.p);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int j = 0; j < cfg.p; ++j) {
    for (int i = 0; i < cfg.n; ++i) U(i, j) = normal(rng);
    U.col(j).normalize();
  }

  UnmixInstance inst;
  inst.y = detail::add_noise(rng, U * a_true, cfg.snr_db);
  inst.U = std::move(U);
  inst.a_true = std::move(a_true);
  return inst;
}

// Rounding onto {0,1}^P: 1 iff the entry is >= 1/2.
inline Vector project_binary(const Vector& v) {
  Vector out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = v[i] >= 0.5 ? 1.0 : 0.0;
  return out;
}

// Fraction of mismatched symbols between two binary vectors.
inline double ber(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw std::invalid_argument("ber: length mismatch");
  if (a.size() == 0) throw std::invalid_argument("ber: empty vectors");
  int wrong = 0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if ((a[i] != 0.0 && a[i] != 1.0) || (b[i] != 0.0 && b[i] != 1.0))
      throw std::invalid_argument("ber: vectors must be binary");
    if (a[i] != b[i]) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(a.size());
}

inline constexpr double kSupportZeroTol = 1e-8;

// Support sensitivity TP/(TP+FN) and specificity TN/(FP+TN), where nonzero
// means |value| > zero_tol.  Empty denominators count as perfect.
inline std::pair<double, double> support_metrics(const Vector& est,
                                                 const Vector& truth,
                                                 double zero_tol = kSupportZeroTol) {
  if (est.size() != truth.size())
    throw std::invalid_argument("support_metrics: length mismatch");
  if (zero_tol < 0.0)
    throw std::invalid_argument("support_metrics: zero_tol must be >= 0");
  int tp = 0, fp = 0, tn = 0, fn = 0;
  for (Eigen::Index i = 0; i < est.size(); ++i) {
    const bool e = std::abs(est[i]) > zero_tol;
    const bool t = std::abs(truth[i]) > zero_tol;
    if (e && t) ++tp;
    else if (e && !t) ++fp;
    else if (!e && !t) ++tn;
    else ++fn;
  }
  const double sens = tp + fn > 0 ? static_cast<double>(tp) / (tp + fn) : 1.0;
  const double spec = fp + tn > 0 ? static_cast<double>(tn) / (fp + tn) : 1.0;
  return {sens, spec};
}

struct TrialMetrics {
  double ber = 0.0;
  double rmse = 0.0;
  double sensitivity = 0.0;
  double specificity = 0.0;
  double cost = 0.0;
};

struct MethodSummary {
  std::string method;
  TrialMetrics mean;
  TrialMetrics stddev;
};

struct ExperimentReport {
  std::string experiment;
  std::string config_echo;
  std::vector<std::string> methods;
  // rows[m][t] holds trial t of methods[m].
  std::vector<std::vector<TrialMetrics>> rows;
  std::vector<MethodSummary> aggregates;
  std::vector<std::string> errors;

  void finalize() {
    aggregates.clear();
    for (std::size_t m = 0; m < methods.size(); ++m) {
      MethodSummary s;
      s.method = methods[m];
      const auto& r = rows[m];
      const double n = static_cast<double>(r.size());
      auto acc = [&](auto field) {
        double mean = 0.0;
        for (const auto& t : r) mean += t.*field;
        mean /= n;
        double var = 0.0;
        for (const auto& t : r) var += (t.*field - mean) * (t.*field - mean);
        return std::pair<double, double>(mean, std::sqrt(var / n));
      };
      std::tie(s.mean.ber, s.stddev.ber) = acc(&TrialMetrics::ber);
      std::tie(s.mean.rmse, s.stddev.rmse) = acc(&TrialMetrics::rmse);
      std::tie(s.mean.sensitivity, s.stddev.sensitivity) =
          acc(&TrialMetrics::sensitivity);
      std::tie(s.mean.specificity, s.stddev.specificity) =
          acc(&TrialMetrics::specificity);
      std::tie(s.mean.cost, s.stddev.cost) = acc(&TrialMetrics::cost);
      aggregates.push_back(std::move(s));
    }
  }
};

// Decoding schedule from the benchmark protocol: lambda^1 = 1e5 with
// mu^1 = 0.999 lambda^1, both cut by 90% per stage.  The inner budget is
// large because the transition stages need many small certified steps to
// resolve coordinates stuck between the two wells.
inline HomotopySchedule default_decoding_schedule() {
  return HomotopySchedule(1e5, 0.999e5, 0.1, 0.1, 1e-8, 60, 1000, 0.0);
}

// Unmixing schedule: lambda cut by 10% and mu by 82% per stage, mu^1 =
// lambda^1 / 2.
inline HomotopySchedule default_unmix_schedule(double lambda1) {
  return HomotopySchedule(lambda1, lambda1 / 2.0, 0.9, 0.18, 1e-8, 300, 20, 0.0);
}

namespace detail {

inline void run_trials(int trials, int threads,
                       const std::function<void(int)>& body) {
  if (threads <= 1) {
    for (int t = 0; t < trials; ++t) body(t);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<int> next{0};
  const int workers = std::min(threads, trials);
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&]() {
      for (int t = next.fetch_add(1); t < trials; t = next.fetch_add(1)) body(t);
    });
  for (auto& th : pool) th.join();
}

}  // namespace detail

// Runs LS, AR (ADMM + box), AN (ADMM + binary) and LL (homotopy + binary)
// on `trials` decoding instances.  All iterative methods start from the LS
// estimate; every estimate is rounded onto {0,1}^P before scoring.  The
// cost column is the residual ||y - H x||^2 at the rounded point.
inline ExperimentReport run_decoding(
    const DecodingConfig& cfg, int threads = 1,
    const HomotopySchedule& sched = default_decoding_schedule(),
    const AdmmConfig& admm = AdmmConfig{}) {
  cfg.validate();
  sched.validate();
  admm.validate();

  ExperimentReport rep;
  rep.experiment = "decode";
  rep.methods = {"LS", "AR", "AN", "LL"};
  rep.rows.assign(4, std::vector<TrialMetrics>(cfg.trials));
  std::vector<std::string> errors(cfg.trials);

  auto body = [&](int t) {
    try {
      const DecodingInstance inst = gen_decoding_instance(cfg, t);
      const Vector x_ls = solve_ls(inst.H, inst.y);

      const CompositeProblem box_prob(inst.H, inst.y,
                                      std::make_shared<BoxIndicator>(0.0, 1.0));
      const CompositeProblem bin_prob(inst.H, inst.y,
                                      std::make_shared<BinaryIndicator>());

      const Vector estimates[4] = {
          x_ls, solve_admm(box_prob, admm, x_ls).x,
          solve_admm(bin_prob, admm, x_ls).x,
          solve_homotopy(bin_prob, sched, x_ls).x};

      for (int m = 0; m < 4; ++m) {
        const Vector proj = project_binary(estimates[m]);
        TrialMetrics tm;
        tm.ber = ber(proj, inst.x_true);
        tm.rmse = (estimates[m] - inst.x_true).norm() /
                  std::sqrt(static_cast<double>(cfg.p));
        std::tie(tm.sensitivity, tm.specificity) =
            support_metrics(proj, inst.x_true);
        tm.cost = (inst.y - inst.H * proj).squaredNorm();
        rep.rows[m][t] = tm;
      }
    } catch (const std::exception& e) {
      errors[t] = std::string("trial ") + std::to_string(t) + ": " + e.what();
    }
  };
  detail::run_trials(cfg.trials, threads, body);

  for (auto& e : errors)
    if (!e.empty()) rep.errors.push_back(e);
  rep.config_echo = "n=" + std::to_string(cfg.n) + " p=" + std::to_string(cfg.p) +
                    " rho=" + std::to_string(cfg.rho) +
                    " snr_db=" + std::to_string(cfg.snr_db) +
                    " trials=" + std::to_string(cfg.trials) +
                    " seed=" + std::to_string(cfg.seed);
  rep.finalize();
  return rep;
}

// Runs LL (homotopy + scaled l0) and AN (ADMM + scaled l0) from the zero
// vector on `trials` unmixing instances.  The cost column is
// ||y - U a||^2 + beta * #nonzeros, counting nonzeros above the support
// tolerance.
inline ExperimentReport run_unmix(const UnmixConfig& cfg, int threads = 1,
                                  const AdmmConfig& admm = AdmmConfig{}) {
  cfg.validate();
  admm.validate();
  const HomotopySchedule sched = default_unmix_schedule(cfg.lambda1);

  ExperimentReport rep;
  rep.experiment = "unmix";
  rep.methods = {"LL", "AN"};
  rep.rows.assign(2, std::vector<TrialMetrics>(cfg.trials));
  std::vector<std::string> errors(cfg.trials);

  auto body = [&](int t) {
    try {
      const UnmixInstance inst = gen_unmix_instance(cfg, t);
      const CompositeProblem prob(inst.U, inst.y,
                                  std::make_shared<ScaledL0>(cfg.beta));
      const Vector zero = Vector::Zero(cfg.p);

      const Vector estimates[2] = {solve_homotopy(prob, sched, zero).x,
                                   solve_admm(prob, admm, zero).x};

      for (int m = 0; m < 2; ++m) {
        const Vector& a = estimates[m];
        TrialMetrics tm;
        tm.rmse = (a - inst.a_true).norm() / std::sqrt(static_cast<double>(cfg.p));
        std::tie(tm.sensitivity, tm.specificity) =
            support_metrics(a, inst.a_true);
        int nnz = 0;
        for (Eigen::Index i = 0; i < a.size(); ++i)
          if (std::abs(a[i]) > kSupportZeroTol) ++nnz;
        tm.cost = (inst.y - inst.U * a).squaredNorm() + cfg.beta * nnz;
        tm.ber = 0.0;
        rep.rows[m][t] = tm;
      }
    } catch (const std::exception& e) {
      errors[t] = std::string("trial ") + std::to_string(t) + ": " + e.what();
    }
  };
  detail::run_trials(cfg.trials, threads, body);

  for (auto& e : errors)
    if (!e.empty()) rep.errors.push_back(e);
  rep.config_echo =
      "n=" + std::to_string(cfg.n) + " p=" + std::to_string(cfg.p) +
      " sparsity=" + std::to_string(cfg.sparsity) +
      " snr_db=" + std::to_string(cfg.snr_db) + " beta=" + std::to_string(cfg.beta) +
      " lambda1=" + std::to_string(cfg.lambda1) +
      " trials=" + std::to_string(cfg.trials) + " seed=" + std::to_string(cfg.seed);
  rep.finalize();
  return rep;
}

}  // namespace llenv
