// Command-line front end: envelope validation, the two experiment
// protocols, and envelope sampling for figures.  Exit codes: 0 success,
// 1 validation failure, 2 usage/config/IO error.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>

#include "llenv/experiments.hpp"
#include "llenv/functions.hpp"
#include "llenv/io.hpp"
#include "llenv/solvers.hpp"
#include "llenv/validate.hpp"

namespace fs = std::filesystem;
using namespace llenv;

namespace {

int ensure_out_dir(const std::string& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  const fs::path probe = fs::path(out_dir) / ".write_probe";
  std::FILE* fp = std::fopen(probe.string().c_str(), "w");
  if (!fp) {
    std::cerr << "error: output directory '" << out_dir
              << "' is not writable\n";
    return 2;
  }
  std::fclose(fp);
  fs::remove(probe, ec);
  return 0;
}

int cmd_validate(const std::string& out_dir, double perturb) {
  if (int rc = ensure_out_dir(out_dir)) return rc;
  ValidationOptions opt;
  opt.perturb_binary_ll = perturb;
  const std::vector<CheckResult> results = run_validation(opt);

  CsvWriter csv((fs::path(out_dir) / "validate_deviations.csv").string());
  csv.header({"check", "function", "params", "max_deviation", "tolerance",
              "status"});

  std::printf("%-32s %-14s %-22s %12s %10s  %s\n", "check", "function",
              "params", "max_dev", "tol", "status");
  bool all_pass = true;
  std::string first_failure;
  for (const auto& r : results) {
    std::printf("%-32s %-14s %-22s %12.3e %10.1e  %s\n", r.check.c_str(),
                r.function.c_str(), r.params.c_str(), r.max_dev, r.tol,
                r.pass ? "pass" : "FAIL");
    csv.row_strings({r.check, r.function, r.params, format_full(r.max_dev),
                     format_full(r.tol), r.pass ? "pass" : "fail"});
    if (!r.pass && first_failure.empty())
      first_failure = r.check + " (" + r.function + ")";
    all_pass = all_pass && r.pass;
  }
  if (!all_pass) {
    std::cerr << "validation FAILED: " << first_failure << "\n";
    return 1;
  }
  std::printf("all %zu checks passed\n", results.size());
  return 0;
}

HomotopySchedule decode_schedule_from(const Config& cfg) {
  HomotopySchedule s = default_decoding_schedule();
  const double lambda0 = cfg.get_double("lambda0", s.lambda0);
  const double mu0 = cfg.get_double("mu0", 0.999 * lambda0);
  return HomotopySchedule(
      lambda0, mu0, cfg.get_double("lambda_decay", s.lambda_decay),
      cfg.get_double("mu_decay", s.mu_decay),
      cfg.get_double("lambda_floor", s.lambda_floor),
      static_cast<int>(cfg.get_int("max_outer", s.max_outer)),
      static_cast<int>(cfg.get_int("inner_iters", s.inner_iters)),
      cfg.get_double("grad_tol", s.grad_tol));
}

AdmmConfig admm_from(const Config& cfg) {
  AdmmConfig a;
  a.rho0 = cfg.get_double("rho0", a.rho0);
  a.max_iters = static_cast<int>(cfg.get_int("admm_max_iters", a.max_iters));
  a.validate();
  return a;
}

void write_decode_aggregate(const DecodingConfig& cfg,
                            const ExperimentReport& rep,
                            const std::string& path) {
  CsvWriter csv(path);
  csv.header({"n", "p", "rho", "snr_db", "method", "mean_ber", "std_ber",
              "mean_rmse", "std_rmse", "mean_sensitivity", "std_sensitivity",
              "mean_specificity", "std_specificity", "mean_cost", "std_cost"});
  for (const auto& a : rep.aggregates)
    csv.row({std::to_string(cfg.n), std::to_string(cfg.p), format_full(cfg.rho),
             format_full(cfg.snr_db), a.method},
            {a.mean.ber, a.stddev.ber, a.mean.rmse, a.stddev.rmse,
             a.mean.sensitivity, a.stddev.sensitivity, a.mean.specificity,
             a.stddev.specificity, a.mean.cost, a.stddev.cost});
}

int cmd_decode(const std::string& config_path, const std::string& out_dir,
               std::uint64_t seed_override, bool has_seed, int threads) {
  const Config c = Config::parse_file(config_path);
  DecodingConfig cfg;
  cfg.n = static_cast<int>(c.get_int("n", cfg.n));
  cfg.p = static_cast<int>(c.get_int("p", cfg.p));
  cfg.rho = c.get_double("rho", cfg.rho);
  cfg.snr_db = c.get_double("snr_db", cfg.snr_db);
  cfg.trials = static_cast<int>(c.get_int("trials", cfg.trials));
  cfg.seed = has_seed ? seed_override
                      : static_cast<std::uint64_t>(c.get_int("seed", 1));
  cfg.validate();
  if (int rc = ensure_out_dir(out_dir)) return rc;

  const ExperimentReport rep =
      run_decoding(cfg, threads, decode_schedule_from(c), admm_from(c));
  write_trials_csv(rep, (fs::path(out_dir) / "decode_trials.csv").string());
  write_decode_aggregate(cfg, rep,
                         (fs::path(out_dir) / "decode_aggregate.csv").string());

  std::printf("%-4s %-4s %-5s %-8s %8s %8s %8s %8s\n", "N", "P", "rho",
              "SNR[dB]", "LS", "AR", "AN", "LL");
  std::printf("%-4d %-4d %-5.2f %-8.4g", cfg.n, cfg.p, cfg.rho, cfg.snr_db);
  for (const auto& a : rep.aggregates) std::printf(" %8.2f", 100.0 * a.mean.ber);
  std::printf("\n");
  for (const auto& e : rep.errors) std::cerr << "warning: " << e << "\n";
  return 0;
}

int cmd_unmix(const std::string& config_path, const std::string& out_dir,
              std::uint64_t seed_override, bool has_seed, int threads) {
  const Config c = Config::parse_file(config_path);
  UnmixConfig base;
  base.n = static_cast<int>(c.get_int("n", base.n));
  base.p = static_cast<int>(c.get_int("p", base.p));
  base.sparsity = static_cast<int>(c.get_int("sparsity", base.sparsity));
  base.snr_db = c.get_double("snr_db", base.snr_db);
  base.beta = c.get_double("beta", base.beta);
  base.trials = static_cast<int>(c.get_int("trials", base.trials));
  base.seed = has_seed ? seed_override
                       : static_cast<std::uint64_t>(c.get_int("seed", 1));
  const std::vector<double> lambdas = c.get_double_list("lambda1", {1e3});
  base.lambda1 = lambdas.front();
  base.validate();
  if (int rc = ensure_out_dir(out_dir)) return rc;
  const AdmmConfig admm = admm_from(c);

  CsvWriter sweep((fs::path(out_dir) / "unmix_sweep.csv").string());
  sweep.header({"lambda1", "rmse", "sensitivity", "specificity", "cost"});
  CsvWriter agg((fs::path(out_dir) / "unmix_aggregate.csv").string());
  agg.header({"lambda1", "method", "mean_rmse", "std_rmse", "mean_sensitivity",
              "std_sensitivity", "mean_specificity", "std_specificity",
              "mean_cost", "std_cost"});

  std::printf("%-10s %10s %10s %10s %12s\n", "lambda1", "RMSE", "Sens[%]",
              "Spec[%]", "cost");
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    UnmixConfig cfg = base;
    cfg.lambda1 = lambdas[i];
    cfg.validate();
    const ExperimentReport rep = run_unmix(cfg, threads, admm);
    write_trials_csv(rep, (fs::path(out_dir) / ("unmix_trials_" +
                                                std::to_string(i) + ".csv"))
                              .string());
    const MethodSummary& ll = rep.aggregates.front();
    sweep.row({}, {cfg.lambda1, ll.mean.rmse, ll.mean.sensitivity,
                   ll.mean.specificity, ll.mean.cost});
    for (const auto& a : rep.aggregates)
      agg.row({format_full(cfg.lambda1), a.method},
              {a.mean.rmse, a.stddev.rmse, a.mean.sensitivity,
               a.stddev.sensitivity, a.mean.specificity, a.stddev.specificity,
               a.mean.cost, a.stddev.cost});
    std::printf("%-10.3g %10.4f %10.2f %10.2f %12.6g\n", cfg.lambda1,
                ll.mean.rmse, 100.0 * ll.mean.sensitivity,
                100.0 * ll.mean.specificity, ll.mean.cost);
    for (const auto& e : rep.errors) std::cerr << "warning: " << e << "\n";
  }
  return 0;
}

int cmd_envelope(const std::string& descriptor, double lambda, double mu,
                 double lo, double hi, double step, const std::string& out_dir) {
  const FunctionPtr f = make_function(descriptor);
  const EnvelopeParams p(lambda, mu);
  if (int rc = ensure_out_dir(out_dir)) return rc;

  const Grid1D g = Grid1D::sample(kOracleLo, kOracleHi, kOracleStep,
                                  [&](double w) { return f->eval_1d(w); });
  const Grid1D env = grid_ll(g, lambda, mu);

  CsvWriter csv((fs::path(out_dir) / "envelope.csv").string());
  csv.header({"x", "h", "moreau_lambda", "moreau_lambda_minus_mu", "ll",
              "ll_grad", "oracle_ll"});
  const std::size_t rows = Grid1D::point_count(lo, hi, step);
  for (std::size_t i = 0; i < rows; ++i) {
    const double x = lo + static_cast<double>(i) * step;
    csv.row({}, {x, f->eval_1d(x), f->moreau_1d(lambda, x),
                 f->moreau_1d(lambda - mu, x), f->ll_value_1d(p, x),
                 f->ll_grad_1d(p, x), env.value_at(x)});
  }
  std::printf("wrote %zu rows to %s/envelope.csv\n", rows, out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Double-envelope calculus, homotopy solver and experiment "
               "harness for composite least squares"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string out_dir = "out";
  std::string config_path;
  std::uint64_t seed = 0;
  int threads = 1;
  app.add_option("--out", out_dir, "output directory for CSV files");
  auto* seed_opt = app.add_option("--seed", seed, "seed override");
  app.add_option("--threads", threads, "worker threads for experiment trials")
      ->check(CLI::PositiveNumber);

  auto* validate = app.add_subcommand("validate", "run oracle and identity checks");
  double perturb = 0.0;
  validate->add_option("--perturb", perturb,
                       "fault injection: offset added to one closed form");

  auto* decode = app.add_subcommand("decode", "binary decoding experiment");
  decode->add_option("--config", config_path, "key=value config file")
      ->required();

  auto* unmix = app.add_subcommand("unmix", "sparse unmixing experiment");
  unmix->add_option("--config", config_path, "key=value config file")
      ->required();

  auto* envelope = app.add_subcommand("envelope", "sample envelopes to CSV");
  std::string descriptor = "binary";
  double lambda = 1.0, mu = 0.5, lo = -1.0, hi = 2.0, step = 0.01;
  envelope->add_option("--function", descriptor,
                       "binary | l0:beta=<v> | box:<lo>,<hi> | l1:beta=<v> | zero");
  envelope->add_option("--lambda", lambda, "envelope lambda");
  envelope->add_option("--mu", mu, "envelope mu");
  envelope->add_option("--lo", lo, "sample range start");
  envelope->add_option("--hi", hi, "sample range end");
  envelope->add_option("--step", step, "sample step");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(validate)) return cmd_validate(out_dir, perturb);
    if (app.got_subcommand(decode))
      return cmd_decode(config_path, out_dir, seed, seed_opt->count() > 0,
                        threads);
    if (app.got_subcommand(unmix))
      return cmd_unmix(config_path, out_dir, seed, seed_opt->count() > 0,
                       threads);
    if (app.got_subcommand(envelope))
      return cmd_envelope(descriptor, lambda, mu, lo, hi, step, out_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
