#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "harness.hpp"
#include "qstat/errors.hpp"

namespace {

using qstat::cli::RunConfig;

struct RawArgs {
  std::string beta, lambda, mu, x, n_range, config;
  std::vector<std::string> methods;
};

void add_common(CLI::App* cmd, RunConfig& cfg, RawArgs& raw) {
  cmd->add_option("--beta", raw.beta, "beta grid: list or lin:/log:lo:hi:n");
  cmd->add_option("--lambda", raw.lambda, "lambda grid");
  cmd->add_option("--mu", raw.mu, "mu grid");
  cmd->add_option("--x", raw.x, "x grid (rotator)");
  cmd->add_option("--n-range", raw.n_range, "level range lo:hi");
  cmd->add_option("--methods", raw.methods, "method tags")->delimiter(',');
  cmd->add_option("--out", cfg.out_dir, "output directory");
  cmd->add_option("--format", cfg.format, "csv or json");
  cmd->add_option("--config", raw.config, "JSON config file (flags override)");
  cmd->add_option("--jobs", cfg.jobs, "worker threads");
  cmd->add_option("--tol-series", cfg.tol_series, "series tail tolerance");
  cmd->add_option("--tol-root", cfg.tol_root, "root-finding tolerance");
  cmd->add_flag("--no-overwrite", [&cfg](std::int64_t) {
    cfg.overwrite = false;
  }, "refuse to replace existing output files");
}

void finalize(RunConfig& cfg, const RawArgs& raw) {
  if (!raw.config.empty()) qstat::cli::load_config_file(raw.config, cfg);
  if (!raw.beta.empty()) cfg.betas = qstat::cli::parse_grid(raw.beta);
  if (!raw.lambda.empty()) cfg.lambdas = qstat::cli::parse_grid(raw.lambda);
  if (!raw.mu.empty()) cfg.mus = qstat::cli::parse_grid(raw.mu);
  if (!raw.x.empty()) cfg.xs = qstat::cli::parse_grid(raw.x);
  if (!raw.n_range.empty()) {
    const auto pos = raw.n_range.find(':');
    if (pos == std::string::npos)
      throw std::invalid_argument("--n-range must be lo:hi");
    cfg.n_lo = std::stoi(raw.n_range.substr(0, pos));
    cfg.n_hi = std::stoi(raw.n_range.substr(pos + 1));
  }
  if (!raw.methods.empty()) cfg.methods = raw.methods;
}

void defaults(RunConfig& cfg, const std::vector<std::string>& methods,
              const char* betas, const char* lambdas, const char* xs,
              int n_hi) {
  if (cfg.methods.empty()) cfg.methods = methods;
  if (cfg.betas.empty() && betas) cfg.betas = qstat::cli::parse_grid(betas);
  if (cfg.lambdas.empty() && lambdas)
    cfg.lambdas = qstat::cli::parse_grid(lambdas);
  if (cfg.xs.empty() && xs) cfg.xs = qstat::cli::parse_grid(xs);
  if (cfg.mus.empty()) cfg.mus = {0.0};
  if (cfg.n_hi == 0 && n_hi > 0) cfg.n_hi = n_hi;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"uniformly suitable estimations of quantum spectra and "
               "partition functions"};
  app.require_subcommand(1);

  RunConfig cfg;
  RawArgs raw;
  auto* spectrum = app.add_subcommand("spectrum", "level energies vs lambda");
  auto* rotator = app.add_subcommand("rotator", "rotator free energy vs x");
  auto* thermo =
      app.add_subcommand("qao-thermo", "oscillator free energy grid");
  auto* avg = app.add_subcommand("avg-energy", "oscillator average energy");
  auto* verify = app.add_subcommand("verify", "run the acceptance suite");
  for (auto* c : {spectrum, rotator, thermo, avg, verify})
    add_common(c, cfg, raw);

  CLI11_PARSE(app, argc, argv);

  try {
    finalize(cfg, raw);
    int failures = 0;
    if (spectrum->parsed()) {
      defaults(cfg, {"om0", "om2", "om3", "cpt", "strong", "oracle"}, nullptr,
               "log:0.01:100:13", nullptr, 5);
      failures = qstat::cli::cmd_spectrum(cfg);
    } else if (rotator->parsed()) {
      defaults(cfg, {"ce0", "ce1", "oracle"}, nullptr, nullptr,
               "log:0.01:10:50", 0);
      failures = qstat::cli::cmd_rotator(cfg);
    } else if (thermo->parsed()) {
      defaults(cfg, {"om0", "om2", "f01", "ce0", "ce1", "cpt", "oracle",
                     "oracle8"},
               "log:0.1:10:10", "log:0.1:100:7", nullptr, 0);
      failures = qstat::cli::cmd_qao_thermo(cfg);
    } else if (avg->parsed()) {
      defaults(cfg, {"num", "num8", "om0", "cpt", "ce"}, "log:0.1:10:10",
               "log:0.1:100:7", nullptr, 0);
      failures = qstat::cli::cmd_avg_energy(cfg);
    } else if (verify->parsed()) {
      return qstat::cli::cmd_verify(cfg) == 0 ? 0 : 3;
    }
    if (failures > 0)
      std::fprintf(stderr, "%d row(s) failed and were skipped\n", failures);
    return 0;
  } catch (const std::invalid_argument& ex) {
    std::fprintf(stderr, "invalid arguments: %s\n", ex.what());
    return 1;
  } catch (const qstat::NumericalError& ex) {
    std::fprintf(stderr, "numerical failure: %s\n", ex.what());
    return 2;
  } catch (const std::exception& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return 2;
  }
}
