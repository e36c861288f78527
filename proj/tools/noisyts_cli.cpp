#include "noisyts/fit.hpp"
#include "noisyts/harness.hpp"
#include "noisyts/verify.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <thread>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitConfig = 2;

int default_workers() {
  if (const char* env = std::getenv("NOISYTS_WORKERS")) {
    try {
      const int n = std::stoi(env);
      if (n >= 1) return n;
    } catch (const std::exception&) {
    }
    std::cerr << "warning: ignoring NOISYTS_WORKERS='" << env << "'\n";
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

int cmd_run(const std::string& config_path, int workers, const std::string& out_override) {
  noisyts::ExperimentConfig cfg = noisyts::load_experiment_config(config_path);
  if (!out_override.empty()) cfg.output_path = out_override;
  noisyts::run_to_files(cfg, workers, cfg.output_path);
  std::cerr << "wrote " << cfg.output_path << " (" << cfg.trials << " trials, " << cfg.algorithms.size()
            << " algorithms, T = " << cfg.env.T << ")\n";
  if (cfg.emit_bounds) {
    const std::string path = cfg.output_path + ".bounds.csv";
    std::ofstream out(path);
    noisyts::write_bounds_csv(out, noisyts::bounds_table(cfg, noisyts::resolve_max_trace(cfg)));
    std::cerr << "wrote " << path << "\n";
  }
  return kExitOk;
}

int cmd_bounds(const std::string& config_path, const std::string& out_path) {
  const noisyts::ExperimentConfig cfg = noisyts::load_experiment_config(config_path);
  const auto rows = noisyts::bounds_table(cfg, noisyts::resolve_max_trace(cfg));
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot open '" + out_path + "' for writing");
  noisyts::write_bounds_csv(out, rows);
  std::cerr << "wrote " << out_path << " (" << rows.size() << " rows)\n";
  return kExitOk;
}

int cmd_verify(const std::string& suite, bool mutate_rt) {
  noisyts::VerifyOptions opts;
  opts.mutate_rt = mutate_rt;
  const auto results = noisyts::run_verify(suite, opts);
  noisyts::print_report(std::cout, results);
  return noisyts::all_passed(results) ? kExitOk : kExitVerifyFailed;
}

int cmd_fit(const std::string& input, const std::string& out_path, bool diagonal) {
  const noisyts::ContextFit fit = noisyts::fit_context_distribution(noisyts::read_matrix_file(input), diagonal);
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot open '" + out_path + "' for writing");
  out << noisyts::context_fragment(fit).dump(2) << '\n';
  std::cerr << "fitted " << fit.mean.size() << "-dimensional Gaussian from " << fit.rows << " rows"
            << (fit.diagonal ? " (diagonal)" : "") << ", jitter " << fit.jitter << "; wrote " << out_path << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Thompson sampling bandits with noisy contexts: simulation, bounds and checks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(noisyts::git_describe()));

  std::string config_path, out_path, suite = "all", input_path;
  int workers = default_workers();
  bool mutate_rt = false, diagonal = false;

  auto* run = app.add_subcommand("run", "Run an experiment and write the regret CSV plus metadata sidecar");
  run->add_option("--config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--workers", workers, "Concurrent trials (default: $NOISYTS_WORKERS or hardware threads)")
      ->check(CLI::PositiveNumber);
  run->add_option("--out", out_path, "Results CSV (overrides output_path in the config)");

  auto* verify = app.add_subcommand("verify", "Run the oracle-equivalence checks");
  verify->add_option("--suite", suite, "Which checks to run")->check(CLI::IsMember({"denoise", "lmc", "bounds", "all"}));
  verify->add_flag("--mutate-rt", mutate_rt, "Perturb the closed-form R_t so the denoise checks must fail");

  auto* bounds = app.add_subcommand("bounds", "Evaluate the regret bounds for t = 1..T");
  bounds->add_option("--config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  bounds->add_option("--out", out_path, "Bounds CSV")->required();

  auto* fit = app.add_subcommand("fit", "Fit a Gaussian context law to the rows of a matrix file");
  fit->add_option("--input", input_path, "Headerless CSV of reals")->required()->check(CLI::ExistingFile);
  fit->add_option("--out", out_path, "Config fragment (JSON)")->required();
  fit->add_flag("--diagonal", diagonal, "Fit per-coordinate variances only");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run) return cmd_run(config_path, workers, out_path);
    if (*verify) return cmd_verify(suite, mutate_rt);
    if (*bounds) return cmd_bounds(config_path, out_path);
    if (*fit) return cmd_fit(input_path, out_path, diagonal);
  } catch (const noisyts::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const noisyts::FitError& e) {
    std::cerr << "fit error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}
