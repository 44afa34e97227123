// stsdelay: delay-time sweeps for the narrowed-waveguide tunnelling experiment.
//
//   stsdelay run --scenario fig1a|fig1b | --config PATH [--data PATH] [--out DIR]
//                [--models sts,pt,bl] [--ell-m X] [--threads N]
//
// Exit codes: 0 success, 1 I/O or unexpected error, 2 invalid input,
// 3 numeric failure (including any failed sweep point).

#include <cstdio>
#include <exception>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "stsdelay/harness.hpp"

namespace {

constexpr int kExitIo = 1;
constexpr int kExitValidation = 2;
constexpr int kExitNumeric = 3;

struct RunOptions {
  std::string scenario;
  std::string config;
  std::string data;
  std::string out;
  std::string models;
  std::optional<double> ell_m;
  unsigned threads = 0;
};

int run(const RunOptions& opt) {
  using namespace stsdelay;
  ExperimentConfig cfg = opt.scenario.empty() ? load_config(opt.config) : preset(opt.scenario);
  if (!opt.models.empty()) cfg.models = parse_models(opt.models);
  if (opt.ell_m) cfg.ell = *opt.ell_m;
  if (!opt.out.empty()) cfg.out_dir = opt.out;
  cfg.validate();

  std::optional<DataFile> data;
  if (!opt.data.empty()) data = load_dataset(opt.data);

  const ScenarioResult result = run_scenario(cfg, data, opt.threads);
  emit_outputs(result, cfg, cfg.out_dir);

  std::printf("scenario %s: L = %.4f m, linewidth %.3f MHz, ell = %.4f m\n", cfg.name.c_str(), cfg.geometry.length,
              cfg.lambda / 1e6, cfg.ell);
  std::printf("cutoffs: nu_out = %.6f GHz, nu_in = %.6f GHz\n", result.cutoffs.nu_out / 1e9,
              result.cutoffs.nu_in / 1e9);
  std::size_t failed = 0;
  for (const auto& c : result.curves) {
    std::size_t ok = 0, inf = 0, bad = 0;
    for (const auto& p : c.points) {
      ok += p.status == PointStatus::ok;
      inf += p.status == PointStatus::infinite;
      bad += p.status == PointStatus::failed;
      if (p.status == PointStatus::failed) {
        std::fprintf(stderr, "%s failed at %.6f GHz: %s\n", model_name(c.model), p.nu / 1e9, p.message.c_str());
      }
    }
    failed += bad;
    std::printf("%-3s %zu points: %zu ok, %zu infinite, %zu failed\n", model_name(c.model), c.points.size(), ok, inf,
                bad);
  }
  if (data && data->empty) std::printf("data file has no rows; residues skipped\n");
  for (const auto& rep : result.reports) {
    std::printf("residues for run %s (%zu points used, %zu excluded)%s\n", rep.run.c_str(), rep.used_points,
                rep.excluded_points, rep.degenerate ? ", degenerate" : "");
    for (const auto& m : rep.models) {
      std::printf("  %-3s delta_raw = %.6g ns  delta = %.6g\n", model_name(m.model), m.delta_raw,
                  m.delta_normalized);
    }
  }
  std::printf("wrote %s\n", cfg.out_dir.c_str());
  return failed > 0 ? kExitNumeric : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Delay times through a narrowed waveguide: STS, phase-time and Buttiker-Landauer models"};
  app.require_subcommand(1);
  RunOptions opt;
  double ell = 0.0;
  auto* cmd = app.add_subcommand("run", "Sweep the models and write curves.csv, figure.svg, residues.csv");
  auto* scenario = cmd->add_option("--scenario", opt.scenario, "Built-in scenario")->check(
      CLI::IsMember({"fig1a", "fig1b"}));
  auto* config = cmd->add_option("--config", opt.config, "key = value configuration file");
  scenario->excludes(config);
  config->excludes(scenario);
  cmd->add_option("--data", opt.data, "Measured delays, CSV with header nu_ghz,delay_ns,run");
  cmd->add_option("--out", opt.out, "Output directory");
  cmd->add_option("--models", opt.models, "Comma-separated subset of sts,pt,bl");
  auto* ell_opt = cmd->add_option("--ell-m", ell, "Path length from the source to the narrowing, metres");
  cmd->add_option("--threads", opt.threads, "Worker threads (0 = all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }
  if (scenario->count() + config->count() != 1) {
    std::fprintf(stderr, "run: exactly one of --scenario or --config is required\n");
    return kExitValidation;
  }
  if (ell_opt->count() > 0) opt.ell_m = ell;

  try {
    return run(opt);
  } catch (const stsdelay::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  } catch (const stsdelay::DomainError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  } catch (const stsdelay::NumericError& e) {
    std::fprintf(stderr, "numeric failure: %s\n", e.what());
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitIo;
  }
}
