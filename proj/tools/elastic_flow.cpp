#include <chrono>
#include <cstdio>
#include <exception>
#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "elastic_flow/acceptance.hpp"
#include "elastic_flow/config.hpp"
#include "elastic_flow/convergence.hpp"
#include "elastic_flow/flow.hpp"
#include "elastic_flow/initial_curves.hpp"
#include "elastic_flow/io.hpp"

namespace ef = elastic_flow;

namespace {

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int simulate(const ef::RunManifest& manifest) {
  const ef::ParsedConfig cfg = ef::load_config(manifest.config_path);
  if (cfg.is_sweep()) throw ef::ConfigError("sweep", "a sweep document needs the sweep subcommand");
  const ef::FlowConfig& flow = cfg.flow();
  ef::RunManifest m = manifest;
  m.stride = cfg.stride;
  m.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const ef::Trajectory traj = ef::run(ef::make_initial_curve(cfg.initial, flow.n), flow, {m.stride, {}});
  const auto files = ef::emit_outputs(traj, m);
  fmt::print(stderr, "{} steps, terminated by {}, {} files, {:.2f} s\n", traj.diagnostics.size() - 1,
             ef::to_string(traj.terminated_by), files.size(), elapsed(t0));
  if (!traj.termination_detail.empty()) fmt::print(stderr, "{}\n", traj.termination_detail);
  return 0;
}

int sweep(const ef::RunManifest& manifest) {
  const ef::ParsedConfig cfg = ef::load_config(manifest.config_path);
  if (!cfg.is_sweep()) throw ef::ConfigError("sweep", "missing [sweep] section");
  const auto& sc = std::get<ef::SweepConfig>(cfg.config);
  manifest.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const ef::ConvergenceReport report = ef::run_sweep(ef::make_initial_curve(cfg.initial, sc.base.n), sc);
  ef::emit_outputs(report, manifest);
  std::cout << ef::report_text(report);
  fmt::print(stderr, "sweep finished in {:.2f} s\n", elapsed(t0));
  return 0;
}

int verify(const ef::VerifyOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto results = ef::run_acceptance(options);
  std::cout << ef::format_report(results, options);
  for (const auto& r : results) fmt::print(stderr, "criterion {:2d}: {:.2f} s\n", r.id, r.seconds);
  fmt::print(stderr, "verify finished in {:.2f} s\n", elapsed(t0));
  return ef::all_passed(results) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Elastic flow of open curves with fixed endpoints"};
  app.require_subcommand(1);

  ef::RunManifest manifest;
  std::string config, out;

  auto* sim = app.add_subcommand("simulate", "run one flow and write snapshots and diagnostics.csv");
  sim->add_option("-c,--config", config, "config file")->required()->check(CLI::ExistingFile);
  sim->add_option("-o,--out", out, "output directory")->required();

  auto* sw = app.add_subcommand("sweep", "epsilon ladder against the eps=0 reference");
  sw->add_option("-c,--config", config, "config file")->required()->check(CLI::ExistingFile);
  sw->add_option("-o,--out", out, "output directory")->required();

  ef::VerifyOptions vopt;
  vopt.threads = ef::worker_threads();
  auto* ver = app.add_subcommand("verify", "run the acceptance suite");
  ver->add_option("--filter", vopt.filters, "criterion tag or id (repeatable)");
  ver->add_option("--seed", vopt.seed, "seed for the random corpora");
  ver->add_option("--threads", vopt.threads, "worker threads (default: ELASTIC_FLOW_THREADS)")
      ->check(CLI::PositiveNumber);
  ver->add_flag("--mutate-stencil", vopt.mutate_stencil, "perturb the curvature stencil (negative control)");

  CLI11_PARSE(app, argc, argv);

  try {
    manifest.config_path = config;
    manifest.out_dir = out;
    if (*sim) {
      manifest.command = ef::RunManifest::Command::simulate;
      return simulate(manifest);
    }
    if (*sw) {
      manifest.command = ef::RunManifest::Command::sweep;
      return sweep(manifest);
    }
    return verify(vopt);
  } catch (const std::exception& err) {
    fmt::print(stderr, "error: {}\n", err.what());
    return 2;
  }
}
