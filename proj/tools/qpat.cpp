// qpat forward|reconstruct|study --config <path> [--out <dir>] [--mode strict|exact] [--seed <u64>]

#include <cstdio>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "qpat/dataset_io.hpp"
#include "qpat/study.hpp"

namespace {

using namespace qpat;
namespace fs = std::filesystem;

struct Options {
  std::string config;
  std::string out;
  std::string mode;
  std::optional<std::uint64_t> seed;
};

ExperimentConfig prepare(const Options& o) {
  ExperimentConfig cfg = load_config(o.config);
  if (!o.out.empty()) cfg.output = o.out;
  if (!o.mode.empty()) cfg.sqrtD_mode = parse_sqrtD_mode(o.mode);
  if (o.seed) cfg.seeds = {*o.seed};
  return cfg;
}

std::string run_label(int n, double h, double delta) {
  std::ostringstream s;
  s << "n" << n << "_h" << h << "_delta" << delta;
  return s.str();
}

int cmd_forward(const Options& o) {
  const ExperimentConfig cfg = prepare(o);
  const bool single = cfg.grid_sizes.size() == 1 && cfg.h.size() == 1 && cfg.noise_levels.size() == 1;
  const std::uint64_t seed = cfg.seeds.front();
  for (int n : cfg.grid_sizes) {
    const GridPtr grid = Grid::build(cfg.domain, n, n);
    const Medium medium = load_medium(cfg, grid);
    for (double h : cfg.h) {
      const std::vector<SourceSetup> sources = make_sources(cfg, *grid, h);
      for (double delta : cfg.noise_levels) {
        const Dataset ds = simulate_dataset(cfg, medium, grid, sources, delta, seed);
        const fs::path dir = single ? cfg.output : cfg.output / run_label(n, h, delta);
        write_dataset(dir, ds, cfg, delta, seed);
        std::cout << "wrote " << dir.string() << "\n";
      }
    }
  }
  return 0;
}

int cmd_reconstruct(const Options& o) {
  ExperimentConfig cfg = prepare(o);
  require(cfg.data.has_value(), ErrorKind::config, "reconstruct needs \"data\" in the config");
  const Dataset ds = read_dataset(*cfg.data, cfg);
  const ReconstructionRun run = reconstruct(ds, cfg);
  nlohmann::json context = {{"data", cfg.data->string()},
                            {"sqrtD_mode", to_string(cfg.sqrtD_mode)},
                            {"mode", to_string(cfg.mode)}};
  write_report(cfg.output, run, context);
  std::cout << "wrote " << cfg.output.string() << "\n";
  return 0;
}

int cmd_study(const Options& o) {
  const ExperimentConfig cfg = prepare(o);
  require(cfg.study.has_value(), ErrorKind::config, "study needs \"study\" in the config");
  const StudyResult r = run_study(cfg, *cfg.study);
  write_study(cfg.output, r);
  std::cout << r.table.csv();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantitative photoacoustic reconstruction with CGO illuminations"};
  app.require_subcommand(1);
  Options o;
  std::uint64_t seed = 0;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "JSON configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--mode", o.mode, "sqrt(D) closure")->check(CLI::IsMember({"strict", "exact"}));
    sub->add_option("--seed", seed, "noise seed");
  };
  CLI::App* forward = app.add_subcommand("forward", "simulate internal data");
  CLI::App* recon = app.add_subcommand("reconstruct", "reconstruct coefficients from a dataset");
  CLI::App* study = app.add_subcommand("study", "run a convergence or stability sweep");
  for (CLI::App* sub : {forward, recon, study}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : exit_code(ErrorKind::config);
  }
  for (CLI::App* sub : {forward, recon, study})
    if (sub->count("--seed")) o.seed = seed;

  try {
    if (*forward) return cmd_forward(o);
    if (*recon) return cmd_reconstruct(o);
    return cmd_study(o);
  } catch (const Error& e) {
    std::cerr << "qpat: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "qpat: unexpected failure: " << e.what() << "\n";
    return exit_code(ErrorKind::solver);
  }
}
