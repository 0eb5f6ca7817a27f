// Copyright 2026 The qdoob Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qdoob/doob.hpp"
#include "qdoob/ensemble.hpp"
#include "qdoob/io.hpp"
#include "qdoob/metrics.hpp"
#include "qdoob/network.hpp"
#include "qdoob/spectral.hpp"
#include "qdoob/version.hpp"

namespace qdoob {

namespace cli_detail {

/// Options shared by the subcommands that operate on one network: either a
/// network file or a deterministic generated sample.
struct NetworkSource {
  std::string net_file;
  int n_sites = 7;
  std::uint64_t seed = 1;
  std::uint64_t sample_index = 0;
  double gamma_link = 1.0;
  double entry_low = 1.0;
  double entry_high = 216.0;

  QuantumNetwork resolve() const {
    if (!net_file.empty()) return read_network_file(net_file);
    EnsembleConfig cfg;
    cfg.n_sites = n_sites;
    cfg.seed = seed;
    cfg.link_rate = gamma_link;
    cfg.entry_low = entry_low;
    cfg.entry_high = entry_high;
    return sample_network(cfg, sample_index);
  }
};

inline void add_source_options(CLI::App* cmd, NetworkSource& src) {
  cmd->add_option("--net", src.net_file, "Network JSON file (overrides generation)");
  cmd->add_option("--n-sites", src.n_sites, "Number of sites for generated networks");
  cmd->add_option("--seed", src.seed, "RNG seed for generated networks");
  cmd->add_option("--sample-index", src.sample_index,
                  "Ensemble sample index of the generated network");
  cmd->add_option("--gamma-link", src.gamma_link, "Incoherent link rate");
  cmd->add_option("--entry-low", src.entry_low, "Lower coupling bound");
  cmd->add_option("--entry-high", src.entry_high, "Upper coupling bound");
}

struct SweepGrid {
  double s_min = 0.0;
  double s_max = 3.5;
  int steps = 36;
  std::optional<double> single_s;

  std::vector<double> values() const {
    if (single_s) return {*single_s};
    if (steps < 1) throw ValidationError("--steps must be >= 1");
    if (steps == 1) return {s_min};
    if (!(s_min < s_max)) throw ValidationError("--s-min must be < --s-max");
    std::vector<double> grid(static_cast<std::size_t>(steps));
    for (int i = 0; i < steps; ++i)
      grid[static_cast<std::size_t>(i)] =
          s_min + (s_max - s_min) * static_cast<double>(i) / (steps - 1);
    return grid;
  }
};

inline void add_grid_options(CLI::App* cmd, SweepGrid& grid) {
  cmd->add_option("--s-min", grid.s_min, "Lower end of the tilt grid");
  cmd->add_option("--s-max", grid.s_max, "Upper end of the tilt grid");
  cmd->add_option("--steps", grid.steps, "Number of grid points");
  cmd->add_option("--s", grid.single_s, "Evaluate a single tilt value instead of a grid");
}

inline void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string());
}

}  // namespace cli_detail

/// Command-line driver. Returns a process exit code; failures print a
/// one-line diagnostic to stderr.
inline int cli_main(std::vector<std::string> args) {
  CLI::App app{"Quantum network transport optimization via the quantum Doob transform"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a random network file");
  cli_detail::NetworkSource gen_src;
  std::string gen_out;
  double gen_s_unused = 0.0;
  cli_detail::add_source_options(gen, gen_src);
  gen->add_option("--s", gen_s_unused, "Accepted for interface uniformity (unused)");
  gen->add_option("--out", gen_out, "Output network JSON path")->required();

  // sweep
  auto* sweep = app.add_subcommand(
      "sweep", "SCGF / current / trace-distance sweep for one network (CSV)");
  cli_detail::NetworkSource sweep_src;
  cli_detail::SweepGrid sweep_grid;
  sweep_grid.s_min = -1.0;
  std::string sweep_out;
  double sweep_fd_step = 1e-4;
  cli_detail::add_source_options(sweep, sweep_src);
  cli_detail::add_grid_options(sweep, sweep_grid);
  sweep->add_option("--fd-step", sweep_fd_step, "Central-difference step for J(s)");
  sweep->add_option("--out", sweep_out, "Output CSV path")->required();

  // doob
  auto* doob_cmd = app.add_subcommand(
      "doob", "Doob-transform one network (JSON + deviation CSV)");
  cli_detail::NetworkSource doob_src;
  std::string doob_out;
  double doob_s = 3.5;
  cli_detail::add_source_options(doob_cmd, doob_src);
  doob_cmd->add_option("--s", doob_s, "Tilt value of the transform");
  doob_cmd->add_option("--out", doob_out, "Output directory")->required();

  // centro
  auto* centro = app.add_subcommand(
      "centro", "Centrosymmetry ratio sweep of the Doob Hamiltonian (CSV)");
  cli_detail::NetworkSource centro_src;
  cli_detail::SweepGrid centro_grid;
  std::string centro_out;
  cli_detail::add_source_options(centro, centro_src);
  cli_detail::add_grid_options(centro, centro_grid);
  centro->add_option("--out", centro_out, "Output CSV path")->required();

  // ensemble
  auto* ens = app.add_subcommand(
      "ensemble", "Seeded Monte Carlo over random networks (records CSV + contingency JSON)");
  std::string ens_config_file, ens_out;
  int ens_threads = 0;
  EnsembleConfig ens_defaults;
  std::optional<int> ens_n_sites, ens_samples;
  std::optional<double> ens_s, ens_gamma, ens_entry_low, ens_entry_high;
  std::optional<std::uint64_t> ens_seed;
  ens->add_option("--config", ens_config_file, "EnsembleConfig JSON file");
  ens->add_option("--n-sites", ens_n_sites, "Number of sites");
  ens->add_option("--samples", ens_samples, "Number of ensemble samples");
  ens->add_option("--s", ens_s, "Tilt value");
  ens->add_option("--seed", ens_seed, "Ensemble seed");
  ens->add_option("--gamma-link", ens_gamma, "Incoherent link rate");
  ens->add_option("--entry-low", ens_entry_low, "Lower coupling bound");
  ens->add_option("--entry-high", ens_entry_high, "Upper coupling bound");
  ens->add_option("--threads", ens_threads, "Worker threads (0 = hardware)");
  ens->add_option("--out", ens_out, "Output directory")->required();

  try {
    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("qdoob");
    for (const auto& arg : args) argv.push_back(arg.c_str());
    app.parse(static_cast<int>(argv.size()), argv.data());

    if (gen->parsed()) {
      const QuantumNetwork net = gen_src.resolve();
      write_network_file(gen_out, net);
      std::cout << "wrote " << gen_out << "\n";
      return 0;
    }

    if (sweep->parsed()) {
      const QuantumNetwork net = sweep_src.resolve();
      const std::vector<double> grid = sweep_grid.values();
      const std::vector<SweepRow> rows = sweep_rows(net, grid, sweep_fd_step);
      // Enrich with the trace distances of the Doob operators per point.
      std::string csv =
          "s,theta,current_fd,current_stationary,residual_right,residual_left,"
          "td_hamiltonian,td_jump\n";
      const auto originals = link_operators(net);
      for (const auto& row : rows) {
        const SpectralTriple triple = leading_eigentriple(net, row.s);
        const DoobDynamics doob = doob_transform(net, triple);
        const double td_h = trace_distance(doob.hamiltonian_d, net.hamiltonian);
        double td_l = 0.0;
        for (std::size_t k = 0; k < originals.size(); ++k)
          td_l += trace_distance(doob.jumps_d[k], originals[k]);
        csv += format_double(row.s) + ',' + format_double(row.theta) + ',' +
               format_double(row.current_fd) + ',' + format_double(row.current_stationary) +
               ',' + format_double(row.residual_right) + ',' +
               format_double(row.residual_left) + ',' + format_double(td_h) + ',' +
               format_double(td_l) + '\n';
      }
      write_text_file(sweep_out, csv);
      std::cout << "wrote " << sweep_out << "\n";
      return 0;
    }

    if (doob_cmd->parsed()) {
      const QuantumNetwork net = doob_src.resolve();
      const SpectralTriple triple = leading_eigentriple(net, doob_s);
      const DoobDynamics doob = doob_transform(net, triple);
      verify_doob_generator(net, triple, doob);
      cli_detail::ensure_directory(doob_out);
      const auto dir = std::filesystem::path(doob_out);
      write_text_file(dir / "doob_network.json", doob_to_json(doob, net.n_sites).dump(2) + "\n");
      write_text_file(dir / "deviation.csv", deviation_csv(net, doob));
      std::cout << "wrote " << (dir / "doob_network.json").string() << " and "
                << (dir / "deviation.csv").string() << "\n";
      return 0;
    }

    if (centro->parsed()) {
      const QuantumNetwork net = centro_src.resolve();
      const auto points = centrosymmetry_ratio_sweep(net, centro_grid.values());
      write_text_file(centro_out, centro_csv(points));
      std::cout << "wrote " << centro_out << "\n";
      return 0;
    }

    if (ens->parsed()) {
      EnsembleConfig cfg = ens_defaults;
      if (!ens_config_file.empty()) {
        json doc;
        try {
          doc = json::parse(read_text_file(ens_config_file));
        } catch (const json::exception& e) {
          throw IoError(std::string("cannot parse config: ") + e.what());
        }
        cfg = ensemble_config_from_json(doc);
      }
      if (ens_n_sites) cfg.n_sites = *ens_n_sites;
      if (ens_samples) cfg.n_samples = *ens_samples;
      if (ens_s) cfg.tilt = *ens_s;
      if (ens_seed) cfg.seed = *ens_seed;
      if (ens_gamma) cfg.link_rate = *ens_gamma;
      if (ens_entry_low) cfg.entry_low = *ens_entry_low;
      if (ens_entry_high) cfg.entry_high = *ens_entry_high;

      const std::vector<EnsembleRecord> records = run_ensemble(cfg, ens_threads);
      cli_detail::ensure_directory(ens_out);
      const auto dir = std::filesystem::path(ens_out);
      write_text_file(dir / "records.csv", records_csv(records));
      write_text_file(dir / "contingency.json",
                      contingency_report(cfg, records).dump(2) + "\n");
      std::cout << "wrote " << (dir / "records.csv").string() << " and "
                << (dir / "contingency.json").string() << "\n";
      return 0;
    }

    return 0;
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

inline int cli_main(int argc, char** argv) {
  std::vector<std::string> args;
  args.reserve(static_cast<std::size_t>(argc > 0 ? argc - 1 : 0));
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return cli_main(std::move(args));
}

}  // namespace qdoob
