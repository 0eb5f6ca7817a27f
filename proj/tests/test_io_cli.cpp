// Copyright 2026 The qdoob Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>
#include <algorithm>
#include <filesystem>
#include <sstream>
#include <string>

#include "qdoob/cli.hpp"
#include "qdoob/io.hpp"

using namespace qdoob;
using Catch::Approx;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("qdoob_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

QuantumNetwork sample_net(std::uint64_t seed = 4, int n = 5) {
  EnsembleConfig cfg;
  cfg.n_sites = n;
  cfg.seed = seed;
  return sample_network(cfg, 0);
}

}  // namespace

TEST_CASE("network JSON round trip reproduces all fields exactly") {
  const QuantumNetwork net = sample_net();
  const json doc = network_to_json(net);
  const QuantumNetwork back = network_from_json(doc);
  REQUIRE(back.n_sites == net.n_sites);
  REQUIRE((back.hamiltonian - net.hamiltonian).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE(back.links == net.links);

  // And through a file as well.
  const fs::path dir = temp_dir("roundtrip");
  write_network_file(dir / "net.json", net);
  const QuantumNetwork from_file = read_network_file(dir / "net.json");
  REQUIRE((from_file.hamiltonian - net.hamiltonian).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE(from_file.links == net.links);
  fs::remove_all(dir);
}

TEST_CASE("network reader rejects malformed documents") {
  const QuantumNetwork net = sample_net();
  json doc = network_to_json(net);

  SECTION("dimension mismatch") {
    doc["n_sites"] = 6;  // hamiltonian stays 5x5
    REQUIRE_THROWS_AS(network_from_json(doc), IoError);
  }
  SECTION("missing hamiltonian") {
    doc.erase("hamiltonian");
    REQUIRE_THROWS_AS(network_from_json(doc), IoError);
  }
  SECTION("bad complex entry") {
    doc["hamiltonian"][0][1] = 3.0;
    REQUIRE_THROWS_AS(network_from_json(doc), IoError);
  }
  SECTION("invalid link index propagates the validation error") {
    doc["links"][0]["from"] = 99;
    REQUIRE_THROWS_AS(network_from_json(doc), ValidationError);
  }
}

TEST_CASE("superoperator debug dump round trips") {
  const QuantumNetwork net = sample_net(9, 3);
  const Superoperator liou = build_liouvillian(net);
  const Superoperator back = superoperator_from_json(superoperator_to_json(liou));
  REQUIRE(back.dim_hilbert == liou.dim_hilbert);
  REQUIRE((back.matrix - liou.matrix).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("ensemble config round trips through JSON") {
  EnsembleConfig cfg;
  cfg.n_sites = 6;
  cfg.n_samples = 77;
  cfg.tilt = 2.25;
  cfg.seed = 12345678901234ull;
  cfg.entry_low = 0.5;
  cfg.entry_high = 7.5;
  cfg.link_rate = 2.0;
  const EnsembleConfig back = ensemble_config_from_json(ensemble_config_to_json(cfg));
  REQUIRE(back.n_sites == cfg.n_sites);
  REQUIRE(back.n_samples == cfg.n_samples);
  REQUIRE(back.tilt == cfg.tilt);
  REQUIRE(back.seed == cfg.seed);
  REQUIRE(back.entry_low == cfg.entry_low);
  REQUIRE(back.entry_high == cfg.entry_high);
  REQUIRE(back.link_rate == cfg.link_rate);
}

TEST_CASE("format_double uses 17 significant digits") {
  REQUIRE(format_double(1.0 / 3.0) == "0.33333333333333331");
  REQUIRE(format_double(0.0) == "0");
  REQUIRE(format_double(1.0) == "1");
}

TEST_CASE("CSV writers are deterministic") {
  EnsembleConfig cfg;
  cfg.n_sites = 5;
  cfg.n_samples = 6;
  cfg.tilt = 2.0;
  cfg.seed = 21;
  const auto records_a = run_ensemble(cfg, 1);
  const auto records_b = run_ensemble(cfg, 2);
  REQUIRE(records_csv(records_a) == records_csv(records_b));

  const QuantumNetwork net = sample_net(33, 5);
  const auto rows_a = sweep_rows(net, {0.0, 1.0, 2.0});
  const auto rows_b = sweep_rows(net, {0.0, 1.0, 2.0});
  REQUIRE(sweep_csv(rows_a) == sweep_csv(rows_b));
  REQUIRE(sweep_csv(rows_a).substr(0, 2) == "s,");
}

TEST_CASE("contingency report carries counts, config echo and version") {
  EnsembleConfig cfg;
  cfg.n_sites = 5;
  cfg.n_samples = 8;
  cfg.tilt = 2.5;
  cfg.seed = 2;
  const auto records = run_ensemble(cfg, 0);
  const json report = contingency_report(cfg, records);
  REQUIRE(report["version"] == kVersion);
  REQUIRE(report["config"]["n_samples"] == 8);
  REQUIRE(report["seed"] == 2);
  REQUIRE(report["tables"].size() == 3);
  long long total = 0;
  for (const auto& key :
       {"eps_up_j_up", "eps_up_j_down", "eps_down_j_up", "eps_down_j_down"})
    total += report["tables"][0]["counts"][key].get<long long>();
  REQUIRE(total == 8);
}

TEST_CASE("cli gen writes identical files for identical flags") {
  const fs::path dir = temp_dir("cli_gen");
  const std::string out_a = (dir / "a.json").string();
  const std::string out_b = (dir / "b.json").string();
  REQUIRE(cli_main({"gen", "--n-sites", "7", "--seed", "7", "--out", out_a}) == 0);
  REQUIRE(cli_main({"gen", "--n-sites", "7", "--seed", "7", "--out", out_b}) == 0);
  REQUIRE(read_text_file(out_a) == read_text_file(out_b));
  const QuantumNetwork net = read_network_file(out_a);
  REQUIRE(net.n_sites == 7);
  fs::remove_all(dir);
}

TEST_CASE("cli sweep produces the requested grid with a convex SCGF") {
  const fs::path dir = temp_dir("cli_sweep");
  const std::string out = (dir / "sweep.csv").string();
  REQUIRE(cli_main({"sweep", "--seed", "5", "--n-sites", "5", "--s-min", "0",
                    "--s-max", "3.5", "--steps", "36", "--out", out}) == 0);
  const std::string csv = read_text_file(out);
  const auto lines = std::count(csv.begin(), csv.end(), '\n');
  REQUIRE(lines == 37);  // header + 36 rows
  REQUIRE(csv.rfind("s,theta,current_fd,current_stationary,residual_right,"
                    "residual_left,td_hamiltonian,td_jump\n", 0) == 0);

  // Post-check: the theta column is convex along the grid.
  std::vector<double> theta;
  std::istringstream stream(csv);
  std::string line;
  std::getline(stream, line);  // header
  while (std::getline(stream, line)) {
    const auto first = line.find(',');
    const auto second = line.find(',', first + 1);
    theta.push_back(std::stod(line.substr(first + 1, second - first - 1)));
  }
  REQUIRE(theta.size() == 36);
  for (std::size_t i = 2; i < theta.size(); ++i)
    REQUIRE(theta[i] - 2.0 * theta[i - 1] + theta[i - 2] >= -1e-8);
  fs::remove_all(dir);
}

TEST_CASE("cli doob emits the transformed network and deviation map") {
  const fs::path dir = temp_dir("cli_doob");
  REQUIRE(cli_main({"doob", "--seed", "3", "--n-sites", "5", "--s", "2.5", "--out",
                    dir.string()}) == 0);
  REQUIRE(fs::exists(dir / "doob_network.json"));
  REQUIRE(fs::exists(dir / "deviation.csv"));
  const json doc = json::parse(read_text_file(dir / "doob_network.json"));
  REQUIRE(doc["n_sites"] == 5);
  REQUIRE(doc["s"] == 2.5);
  REQUIRE(doc["jump_operators"].size() == 1);
  const std::string deviations = read_text_file(dir / "deviation.csv");
  REQUIRE(std::count(deviations.begin(), deviations.end(), '\n') == 26);  // header + 5x5
  fs::remove_all(dir);
}

TEST_CASE("cli ensemble writes records and contingency, byte-identical on rerun") {
  const fs::path dir_a = temp_dir("cli_ens_a");
  const fs::path dir_b = temp_dir("cli_ens_b");
  const std::vector<std::string> base{"ensemble", "--n-sites", "5", "--samples", "30",
                                      "--s",      "3.5",       "--seed",    "1"};
  auto with_out = [&](const fs::path& dir) {
    auto args = base;
    args.push_back("--out");
    args.push_back(dir.string());
    return args;
  };
  REQUIRE(cli_main(with_out(dir_a)) == 0);
  REQUIRE(cli_main(with_out(dir_b)) == 0);
  const std::string records_a = read_text_file(dir_a / "records.csv");
  REQUIRE(records_a == read_text_file(dir_b / "records.csv"));
  REQUIRE(read_text_file(dir_a / "contingency.json") ==
          read_text_file(dir_b / "contingency.json"));
  REQUIRE(std::count(records_a.begin(), records_a.end(), '\n') == 31);
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);
}

TEST_CASE("cli ensemble end-to-end smoke at the reference scale") {
  const fs::path dir = temp_dir("cli_ens_ref");
  REQUIRE(cli_main({"ensemble", "--n-sites", "7", "--samples", "200", "--s", "3.5",
                    "--seed", "1", "--out", dir.string()}) == 0);
  const std::string records = read_text_file(dir / "records.csv");
  REQUIRE(std::count(records.begin(), records.end(), '\n') == 201);  // header + 200 rows
  const json report = json::parse(read_text_file(dir / "contingency.json"));
  REQUIRE(report["tables"].size() == 3);
  REQUIRE(report["n_excluded"] == 0);
  fs::remove_all(dir);
}

TEST_CASE("cli ensemble honors a config file with flag overrides") {
  const fs::path dir = temp_dir("cli_cfg");
  EnsembleConfig cfg;
  cfg.n_sites = 5;
  cfg.n_samples = 4;
  cfg.tilt = 1.0;
  cfg.seed = 9;
  write_text_file(dir / "config.json", ensemble_config_to_json(cfg).dump() + "\n");
  REQUIRE(cli_main({"ensemble", "--config", (dir / "config.json").string(), "--samples",
                    "6", "--out", (dir / "run").string()}) == 0);
  const json report = json::parse(read_text_file(dir / "run" / "contingency.json"));
  REQUIRE(report["config"]["n_samples"] == 6);   // flag override
  REQUIRE(report["config"]["n_sites"] == 5);     // from file
  REQUIRE(report["config"]["tilt"] == 1.0);      // from file
  fs::remove_all(dir);
}

TEST_CASE("cli reports errors with a nonzero exit code") {
  REQUIRE(cli_main({"sweep", "--seed", "1", "--n-sites", "2", "--out", "/tmp/x.csv"}) != 0);
  REQUIRE(cli_main({"nonsense"}) != 0);
  REQUIRE(cli_main({"centro", "--seed", "1", "--n-sites", "12", "--out",
                    "/tmp/never.csv"}) != 0);
}

TEST_CASE("cli centro writes the ratio sweep") {
  const fs::path dir = temp_dir("cli_centro");
  const std::string out = (dir / "centro.csv").string();
  REQUIRE(cli_main({"centro", "--seed", "6", "--n-sites", "5", "--s-min", "0", "--s-max",
                    "2", "--steps", "3", "--out", out}) == 0);
  const std::string csv = read_text_file(out);
  REQUIRE(csv.rfind("s,epsilon_doob,epsilon_original,ratio,best_permutation\n", 0) == 0);
  REQUIRE(std::count(csv.begin(), csv.end(), '\n') == 4);
  fs::remove_all(dir);
}
