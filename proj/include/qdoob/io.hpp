// Copyright 2026 The qdoob Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qdoob/doob.hpp"
#include "qdoob/ensemble.hpp"
#include "qdoob/errors.hpp"
#include "qdoob/liouville.hpp"
#include "qdoob/metrics.hpp"
#include "qdoob/network.hpp"
#include "qdoob/spectral.hpp"
#include "qdoob/version.hpp"

namespace qdoob {

using nlohmann::json;

/// Fixed floating-point formatting for CSV output: 17 significant digits,
/// enough for exact double round trips and byte-identical reruns.
inline std::string format_double(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

namespace detail {

inline json complex_to_json(const std::complex<double>& z) {
  return json::array({z.real(), z.imag()});
}

inline std::complex<double> complex_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw IoError("complex entries must be [real, imag] pairs");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline json matrix_to_json(const Eigen::MatrixXcd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(complex_to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Eigen::MatrixXcd matrix_from_json(const json& j, Eigen::Index rows,
                                         Eigen::Index cols) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows)
    throw IoError("matrix row count disagrees with the declared dimension");
  Eigen::MatrixXcd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw IoError("matrix column count disagrees with the declared dimension");
    for (Eigen::Index k = 0; k < cols; ++k)
      m(i, k) = complex_from_json(row[static_cast<std::size_t>(k)]);
  }
  return m;
}

inline std::string join_permutation(const std::vector<int>& perm) {
  std::string out;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    if (i) out += '-';
    out += std::to_string(perm[i]);
  }
  return out;
}

}  // namespace detail

/// Network document: n_sites, Hamiltonian as nested [real, imag] pairs, and
/// links as {from, to, rate, weight} with 1-based site indices.
inline json network_to_json(const QuantumNetwork& net) {
  json doc;
  doc["n_sites"] = net.n_sites;
  doc["hamiltonian"] = detail::matrix_to_json(net.hamiltonian);
  json links = json::array();
  for (const auto& link : net.links)
    links.push_back({{"from", link.from_site},
                     {"to", link.to_site},
                     {"rate", link.rate},
                     {"weight", link.counting_weight}});
  doc["links"] = std::move(links);
  return doc;
}

inline QuantumNetwork network_from_json(const json& doc) {
  if (!doc.contains("n_sites") || !doc["n_sites"].is_number_integer())
    throw IoError("network document needs an integer n_sites");
  const int n = doc["n_sites"].get<int>();
  if (n < 2) throw IoError("network document has n_sites < 2");
  if (!doc.contains("hamiltonian"))
    throw IoError("network document needs a hamiltonian");
  const Eigen::MatrixXcd h = detail::matrix_from_json(doc["hamiltonian"], n, n);
  std::vector<IncoherentLink> links;
  if (doc.contains("links")) {
    if (!doc["links"].is_array()) throw IoError("links must be an array");
    for (const auto& item : doc["links"]) {
      IncoherentLink link;
      link.from_site = item.at("from").get<int>();
      link.to_site = item.at("to").get<int>();
      link.rate = item.at("rate").get<double>();
      link.counting_weight = item.at("weight").get<int>();
      links.push_back(link);
    }
  }
  return build_network(h, std::move(links));
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return text;
}

inline void write_network_file(const std::filesystem::path& path, const QuantumNetwork& net) {
  write_text_file(path, network_to_json(net).dump(2) + "\n");
}

inline QuantumNetwork read_network_file(const std::filesystem::path& path) {
  json doc;
  try {
    doc = json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw IoError("cannot parse " + path.string() + ": " + e.what());
  }
  return network_from_json(doc);
}

/// Doob output document: shares the network document's container shape but
/// carries full jump-operator matrices, which a {from,to,rate} link entry
/// cannot represent.
inline json doob_to_json(const DoobDynamics& doob, int n_sites) {
  json doc;
  doc["n_sites"] = n_sites;
  doc["s"] = doob.s;
  doc["theta"] = doob.theta;
  doc["hamiltonian"] = detail::matrix_to_json(doob.hamiltonian_d);
  json jumps = json::array();
  for (std::size_t i = 0; i < doob.jumps_d.size(); ++i)
    jumps.push_back({{"matrix", detail::matrix_to_json(doob.jumps_d[i])},
                     {"weight", doob.counting_weights[i]}});
  doc["jump_operators"] = std::move(jumps);
  return doc;
}

/// Debug dump of a superoperator for test fixtures.
inline json superoperator_to_json(const Superoperator& superop) {
  json doc;
  doc["dim_hilbert"] = superop.dim_hilbert;
  doc["convention"] = Superoperator::kVectorizationConvention;
  doc["matrix"] = detail::matrix_to_json(superop.matrix);
  return doc;
}

inline Superoperator superoperator_from_json(const json& doc) {
  const int n = doc.at("dim_hilbert").get<int>();
  if (doc.at("convention").get<std::string>() != Superoperator::kVectorizationConvention)
    throw IoError("unsupported vectorization convention");
  Superoperator superop;
  superop.dim_hilbert = n;
  const auto dim = static_cast<Eigen::Index>(n) * n;
  superop.matrix = detail::matrix_from_json(doc.at("matrix"), dim, dim);
  return superop;
}

inline json ensemble_config_to_json(const EnsembleConfig& cfg) {
  return json{{"n_sites", cfg.n_sites},   {"n_samples", cfg.n_samples},
              {"tilt", cfg.tilt},         {"seed", cfg.seed},
              {"entry_low", cfg.entry_low}, {"entry_high", cfg.entry_high},
              {"link_rate", cfg.link_rate}};
}

inline EnsembleConfig ensemble_config_from_json(const json& doc) {
  EnsembleConfig cfg;
  if (doc.contains("n_sites")) cfg.n_sites = doc["n_sites"].get<int>();
  if (doc.contains("n_samples")) cfg.n_samples = doc["n_samples"].get<int>();
  if (doc.contains("tilt")) cfg.tilt = doc["tilt"].get<double>();
  if (doc.contains("seed")) cfg.seed = doc["seed"].get<std::uint64_t>();
  if (doc.contains("entry_low")) cfg.entry_low = doc["entry_low"].get<double>();
  if (doc.contains("entry_high")) cfg.entry_high = doc["entry_high"].get<double>();
  if (doc.contains("link_rate")) cfg.link_rate = doc["link_rate"].get<double>();
  return cfg;
}

/// CSV of spectral sweep rows.
inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "s,theta,current_fd,current_stationary,residual_right,residual_left\n";
  for (const auto& row : rows) {
    out += format_double(row.s) + ',' + format_double(row.theta) + ',' +
           format_double(row.current_fd) + ',' + format_double(row.current_stationary) + ',' +
           format_double(row.residual_right) + ',' + format_double(row.residual_left) + '\n';
  }
  return out;
}

/// CSV of ensemble records.
inline std::string records_csv(const std::vector<EnsembleRecord>& records) {
  std::string out =
      "sample_index,j_original,j_full_doob,j_doob_h,j_restored_link,"
      "eps_original,eps_doob,status\n";
  for (const auto& record : records) {
    out += std::to_string(record.sample_index) + ',' + format_double(record.j_original) +
           ',' + format_double(record.j_full_doob) + ',' + format_double(record.j_doob_h) +
           ',' + format_double(record.j_restored_link) + ',' +
           format_double(record.eps_original) + ',' + format_double(record.eps_doob) + ',' +
           record.status + '\n';
  }
  return out;
}

/// CSV of a centrosymmetry ratio sweep.
inline std::string centro_csv(const std::vector<CentroSweepPoint>& points) {
  std::string out = "s,epsilon_doob,epsilon_original,ratio,best_permutation\n";
  for (const auto& point : points) {
    out += format_double(point.s) + ',' + format_double(point.eps_doob) + ',' +
           format_double(point.eps_original) + ',' + format_double(point.ratio) + ',' +
           detail::join_permutation(point.best_permutation) + '\n';
  }
  return out;
}

/// CSV of per-entry deviations |H^D - H| and |L^D - L| (the jump deviation is
/// combined over links in quadrature).
inline std::string deviation_csv(const QuantumNetwork& net, const DoobDynamics& doob) {
  const auto originals = link_operators(net);
  std::string out = "i,j,dh_abs,dl_abs\n";
  for (int i = 0; i < net.n_sites; ++i)
    for (int j = 0; j < net.n_sites; ++j) {
      const double dh = std::abs(doob.hamiltonian_d(i, j) - net.hamiltonian(i, j));
      double dl_sq = 0.0;
      for (std::size_t k = 0; k < originals.size(); ++k)
        dl_sq += std::norm(doob.jumps_d[k](i, j) - originals[k](i, j));
      out += std::to_string(i + 1) + ',' + std::to_string(j + 1) + ',' +
             format_double(dh) + ',' + format_double(std::sqrt(dl_sq)) + '\n';
    }
  return out;
}

namespace detail {

inline json contingency_to_json(const ContingencyTable& table) {
  json doc;
  doc["variant"] = variant_name(table.variant);
  doc["counts"] = {{"eps_up_j_up", table.eps_up_j_up},
                   {"eps_up_j_down", table.eps_up_j_down},
                   {"eps_down_j_up", table.eps_down_j_up},
                   {"eps_down_j_down", table.eps_down_j_down}};
  doc["n_records"] = table.n_records;
  doc["n_ok"] = table.n_ok;
  doc["n_excluded"] = table.n_excluded;
  auto prob = [](double p) { return std::isnan(p) ? json() : json(p); };
  doc["p_eps_up_j_up"] = prob(table.p_eps_up_j_up);
  doc["p_j_up_given_eps_up"] = prob(table.p_j_up_given_eps_up);
  doc["p_eps_up_given_j_up"] = prob(table.p_eps_up_given_j_up);
  return doc;
}

}  // namespace detail

/// Full contingency report for an ensemble run: one table per variant plus
/// the configuration echo and software version.
inline json contingency_report(const EnsembleConfig& cfg,
                               const std::vector<EnsembleRecord>& records) {
  json doc;
  doc["version"] = kVersion;
  doc["config"] = ensemble_config_to_json(cfg);
  doc["seed"] = cfg.seed;
  long long excluded = 0;
  for (const auto& record : records)
    if (!record.ok()) ++excluded;
  doc["n_excluded"] = excluded;
  json tables = json::array();
  for (VariantTag tag : {VariantTag::kFullDoob, VariantTag::kDoobHOriginalL,
                         VariantTag::kDoobHRestoredLinkOriginalL})
    tables.push_back(detail::contingency_to_json(contingency(records, tag)));
  doc["tables"] = std::move(tables);
  return doc;
}

}  // namespace qdoob
