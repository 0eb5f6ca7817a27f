// Copyright 2026 The qdoob Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "qdoob/doob.hpp"
#include "qdoob/errors.hpp"
#include "qdoob/metrics.hpp"
#include "qdoob/network.hpp"
#include "qdoob/spectral.hpp"

namespace qdoob {

/// Per-sample outcome of an ensemble run: the stationary counted current of
/// the original network and of each Doob variant at the configured tilt, plus
/// the centrosymmetry measure of the original and Doob Hamiltonians.
/// A record is a pure function of (seed, sample_index, config). Spectral
/// failures are captured in status instead of aborting the run; failed
/// records carry NaNs.
struct EnsembleRecord {
  long long sample_index = 0;
  double j_original = std::numeric_limits<double>::quiet_NaN();
  double j_full_doob = std::numeric_limits<double>::quiet_NaN();
  double j_doob_h = std::numeric_limits<double>::quiet_NaN();
  double j_restored_link = std::numeric_limits<double>::quiet_NaN();
  double eps_original = std::numeric_limits<double>::quiet_NaN();
  double eps_doob = std::numeric_limits<double>::quiet_NaN();
  std::string status = "ok";

  bool ok() const { return status == "ok"; }
};

/// 2x2 contingency table over the joint direction of the centrosymmetry
/// measure and the current under one variant.
///
/// "eps up" counts samples whose centrosymmetry measure grew,
/// eps_doob > eps_original. (This is the event the reference ensemble
/// tabulates against current improvements; note that a larger epsilon means a
/// larger distance from exact exchange symmetry.) "j up" counts samples with
/// j_variant > j_original. Failed records are excluded and reported in
/// n_excluded.
struct ContingencyTable {
  VariantTag variant = VariantTag::kFullDoob;
  long long n_records = 0;
  long long n_ok = 0;
  long long n_excluded = 0;
  long long eps_up_j_up = 0;
  long long eps_up_j_down = 0;
  long long eps_down_j_up = 0;
  long long eps_down_j_down = 0;
  double p_eps_up_j_up = std::numeric_limits<double>::quiet_NaN();
  double p_j_up_given_eps_up = std::numeric_limits<double>::quiet_NaN();
  double p_eps_up_given_j_up = std::numeric_limits<double>::quiet_NaN();
};

/// Evaluate one network at tilt s: all variant currents plus centrosymmetry
/// of the original and Doob Hamiltonians.
inline EnsembleRecord evaluate_sample(const QuantumNetwork& net, double s,
                                      long long sample_index) {
  EnsembleRecord record;
  record.sample_index = sample_index;
  try {
    record.j_original = original_current(net);
    const SpectralTriple triple = leading_eigentriple(net, s);
    record.j_full_doob = variant_current(build_variant(net, triple, VariantTag::kFullDoob));
    record.j_doob_h =
        variant_current(build_variant(net, triple, VariantTag::kDoobHOriginalL));
    record.j_restored_link = variant_current(
        build_variant(net, triple, VariantTag::kDoobHRestoredLinkOriginalL));
    record.eps_original = centrosymmetry(net.hamiltonian).epsilon;
    record.eps_doob = centrosymmetry(doob_hamiltonian(net, triple)).epsilon;
  } catch (const DegeneracyError& e) {
    record.status = std::string("degeneracy: ") + e.what();
  } catch (const PositivityError& e) {
    record.status = std::string("positivity: ") + e.what();
  } catch (const Error& e) {
    record.status = std::string("error: ") + e.what();
  }
  for (char& c : record.status)
    if (c == ',' || c == '\n') c = ';';
  return record;
}

/// Seeded Monte Carlo driver. Samples are evaluated from independent
/// substreams keyed by (seed, sample_index), so the result is deterministic
/// and identical for any worker count. n_threads = 0 picks the hardware
/// concurrency.
inline std::vector<EnsembleRecord> run_ensemble(const EnsembleConfig& cfg,
                                                int n_threads = 0) {
  validate_config(cfg);
  validate_tilt(cfg.tilt);
  const int n = cfg.n_samples;
  std::vector<EnsembleRecord> records(static_cast<std::size_t>(n));

  if (n_threads <= 0) n_threads = static_cast<int>(std::thread::hardware_concurrency());
  n_threads = std::max(1, std::min(n_threads, n));

  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&]() {
    try {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
        const QuantumNetwork net = sample_network(cfg, static_cast<std::uint64_t>(i));
        records[static_cast<std::size_t>(i)] = evaluate_sample(net, cfg.tilt, i);
      }
    } catch (...) {
      std::scoped_lock lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  };

  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return records;
}

/// Contingency table of (eps direction) x (current direction) for one
/// variant.
inline ContingencyTable contingency(const std::vector<EnsembleRecord>& records,
                                    VariantTag variant) {
  if (records.empty()) throw ValidationError("contingency requires at least one record");
  ContingencyTable table;
  table.variant = variant;
  table.n_records = static_cast<long long>(records.size());
  for (const auto& record : records) {
    if (!record.ok()) {
      ++table.n_excluded;
      continue;
    }
    ++table.n_ok;
    double j_variant = 0.0;
    switch (variant) {
      case VariantTag::kFullDoob: j_variant = record.j_full_doob; break;
      case VariantTag::kDoobHOriginalL: j_variant = record.j_doob_h; break;
      case VariantTag::kDoobHRestoredLinkOriginalL: j_variant = record.j_restored_link; break;
      default: throw ValidationError("unknown dynamics variant tag");
    }
    const bool eps_up = record.eps_doob > record.eps_original;
    const bool j_up = j_variant > record.j_original;
    if (eps_up && j_up) ++table.eps_up_j_up;
    else if (eps_up) ++table.eps_up_j_down;
    else if (j_up) ++table.eps_down_j_up;
    else ++table.eps_down_j_down;
  }
  if (table.n_ok == 0) throw ValidationError("contingency requires at least one ok record");
  const auto ratio = [](long long num, long long den) {
    return den > 0 ? static_cast<double>(num) / static_cast<double>(den)
                   : std::numeric_limits<double>::quiet_NaN();
  };
  table.p_eps_up_j_up = ratio(table.eps_up_j_up, table.n_ok);
  table.p_j_up_given_eps_up =
      ratio(table.eps_up_j_up, table.eps_up_j_up + table.eps_up_j_down);
  table.p_eps_up_given_j_up =
      ratio(table.eps_up_j_up, table.eps_up_j_up + table.eps_down_j_up);
  return table;
}

/// Index of the sample with the largest full-Doob improvement ratio
/// j_full_doob / j_original; ties resolve to the smallest index.
inline long long select_best_improvement(const std::vector<EnsembleRecord>& records) {
  if (records.empty())
    throw ValidationError("select_best_improvement requires at least one record");
  long long best_index = -1;
  double best_ratio = -std::numeric_limits<double>::infinity();
  for (const auto& record : records) {
    if (!record.ok()) continue;
    const double ratio = record.j_full_doob / record.j_original;
    if (std::isfinite(ratio) && ratio > best_ratio) {
      best_ratio = ratio;
      best_index = record.sample_index;
    }
  }
  if (best_index < 0)
    throw ValidationError("select_best_improvement found no usable record");
  return best_index;
}

}  // namespace qdoob
