// Copyright 2026 The qdoob Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qdoob/errors.hpp"
#include "qdoob/rng.hpp"

namespace qdoob {

/// One unidirectional incoherent transition |from> -> |to| with jump operator
/// L = sqrt(rate) |to><from|. Site indices are 1-based throughout the public
/// interface. counting_weight is the O_jk in {0,1} selecting whether jumps
/// through this link are counted by the trajectory observable.
struct IncoherentLink {
  int from_site = 0;
  int to_site = 0;
  double rate = 0.0;
  int counting_weight = 1;

  friend bool operator==(const IncoherentLink&, const IncoherentLink&) = default;
};

/// A quantum network in the single-excitation manifold: N sites, a Hermitian
/// coupling matrix with zero diagonal (hbar = 1), and a list of incoherent
/// links. Immutable after construction via build_network.
struct QuantumNetwork {
  int n_sites = 0;
  Eigen::MatrixXcd hamiltonian;
  std::vector<IncoherentLink> links;
};

/// Parameters of a random-network ensemble run.
struct EnsembleConfig {
  int n_sites = 7;
  int n_samples = 1000;
  double tilt = 3.5;
  std::uint64_t seed = 1;
  double entry_low = 1.0;
  double entry_high = 216.0;
  double link_rate = 1.0;
};

inline void validate_config(const EnsembleConfig& cfg) {
  if (cfg.n_samples < 1) throw ValidationError("n_samples must be >= 1");
  if (!(cfg.entry_low < cfg.entry_high))
    throw ValidationError("entry_low must be < entry_high");
  if (cfg.n_sites < 3) throw SizeError("ensemble networks need n_sites >= 3");
  if (cfg.link_rate < 0.0) throw ValidationError("link_rate must be >= 0");
  if (!std::isfinite(cfg.tilt)) throw ValidationError("tilt must be finite");
}

/// Random coupling matrix: every entry of an n x n matrix X is drawn uniformly
/// from [entry_low, entry_high), the symmetric part Y = (X + X^T)/2 is taken,
/// the (1,N) coupling is pinned to 1 (the weakest in the network) and the
/// diagonal is set to zero. Entries are drawn in row-major order, so a given
/// stream state yields a unique matrix.
inline Eigen::MatrixXd random_hamiltonian(int n_sites, std::mt19937_64& rng,
                                          double entry_low = 1.0,
                                          double entry_high = 216.0) {
  if (n_sites < 3)
    throw SizeError("random_hamiltonian requires n_sites >= 3 (no intermediate sites otherwise)");
  if (!(entry_low < entry_high))
    throw ValidationError("entry_low must be < entry_high");
  Eigen::MatrixXd x(n_sites, n_sites);
  for (int i = 0; i < n_sites; ++i)
    for (int j = 0; j < n_sites; ++j) x(i, j) = uniform_in(rng, entry_low, entry_high);
  Eigen::MatrixXd h = 0.5 * (x + x.transpose());
  h(0, n_sites - 1) = 1.0;
  h(n_sites - 1, 0) = 1.0;
  h.diagonal().setZero();
  return h;
}

/// Validating constructor for QuantumNetwork.
///
/// The Hamiltonian must be Hermitian within 1e-12 (relative to its largest
/// entry) and have a vanishing diagonal; it is then exactly symmetrized.
/// Link indices must be 1-based, in range, with from != to, rate >= 0 and
/// counting weight in {0,1}.
inline QuantumNetwork build_network(const Eigen::MatrixXcd& hamiltonian,
                                    std::vector<IncoherentLink> links) {
  const auto n = hamiltonian.rows();
  if (n != hamiltonian.cols()) throw DimensionError("hamiltonian must be square");
  if (n < 2) throw SizeError("network needs at least 2 sites");

  const double scale = std::max(1.0, hamiltonian.cwiseAbs().maxCoeff());
  const double herm_dev = (hamiltonian - hamiltonian.adjoint()).cwiseAbs().maxCoeff();
  if (herm_dev > 1e-12 * scale)
    throw ValidationError("hamiltonian is not Hermitian (max deviation " +
                          std::to_string(herm_dev) + ")");
  const double diag_dev = hamiltonian.diagonal().cwiseAbs().maxCoeff();
  if (diag_dev > 1e-12 * scale)
    throw ValidationError("hamiltonian diagonal must be zero in the single-excitation model");

  QuantumNetwork net;
  net.n_sites = static_cast<int>(n);
  net.hamiltonian = 0.5 * (hamiltonian + hamiltonian.adjoint());
  net.hamiltonian.diagonal().setZero();

  for (const auto& link : links) {
    if (link.from_site < 1 || link.from_site > net.n_sites || link.to_site < 1 ||
        link.to_site > net.n_sites)
      throw ValidationError("link site index out of range [1, N]");
    if (link.from_site == link.to_site)
      throw ValidationError("link must connect two distinct sites");
    if (!(link.rate >= 0.0)) throw ValidationError("link rate must be >= 0");
    if (link.counting_weight != 0 && link.counting_weight != 1)
      throw ValidationError("counting weight must be 0 or 1");
  }
  net.links = std::move(links);
  return net;
}

/// Exchange (anti-diagonal permutation) matrix A with A_ij = 1 iff i = N-j+1.
/// Symmetric, orthogonal and its own inverse.
inline Eigen::MatrixXd exchange_matrix(int n_sites) {
  if (n_sites < 2) throw SizeError("exchange_matrix requires n_sites >= 2");
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n_sites, n_sites);
  for (int i = 0; i < n_sites; ++i) a(i, n_sites - 1 - i) = 1.0;
  return a;
}

/// Jump operator matrix sqrt(rate) |to><from| for one link.
inline Eigen::MatrixXcd link_operator(int n_sites, const IncoherentLink& link) {
  Eigen::MatrixXcd op = Eigen::MatrixXcd::Zero(n_sites, n_sites);
  op(link.to_site - 1, link.from_site - 1) = std::sqrt(link.rate);
  return op;
}

inline std::vector<Eigen::MatrixXcd> link_operators(const QuantumNetwork& net) {
  std::vector<Eigen::MatrixXcd> ops;
  ops.reserve(net.links.size());
  for (const auto& link : net.links) ops.push_back(link_operator(net.n_sites, link));
  return ops;
}

inline std::vector<int> counting_weights(const QuantumNetwork& net) {
  std::vector<int> w;
  w.reserve(net.links.size());
  for (const auto& link : net.links) w.push_back(link.counting_weight);
  return w;
}

/// Ensemble member #sample_index: a random Hamiltonian plus the counted
/// incoherent output->input link N -> 1. A pure function of
/// (cfg.seed, sample_index, cfg).
inline QuantumNetwork sample_network(const EnsembleConfig& cfg, std::uint64_t sample_index) {
  validate_config(cfg);
  auto rng = substream(cfg.seed, sample_index);
  Eigen::MatrixXd h =
      random_hamiltonian(cfg.n_sites, rng, cfg.entry_low, cfg.entry_high);
  IncoherentLink link{cfg.n_sites, 1, cfg.link_rate, 1};
  return build_network(h.cast<std::complex<double>>(), {link});
}

}  // namespace qdoob
