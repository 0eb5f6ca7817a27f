// Copyright 2026 The qdoob Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "qdoob/errors.hpp"
#include "qdoob/liouville.hpp"
#include "qdoob/network.hpp"
#include "qdoob/spectral.hpp"

namespace qdoob {

/// Doob-transformed dynamics: the modified Hamiltonian H^D_s and jump
/// operators L^D_jk,s whose GKSL generator realizes the s-ensemble statistics
/// as its stationary state. Counting weights are inherited from the original
/// links so that event rates through the counted transitions remain defined.
struct DoobDynamics {
  double s = 0.0;
  double theta = 0.0;
  Eigen::MatrixXcd hamiltonian_d;
  std::vector<Eigen::MatrixXcd> jumps_d;
  std::vector<int> counting_weights;
};

/// The dynamics variants compared in the ensemble study.
enum class VariantTag {
  kFullDoob,                    // (H^D, {L^D})
  kDoobHOriginalL,              // (H^D, original links)
  kDoobHRestoredLinkOriginalL,  // (H^D with (1,N),(N,1) reset to 1, original links)
};

inline const char* variant_name(VariantTag tag) {
  switch (tag) {
    case VariantTag::kFullDoob: return "full_doob";
    case VariantTag::kDoobHOriginalL: return "doob_h_original_l";
    case VariantTag::kDoobHRestoredLinkOriginalL: return "doob_h_restored_link_original_l";
  }
  throw ValidationError("unknown dynamics variant tag");
}

/// A concrete (Hamiltonian, jump list) pair ready to be turned into a GKSL
/// generator and evaluated for its stationary counted current.
struct DynamicsVariant {
  VariantTag tag = VariantTag::kFullDoob;
  Eigen::MatrixXcd hamiltonian;
  std::vector<Eigen::MatrixXcd> jumps;
  std::vector<int> counting_weights;
};

/// Doob Hamiltonian
///   H^D = (1/2) l^{1/2} (H - (i/2) sum L^dag L) l^{-1/2} + H.c.
/// The dissipative sum reduces to sum_j R_j |j><j| with R_j the total outflow
/// rate of site j. Exactly Hermitian by construction; equals H at s = 0.
inline Eigen::MatrixXcd doob_hamiltonian(const QuantumNetwork& net,
                                         const SpectralTriple& triple) {
  const MatrixSqrtPair root = matrix_sqrt(triple.left_eig);
  const auto jumps = link_operators(net);
  Eigen::MatrixXcd dissipative =
      Eigen::MatrixXcd::Zero(net.n_sites, net.n_sites);
  for (const auto& l : jumps) dissipative += l.adjoint() * l;
  const std::complex<double> im(0.0, 1.0);
  const Eigen::MatrixXcd g =
      root.sqrt * (net.hamiltonian - 0.5 * im * dissipative) * root.inverse_sqrt;
  return 0.5 * (g + g.adjoint());
}

/// Doob jump operators L^D_jk = e^{(s/2) O_jk} l^{1/2} L_jk l^{-1/2}.
/// These may pick up entries at transitions absent from the original link.
inline std::vector<Eigen::MatrixXcd> doob_jumps(const QuantumNetwork& net,
                                                const SpectralTriple& triple) {
  const MatrixSqrtPair root = matrix_sqrt(triple.left_eig);
  std::vector<Eigen::MatrixXcd> jumps;
  jumps.reserve(net.links.size());
  for (const auto& link : net.links) {
    const Eigen::MatrixXcd l = link_operator(net.n_sites, link);
    jumps.push_back(std::exp(0.5 * triple.s * link.counting_weight) * root.sqrt * l *
                    root.inverse_sqrt);
  }
  return jumps;
}

/// Assemble the full DoobDynamics for a network at the triple's tilt.
inline DoobDynamics doob_transform(const QuantumNetwork& net, const SpectralTriple& triple) {
  DoobDynamics doob;
  doob.s = triple.s;
  doob.theta = triple.theta;
  doob.hamiltonian_d = doob_hamiltonian(net, triple);
  doob.jumps_d = doob_jumps(net, triple);
  doob.counting_weights = counting_weights(net);
  return doob;
}

/// GKSL generator induced by the Doob Hamiltonian and jump operators.
/// Trace-preserving and completely positive by construction.
inline Superoperator doob_generator(const DoobDynamics& doob) {
  return detail::build_gksl(doob.hamiltonian_d, doob.jumps_d);
}

/// The same generator in similarity form,
///   L^D[X] = l^{1/2} L_s[ l^{-1/2} X l^{-1/2} ] l^{1/2} - theta X,
/// built directly from the tilted generator and the left eigenmatrix.
inline Superoperator doob_generator_similarity(const QuantumNetwork& net,
                                               const SpectralTriple& triple) {
  const Superoperator tilted = build_tilted(net, TiltSpec{triple.s});
  const MatrixSqrtPair root = matrix_sqrt(triple.left_eig);
  const Eigen::MatrixXcd sandwich_out =
      Eigen::kroneckerProduct(root.sqrt.transpose(), root.sqrt);
  const Eigen::MatrixXcd sandwich_in =
      Eigen::kroneckerProduct(root.inverse_sqrt.transpose(), root.inverse_sqrt);
  Eigen::MatrixXcd m = sandwich_out * tilted.matrix * sandwich_in;
  m -= triple.theta * Eigen::MatrixXcd::Identity(m.rows(), m.cols());
  return Superoperator{net.n_sites, std::move(m)};
}

/// Check that the GKSL and similarity forms of the Doob generator agree on
/// every matrix unit (i.e. entrywise) within tol.
inline void verify_doob_generator(const QuantumNetwork& net, const SpectralTriple& triple,
                                  const DoobDynamics& doob, double tol = 1e-8) {
  const Superoperator gksl = doob_generator(doob);
  const Superoperator similarity = doob_generator_similarity(net, triple);
  const double dev = (gksl.matrix - similarity.matrix).cwiseAbs().maxCoeff();
  if (dev > tol)
    throw ConsistencyError("GKSL and similarity forms of the Doob generator differ by " +
                           std::to_string(dev));
}

/// Stationary state of the Doob dynamics, rho_st = l^{1/2} r l^{1/2}.
/// Verified to be a unit-trace density matrix annihilated by the Doob
/// generator within 1e-8 (relative to max(1, generator norm)).
inline Eigen::MatrixXcd doob_steady_state(const DoobDynamics& doob,
                                          const SpectralTriple& triple) {
  const MatrixSqrtPair root = matrix_sqrt(triple.left_eig);
  Eigen::MatrixXcd rho = root.sqrt * triple.right_eig * root.sqrt;
  rho = 0.5 * (rho + rho.adjoint());
  if (std::abs(rho.trace().real() - 1.0) > 1e-8)
    throw ConsistencyError("Doob steady state does not have unit trace");
  {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho);
    if (es.eigenvalues().minCoeff() < -kPosTol)
      throw PositivityError("Doob steady state has negative eigenvalue " +
                            std::to_string(es.eigenvalues().minCoeff()));
  }
  const Superoperator generator = doob_generator(doob);
  const double residual = (generator.matrix * vectorize(rho)).norm();
  if (residual > 1e-8 * std::max(1.0, generator.matrix.norm()))
    throw ConsistencyError("Doob generator does not annihilate l^{1/2} r l^{1/2}; residual " +
                           std::to_string(residual));
  return rho;
}

/// Build one of the constrained dynamics variants.
inline DynamicsVariant build_variant(const QuantumNetwork& net, const SpectralTriple& triple,
                                     VariantTag tag) {
  DynamicsVariant variant;
  variant.tag = tag;
  switch (tag) {
    case VariantTag::kFullDoob: {
      DoobDynamics doob = doob_transform(net, triple);
      variant.hamiltonian = std::move(doob.hamiltonian_d);
      variant.jumps = std::move(doob.jumps_d);
      variant.counting_weights = std::move(doob.counting_weights);
      break;
    }
    case VariantTag::kDoobHOriginalL: {
      variant.hamiltonian = doob_hamiltonian(net, triple);
      variant.jumps = link_operators(net);
      variant.counting_weights = counting_weights(net);
      break;
    }
    case VariantTag::kDoobHRestoredLinkOriginalL: {
      variant.hamiltonian = doob_hamiltonian(net, triple);
      variant.hamiltonian(0, net.n_sites - 1) = 1.0;
      variant.hamiltonian(net.n_sites - 1, 0) = 1.0;
      variant.jumps = link_operators(net);
      variant.counting_weights = counting_weights(net);
      break;
    }
    default:
      throw ValidationError("unknown dynamics variant tag");
  }
  return variant;
}

namespace detail {

/// Stationary counted event rate of an untilted GKSL dynamics: the steady
/// state is solved for and sum tr[L rho L^dag] is taken over the counted
/// jumps.
inline double counted_stationary_rate(const Eigen::MatrixXcd& h,
                                      const std::vector<Eigen::MatrixXcd>& jumps,
                                      const std::vector<int>& weights) {
  const Superoperator generator = build_gksl(h, jumps);
  const Eigen::MatrixXcd rho = steady_state(generator);
  double rate = 0.0;
  for (std::size_t i = 0; i < jumps.size(); ++i) {
    if (weights[i] == 0) continue;
    rate += (jumps[i] * rho * jumps[i].adjoint()).trace().real();
  }
  return rate;
}

}  // namespace detail

/// Stationary current of a dynamics variant through its counted link(s).
inline double variant_current(const DynamicsVariant& variant) {
  return detail::counted_stationary_rate(variant.hamiltonian, variant.jumps,
                                         variant.counting_weights);
}

/// Stationary counted current of the unmodified network (the s = 0
/// efficiency against which the variants are compared).
inline double original_current(const QuantumNetwork& net) {
  return detail::counted_stationary_rate(net.hamiltonian, link_operators(net),
                                         counting_weights(net));
}

}  // namespace qdoob
