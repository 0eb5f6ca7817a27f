// Copyright 2026 The qdoob Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <cmath>
#include <complex>
#include <span>
#include <string>
#include <vector>

#include "qdoob/errors.hpp"
#include "qdoob/network.hpp"

namespace qdoob {

/// Overflow guard on the tilting parameter. exp(s_max) is still harmless in
/// double precision; values beyond it are rejected rather than silently
/// degrading the spectrum.
inline constexpr double kMaxTilt = 10.0;

/// Tilting parameter of the biased (s-ensemble) generator. The per-link
/// counting weights O_jk live on the network's links.
struct TiltSpec {
  double s = 0.0;
};

inline void validate_tilt(double s) {
  if (!std::isfinite(s)) throw ValidationError("tilt must be finite");
  if (std::abs(s) > kMaxTilt)
    throw TiltRangeError("tilt |s| = " + std::to_string(std::abs(s)) +
                         " exceeds s_max = " + std::to_string(kMaxTilt));
}

/// Dense matrix representation of a superoperator acting on vectorized
/// N x N operators. All superoperators in this library share the
/// column-stacking convention vec(AXB) = (B^T kron A) vec(X).
struct Superoperator {
  int dim_hilbert = 0;
  Eigen::MatrixXcd matrix;

  static constexpr const char* kVectorizationConvention = "column-stacking";
};

/// Stack the columns of an operator into an N^2 vector.
inline Eigen::VectorXcd vectorize(const Eigen::MatrixXcd& op) {
  if (op.rows() != op.cols()) throw DimensionError("vectorize expects a square matrix");
  return Eigen::Map<const Eigen::VectorXcd>(op.data(), op.size());
}

/// Inverse of vectorize. The length must be a perfect square.
inline Eigen::MatrixXcd devectorize(const Eigen::VectorXcd& vec) {
  const auto n2 = vec.size();
  const auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(n2))));
  if (n * n != n2) throw DimensionError("devectorize expects a square-length vector");
  return Eigen::Map<const Eigen::MatrixXcd>(vec.data(), n, n);
}

/// Apply a superoperator to an operator: devectorize(matrix * vectorize(X)).
inline Eigen::MatrixXcd apply(const Superoperator& superop, const Eigen::MatrixXcd& x) {
  if (x.rows() != superop.dim_hilbert || x.cols() != superop.dim_hilbert)
    throw DimensionError("operand dimension does not match superoperator");
  return devectorize(superop.matrix * vectorize(x));
}

namespace detail {

/// Generic tilted GKSL generator from explicit pieces. jump_factors[i]
/// multiplies the sandwich term L_i . L_i^dag; the anticommutator part is
/// never tilted.
inline Superoperator build_gksl_tilted(const Eigen::MatrixXcd& h,
                                       std::span<const Eigen::MatrixXcd> jumps,
                                       std::span<const double> jump_factors) {
  const auto n = h.rows();
  if (h.cols() != n) throw DimensionError("hamiltonian must be square");
  if (jumps.size() != jump_factors.size())
    throw DimensionError("one tilt factor per jump operator required");
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);
  const std::complex<double> im(0.0, 1.0);

  Eigen::MatrixXcd m = -im * (Eigen::kroneckerProduct(id, h).eval() -
                              Eigen::kroneckerProduct(h.transpose(), id).eval());
  for (std::size_t i = 0; i < jumps.size(); ++i) {
    const Eigen::MatrixXcd& l = jumps[i];
    if (l.rows() != n || l.cols() != n)
      throw DimensionError("jump operator dimension mismatch");
    const Eigen::MatrixXcd d = l.adjoint() * l;
    m += jump_factors[i] * Eigen::kroneckerProduct(l.conjugate(), l).eval();
    m -= 0.5 * (Eigen::kroneckerProduct(id, d).eval() +
                Eigen::kroneckerProduct(d.transpose(), id).eval());
  }
  return Superoperator{static_cast<int>(n), std::move(m)};
}

/// Adjoint (Heisenberg-picture) version, built independently from its own
/// formula rather than by transposing the direct generator.
inline Superoperator build_gksl_adjoint_tilted(const Eigen::MatrixXcd& h,
                                               std::span<const Eigen::MatrixXcd> jumps,
                                               std::span<const double> jump_factors) {
  const auto n = h.rows();
  if (h.cols() != n) throw DimensionError("hamiltonian must be square");
  if (jumps.size() != jump_factors.size())
    throw DimensionError("one tilt factor per jump operator required");
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);
  const std::complex<double> im(0.0, 1.0);

  Eigen::MatrixXcd m = im * (Eigen::kroneckerProduct(id, h).eval() -
                             Eigen::kroneckerProduct(h.transpose(), id).eval());
  for (std::size_t i = 0; i < jumps.size(); ++i) {
    const Eigen::MatrixXcd& l = jumps[i];
    if (l.rows() != n || l.cols() != n)
      throw DimensionError("jump operator dimension mismatch");
    const Eigen::MatrixXcd d = l.adjoint() * l;
    m += jump_factors[i] * Eigen::kroneckerProduct(l.transpose(), l.adjoint()).eval();
    m -= 0.5 * (Eigen::kroneckerProduct(id, d).eval() +
                Eigen::kroneckerProduct(d.transpose(), id).eval());
  }
  return Superoperator{static_cast<int>(n), std::move(m)};
}

inline std::vector<double> tilt_factors(const QuantumNetwork& net, double s) {
  std::vector<double> f;
  f.reserve(net.links.size());
  for (const auto& link : net.links) f.push_back(std::exp(s * link.counting_weight));
  return f;
}

inline Superoperator build_gksl(const Eigen::MatrixXcd& h,
                                std::span<const Eigen::MatrixXcd> jumps) {
  const std::vector<double> ones(jumps.size(), 1.0);
  return build_gksl_tilted(h, jumps, ones);
}

}  // namespace detail

/// Tilted Liouvillian L_s: the GKSL generator with every counted sandwich
/// term L rho L^dag multiplied by exp(s O_jk). s = 0 recovers the physical
/// generator bit-for-bit.
inline Superoperator build_tilted(const QuantumNetwork& net, TiltSpec tilt) {
  validate_tilt(tilt.s);
  const auto jumps = link_operators(net);
  const auto factors = detail::tilt_factors(net, tilt.s);
  return detail::build_gksl_tilted(net.hamiltonian, jumps, factors);
}

/// GKSL Liouvillian of the untilted dynamics.
inline Superoperator build_liouvillian(const QuantumNetwork& net) {
  return build_tilted(net, TiltSpec{0.0});
}

/// Adjoint tilted generator L_s^dag[X] = i[H,X] + sum e^{sO} L^dag X L
/// - {L^dag L, X}/2, dual to build_tilted under the Hilbert-Schmidt inner
/// product.
inline Superoperator build_adjoint_tilted(const QuantumNetwork& net, TiltSpec tilt) {
  validate_tilt(tilt.s);
  const auto jumps = link_operators(net);
  const auto factors = detail::tilt_factors(net, tilt.s);
  return detail::build_gksl_adjoint_tilted(net.hamiltonian, jumps, factors);
}

}  // namespace qdoob
