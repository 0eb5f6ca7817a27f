// Copyright 2026 The qdoob Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "qdoob/doob.hpp"
#include "qdoob/errors.hpp"
#include "qdoob/network.hpp"
#include "qdoob/spectral.hpp"

namespace qdoob {

/// Largest site count for which the centrosymmetry minimization enumerates
/// all (N-2)! intermediate permutations. 10 sites means 40320 candidates.
inline constexpr int kMaxExhaustiveSites = 10;

/// Hilbert-Schmidt (Frobenius) norm sqrt(tr[O^dag O]).
inline double hs_norm(const Eigen::MatrixXcd& op) { return op.norm(); }

/// Trace distance: half the sum of singular values of A - B. Applied here to
/// Hamiltonians and jump operators as-is, with the conventional 1/2
/// prefactor.
inline double trace_distance(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionError("trace_distance expects matrices of equal dimensions");
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a - b);
  return 0.5 * svd.singularValues().sum();
}

/// Result of the centrosymmetry minimization. best_permutation lists, for
/// each new position (1-based), the original site placed there; positions 1
/// and N are always fixed. epsilon = 0 iff some relabeling of the
/// intermediate sites makes the matrix exactly exchange-symmetric.
struct CentrosymmetryResult {
  double epsilon = 0.0;
  std::vector<int> best_permutation;
};

/// Centrosymmetry measure
///   epsilon = (1/N) min_P || H_P - A H_P A ||,
/// where H_P = P H P^T relabels the intermediate sites 2..N-1 and A is the
/// exchange matrix. The minimum runs over all (N-2)! relabelings; ties are
/// broken by the lexicographically smallest permutation. Both H_P and
/// A H_P A are pure reindexings of H, so the measure is exactly invariant
/// under intermediate-site relabelings of the input.
inline CentrosymmetryResult centrosymmetry(const Eigen::MatrixXcd& h) {
  const auto n = h.rows();
  if (h.cols() != n) throw DimensionError("centrosymmetry expects a square matrix");
  if (n < 2) throw SizeError("centrosymmetry requires at least 2 sites");
  if (n > kMaxExhaustiveSites)
    throw SizeError("centrosymmetry enumerates permutations exhaustively only up to N = " +
                    std::to_string(kMaxExhaustiveSites));

  std::vector<int> middle(static_cast<std::size_t>(std::max<Eigen::Index>(n - 2, 0)));
  std::iota(middle.begin(), middle.end(), 1);

  std::vector<int> perm(n), best_perm;
  double best_sq = std::numeric_limits<double>::infinity();
  do {
    perm[0] = 0;
    std::copy(middle.begin(), middle.end(), perm.begin() + 1);
    perm[n - 1] = static_cast<int>(n) - 1;
    double sq = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) {
        const std::complex<double> d =
            h(perm[i], perm[j]) - h(perm[n - 1 - i], perm[n - 1 - j]);
        sq += std::norm(d);
      }
    if (sq < best_sq) {
      best_sq = sq;
      best_perm = perm;
    }
  } while (std::next_permutation(middle.begin(), middle.end()));

  CentrosymmetryResult result;
  result.epsilon = std::sqrt(best_sq) / static_cast<double>(n);
  result.best_permutation.reserve(best_perm.size());
  for (int site : best_perm) result.best_permutation.push_back(site + 1);
  return result;
}

/// One point of a centrosymmetry ratio sweep.
struct CentroSweepPoint {
  double s = 0.0;
  double eps_doob = 0.0;
  double eps_original = 0.0;
  double ratio = 0.0;
  std::vector<int> best_permutation;
};

/// Centrosymmetry of the Doob Hamiltonian along a tilt sweep, normalized by
/// the original Hamiltonian's value. The ratio at s = 0 is 1 up to numerics.
inline std::vector<CentroSweepPoint> centrosymmetry_ratio_sweep(
    const QuantumNetwork& net, const std::vector<double>& s_values) {
  const CentrosymmetryResult original = centrosymmetry(net.hamiltonian);
  if (original.epsilon == 0.0)
    throw DivisionGuardError(
        "original Hamiltonian is exactly centrosymmetric (epsilon = 0); "
        "ratios are undefined, use raw centrosymmetry values instead");
  std::vector<CentroSweepPoint> points;
  points.reserve(s_values.size());
  for (double s : s_values) {
    const SpectralTriple triple = leading_eigentriple(net, s);
    const Eigen::MatrixXcd h_doob = doob_hamiltonian(net, triple);
    const CentrosymmetryResult doob = centrosymmetry(h_doob);
    CentroSweepPoint point;
    point.s = s;
    point.eps_doob = doob.epsilon;
    point.eps_original = original.epsilon;
    point.ratio = doob.epsilon / original.epsilon;
    point.best_permutation = doob.best_permutation;
    points.push_back(std::move(point));
  }
  return points;
}

}  // namespace qdoob
