// Copyright 2026 The qdoob Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>
#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qdoob/errors.hpp"
#include "qdoob/liouville.hpp"
#include "qdoob/network.hpp"

namespace qdoob {

/// Minimum real-part gap between the two leading eigenvalues; anything
/// smaller is reported as a degeneracy instead of silently picking one.
inline constexpr double kGapTol = 1e-8;

/// Positivity tolerance: eigenvalues in (-kPosTol, 0) are treated as
/// floating-point noise and clipped to zero.
inline constexpr double kPosTol = 1e-9;

/// Relative eigen-residual bound enforced on the extracted eigenmatrices.
inline constexpr double kResidualTol = 1e-8;

/// Leading eigentriple of the tilted generator: the SCGF theta(s) together
/// with the normalized right/left eigenmatrices (r_s, l_s),
/// tr[r] = tr[l r] = 1. Residuals are reported relative to
/// ||matrix||_F * max(1, ||eigenmatrix||_F).
struct SpectralTriple {
  double s = 0.0;
  double theta = 0.0;
  Eigen::MatrixXcd right_eig;
  Eigen::MatrixXcd left_eig;
  double residual_right = 0.0;
  double residual_left = 0.0;
};

/// SCGF sweep over sorted tilt values, with the current J(s) = theta'(s).
struct ScgfSweep {
  std::vector<double> s_values;
  std::vector<double> theta_values;
  std::vector<double> current_values;
};

/// One exportable sweep point (see sweep_csv in io.hpp).
struct SweepRow {
  double s = 0.0;
  double theta = 0.0;
  double current_fd = 0.0;
  double current_stationary = 0.0;
  double residual_right = 0.0;
  double residual_left = 0.0;
};

/// Principal square root and inverse square root of a Hermitian
/// positive-definite matrix.
struct MatrixSqrtPair {
  Eigen::MatrixXcd sqrt;
  Eigen::MatrixXcd inverse_sqrt;
};

namespace detail {

struct EigenPair {
  std::complex<double> value;
  Eigen::VectorXcd vector;  // unit norm
};

/// One Newton step on the bordered system [[M - lambda I, -v], [v^H, 0]];
/// pushes the eigen-residual of a simple eigenpair down to the machine floor.
inline void refine_eigenpair(const Eigen::MatrixXcd& m, std::complex<double>& value,
                             Eigen::VectorXcd& vec, int iterations = 2) {
  const auto n = m.rows();
  const double m_norm = m.norm();
  for (int it = 0; it < iterations; ++it) {
    Eigen::VectorXcd res = m * vec - value * vec;
    if (res.norm() <= 10.0 * std::numeric_limits<double>::epsilon() * m_norm) return;
    Eigen::MatrixXcd bordered(n + 1, n + 1);
    bordered.topLeftCorner(n, n) = m - value * Eigen::MatrixXcd::Identity(n, n);
    bordered.topRightCorner(n, 1) = -vec;
    bordered.bottomLeftCorner(1, n) = vec.adjoint();
    bordered(n, n) = 0.0;
    Eigen::VectorXcd rhs(n + 1);
    rhs.head(n) = -res;
    rhs(n) = 0.0;
    Eigen::VectorXcd delta = bordered.partialPivLu().solve(rhs);
    if (!delta.allFinite()) return;
    vec += delta.head(n);
    vec.normalize();
    value += delta(n);
  }
}

/// Eigenvalue with the largest real part plus its (refined) eigenvector.
/// Throws DegeneracyError when the real-part gap to the runner-up is below
/// kGapTol; a complex-conjugate leading pair is caught by the same test.
inline EigenPair leading_eigenpair(const Eigen::MatrixXcd& m) {
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(m);
  if (solver.info() != Eigen::Success)
    throw ConsistencyError("eigendecomposition failed to converge");
  const auto& values = solver.eigenvalues();
  Eigen::Index lead = 0, second = -1;
  for (Eigen::Index i = 1; i < values.size(); ++i)
    if (values(i).real() > values(lead).real()) lead = i;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (i == lead) continue;
    if (second < 0 || values(i).real() > values(second).real()) second = i;
  }
  const double scale = std::max(1.0, std::abs(values(lead)));
  if (second >= 0 && values(lead).real() - values(second).real() < kGapTol * scale) {
    std::ostringstream msg;
    msg << "leading eigenvalue is degenerate: " << values(lead) << " vs "
        << values(second);
    throw DegeneracyError(msg.str());
  }
  EigenPair pair{values(lead), solver.eigenvectors().col(lead)};
  pair.vector.normalize();
  refine_eigenpair(m, pair.value, pair.vector);
  return pair;
}

/// Devectorize an eigenvector of a superoperator and repair it into a
/// Hermitian matrix: rotate the arbitrary complex phase so the trace is real
/// and positive, then symmetrize away the remaining noise.
inline Eigen::MatrixXcd hermitian_from_vector(const Eigen::VectorXcd& vec) {
  Eigen::MatrixXcd x = devectorize(vec);
  const std::complex<double> tr = x.trace();
  if (std::abs(tr) < 1e-12 * x.norm())
    throw ConsistencyError("eigenmatrix trace vanishes; cannot fix its phase");
  x *= std::conj(tr) / std::abs(tr);
  return (0.5 * (x + x.adjoint())).eval();
}

/// Clip eigenvalues in (-kPosTol, 0) to zero; anything at or below -kPosTol
/// is a genuine positivity failure.
inline Eigen::MatrixXcd clip_negative_eigenvalues(const Eigen::MatrixXcd& h,
                                                  const char* label) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  Eigen::VectorXd w = es.eigenvalues();
  if (w.minCoeff() <= -kPosTol)
    throw PositivityError(std::string(label) + " has negative eigenvalue " +
                          std::to_string(w.minCoeff()));
  bool clipped = false;
  for (Eigen::Index i = 0; i < w.size(); ++i)
    if (w(i) < 0.0) {
      w(i) = 0.0;
      clipped = true;
    }
  if (!clipped) return h;
  return es.eigenvectors() * w.asDiagonal() * es.eigenvectors().adjoint();
}

inline double relative_residual(const Eigen::MatrixXcd& m, double theta,
                                const Eigen::MatrixXcd& eigmat) {
  const double num = (m * vectorize(eigmat) - theta * vectorize(eigmat)).norm();
  return num / (m.norm() * std::max(1.0, eigmat.norm()));
}

}  // namespace detail

/// SCGF theta(s) alone (one eigendecomposition, no eigenmatrix extraction).
inline double leading_theta(const QuantumNetwork& net, double s) {
  const Superoperator m = build_tilted(net, TiltSpec{s});
  const auto pair = detail::leading_eigenpair(m.matrix);
  if (std::abs(pair.value.imag()) > 1e-8 * std::max(1.0, std::abs(pair.value)))
    throw ConsistencyError("leading eigenvalue has a non-negligible imaginary part");
  return pair.value.real();
}

/// Leading eigentriple (theta(s), r_s, l_s) of the tilted generator.
///
/// r_s is hermitized, clipped to positive semidefinite and normalized to unit
/// trace; l_s is hermitized and rescaled so that tr[l_s r_s] = 1. Both
/// eigen-residuals are enforced below kResidualTol relative to the generator
/// norm. At s = 0 this yields theta = 0, l = identity and r = the stationary
/// state.
inline SpectralTriple leading_eigentriple(const QuantumNetwork& net, double s) {
  const Superoperator m = build_tilted(net, TiltSpec{s});
  const Superoperator madj = build_adjoint_tilted(net, TiltSpec{s});

  const auto right = detail::leading_eigenpair(m.matrix);
  const auto left = detail::leading_eigenpair(madj.matrix);

  const double scale = std::max(1.0, std::abs(right.value));
  if (std::abs(right.value.imag()) > 1e-8 * scale)
    throw ConsistencyError("SCGF has a non-negligible imaginary part");
  if (std::abs(right.value - std::conj(left.value)) > 1e-7 * scale)
    throw ConsistencyError("direct and adjoint generators disagree on the leading eigenvalue");

  SpectralTriple triple;
  triple.s = s;
  triple.theta = right.value.real();

  Eigen::MatrixXcd r = detail::hermitian_from_vector(right.vector);
  r = detail::clip_negative_eigenvalues(r, "right eigenmatrix r_s");
  r /= r.trace().real();
  triple.right_eig = std::move(r);

  Eigen::MatrixXcd l = detail::hermitian_from_vector(left.vector);
  {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(l);
    if (es.eigenvalues().minCoeff() < -kPosTol)
      throw PositivityError("left eigenmatrix l_s has negative eigenvalue " +
                            std::to_string(es.eigenvalues().minCoeff()));
  }
  const double overlap = (l * triple.right_eig).trace().real();
  if (std::abs(overlap) < 1e-12)
    throw ConsistencyError("tr[l r] vanishes; cannot normalize the eigentriple");
  l /= overlap;
  {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(l);
    if (es.eigenvalues().minCoeff() <= 0.0)
      throw PositivityError("normalized l_s is not positive definite");
  }
  triple.left_eig = std::move(l);

  triple.residual_right = detail::relative_residual(m.matrix, triple.theta, triple.right_eig);
  triple.residual_left = detail::relative_residual(madj.matrix, triple.theta, triple.left_eig);
  if (triple.residual_right > kResidualTol || triple.residual_left > kResidualTol)
    throw ConsistencyError("eigen-residuals exceed tolerance");
  return triple;
}

/// Current J(s) = theta'(s) by central finite differences.
inline double current_fd(const QuantumNetwork& net, double s, double step = 1e-4) {
  if (!(step > 0.0)) throw ValidationError("finite-difference step must be > 0");
  validate_tilt(std::abs(s) + step);
  return (leading_theta(net, s + step) - leading_theta(net, s - step)) / (2.0 * step);
}

/// Stationary current from the eigentriple alone:
/// J(s) = sum over counted links of e^{s O} tr[L^dag l_s L r_s].
/// First-order perturbation identity for theta'(s); cross-validates
/// current_fd. Links with counting weight 0 do not contribute (they do not
/// enter the derivative of the tilted generator with respect to s).
inline double current_stationary(const SpectralTriple& triple, const QuantumNetwork& net) {
  double current = 0.0;
  for (const auto& link : net.links) {
    if (link.counting_weight == 0) continue;
    const Eigen::MatrixXcd l_op = link_operator(net.n_sites, link);
    const std::complex<double> term =
        (l_op.adjoint() * triple.left_eig * l_op * triple.right_eig).trace();
    current += std::exp(triple.s * link.counting_weight) * term.real();
  }
  return current;
}

/// Per-point sweep data for CSV export.
inline std::vector<SweepRow> sweep_rows(const QuantumNetwork& net,
                                        const std::vector<double>& s_values,
                                        double fd_step = 1e-4) {
  for (std::size_t i = 1; i < s_values.size(); ++i)
    if (!(s_values[i] > s_values[i - 1]))
      throw ValidationError("s_values must be strictly increasing");
  std::vector<SweepRow> rows;
  rows.reserve(s_values.size());
  for (double s : s_values) {
    const SpectralTriple triple = leading_eigentriple(net, s);
    SweepRow row;
    row.s = s;
    row.theta = triple.theta;
    row.current_fd = current_fd(net, s, fd_step);
    row.current_stationary = current_stationary(triple, net);
    row.residual_right = triple.residual_right;
    row.residual_left = triple.residual_left;
    rows.push_back(row);
  }
  return rows;
}

/// SCGF sweep with convexity and current-monotonicity checks (slopes of the
/// convex SCGF must be nondecreasing within 1e-8, as must J(s)).
inline ScgfSweep scgf_sweep(const QuantumNetwork& net, const std::vector<double>& s_values,
                            double fd_step = 1e-4) {
  const auto rows = sweep_rows(net, s_values, fd_step);
  ScgfSweep sweep;
  for (const auto& row : rows) {
    sweep.s_values.push_back(row.s);
    sweep.theta_values.push_back(row.theta);
    sweep.current_values.push_back(row.current_fd);
  }
  for (std::size_t i = 2; i < sweep.s_values.size(); ++i) {
    const double ds1 = sweep.s_values[i - 1] - sweep.s_values[i - 2];
    const double ds2 = sweep.s_values[i] - sweep.s_values[i - 1];
    const double slope1 = (sweep.theta_values[i - 1] - sweep.theta_values[i - 2]) / ds1;
    const double slope2 = (sweep.theta_values[i] - sweep.theta_values[i - 1]) / ds2;
    if (slope2 - slope1 < -1e-8)
      throw ConsistencyError("SCGF sweep is not convex within tolerance");
  }
  for (std::size_t i = 1; i < sweep.current_values.size(); ++i)
    if (sweep.current_values[i] - sweep.current_values[i - 1] < -1e-8)
      throw ConsistencyError("current sweep is not nondecreasing within tolerance");
  return sweep;
}

/// Principal square root (and inverse square root) of a Hermitian
/// positive-definite matrix via its spectral decomposition.
inline MatrixSqrtPair matrix_sqrt(const Eigen::MatrixXcd& m) {
  if (m.rows() != m.cols()) throw DimensionError("matrix_sqrt expects a square matrix");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw ValidationError("matrix_sqrt expects a Hermitian matrix");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
  const Eigen::VectorXd& w = es.eigenvalues();
  if (w.minCoeff() <= kPosTol)
    throw PositivityError("matrix_sqrt requires positive definiteness; min eigenvalue " +
                          std::to_string(w.minCoeff()));
  MatrixSqrtPair pair;
  pair.sqrt = es.eigenvectors() * w.cwiseSqrt().asDiagonal() * es.eigenvectors().adjoint();
  pair.inverse_sqrt =
      es.eigenvectors() * w.cwiseSqrt().cwiseInverse().asDiagonal() * es.eigenvectors().adjoint();
  return pair;
}

/// SCGF estimate from long-time propagation under the tilted generator,
/// independent of any eigendecomposition.
///
/// tr[exp(t L_s)[rho0]] is accumulated in renormalized chunks (which keeps
/// every intermediate finite for any s within the tilt guard), and theta is
/// read off as the growth-rate slope between t/2 and t. Using the two-time
/// slope instead of log Z(t)/t removes the O(log c / t) overlap bias, leaving
/// an error that decays like exp(-gap * t/2).
inline double propagate_oracle(const Superoperator& tilted, const Eigen::MatrixXcd& rho0,
                               double t_final) {
  if (!(t_final > 0.0)) throw ValidationError("t_final must be > 0");
  if (rho0.rows() != tilted.dim_hilbert || rho0.cols() != tilted.dim_hilbert)
    throw DimensionError("rho0 dimension does not match the generator");
  if ((rho0 - rho0.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, rho0.norm()))
    throw ValidationError("rho0 must be Hermitian");
  if (std::abs(rho0.trace().real() - 1.0) > 1e-8 || std::abs(rho0.trace().imag()) > 1e-10)
    throw ValidationError("rho0 must have unit trace");
  {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho0);
    if (es.eigenvalues().minCoeff() < -1e-10)
      throw ValidationError("rho0 must be positive semidefinite");
  }

  int n_chunks = 2 * std::max<int>(1, static_cast<int>(std::ceil(t_final / 10.0)));
  n_chunks = std::min(n_chunks, 4000);
  const double dt = t_final / n_chunks;
  const Eigen::MatrixXcd propagator = (dt * tilted.matrix).exp();

  Eigen::VectorXcd state = vectorize(rho0);
  double log_z = 0.0;
  double log_z_half = 0.0;
  for (int k = 1; k <= n_chunks; ++k) {
    state = propagator * state;
    const std::complex<double> tr = devectorize(state).trace();
    if (!std::isfinite(tr.real()) || !(tr.real() > 0.0))
      throw OverflowGuardError("propagation lost a positive finite trace; reduce s or t");
    log_z += std::log(tr.real());
    state /= tr.real();
    if (k == n_chunks / 2) log_z_half = log_z;
  }
  return (log_z - log_z_half) / (t_final / 2.0);
}

/// Steady state of an untilted Liouvillian by a direct null-space solve
/// (SVD route, independent of the eigendecomposition used elsewhere).
/// The result is Hermitian, unit trace and positive semidefinite, with
/// ||L[rho]|| below 1e-10 relative to max(1, ||L||_F).
inline Eigen::MatrixXcd steady_state(const Superoperator& untilted) {
  const Eigen::MatrixXcd& m = untilted.matrix;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double sv_max = sv(0);
  int null_dim = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) <= 1e-10 * std::max(sv_max, 1.0)) ++null_dim;
  if (null_dim == 0)
    throw ConsistencyError("no null vector found; smallest singular value " +
                           std::to_string(sv(sv.size() - 1)));
  if (null_dim > 1)
    throw DegeneracyError("steady state is not unique; null-space dimension " +
                          std::to_string(null_dim));
  Eigen::MatrixXcd rho = detail::hermitian_from_vector(svd.matrixV().col(sv.size() - 1));
  rho = detail::clip_negative_eigenvalues(rho, "steady state");
  rho /= rho.trace().real();
  const double residual = (m * vectorize(rho)).norm();
  if (residual > 1e-10 * std::max(1.0, m.norm()))
    throw ConsistencyError("steady-state residual " + std::to_string(residual) +
                           " exceeds tolerance");
  return rho;
}

}  // namespace qdoob
