// Copyright 2026 The qdoob Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>
#include <complex>

#include "qdoob/doob.hpp"
#include "qdoob/spectral.hpp"

using namespace qdoob;
using Catch::Approx;
using cplx = std::complex<double>;

namespace {

QuantumNetwork random_network(int n, std::uint64_t seed) {
  auto rng = substream(seed, 0);
  const Eigen::MatrixXd h = random_hamiltonian(n, rng);
  return build_network(h.cast<cplx>(), {{n, 1, 1.0, 1}});
}

}  // namespace

TEST_CASE("the Doob transform reduces to the original dynamics at s = 0") {
  const QuantumNetwork net = random_network(5, 41);
  const SpectralTriple triple = leading_eigentriple(net, 0.0);
  const DoobDynamics doob = doob_transform(net, triple);

  REQUIRE((doob.hamiltonian_d - net.hamiltonian).cwiseAbs().maxCoeff() < 1e-8);
  const auto originals = link_operators(net);
  REQUIRE(doob.jumps_d.size() == originals.size());
  for (std::size_t k = 0; k < originals.size(); ++k)
    REQUIRE((doob.jumps_d[k] - originals[k]).cwiseAbs().maxCoeff() < 1e-8);

  const Superoperator generator = doob_generator(doob);
  const Superoperator original = build_liouvillian(net);
  REQUIRE((generator.matrix - original.matrix).cwiseAbs().maxCoeff() <
          1e-8 * std::max(1.0, original.matrix.norm()));

  const Eigen::MatrixXcd rho = doob_steady_state(doob, triple);
  REQUIRE((rho - triple.right_eig).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("Doob Hamiltonian is Hermitian and the jumps keep their rank") {
  const QuantumNetwork net = random_network(7, 6);
  const SpectralTriple triple = leading_eigentriple(net, 2.0);
  const Eigen::MatrixXcd hd = doob_hamiltonian(net, triple);
  REQUIRE((hd - hd.adjoint()).cwiseAbs().maxCoeff() < 1e-12 * std::max(1.0, hd.norm()));

  const auto jumps = doob_jumps(net, triple);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(jumps[0]);
  const auto& sv = svd.singularValues();
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > 1e-12 * sv(0)) ++rank;
  REQUIRE(rank == 1);  // conjugation by an invertible matrix preserves rank
}

TEST_CASE("GKSL and similarity forms of the Doob generator coincide") {
  for (auto [n, seed, s] : {std::tuple{5, 51ull, 1.5}, std::tuple{7, 52ull, 3.5}}) {
    const QuantumNetwork net = random_network(n, seed);
    const SpectralTriple triple = leading_eigentriple(net, s);
    const DoobDynamics doob = doob_transform(net, triple);
    REQUIRE_NOTHROW(verify_doob_generator(net, triple, doob, 1e-8));

    const Superoperator gksl = doob_generator(doob);
    const Superoperator similarity = doob_generator_similarity(net, triple);
    REQUIRE((gksl.matrix - similarity.matrix).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("Doob generator is trace preserving") {
  const QuantumNetwork net = random_network(6, 15);
  const SpectralTriple triple = leading_eigentriple(net, 3.5);
  const Superoperator generator = doob_generator(doob_transform(net, triple));
  // tr(L^D[X]) = 0 for all X  <=>  vec(I)^H M = 0.
  const Eigen::VectorXcd id_vec =
      vectorize(Eigen::MatrixXcd::Identity(net.n_sites, net.n_sites));
  REQUIRE((generator.matrix.adjoint() * id_vec).norm() <
          1e-8 * std::max(1.0, generator.matrix.norm()));
}

TEST_CASE("Doob steady state is annihilated and carries the tilted current") {
  const QuantumNetwork net = random_network(7, 77);
  const double s = 3.5;
  const SpectralTriple triple = leading_eigentriple(net, s);
  const DoobDynamics doob = doob_transform(net, triple);

  const Eigen::MatrixXcd rho = doob_steady_state(doob, triple);
  REQUIRE(rho.trace().real() == Approx(1.0).margin(1e-10));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho);
  REQUIRE(es.eigenvalues().minCoeff() >= -1e-8);

  const Superoperator generator = doob_generator(doob);
  REQUIRE((generator.matrix * vectorize(rho)).norm() < 1e-8);

  // The stationary counted rate of the Doob dynamics is J(s) = theta'(s).
  double rate = 0.0;
  for (std::size_t k = 0; k < doob.jumps_d.size(); ++k) {
    if (doob.counting_weights[k] == 0) continue;
    rate += (doob.jumps_d[k] * rho * doob.jumps_d[k].adjoint()).trace().real();
  }
  const double j_fd = current_fd(net, s);
  REQUIRE(rate == Approx(j_fd).epsilon(1e-5));
}

TEST_CASE("short-time Doob propagation preserves positivity") {
  const QuantumNetwork net = random_network(5, 19);
  const SpectralTriple triple = leading_eigentriple(net, 2.5);
  const Superoperator generator = doob_generator(doob_transform(net, triple));
  const Eigen::MatrixXcd propagator = (0.05 * generator.matrix).exp();

  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 4; ++rep) {
    Eigen::MatrixXcd a(5, 5);
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j)
        a(i, j) = cplx(2.0 * uniform_unit(rng) - 1.0, 2.0 * uniform_unit(rng) - 1.0);
    Eigen::MatrixXcd rho = a * a.adjoint();
    rho /= rho.trace().real();
    for (int step = 0; step < 10; ++step) {
      rho = devectorize(propagator * vectorize(rho));
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (rho + rho.adjoint()));
      REQUIRE(es.eigenvalues().minCoeff() >= -1e-8);
    }
  }
}

TEST_CASE("build_variant assembles the constrained dynamics") {
  const QuantumNetwork net = random_network(7, 88);
  const SpectralTriple triple = leading_eigentriple(net, 3.5);

  const DynamicsVariant full = build_variant(net, triple, VariantTag::kFullDoob);
  const DynamicsVariant doob_h = build_variant(net, triple, VariantTag::kDoobHOriginalL);
  const DynamicsVariant restored =
      build_variant(net, triple, VariantTag::kDoobHRestoredLinkOriginalL);

  // The constrained variants keep the original jump operators bit-for-bit.
  const auto originals = link_operators(net);
  REQUIRE((doob_h.jumps[0] - originals[0]).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE((restored.jumps[0] - originals[0]).cwiseAbs().maxCoeff() == 0.0);

  // Full Doob uses the transformed jumps instead.
  REQUIRE((full.jumps[0] - originals[0]).cwiseAbs().maxCoeff() > 1e-3);

  // The restored-link variant pins the 1-N coupling back to exactly 1.
  REQUIRE(restored.hamiltonian(0, 6) == cplx(1.0, 0.0));
  REQUIRE(restored.hamiltonian(6, 0) == cplx(1.0, 0.0));
  // Away from that entry it matches the Doob Hamiltonian.
  REQUIRE((restored.hamiltonian - doob_h.hamiltonian).cwiseAbs().maxCoeff() ==
          Approx(std::abs(doob_h.hamiltonian(0, 6) - cplx(1.0, 0.0))).margin(1e-14));
}

TEST_CASE("variant currents reproduce the current identities") {
  const QuantumNetwork net = random_network(7, 90);

  SECTION("full Doob current equals theta'(s)") {
    const double s = 3.5;
    const SpectralTriple triple = leading_eigentriple(net, s);
    const double j_full = variant_current(build_variant(net, triple, VariantTag::kFullDoob));
    REQUIRE(j_full == Approx(current_fd(net, s)).epsilon(1e-5));
  }

  SECTION("the s = 0 full variant reproduces the original current") {
    const SpectralTriple triple = leading_eigentriple(net, 0.0);
    const double j_variant = variant_current(build_variant(net, triple, VariantTag::kFullDoob));
    REQUIRE(j_variant == Approx(original_current(net)).epsilon(1e-8));
  }
}

TEST_CASE("largest jump-operator deviation sits on the link transition") {
  // For the single-link model the Doob jump e^{s/2} S L S^{-1} is dominated
  // by the rescaled (1, N) entry.
  const QuantumNetwork net = random_network(7, 90);
  const SpectralTriple triple = leading_eigentriple(net, 3.5);
  const DoobDynamics doob = doob_transform(net, triple);
  const Eigen::MatrixXd dl =
      (doob.jumps_d[0] - link_operator(net.n_sites, net.links[0])).cwiseAbs();
  Eigen::Index max_row = 0, max_col = 0;
  dl.maxCoeff(&max_row, &max_col);
  REQUIRE(max_row == 0);
  REQUIRE(max_col == 6);
}
