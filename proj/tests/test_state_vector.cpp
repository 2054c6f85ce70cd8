#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "qst/rng.hpp"
#include "qst/state_vector.hpp"
#include "test_util.hpp"

using namespace qst;
using namespace qst::testing;

namespace {
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);
}

TEST_CASE("new_basis_state places a single amplitude") {
  StateVector s = new_basis_state(1, 0);
  REQUIRE(s.amps.size() == 2);
  REQUIRE(s.amps[0] == cplx(1.0, 0.0));
  REQUIRE(s.amps[1] == cplx(0.0, 0.0));

  StateVector t = new_basis_state(3, 5);
  REQUIRE(t.amps.size() == 8);
  REQUIRE(t.amps[5] == cplx(1.0, 0.0));
  REQUIRE(t.norm() == 1.0);

  REQUIRE_THROWS_AS(new_basis_state(0, 0), std::invalid_argument);
  REQUIRE_THROWS_AS(new_basis_state(2, 4), std::invalid_argument);
}

TEST_CASE("balanced splitter action on the photon basis") {
  Gate2x2 bs = rx_half_turn();

  StateVector s = new_basis_state(1, 0);
  apply_gate1(s, bs, 0);
  REQUIRE(std::abs(s.amps[0] - cplx(kInvSqrt2, 0.0)) < 1e-15);
  REQUIRE(std::abs(s.amps[1] - cplx(0.0, kInvSqrt2)) < 1e-15);

  StateVector t = new_basis_state(1, 1);
  apply_gate1(t, bs, 0);
  REQUIRE(std::abs(t.amps[0] - cplx(0.0, kInvSqrt2)) < 1e-15);
  REQUIRE(std::abs(t.amps[1] - cplx(kInvSqrt2, 0.0)) < 1e-15);
}

TEST_CASE("phase gate only rotates the |1> amplitude") {
  StateVector s = new_basis_state(1, 0);
  apply_gate1(s, Gate2x2::hadamard(), 0);
  apply_gate1(s, Gate2x2::phase(0.7), 0);
  REQUIRE(std::abs(s.amps[0] - cplx(kInvSqrt2, 0.0)) < 1e-15);
  REQUIRE(std::abs(s.amps[1] - kInvSqrt2 * std::polar(1.0, 0.7)) < 1e-15);
}

TEST_CASE("gate construction rejects non-unitary matrices") {
  REQUIRE_THROWS_AS(Gate2x2(1.0, 0.0, 0.0, 2.0), std::invalid_argument);
  REQUIRE_THROWS_AS(Gate2x2(1.0, 1.0, 0.0, 1.0), std::invalid_argument);
  REQUIRE_NOTHROW(Gate2x2(0.0, cplx(0.0, 1.0), cplx(0.0, -1.0), 0.0));
}

TEST_CASE("apply_gate1 matches the kron-product oracle") {
  RngStream rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    // Random unitary from two phases and a mixing angle.
    double th = rng.uniform() * 3.14159, p0 = rng.uniform() * 6.28, p1 = rng.uniform() * 6.28;
    Gate2x2 g(std::cos(th) * std::polar(1.0, p0), std::sin(th) * std::polar(1.0, p1),
              -std::sin(th) * std::polar(1.0, -p1), std::cos(th) * std::polar(1.0, -p0));
    int qubit = int(rng.below(3));
    StateVector s = random_state(3, rng);
    MatrixXcd expect = gate1_matrix(3, qubit, g) * to_matrix(s);
    apply_gate1(s, g, qubit);
    REQUIRE((expect - to_matrix(s)).cwiseAbs().maxCoeff() < 1e-12);
    REQUIRE(std::abs(s.norm() - 1.0) < 1e-10);
  }
}

TEST_CASE("apply_gate1 validates the qubit index") {
  StateVector s = new_basis_state(2, 0);
  REQUIRE_THROWS_AS(apply_gate1(s, Gate2x2::hadamard(), 2), std::invalid_argument);
  REQUIRE_THROWS_AS(apply_gate1(s, Gate2x2::hadamard(), -1), std::invalid_argument);
}

TEST_CASE("apply_cnot truth table and oracle agreement") {
  for (uint64_t j = 0; j < 4; ++j) {
    StateVector s = new_basis_state(2, j);
    apply_cnot(s, 0, 1);
    uint64_t expect = (j & 1) ? (j ^ 2) : j;
    REQUIRE(s.amps[expect] == cplx(1.0, 0.0));
  }

  RngStream rng(12);
  StateVector s = random_state(3, rng);
  MatrixXcd expect = cnot_matrix(3, 2, 0) * to_matrix(s);
  apply_cnot(s, 2, 0);
  REQUIRE((expect - to_matrix(s)).cwiseAbs().maxCoeff() < 1e-12);

  StateVector t = new_basis_state(2, 0);
  REQUIRE_THROWS_AS(apply_cnot(t, 1, 1), std::invalid_argument);
}

TEST_CASE("cnot entangles a split photon with a fresh detector") {
  // alpha|00> + beta|01> -> alpha|00> + beta|11> (photon on qubit 0).
  StateVector s(2);
  s.amps[0] = 0.6;
  s.amps[1] = 0.8;
  apply_cnot(s, 0, 1);
  REQUIRE(s.amps[0] == cplx(0.6, 0.0));
  REQUIRE(s.amps[3] == cplx(0.8, 0.0));
  REQUIRE(s.amps[1] == cplx(0.0, 0.0));
}

TEST_CASE("controlled phase and swap match their oracles") {
  RngStream rng(13);
  StateVector s = random_state(3, rng);
  StateVector s2 = s;

  MatrixXcd cp = MatrixXcd::Identity(8, 8);
  // qubits 0 and 1 both set: indices 3 and 7
  cp(3, 3) = std::polar(1.0, 0.9);
  cp(7, 7) = std::polar(1.0, 0.9);
  apply_controlled_phase(s, 0, 1, 0.9);
  REQUIRE((cp * to_matrix(s2) - to_matrix(s)).cwiseAbs().maxCoeff() < 1e-12);

  StateVector t = random_state(3, rng);
  StateVector t2 = t;
  apply_swap(t, 0, 2);
  for (uint64_t j = 0; j < 8; ++j) {
    uint64_t p = ((j & 1) << 2) | (j & 2) | ((j >> 2) & 1);
    REQUIRE(std::abs(t.amps[p] - t2.amps[j]) < 1e-15);
  }
}

TEST_CASE("hadamard layer basics") {
  StateVector s = new_basis_state(3, 0);
  apply_hadamard_layer(s, {0, 1, 2});
  for (const cplx& a : s.amps) REQUIRE(std::abs(a - cplx(1.0 / std::sqrt(8.0), 0.0)) < 1e-12);

  apply_hadamard_layer(s, {0, 1, 2});
  REQUIRE(std::abs(s.amps[0] - cplx(1.0, 0.0)) < 1e-12);

  REQUIRE_THROWS_AS(apply_hadamard_layer(s, {1, 1}), std::invalid_argument);
}

TEST_CASE("inner product is conjugate-linear in the bra") {
  StateVector a = new_basis_state(2, 1);
  StateVector b(2);
  b.amps[1] = cplx(0.0, 1.0);
  REQUIRE(std::abs(inner_product(a, b) - cplx(0.0, 1.0)) < 1e-15);
  REQUIRE(std::abs(inner_product(b, a) - cplx(0.0, -1.0)) < 1e-15);
}

TEST_CASE("norm stays 1 under long random gate sequences") {
  RngStream rng(14);
  StateVector s = random_state(4, rng);
  for (int step = 0; step < 50; ++step) {
    double th = rng.uniform() * 3.0;
    apply_gate1(s, beam_splitter(th), int(rng.below(4)));
    apply_gate1(s, Gate2x2::phase(rng.uniform() * 6.28), int(rng.below(4)));
    int c = int(rng.below(4)), t = (c + 1 + int(rng.below(3))) % 4;
    apply_cnot(s, c, t);
  }
  REQUIRE(std::abs(s.norm() - 1.0) < 1e-10);
}
