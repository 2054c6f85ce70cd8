#include "qst/state_vector.hpp"

#include <cmath>
#include <stdexcept>

namespace qst {

namespace {

void check_qubit(const StateVector& state, int qubit) {
  if (qubit < 0 || qubit >= state.num_qubits)
    throw std::invalid_argument("qubit index out of range");
}

}  // namespace

double StateVector::norm() const {
  double s = 0.0;
  for (const cplx& a : amps) s += std::norm(a);
  return std::sqrt(s);
}

Gate2x2::Gate2x2(cplx a_, cplx b_, cplx c_, cplx d_) : a(a_), b(b_), c(c_), d(d_) {
  // Rows orthonormal <=> unitary for 2x2.
  double r0 = std::norm(a) + std::norm(b) - 1.0;
  double r1 = std::norm(c) + std::norm(d) - 1.0;
  cplx cross = a * std::conj(c) + b * std::conj(d);
  if (std::abs(r0) > 1e-9 || std::abs(r1) > 1e-9 || std::abs(cross) > 1e-9)
    throw std::invalid_argument("gate is not unitary");
}

Gate2x2 Gate2x2::hadamard() {
  const double h = 1.0 / std::sqrt(2.0);
  return {h, h, h, -h};
}

Gate2x2 Gate2x2::phase(double phi) {
  return {1.0, 0.0, 0.0, std::polar(1.0, phi)};
}

Gate2x2 Gate2x2::diag(double phi0, double phi1) {
  return {std::polar(1.0, phi0), 0.0, 0.0, std::polar(1.0, phi1)};
}

StateVector new_basis_state(int num_qubits, uint64_t basis_index) {
  if (num_qubits < 1 || num_qubits > 30)
    throw std::invalid_argument("num_qubits out of range");
  if (basis_index >= (uint64_t(1) << num_qubits))
    throw std::invalid_argument("basis index out of range");
  StateVector state(num_qubits);
  state.amps[basis_index] = 1.0;
  return state;
}

void apply_gate1(StateVector& state, const Gate2x2& g, int qubit) {
  check_qubit(state, qubit);
  const size_t mask = size_t(1) << qubit;
  const size_t dim = state.dim();
  for (size_t lo = 0; lo < dim; ++lo) {
    if (lo & mask) continue;
    const size_t hi = lo | mask;
    const cplx x = state.amps[lo];
    const cplx y = state.amps[hi];
    state.amps[lo] = g.a * x + g.b * y;
    state.amps[hi] = g.c * x + g.d * y;
  }
}

void apply_cnot(StateVector& state, int control, int target) {
  check_qubit(state, control);
  check_qubit(state, target);
  if (control == target) throw std::invalid_argument("control equals target");
  const size_t cmask = size_t(1) << control;
  const size_t tmask = size_t(1) << target;
  const size_t dim = state.dim();
  for (size_t j = 0; j < dim; ++j) {
    if ((j & cmask) && !(j & tmask)) std::swap(state.amps[j], state.amps[j | tmask]);
  }
}

void apply_controlled_phase(StateVector& state, int qubit_a, int qubit_b, double theta) {
  check_qubit(state, qubit_a);
  check_qubit(state, qubit_b);
  if (qubit_a == qubit_b) throw std::invalid_argument("controlled phase needs two qubits");
  const size_t mask = (size_t(1) << qubit_a) | (size_t(1) << qubit_b);
  const cplx ph = std::polar(1.0, theta);
  const size_t dim = state.dim();
  for (size_t j = 0; j < dim; ++j) {
    if ((j & mask) == mask) state.amps[j] *= ph;
  }
}

void apply_swap(StateVector& state, int qubit_a, int qubit_b) {
  check_qubit(state, qubit_a);
  check_qubit(state, qubit_b);
  if (qubit_a == qubit_b) return;
  const size_t amask = size_t(1) << qubit_a;
  const size_t bmask = size_t(1) << qubit_b;
  const size_t dim = state.dim();
  for (size_t j = 0; j < dim; ++j) {
    if ((j & amask) && !(j & bmask)) std::swap(state.amps[j], state.amps[(j & ~amask) | bmask]);
  }
}

void apply_hadamard_layer(StateVector& state, const std::vector<int>& qubits) {
  uint64_t seen = 0;
  for (int q : qubits) {
    check_qubit(state, q);
    if (seen & (uint64_t(1) << q)) throw std::invalid_argument("duplicate qubit in layer");
    seen |= uint64_t(1) << q;
  }
  const Gate2x2 h = Gate2x2::hadamard();
  for (int q : qubits) apply_gate1(state, h, q);
}

cplx inner_product(const StateVector& bra, const StateVector& ket) {
  if (bra.dim() != ket.dim()) throw std::invalid_argument("dimension mismatch");
  cplx s = 0.0;
  for (size_t j = 0; j < bra.dim(); ++j) s += std::conj(bra.amps[j]) * ket.amps[j];
  return s;
}

}  // namespace qst
