#pragma once

#include <complex>
#include <cstdint>
#include <vector>

namespace qst {

using cplx = std::complex<double>;

// Dense state vector over num_qubits qubits.  Basis index bit q is the
// state of qubit q, i.e. amps[j] multiplies |...j_1 j_0>.
struct StateVector {
  int num_qubits = 0;
  std::vector<cplx> amps;

  StateVector() = default;
  explicit StateVector(int nq) : num_qubits(nq), amps(size_t(1) << nq) {}

  size_t dim() const { return amps.size(); }
  double norm() const;
};

// Single-qubit gate [[a, b], [c, d]] acting as [a b; c d] on (|0>, |1>).
// Construction rejects matrices that are not unitary within 1e-9.
struct Gate2x2 {
  cplx a, b, c, d;

  Gate2x2(cplx a_, cplx b_, cplx c_, cplx d_);

  static Gate2x2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
  static Gate2x2 hadamard();
  // diag(1, e^{i phi})
  static Gate2x2 phase(double phi);
  // diag(e^{i phi0}, e^{i phi1})
  static Gate2x2 diag(double phi0, double phi1);
};

StateVector new_basis_state(int num_qubits, uint64_t basis_index);

void apply_gate1(StateVector& state, const Gate2x2& g, int qubit);
void apply_cnot(StateVector& state, int control, int target);
// Multiplies the amplitude by e^{i theta} where both qubits are |1>.
void apply_controlled_phase(StateVector& state, int qubit_a, int qubit_b, double theta);
void apply_swap(StateVector& state, int qubit_a, int qubit_b);
// One Hadamard per listed qubit; the list must not repeat a qubit.
void apply_hadamard_layer(StateVector& state, const std::vector<int>& qubits);

cplx inner_product(const StateVector& bra, const StateVector& ket);

}  // namespace qst
