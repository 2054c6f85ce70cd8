#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "qst/rng.hpp"
#include "qst/uphi.hpp"

namespace qst {

inline constexpr int kDefaultQubitCap = 22;

// Register width needed for t accurate bits with failure probability at
// most eps.
int register_size(int t, double eps);

// Quantum Fourier transform over the listed register qubits: basis word x
// (bit j of x held by qubits[j]) maps to sum_y e^{2 pi i x y / N} |y> / sqrt(N).
void apply_qft(StateVector& state, const std::vector<int>& qubits);
void apply_inverse_qft(StateVector& state, const std::vector<int>& qubits);

// Measure the listed qubits in the computational basis; returns the bits in
// list order along with the renormalized post-measurement state.
std::pair<std::vector<int>, StateVector> measure_qubits(const StateVector& state,
                                                        const std::vector<int>& qubits,
                                                        RngStream& rng);

// Phase-estimation run with the register already transformed and reduced
// to an exact word distribution; the pre-measurement state is deterministic,
// so one preparation serves any number of samples.
struct PreparedQpe {
  int num_data_qubits = 0;
  int t_tilde = 0;
  StateVector joint;                    // register on the high qubits
  std::vector<double> word_cumulative;  // inclusive prefix sums of P(word)

  double word_probability(uint64_t word) const;
};

PreparedQpe prepare_qpe(const UnitaryMatrix& u, const StateVector& data, int t_tilde,
                        int qubit_cap = kDefaultQubitCap);
PreparedQpe prepare_qpe(const PhaseConfig& cfg, const StateVector& data, int t_tilde,
                        int qubit_cap = kDefaultQubitCap);

struct QpeSample {
  uint64_t word = 0;
  double phase = 0.0;      // 2 pi word / 2^t_tilde
  StateVector data_state;  // collapsed data register
};

QpeSample sample_qpe(const PreparedQpe& prepared, RngStream& rng);

double phase_from_word(uint64_t word, int t_tilde);

}  // namespace qst
