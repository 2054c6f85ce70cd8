#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "qst/uphi.hpp"

namespace qst {

// 4x4 stage transfer matrix over the photon amplitude stacked as
// (Re a0, Im a0, Re a1, Im a1); every entry is a 2x2 real rotation block,
// so the matrices themselves stay real.
using M4 = Eigen::Matrix4d;
using V4 = Eigen::Vector4d;

// [[cos a, -sin a], [sin a, cos a]] placed at block (row, col) of m.
void put_rotation_block(M4& m, int row, int col, double angle);

// Stage matrix for stage in [1, n-1]: detector input d_bit, readout e_bit.
// e == d keeps the photon on path 0, e != d routes it to path 1 and picks
// up the stage phase.
M4 m_matrix(int stage, int d_bit, int e_bit, const PhaseConfig& cfg);

// Last stage folds the final splitter and phi_{n+1} into one matrix.
M4 m_matrix_final(int d_bit, int e_bit, const PhaseConfig& cfg);

// Photon input / readout vectors: v_0, v_1 real; u_0 = (1, i, 0, 0),
// u_1 = (0, 0, 1, i) applied as a contraction that rebuilds the complex
// amplitude of the measured photon path.
V4 v_vec(int q_bit);
cplx u_contract(int e_bit, const V4& w);

// Number of 4x4-by-vector stage applications and final contractions done
// by the element evaluators since the last reset (per thread).
struct ElementOpCount {
  uint64_t stage_applies = 0;
  uint64_t contractions = 0;
};
ElementOpCount element_op_count();
void reset_element_op_count();

// Entry <k|U|l> in the raw ordering: bit j-1 of k is the j-th detector
// readout e_j (bit n is the photon), bit j-1 of l is the j-th detector
// preparation D_j (bit n is the photon input Q).
cplx uphi_element(uint64_t k, uint64_t l, const PhaseConfig& cfg);

// Entry <k|U|j> in the project-wide qubit layout (photon at bit 0,
// detector l at bit n+1-l).
cplx uphi_element_reordered(uint64_t k, uint64_t j, const PhaseConfig& cfg);

// Bit permutation between the two index conventions; an involution.
uint64_t raw_index_from_layout(uint64_t index, int n);

// ---- Path-sum form of the general interferometer ----

struct PathAmplitude {
  cplx value;
  std::vector<int> path_bits;  // j_1..j_{n+1}
};

// Amplitude of one photon path for input |Q> = |0>: the first-stage factor
// times one chi factor per later stage (cos-type when the path bit repeats,
// i*sin-type when it flips), each carrying that stage's path phase.
PathAmplitude path_amplitude(const std::vector<int>& path, const std::vector<double>& thetas,
                                   const std::vector<std::pair<double, double>>& phase_pairs);

// Full output state for detector preparation D and photon input
// q0|0> + q1|1>, assembled by summing all 2^{n+1} paths and relabeling the
// detector outputs d = j xor D.
StateVector path_sum_state(const std::vector<double>& thetas,
                             const std::vector<std::pair<double, double>>& phase_pairs,
                             const std::vector<int>& wpd_basis, cplx q0, cplx q1);

}  // namespace qst
