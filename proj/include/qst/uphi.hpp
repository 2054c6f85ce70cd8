#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

#include "qst/rng.hpp"
#include "qst/state_vector.hpp"

namespace qst {

using UnitaryMatrix = Eigen::MatrixXcd;

// Raised when a dense request exceeds its qubit budget.
struct ResourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Interferometer phase settings phi_1..phi_{n+1}; phis[k-1] is phi_k.
// Angles are reduced mod 2*pi on construction.
struct PhaseConfig {
  int n = 0;
  std::vector<double> phis;

  PhaseConfig(int n_, std::vector<double> phis_);

  double phi(int k) const { return phis[size_t(k) - 1]; }  // k in [1, n+1]
};

// n+1 angles drawn uniformly from [0, 2*pi).
PhaseConfig random_phase_config(int n, RngStream& rng);

// Qubit layout used across the project: qubit 0 carries the photon,
// qubit l in [1, n] carries the (n+1-l)-th which-path detector, so the
// detector met first by the photon sits at the top qubit.
inline int wpd_qubit(int n, int k) { return n + 1 - k; }  // k in [1, n]

// (1/sqrt(2)) [[1, i], [i, 1]]
Gate2x2 rx_half_turn();
// [[cos t, i sin t], [i sin t, cos t]]
Gate2x2 beam_splitter(double theta);

enum class StageOrder { cnot_then_phase, phase_then_cnot };

// n+1 stages on an (n+1)-qubit state: per stage k <= n a balanced splitter
// on qubit 0, CNOT onto detector k, and diag(1, e^{i phi_k}) on qubit 0;
// the last stage applies the splitter and diag(1, e^{i phi_{n+1}}) only.
void apply_uphi_circuit(StateVector& state, const PhaseConfig& cfg,
                        StageOrder order = StageOrder::cnot_then_phase);

// Same topology with free splitter angles theta_1..theta_{n+1} and per-stage
// photon-path phases (phi_{k,0}, phi_{k,1}).
void apply_general_optics_circuit(StateVector& state, const std::vector<double>& thetas,
                                  const std::vector<std::pair<double, double>>& phase_pairs);

inline constexpr int kDenseMaxQubits = 10;

// Full 2^{n+1} x 2^{n+1} matrix assembled column by column.
UnitaryMatrix uphi_dense(const PhaseConfig& cfg, int max_n = kDenseMaxQubits);

// U^power by square-and-multiply; power = 0 gives the identity.
UnitaryMatrix unitary_power(const UnitaryMatrix& u, uint64_t power);

void apply_dense(const UnitaryMatrix& u, StateVector& state);

}  // namespace qst
