#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "qst/uphi_element.hpp"

namespace qst {

// Candidate eigenvector label: the data register holds the Hadamard
// transform of the basis string 0...0 s_{m-1}...s_1 (s_{m-1} = 1 whenever
// m >= 2), leaving the photon qubit free.  m ranges over [1, n+1]; the
// m = 1 label is the all-zero string.
struct AnsatzIndex {
  int m = 1;
  std::vector<int> s;  // s[i] = s_{i+1}, size m-1

  static AnsatzIndex from_bits(uint64_t bits, int n);
  uint64_t to_bits() const;
  void validate(int n) const;
};

std::vector<AnsatzIndex> enumerate_ansatz(int n);

// H^{x n} |0..0 s_{m-1}..s_1>  tensor  (alpha0|0> + alpha1|1>) in the
// project-wide layout (photon at bit 0).
StateVector ansatz_state(const AnsatzIndex& idx, int n, cplx alpha0, cplx alpha1);

// Product over the first `a` stages of the detector-basis-summed transfer
// matrix [[I, R(pi/2)], [R(phi_l + pi/2), R(phi_l)]], right to left.
// a = 0 gives the identity.  Stage n is excluded: its folded form differs.
M4 k_product(int a, const PhaseConfig& cfg);

// 2x2 photon block of U restricted to one ansatz label: rho(j0, k0) is the
// amplitude carrying photon input j0 to readout k0, with flat magnitude
// profile cos/sin(omega) / sqrt(2)^n when the block structure holds.
struct RhoBlock {
  AnsatzIndex idx;
  int n = 0;
  Eigen::Matrix2cd rho;  // rho(j0, k0)
  double omega = 0.0;    // in [0, pi/2]
  double g00 = 0.0, g10 = 0.0, g01 = 0.0;  // arguments of rho(0,0), rho(1,0), rho(0,1)
  double structure_residual = 0.0;
  bool conforming = false;

  // Scaled matrix sqrt(2)^n * rho(j0, k0) transposed into (readout, input)
  // order; unitary exactly when the block structure holds.
  Eigen::Matrix2cd scaled() const;
};

RhoBlock rho_block(const AnsatzIndex& idx, const PhaseConfig& cfg);

// Extract angles and structure flags from explicit entries rho(j0, k0).
RhoBlock block_from_entries(const AnsatzIndex& idx, int n, const Eigen::Matrix2cd& rho);

struct DegenerateBlockError : std::runtime_error {
  double structure_residual;
  double off_diagonal;
  DegenerateBlockError(const std::string& what, double sr, double off)
      : std::runtime_error(what), structure_residual(sr), off_diagonal(off) {}
};

// Solved photon pair for one label: alpha is gauged with a real
// non-negative second component, beta is the partner eigenvector phased
// onto its predicted dual (a1, -a0 + i b0).
struct EigenPair {
  AnsatzIndex idx;
  cplx alpha0, alpha1;
  cplx beta0, beta1;
  double lambda1 = 0.0, lambda2 = 0.0;  // eigenphases in [0, 2 pi), ascending
  double solve_residual = 0.0;     // 2-dim eigen equation + unimodularity
  double eq_residual = 0.0;        // fixed-point conditions at alpha
  double duality_residual = 0.0;   // || beta - predicted dual ||
  double dual_phase = 0.0;         // phase fitted onto beta
};

EigenPair solve_pair(const RhoBlock& block);

struct Spectrum {
  int n = 0;
  std::vector<EigenPair> pairs;
  double min_gap = 0.0;  // smallest circular distance between eigenphases
  bool conforming = false;
  double max_structure_residual = 0.0;
  double max_eq_residual = 0.0;
  double max_duality_residual = 0.0;
  int degenerate_blocks = 0;

  const EigenPair& pair_for(uint64_t bits) const;
};

Spectrum full_spectrum(const PhaseConfig& cfg);

// Residuals of the five fixed-point conditions for a candidate photon
// vector against the angle-parametrized block: two magnitude matches, the
// complex cross-ratio (split re/im), and normalization.
struct BlockEquationResiduals {
  double g1, g2, g3, g4, g5;
};
BlockEquationResiduals block_equation_residuals(double omega, double g00, double g01, double g10,
                                                cplx alpha0, cplx alpha1);

// The fourteen scalar residuals of the angle parametrization: 1-5 at the
// primal solution (mu0, mu1, mu2), 6-10 at its dual, 11-14 directly on the
// block entries.  All vanish when the conjectured structure holds.
struct AngleResiduals {
  std::array<double, 14> e{};
  double omega_closed_residual = 0.0;
  double mu0_closed_residual = 0.0;
  bool conditioning_warning = false;

  double max_abs() const;
};

AngleResiduals angle_residuals(const RhoBlock& block, double mu0, double mu1, double mu2);

// Matrix-free consistency checks of a solved spectrum against the circuit.
struct SpectrumCheck {
  double max_eigen_residual = 0.0;  // || U v - lambda v ||_inf
  double max_e_residual = 0.0;      // angle residuals over all blocks
  double max_duality_residual = 0.0;
  double gram_residual = 0.0;  // || V^dagger V - I ||_inf over all eigenvectors
  double min_gap = 0.0;
};

SpectrumCheck verify_spectrum(const Spectrum& spectrum, const PhaseConfig& cfg);

struct ScanTrial {
  std::vector<double> phis;
  bool conforming = false;
  bool gap_ok = false;
  double min_gap = 0.0;
  double max_eigen_residual = 0.0;
  double max_e_residual = 0.0;
  double duality_residual = 0.0;
};

struct ScanSummary {
  double conforming_fraction = 0.0;
  double gap_fraction = 0.0;
  // q0 / q50 / q90 / q100 per metric
  std::array<double, 4> min_gap_q{};
  std::array<double, 4> eigen_residual_q{};
  std::array<double, 4> e_residual_q{};
  std::array<double, 4> duality_residual_q{};
};

struct ScanReport {
  int n = 0;
  int trials = 0;
  uint64_t seed = 0;
  double tol = 0.0;
  std::vector<ScanTrial> records;
  ScanSummary summary;
  std::vector<std::vector<double>> failure_exemplars;
};

inline constexpr double kGapTolerance = 1e-6;

// Random-phase sweep of the spectral structure; per-trial RNG streams are
// derived from (seed, trial) so the report is reproducible bit for bit.
ScanReport conjecture_scan(int n, int trials, uint64_t seed, double tol);

}  // namespace qst
