#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <qst/eigenstructure.hpp>
#include <qst/phase_estimation.hpp>
#include <qst/rng.hpp>
#include <qst/uphi.hpp>

namespace qst {

// K-sparse pure state over n detector labels. Bitstrings read left to right
// from detector n down to detector 1; coefficients carry the phases.
struct SparseTerm {
  std::string bits;
  cplx coeff;
};

struct SparseState {
  int n = 0;
  std::vector<SparseTerm> terms;

  int k() const { return static_cast<int>(terms.size()); }
  // Distinct n-char bitstrings, nonzero coefficients, unit norm within 1e-10.
  void validate() const;
  void normalize();
};

// Bit l-1 of the label is detector l, so the label is the string read as a
// plain binary number. The data-register basis index is label << 1 (qubit 0
// is the ancilla).
uint64_t label_from_bits(const std::string& bits);
std::string bits_from_label(uint64_t label, int n);

// Random instance: K distinct uniform bitstrings, squared magnitudes uniform
// on the simplex with floor min_prob, phases uniform in [0, 2pi). Terms come
// out sorted by label.
SparseState gen_sparse_state(int n, int K, double min_prob, RngStream& rng);

// |Psi_e> = sum_k c_k H^n |s_k> (x) (|0> + |1>)/sqrt(2) on n+1 qubits.
StateVector prepare_encoded(const SparseState& truth);

// Weights of the ancilla state on the photon pair of one block:
// d1 = (beta0 - beta1)/sqrt(2), d2 = (beta0 + conj(beta1))/sqrt(2);
// then d1 alpha + d2 beta = (1, 1)/sqrt(2) and |d1|^2 + |d2|^2 = 1.
std::pair<cplx, cplx> decompose_ancilla(const EigenPair& pair);

struct TomographyConfig {
  int t = 8;
  double epsilon = 0.1;
  // > 0: known floor on min_k |c_k|^2; fixes the repetition count to
  // safety * ceil(2 / hint). <= 0: run until stop_patience consecutive
  // repetitions add no new bitstring.
  double min_prob_hint = 0.0;
  int stop_patience = 25;
  int safety = 3;
  long long shots_mag = 100000;
  long long shots_phase = 100000;
  uint64_t seed = 1;
  int qubit_cap = kDefaultQubitCap;

  void validate() const;
};

struct SupportEstimate {
  std::set<std::string> found;
  // Every observed (bitstring, phase word) in repetition order, no dedup.
  std::map<std::string, std::vector<uint64_t>> phase_table;
  int repetitions_used = 0;
};

// Phase-1 sampler. The joint pre-measurement state is prepared once; run()
// draws an independent measurement record from it, which is equivalent to
// re-preparing a fresh copy per repetition.
//
// The register width is sized up front from the support-restricted eigenphase
// gap: the smallest t with 2pi 2^-t <= gap/2 keeps words of distinct
// bitstrings apart, clamped to the qubit cap (t_capped reports a clamp, and
// collision() reports whether two bitstrings still share a word at the
// chosen width).
class SupportSampler {
 public:
  SupportSampler(const SparseState& truth, const PhaseConfig& cfg,
                 const TomographyConfig& tcfg);

  SupportEstimate run(RngStream& rng) const;

  int t_used() const { return t_used_; }
  int t_tilde() const { return t_tilde_; }
  bool t_capped() const { return t_capped_; }
  bool collision() const { return collision_; }
  int budget() const { return budget_; }
  const std::vector<EigenPair>& support_pairs() const { return pairs_; }

 private:
  int n_ = 0;
  int t_used_ = 0;
  int t_tilde_ = 0;
  bool t_capped_ = false;
  bool collision_ = false;
  int budget_ = 0;  // 0 => patience mode
  int patience_ = 0;
  std::vector<EigenPair> pairs_;
  PreparedQpe prepared_;
};

SupportEstimate phase1_support(const SparseState& truth, const PhaseConfig& cfg,
                               const TomographyConfig& tcfg);

// Worst detection probability over branches, min_k p_k max(|d_k1|^2, |d_k2|^2),
// from explicit branch tables. Always >= min_k p_k / 2.
double worst_branch_probability(const std::vector<double>& probs,
                                const std::vector<std::pair<double, double>>& dsq);

// (m, budget): m as above from the solved spectrum, budget = ceil(2 / min_k |c_k|^2).
std::pair<double, int> repetition_budget(const SparseState& truth, const Spectrum& spectrum);

// True when two of the phases land on the same t_tilde-bit word.
bool phase_words_collide(const std::vector<double>& phases, int t_tilde);

struct CoefficientEstimate {
  std::vector<std::string> support;  // ascending by label
  std::vector<cplx> coeffs;          // unit norm over kept entries; 0 marks dropped
  std::vector<std::string> dropped;  // support strings with zero sampled counts
  double off_support_rate = 0.0;
  int settings = 0;
};

// Phase 2: magnitudes from shots_mag computational-basis draws; relative
// phases from two interferometric settings per non-reference string, with
// frequencies of (|s1> +- |sk>)/sqrt(2) and (|s1> +- i|sk>)/sqrt(2) giving
// the real and imaginary parts of conj(c_1) c_k. Reference phase := 0.
CoefficientEstimate phase2_coefficients(const SparseState& truth,
                                        const std::set<std::string>& support,
                                        const TomographyConfig& tcfg);

double fidelity(const SparseState& a, const SparseState& b);

struct Report {
  SparseState estimate;
  double fidelity = 0.0;
  SupportEstimate support;
  int repetitions_used = 0;
  int budget = 0;  // applied phase-1 budget; 0 in patience mode
  double m_value = 0.0;
  int theoretical_budget = 0;  // ceil(2 / min_k |c_k|^2) from the truth
  long long shots_mag = 0;
  long long shots_phase = 0;
  int settings = 0;
  int t_used = 0;
  int t_tilde = 0;
  bool t_capped = false;
  bool collision_detected = false;
  double off_support_rate = 0.0;
  std::vector<std::string> dropped;
};

Report reconstruct(const SparseState& truth, const PhaseConfig& cfg,
                   const TomographyConfig& tcfg);

}  // namespace qst
