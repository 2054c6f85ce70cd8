#include "qst/phase_estimation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qst {

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

int register_size(int t, double eps) {
  if (t < 1) throw std::invalid_argument("need at least one accurate bit");
  if (!(eps > 0.0) || eps >= 1.0) throw std::invalid_argument("failure bound must be in (0, 1)");
  const double extra = std::log2(2.0 + 1.0 / (2.0 * eps));
  return t + int(std::ceil(extra));
}

void apply_qft(StateVector& state, const std::vector<int>& qubits) {
  const int m = int(qubits.size());
  for (int i = m - 1; i >= 0; --i) {
    apply_gate1(state, Gate2x2::hadamard(), qubits[size_t(i)]);
    for (int j = i - 1; j >= 0; --j)
      apply_controlled_phase(state, qubits[size_t(j)], qubits[size_t(i)],
                             kPi / double(uint64_t(1) << (i - j)));
  }
  for (int i = 0; i < m / 2; ++i) apply_swap(state, qubits[size_t(i)], qubits[size_t(m - 1 - i)]);
}

void apply_inverse_qft(StateVector& state, const std::vector<int>& qubits) {
  const int m = int(qubits.size());
  for (int i = 0; i < m / 2; ++i) apply_swap(state, qubits[size_t(i)], qubits[size_t(m - 1 - i)]);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < i; ++j)
      apply_controlled_phase(state, qubits[size_t(j)], qubits[size_t(i)],
                             -kPi / double(uint64_t(1) << (i - j)));
    apply_gate1(state, Gate2x2::hadamard(), qubits[size_t(i)]);
  }
}

std::pair<std::vector<int>, StateVector> measure_qubits(const StateVector& state,
                                                        const std::vector<int>& qubits,
                                                        RngStream& rng) {
  StateVector post = state;
  std::vector<int> bits;
  bits.reserve(qubits.size());
  for (int qubit : qubits) {
    if (qubit < 0 || qubit >= post.num_qubits) throw std::invalid_argument("qubit out of range");
    const uint64_t mask = uint64_t(1) << qubit;
    double p1 = 0.0;
    for (uint64_t j = 0; j < post.dim(); ++j)
      if (j & mask) p1 += std::norm(post.amps[j]);
    const int outcome = rng.uniform() < p1 ? 1 : 0;
    const double keep_prob = outcome ? p1 : 1.0 - p1;
    if (keep_prob <= 0.0) throw std::runtime_error("measurement collapsed onto a null branch");
    const double scale = 1.0 / std::sqrt(keep_prob);
    for (uint64_t j = 0; j < post.dim(); ++j) {
      if (int((j & mask) != 0) == outcome)
        post.amps[j] *= scale;
      else
        post.amps[j] = 0.0;
    }
    bits.push_back(outcome);
  }
  return {std::move(bits), std::move(post)};
}

double PreparedQpe::word_probability(uint64_t word) const {
  if (word >= word_cumulative.size()) throw std::invalid_argument("word out of range");
  const double hi = word_cumulative[word];
  const double lo = word == 0 ? 0.0 : word_cumulative[word - 1];
  return hi - lo;
}

PreparedQpe prepare_qpe(const UnitaryMatrix& u, const StateVector& data, int t_tilde,
                        int qubit_cap) {
  if (t_tilde < 1) throw std::invalid_argument("register needs at least one qubit");
  if (u.rows() != u.cols() || u.rows() != Eigen::Index(data.dim()))
    throw std::invalid_argument("operator and data dimensions disagree");
  const int nq_data = data.num_qubits;
  const int nq_total = nq_data + t_tilde;
  if (nq_total > qubit_cap) throw ResourceError("phase-estimation register exceeds the qubit cap");

  PreparedQpe prepared;
  prepared.num_data_qubits = nq_data;
  prepared.t_tilde = t_tilde;

  StateVector& joint = prepared.joint;
  joint = StateVector(nq_total);
  std::copy(data.amps.begin(), data.amps.end(), joint.amps.begin());

  std::vector<int> regs(static_cast<size_t>(t_tilde), 0);
  for (int j = 0; j < t_tilde; ++j) regs[size_t(j)] = nq_data + j;
  for (int q : regs) apply_gate1(joint, Gate2x2::hadamard(), q);

  // Controlled powers: the joint vector viewed register-major has one data
  // row per register word, so rows whose bit j is set take U^{2^j}.
  using RowMajor = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const Eigen::Index rows = Eigen::Index(1) << t_tilde;
  const Eigen::Index cols = Eigen::Index(1) << nq_data;
  Eigen::Map<RowMajor> view(joint.amps.data(), rows, cols);

  UnitaryMatrix power = u;
  for (int j = 0; j < t_tilde; ++j) {
    if (j > 0) power = UnitaryMatrix(power * power);
    const UnitaryMatrix power_t = power.transpose();
    const Eigen::Index span = Eigen::Index(1) << j;
    for (Eigen::Index start = span; start < rows; start += 2 * span)
      view.middleRows(start, span) *= power_t;
  }

  apply_inverse_qft(joint, regs);

  prepared.word_cumulative.resize(size_t(rows));
  double acc = 0.0;
  for (Eigen::Index w = 0; w < rows; ++w) {
    acc += view.row(w).squaredNorm();
    prepared.word_cumulative[size_t(w)] = acc;
  }
  prepared.word_cumulative.back() = std::max(prepared.word_cumulative.back(), 1.0);
  return prepared;
}

PreparedQpe prepare_qpe(const PhaseConfig& cfg, const StateVector& data, int t_tilde,
                        int qubit_cap) {
  return prepare_qpe(uphi_dense(cfg), data, t_tilde, qubit_cap);
}

QpeSample sample_qpe(const PreparedQpe& prepared, RngStream& rng) {
  const uint64_t word = rng.discrete_from_cumulative(prepared.word_cumulative);

  QpeSample sample;
  sample.word = word;
  sample.phase = phase_from_word(word, prepared.t_tilde);
  sample.data_state = StateVector(prepared.num_data_qubits);

  const uint64_t block = uint64_t(1) << prepared.num_data_qubits;
  const uint64_t offset = word * block;
  double nrm = 0.0;
  for (uint64_t j = 0; j < block; ++j) nrm += std::norm(prepared.joint.amps[offset + j]);
  const double scale = 1.0 / std::sqrt(nrm);
  for (uint64_t j = 0; j < block; ++j)
    sample.data_state.amps[j] = prepared.joint.amps[offset + j] * scale;
  return sample;
}

double phase_from_word(uint64_t word, int t_tilde) {
  return 2.0 * kPi * double(word) / double(uint64_t(1) << t_tilde);
}

}  // namespace qst
