#include "qst/uphi_element.hpp"

#include <cmath>
#include <numbers>

namespace qst {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

thread_local ElementOpCount g_op_count;

V4 apply_stage(const M4& m, const V4& w) {
  ++g_op_count.stage_applies;
  return m * w;
}

int bit(uint64_t x, int b) { return int((x >> b) & 1); }

}  // namespace

void put_rotation_block(M4& m, int row, int col, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  m(row, col) = c;
  m(row, col + 1) = -s;
  m(row + 1, col) = s;
  m(row + 1, col + 1) = c;
}

M4 m_matrix(int stage, int d_bit, int e_bit, const PhaseConfig& cfg) {
  if (stage < 1 || stage >= cfg.n)
    throw std::invalid_argument("stage out of range for the generic matrix");
  M4 m = M4::Zero();
  if (e_bit == d_bit) {
    m(0, 0) = m(1, 1) = 1.0;
    put_rotation_block(m, 0, 2, kHalfPi);
  } else {
    put_rotation_block(m, 2, 0, cfg.phi(stage) + kHalfPi);
    put_rotation_block(m, 2, 2, cfg.phi(stage));
  }
  return m;
}

M4 m_matrix_final(int d_bit, int e_bit, const PhaseConfig& cfg) {
  const int n = cfg.n;
  M4 left = M4::Zero();
  M4 right = M4::Zero();
  if (e_bit == d_bit) {
    left(0, 0) = left(1, 1) = 1.0;
    put_rotation_block(left, 2, 0, cfg.phi(n + 1) + kHalfPi);
    right(0, 0) = right(1, 1) = 1.0;
    put_rotation_block(right, 0, 2, kHalfPi);
  } else {
    put_rotation_block(left, 0, 2, kHalfPi);
    put_rotation_block(left, 2, 2, cfg.phi(n + 1));
    put_rotation_block(right, 2, 0, cfg.phi(n) + kHalfPi);
    put_rotation_block(right, 2, 2, cfg.phi(n));
  }
  return left * right;
}

V4 v_vec(int q_bit) {
  V4 v = V4::Zero();
  v(q_bit ? 2 : 0) = 1.0;
  return v;
}

cplx u_contract(int e_bit, const V4& w) {
  ++g_op_count.contractions;
  return e_bit ? cplx(w(2), w(3)) : cplx(w(0), w(1));
}

ElementOpCount element_op_count() { return g_op_count; }
void reset_element_op_count() { g_op_count = {}; }

cplx uphi_element(uint64_t k, uint64_t l, const PhaseConfig& cfg) {
  const int n = cfg.n;
  if (k >= (uint64_t(1) << (n + 1)) || l >= (uint64_t(1) << (n + 1)))
    throw std::invalid_argument("index out of range");
  const int q = bit(l, n);
  V4 w = v_vec(q);
  for (int stage = 1; stage < n; ++stage)
    w = apply_stage(m_matrix(stage, bit(l, stage - 1), bit(k, stage - 1), cfg), w);
  w = apply_stage(m_matrix_final(bit(l, n - 1), bit(k, n - 1), cfg), w);
  const double scale = std::pow(2.0, -(n + 1) / 2.0);
  return scale * u_contract(bit(k, n), w);
}

cplx uphi_element_reordered(uint64_t k, uint64_t j, const PhaseConfig& cfg) {
  const int n = cfg.n;
  if (k >= (uint64_t(1) << (n + 1)) || j >= (uint64_t(1) << (n + 1)))
    throw std::invalid_argument("index out of range");
  V4 w = v_vec(bit(j, 0));
  for (int stage = 1; stage < n; ++stage)
    w = apply_stage(m_matrix(stage, bit(j, n + 1 - stage), bit(k, n + 1 - stage), cfg), w);
  w = apply_stage(m_matrix_final(bit(j, 1), bit(k, 1), cfg), w);
  const double scale = std::pow(2.0, -(n + 1) / 2.0);
  return scale * u_contract(bit(k, 0), w);
}

uint64_t raw_index_from_layout(uint64_t index, int n) {
  if (index >= (uint64_t(1) << (n + 1))) throw std::invalid_argument("index out of range");
  uint64_t out = uint64_t(bit(index, 0)) << n;
  for (int b = 0; b < n; ++b) out |= uint64_t(bit(index, n - b)) << b;
  return out;
}

namespace {

// chi factor for a hop into path bit `to` at the given stage (1-based);
// equal bits keep the cos branch, unequal bits take the i*sin branch.
cplx chi_factor(int stage, int from, int to, const std::vector<double>& thetas,
                const std::vector<std::pair<double, double>>& phase_pairs) {
  const double theta = thetas[size_t(stage) - 1];
  const auto& [p0, p1] = phase_pairs[size_t(stage) - 1];
  const cplx phase = std::polar(1.0, to ? p1 : p0);
  if (from == to) return std::cos(theta) * phase;
  return cplx(0.0, std::sin(theta)) * phase;
}

cplx path_amplitude_from(int q, const std::vector<int>& path, const std::vector<double>& thetas,
                         const std::vector<std::pair<double, double>>& phase_pairs) {
  cplx amp = chi_factor(1, q, path[0], thetas, phase_pairs);
  for (size_t k = 1; k < path.size(); ++k)
    amp *= chi_factor(int(k) + 1, path[k - 1], path[k], thetas, phase_pairs);
  return amp;
}

}  // namespace

PathAmplitude path_amplitude(const std::vector<int>& path, const std::vector<double>& thetas,
                                   const std::vector<std::pair<double, double>>& phase_pairs) {
  if (path.empty() || path.size() != thetas.size() || path.size() != phase_pairs.size())
    throw std::invalid_argument("path needs one bit per stage");
  for (int b : path)
    if (b != 0 && b != 1) throw std::invalid_argument("path bits must be 0 or 1");
  return {path_amplitude_from(0, path, thetas, phase_pairs), path};
}

StateVector path_sum_state(const std::vector<double>& thetas,
                             const std::vector<std::pair<double, double>>& phase_pairs,
                             const std::vector<int>& wpd_basis, cplx q0, cplx q1) {
  const int n = int(wpd_basis.size());
  if (n < 1) throw std::invalid_argument("need at least one detector");
  if (thetas.size() != size_t(n) + 1 || phase_pairs.size() != size_t(n) + 1)
    throw std::invalid_argument("expected n+1 stages");
  for (int b : wpd_basis)
    if (b != 0 && b != 1) throw std::invalid_argument("detector basis bits must be 0 or 1");

  StateVector out(n + 1);
  std::vector<int> path(size_t(n) + 1);
  const uint64_t num_paths = uint64_t(1) << (n + 1);
  for (uint64_t p = 0; p < num_paths; ++p) {
    for (int k = 0; k <= n; ++k) path[size_t(k)] = bit(p, k);
    cplx amp = 0.0;
    if (q0 != 0.0) amp += q0 * path_amplitude_from(0, path, thetas, phase_pairs);
    if (q1 != 0.0) amp += q1 * path_amplitude_from(1, path, thetas, phase_pairs);
    // Detector k ends in |j_k xor D_k>; photon bit is the last path bit.
    uint64_t index = uint64_t(path[size_t(n)]);
    for (int k = 1; k <= n; ++k)
      index |= uint64_t(path[size_t(k) - 1] ^ wpd_basis[size_t(k) - 1]) << wpd_qubit(n, k);
    out.amps[index] += amp;
  }
  return out;
}

}  // namespace qst
