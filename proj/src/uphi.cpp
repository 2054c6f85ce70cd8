#include "qst/uphi.hpp"

#include <cmath>
#include <numbers>

namespace qst {

namespace {

constexpr double kTau = 2.0 * std::numbers::pi;

double wrap_angle(double phi) {
  double w = std::fmod(phi, kTau);
  if (w < 0.0) w += kTau;
  return w;
}

}  // namespace

PhaseConfig::PhaseConfig(int n_, std::vector<double> phis_) : n(n_), phis(std::move(phis_)) {
  if (n < 1) throw std::invalid_argument("need at least one detector stage");
  if (phis.size() != size_t(n) + 1) throw std::invalid_argument("expected n+1 phases");
  for (double& p : phis) p = wrap_angle(p);
}

PhaseConfig random_phase_config(int n, RngStream& rng) {
  std::vector<double> phis(size_t(n) + 1);
  for (double& p : phis) p = rng.uniform() * kTau;
  return PhaseConfig(n, std::move(phis));
}

Gate2x2 rx_half_turn() {
  const double h = 1.0 / std::sqrt(2.0);
  return {cplx(h, 0.0), cplx(0.0, h), cplx(0.0, h), cplx(h, 0.0)};
}

Gate2x2 beam_splitter(double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return {cplx(c, 0.0), cplx(0.0, s), cplx(0.0, s), cplx(c, 0.0)};
}

void apply_uphi_circuit(StateVector& state, const PhaseConfig& cfg, StageOrder order) {
  const int n = cfg.n;
  if (state.num_qubits != n + 1) throw std::invalid_argument("state needs n+1 qubits");
  const Gate2x2 bs = rx_half_turn();
  for (int k = 1; k <= n; ++k) {
    apply_gate1(state, bs, 0);
    const Gate2x2 ph = Gate2x2::phase(cfg.phi(k));
    if (order == StageOrder::cnot_then_phase) {
      apply_cnot(state, 0, wpd_qubit(n, k));
      apply_gate1(state, ph, 0);
    } else {
      apply_gate1(state, ph, 0);
      apply_cnot(state, 0, wpd_qubit(n, k));
    }
  }
  apply_gate1(state, bs, 0);
  apply_gate1(state, Gate2x2::phase(cfg.phi(n + 1)), 0);
}

void apply_general_optics_circuit(StateVector& state, const std::vector<double>& thetas,
                                  const std::vector<std::pair<double, double>>& phase_pairs) {
  const int n = state.num_qubits - 1;
  if (n < 1) throw std::invalid_argument("state needs at least two qubits");
  if (thetas.size() != size_t(n) + 1 || phase_pairs.size() != size_t(n) + 1)
    throw std::invalid_argument("expected n+1 splitter angles and phase pairs");
  for (int k = 1; k <= n; ++k) {
    apply_gate1(state, beam_splitter(thetas[size_t(k) - 1]), 0);
    apply_cnot(state, 0, wpd_qubit(n, k));
    const auto& [p0, p1] = phase_pairs[size_t(k) - 1];
    apply_gate1(state, Gate2x2::diag(p0, p1), 0);
  }
  apply_gate1(state, beam_splitter(thetas[size_t(n)]), 0);
  const auto& [p0, p1] = phase_pairs[size_t(n)];
  apply_gate1(state, Gate2x2::diag(p0, p1), 0);
}

UnitaryMatrix uphi_dense(const PhaseConfig& cfg, int max_n) {
  if (cfg.n > max_n)
    throw ResourceError("dense assembly capped at n = " + std::to_string(max_n));
  const size_t dim = size_t(1) << (cfg.n + 1);
  UnitaryMatrix u(dim, dim);
  for (size_t col = 0; col < dim; ++col) {
    StateVector basis = new_basis_state(cfg.n + 1, col);
    apply_uphi_circuit(basis, cfg);
    for (size_t row = 0; row < dim; ++row) u(row, col) = basis.amps[row];
  }
  return u;
}

UnitaryMatrix unitary_power(const UnitaryMatrix& u, uint64_t power) {
  if (u.rows() != u.cols()) throw std::invalid_argument("matrix must be square");
  UnitaryMatrix result = UnitaryMatrix::Identity(u.rows(), u.cols());
  UnitaryMatrix base = u;
  while (power > 0) {
    if (power & 1) result = result * base;
    power >>= 1;
    if (power > 0) base = base * base;
  }
  return result;
}

void apply_dense(const UnitaryMatrix& u, StateVector& state) {
  if (size_t(u.rows()) != state.dim()) throw std::invalid_argument("dimension mismatch");
  Eigen::Map<Eigen::VectorXcd> v(state.amps.data(), state.amps.size());
  Eigen::VectorXcd out = u * v;
  v = out;
}

}  // namespace qst
