#include "qst/eigenstructure.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

namespace qst {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kHalfPi = kPi / 2.0;
constexpr double kStructureTol = 1e-8;

// Single-stage transfer summed over the detector basis, valid below stage n.
M4 plain_factor(int stage, const PhaseConfig& cfg) {
  M4 f = M4::Zero();
  f(0, 0) = f(1, 1) = 1.0;
  put_rotation_block(f, 0, 2, kHalfPi);
  put_rotation_block(f, 2, 0, cfg.phi(stage) + kHalfPi);
  put_rotation_block(f, 2, 2, cfg.phi(stage));
  return f;
}

// Signed detector-basis sum for the input-side label bit s_a; the factor
// index a counts down from the photon end, so a = 1 is stage n and takes
// the folded final-stage forms.
M4 mhat(int a, int s_bit, const PhaseConfig& cfg) {
  const int stage = cfg.n - a + 1;
  const double sign = s_bit ? -1.0 : 1.0;
  if (stage == cfg.n)
    return m_matrix_final(0, 0, cfg) + sign * m_matrix_final(0, 1, cfg);
  return m_matrix(stage, 0, 0, cfg) + sign * m_matrix(stage, 0, 1, cfg);
}

double wrap_phase(double p) {
  p = std::fmod(p, 2.0 * kPi);
  if (p < 0.0) p += 2.0 * kPi;
  return p;
}

double unitarity_residual(const Eigen::Matrix2cd& r) {
  const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
  const double cols = (r.adjoint() * r - id).cwiseAbs().maxCoeff();
  const double rows = (r * r.adjoint() - id).cwiseAbs().maxCoeff();
  return std::max(cols, rows);
}

double quantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double pos = q * double(sorted.size() - 1);
  const size_t lo = size_t(pos);
  const size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - double(lo);
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

std::array<double, 4> quantile_set(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  return {quantile(values, 0.0), quantile(values, 0.5), quantile(values, 0.9),
          quantile(values, 1.0)};
}

}  // namespace

AnsatzIndex AnsatzIndex::from_bits(uint64_t bits, int n) {
  if (n < 1) throw std::invalid_argument("need at least one detector");
  if (bits >= (uint64_t(1) << n)) throw std::invalid_argument("label bits out of range");
  AnsatzIndex idx;
  idx.m = bits == 0 ? 1 : std::bit_width(bits) + 1;
  idx.s.resize(size_t(idx.m) - 1);
  for (int i = 0; i + 1 < idx.m; ++i) idx.s[size_t(i)] = int((bits >> i) & 1);
  return idx;
}

uint64_t AnsatzIndex::to_bits() const {
  uint64_t bits = 0;
  for (size_t i = 0; i < s.size(); ++i) bits |= uint64_t(s[i]) << i;
  return bits;
}

void AnsatzIndex::validate(int n) const {
  if (m < 1 || m > n + 1) throw std::invalid_argument("period exponent out of range");
  if (s.size() != size_t(m) - 1) throw std::invalid_argument("label length must be m-1");
  for (int b : s)
    if (b != 0 && b != 1) throw std::invalid_argument("label bits must be 0 or 1");
  if (m >= 2 && s[size_t(m) - 2] != 1)
    throw std::invalid_argument("leading label bit must be 1");
}

std::vector<AnsatzIndex> enumerate_ansatz(int n) {
  std::vector<AnsatzIndex> out;
  out.reserve(size_t(1) << n);
  for (uint64_t bits = 0; bits < (uint64_t(1) << n); ++bits)
    out.push_back(AnsatzIndex::from_bits(bits, n));
  return out;
}

StateVector ansatz_state(const AnsatzIndex& idx, int n, cplx alpha0, cplx alpha1) {
  idx.validate(n);
  StateVector state(n + 1);
  const uint64_t mask = idx.to_bits();
  const double scale = std::pow(2.0, -n / 2.0);
  for (uint64_t j = 0; j < state.dim(); ++j) {
    const double sign = (std::popcount((j >> 1) & mask) & 1) ? -1.0 : 1.0;
    state.amps[j] = scale * sign * ((j & 1) ? alpha1 : alpha0);
  }
  return state;
}

M4 k_product(int a, const PhaseConfig& cfg) {
  if (a < 0 || a >= cfg.n) throw std::invalid_argument("stage count out of range");
  M4 prod = M4::Identity();
  for (int l = 1; l <= a; ++l) prod = plain_factor(l, cfg) * prod;
  return prod;
}

Eigen::Matrix2cd RhoBlock::scaled() const {
  const double s = std::pow(2.0, n / 2.0);
  Eigen::Matrix2cd r;
  for (int k0 = 0; k0 < 2; ++k0)
    for (int j0 = 0; j0 < 2; ++j0) r(k0, j0) = s * rho(j0, k0);
  return r;
}

RhoBlock block_from_entries(const AnsatzIndex& idx, int n, const Eigen::Matrix2cd& rho) {
  RhoBlock block;
  block.idx = idx;
  block.n = n;
  block.rho = rho;

  block.omega = std::atan2(std::abs(rho(1, 0)), std::abs(rho(0, 0)));
  block.g00 = std::arg(rho(0, 0));
  block.g10 = std::arg(rho(1, 0));
  block.g01 = std::arg(rho(0, 1));

  const Eigen::Matrix2cd r = block.scaled();
  const cplx r11_pred =
      -std::cos(block.omega) * std::polar(1.0, block.g01 + block.g10 - block.g00);
  block.structure_residual =
      std::max(unitarity_residual(r), std::abs(r(1, 1) - r11_pred));
  block.conforming = block.structure_residual <= kStructureTol;
  return block;
}

RhoBlock rho_block(const AnsatzIndex& idx, const PhaseConfig& cfg) {
  idx.validate(cfg.n);
  const int n = cfg.n;
  const int m = idx.m;

  M4 v;
  if (m == 1) {
    v = (m_matrix_final(0, 0, cfg) + m_matrix_final(0, 1, cfg)) * k_product(n - 1, cfg);
  } else {
    v = k_product(n - m + 1, cfg);
    for (int a = m - 1; a >= 1; --a) v = mhat(a, idx.s[size_t(a) - 1], cfg) * v;
  }

  const double scale = std::pow(2.0, -n - 0.5);
  Eigen::Matrix2cd rho;
  for (int j0 = 0; j0 < 2; ++j0)
    for (int k0 = 0; k0 < 2; ++k0)
      rho(j0, k0) = scale * cplx(v(2 * k0, 2 * j0), v(2 * k0 + 1, 2 * j0));
  return block_from_entries(idx, n, rho);
}

EigenPair solve_pair(const RhoBlock& block) {
  const Eigen::Matrix2cd r = block.scaled();
  const cplx tr = r(0, 0) + r(1, 1);
  const cplx det = r(0, 0) * r(1, 1) - r(0, 1) * r(1, 0);
  const cplx disc = std::sqrt(tr * tr - 4.0 * det);
  const cplx mu_a = 0.5 * (tr + disc);
  const cplx mu_b = 0.5 * (tr - disc);

  const double magnitude = r.cwiseAbs().maxCoeff();
  const bool scalar_block = std::abs(mu_a - mu_b) < 1e-12 * std::max(1.0, magnitude);
  if (scalar_block) {
    const double off = std::max({std::abs(r(0, 1)), std::abs(r(1, 0)),
                                 std::abs(r(0, 0) - mu_a), std::abs(r(1, 1) - mu_a)});
    if (off > 1e-9)
      throw DegenerateBlockError("repeated eigenvalue on a non-scalar photon block",
                                 block.structure_residual, off);
  }

  const auto eigvec = [&](cplx mu) -> Eigen::Vector2cd {
    Eigen::Vector2cd c1(r(0, 1), mu - r(0, 0));
    Eigen::Vector2cd c2(mu - r(1, 1), r(1, 0));
    const double n1 = c1.norm();
    const double n2 = c2.norm();
    if (std::max(n1, n2) < 1e-13 * std::max(1.0, magnitude)) {
      // Scalar block: eigenvectors are the basis vectors.
      return std::abs(r(0, 0) - mu) <= std::abs(r(1, 1) - mu) ? Eigen::Vector2cd(1.0, 0.0)
                                                              : Eigen::Vector2cd(0.0, 1.0);
    }
    Eigen::Vector2cd v = n1 >= n2 ? c1 : c2;
    return v / v.norm();
  };

  struct Member {
    cplx mu;
    double phase;
    Eigen::Vector2cd vec;
  };
  Member first{mu_a, wrap_phase(std::arg(mu_a)), eigvec(mu_a)};
  Member second{mu_b, wrap_phase(std::arg(mu_b)), eigvec(mu_b)};
  if (scalar_block) {
    // Both fallbacks land on the same basis vector; any orthonormal
    // completion is an eigenvector here.
    second.vec = Eigen::Vector2cd(-std::conj(first.vec(1)), std::conj(first.vec(0)));
  }
  if (second.phase < first.phase) std::swap(first, second);

  // Gauge the low-phase member with a real non-negative second component.
  Eigen::Vector2cd alpha = first.vec;
  if (std::abs(alpha(1)) > 1e-9)
    alpha *= std::conj(alpha(1)) / std::abs(alpha(1));
  else
    alpha *= std::conj(alpha(0)) / std::abs(alpha(0));

  const double a0 = alpha(0).real();
  const double b0 = alpha(0).imag();
  const double a1 = alpha(1).real();
  const Eigen::Vector2cd dual_pred(cplx(a1, 0.0), cplx(-a0, b0));

  Eigen::Vector2cd beta = second.vec;
  const cplx proj = beta.dot(dual_pred);
  double dual_phase = 0.0;
  if (std::abs(proj) > 1e-9) {
    beta *= proj / std::abs(proj);
    dual_phase = std::arg(proj);
  }

  EigenPair pair;
  pair.idx = block.idx;
  pair.alpha0 = alpha(0);
  pair.alpha1 = alpha(1);
  pair.beta0 = beta(0);
  pair.beta1 = beta(1);
  pair.lambda1 = first.phase;
  pair.lambda2 = second.phase;
  pair.dual_phase = dual_phase;
  pair.duality_residual = (beta - dual_pred).norm();

  pair.solve_residual = std::max(
      {(r * alpha - first.mu * alpha).norm(), (r * beta - second.mu * beta).norm(),
       std::abs(std::abs(first.mu) - 1.0), std::abs(std::abs(second.mu) - 1.0)});

  const Eigen::Vector2cd out = r * alpha;
  const double r15a = std::abs(std::norm(out(0)) - std::norm(alpha(0)));
  const double r15b = std::abs(std::norm(out(1)) - std::norm(alpha(1)));
  const double r16 = std::abs(alpha(1) * out(0) - alpha(0) * out(1));
  const double r17 = std::abs(alpha.squaredNorm() - 1.0);
  const double r18 = std::abs(alpha(0).imag() * alpha(1).imag());
  pair.eq_residual = std::max({r15a, r15b, r16, r17, r18});
  return pair;
}

const EigenPair& Spectrum::pair_for(uint64_t bits) const {
  for (const EigenPair& p : pairs)
    if (p.idx.to_bits() == bits) return p;
  throw std::out_of_range("no solved pair for that label");
}

Spectrum full_spectrum(const PhaseConfig& cfg) {
  Spectrum spec;
  spec.n = cfg.n;
  for (const AnsatzIndex& idx : enumerate_ansatz(cfg.n)) {
    const RhoBlock block = rho_block(idx, cfg);
    spec.max_structure_residual = std::max(spec.max_structure_residual, block.structure_residual);
    try {
      EigenPair pair = solve_pair(block);
      spec.max_eq_residual = std::max(spec.max_eq_residual, pair.eq_residual);
      spec.max_duality_residual = std::max(spec.max_duality_residual, pair.duality_residual);
      spec.pairs.push_back(std::move(pair));
    } catch (const DegenerateBlockError&) {
      ++spec.degenerate_blocks;
    }
  }

  std::vector<double> phases;
  phases.reserve(2 * spec.pairs.size());
  for (const EigenPair& p : spec.pairs) {
    phases.push_back(p.lambda1);
    phases.push_back(p.lambda2);
  }
  std::sort(phases.begin(), phases.end());
  if (phases.size() >= 2) {
    double gap = 2.0 * kPi - (phases.back() - phases.front());
    for (size_t i = 1; i < phases.size(); ++i)
      gap = std::min(gap, phases[i] - phases[i - 1]);
    spec.min_gap = gap;
  }

  spec.conforming = spec.degenerate_blocks == 0 &&
                    spec.max_structure_residual <= kStructureTol &&
                    spec.max_eq_residual <= kStructureTol &&
                    spec.max_duality_residual <= kStructureTol;
  return spec;
}

BlockEquationResiduals block_equation_residuals(double omega, double g00, double g01, double g10,
                                                cplx alpha0, cplx alpha1) {
  const cplx w00 = std::cos(omega) * std::polar(1.0, g00);
  const cplx w01 = std::sin(omega) * std::polar(1.0, g10);
  const cplx w10 = std::sin(omega) * std::polar(1.0, g01);
  const cplx w11 = -std::cos(omega) * std::polar(1.0, g01 + g10 - g00);
  const cplx o0 = w00 * alpha0 + w01 * alpha1;
  const cplx o1 = w10 * alpha0 + w11 * alpha1;
  const cplx cross = std::polar(1.0, g00) * (alpha1 * o0 - alpha0 * o1);
  return {std::norm(o0) - std::norm(alpha0), std::norm(o1) - std::norm(alpha1), cross.real(),
          cross.imag(), std::norm(alpha0) + std::norm(alpha1) - 1.0};
}

double AngleResiduals::max_abs() const {
  double m = 0.0;
  for (double x : e) m = std::max(m, std::abs(x));
  return m;
}

AngleResiduals angle_residuals(const RhoBlock& block, double mu0, double mu1, double mu2) {
  const double w = block.omega;
  const double g00 = block.g00;
  const double g01 = block.g01;
  const double g10 = block.g10;
  const double sw = std::sin(w);
  const double cw = std::cos(w);
  const double s2w = std::sin(2.0 * w);

  AngleResiduals res;
  res.e[0] = mu2 * s2w * (mu0 * std::cos(g00 - g10) - mu1 * std::sin(g00 - g10)) -
             sw * sw * (mu0 * mu0 + mu1 * mu1 - mu2 * mu2);
  res.e[1] = sw * sw * (mu0 * mu0 + mu1 * mu1 - mu2 * mu2) +
             mu2 * s2w * (mu1 * std::sin(g00 - g10) - mu0 * std::cos(g00 - g10));
  res.e[2] = sw * ((mu1 * mu1 - mu0 * mu0) * std::cos(g00 + g01) +
                   2.0 * mu0 * mu1 * std::sin(g00 + g01) + mu2 * mu2 * std::cos(g00 + g10)) +
             mu2 * cw *
                 (mu0 * (std::cos(2.0 * g00) + std::cos(g01 + g10)) -
                  mu1 * (std::sin(2.0 * g00) + std::sin(g01 + g10)));
  res.e[3] = sw * ((mu1 * mu1 - mu0 * mu0) * std::sin(g00 + g01) -
                   2.0 * mu0 * mu1 * std::cos(g00 + g01) + mu2 * mu2 * std::sin(g00 + g10)) +
             mu2 * cw *
                 (mu0 * (std::sin(2.0 * g00) + std::sin(g01 + g10)) +
                  mu1 * (std::cos(2.0 * g00) + std::cos(g01 + g10)));
  res.e[4] = mu0 * mu0 + mu1 * mu1 + mu2 * mu2 - 1.0;

  const BlockEquationResiduals dual =
      block_equation_residuals(w, g00, g01, g10, cplx(mu2, 0.0), cplx(-mu0, mu1));
  res.e[5] = dual.g1;
  res.e[6] = dual.g2;
  res.e[7] = sw * ((mu1 * mu1 - mu0 * mu0) * std::cos(g00 + g10) -
                   2.0 * mu0 * mu1 * std::sin(g00 + g10) + mu2 * mu2 * std::cos(g00 + g01)) +
             mu2 * cw *
                 (mu0 * (std::cos(2.0 * g00) + std::cos(g01 + g10)) +
                  mu1 * (std::sin(2.0 * g00) + std::sin(g01 + g10)));
  res.e[8] = sw * ((mu1 * mu1 - mu0 * mu0) * std::sin(g00 + g10) +
                   2.0 * mu0 * mu1 * std::cos(g00 + g10) + mu2 * mu2 * std::sin(g00 + g01)) +
             mu2 * cw *
                 (mu0 * (std::sin(2.0 * g00) + std::sin(g01 + g10)) -
                  mu1 * (std::cos(2.0 * g00) + std::cos(g01 + g10)));
  res.e[9] = dual.g5;

  const double inv = std::pow(2.0, -block.n);
  res.e[10] = std::norm(block.rho(0, 0)) + std::norm(block.rho(1, 0)) - inv;
  res.e[11] = std::norm(block.rho(0, 0)) + std::norm(block.rho(0, 1)) - inv;
  res.e[12] = std::norm(block.rho(0, 1)) + std::norm(block.rho(1, 1)) - inv;
  res.e[13] = std::abs(std::conj(block.rho(0, 0)) * block.rho(1, 0) +
                       std::conj(block.rho(0, 1)) * block.rho(1, 1));

  const double num = -mu2 * (mu0 * (std::cos(2.0 * g00) + std::cos(g01 + g10)) -
                             mu1 * (std::sin(2.0 * g00) + std::sin(g01 + g10)));
  const double den = (mu1 * mu1 - mu0 * mu0) * std::cos(g00 + g01) +
                     2.0 * mu0 * mu1 * std::sin(g00 + g01) + mu2 * mu2 * std::cos(g00 + g10);
  res.omega_closed_residual = std::abs(sw * den - cw * num);
  const double half = 0.5 * (g01 - g10);
  res.mu0_closed_residual = std::abs(mu0 * std::sin(half) + mu1 * std::cos(half));
  res.conditioning_warning = std::abs(std::remainder(g00 + g01, kHalfPi)) < 1e-6 ||
                             std::abs(std::remainder(g00 + g10, kHalfPi)) < 1e-6;
  return res;
}

SpectrumCheck verify_spectrum(const Spectrum& spectrum, const PhaseConfig& cfg) {
  SpectrumCheck check;
  check.min_gap = spectrum.min_gap;

  const uint64_t dim = uint64_t(1) << (cfg.n + 1);
  Eigen::MatrixXcd basis(dim, 2 * spectrum.pairs.size());
  Eigen::Index col = 0;

  for (const EigenPair& pair : spectrum.pairs) {
    const struct {
      cplx a0, a1;
      double lambda;
    } members[2] = {{pair.alpha0, pair.alpha1, pair.lambda1},
                    {pair.beta0, pair.beta1, pair.lambda2}};
    for (const auto& mb : members) {
      StateVector state = ansatz_state(pair.idx, cfg.n, mb.a0, mb.a1);
      StateVector evolved = state;
      apply_uphi_circuit(evolved, cfg);
      const cplx eig = std::polar(1.0, mb.lambda);
      double resid = 0.0;
      for (uint64_t i = 0; i < dim; ++i) {
        resid = std::max(resid, std::abs(evolved.amps[i] - eig * state.amps[i]));
        basis(Eigen::Index(i), col) = state.amps[i];
      }
      check.max_eigen_residual = std::max(check.max_eigen_residual, resid);
      ++col;
    }

    const RhoBlock block = rho_block(pair.idx, cfg);
    const AngleResiduals apx = angle_residuals(block, pair.alpha0.real(),
                                                       pair.alpha0.imag(), pair.alpha1.real());
    check.max_e_residual = std::max(check.max_e_residual, apx.max_abs());
    check.max_duality_residual = std::max(check.max_duality_residual, pair.duality_residual);
  }

  const Eigen::MatrixXcd gram = basis.adjoint() * basis;
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(gram.rows(), gram.cols());
  check.gram_residual = (gram - id).cwiseAbs().maxCoeff();
  return check;
}

ScanReport conjecture_scan(int n, int trials, uint64_t seed, double tol) {
  if (n < 1) throw std::invalid_argument("need at least one detector");
  if (trials < 1) throw std::invalid_argument("need at least one trial");
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");

  ScanReport report;
  report.n = n;
  report.trials = trials;
  report.seed = seed;
  report.tol = tol;

  std::vector<double> gaps, eigen_residuals, e_residuals, dualities;
  int conforming_count = 0;
  int gap_count = 0;

  for (int trial = 0; trial < trials; ++trial) {
    RngStream rng = RngStream::derive(seed, uint64_t(trial));
    const PhaseConfig cfg = random_phase_config(n, rng);
    const Spectrum spectrum = full_spectrum(cfg);
    const SpectrumCheck check = verify_spectrum(spectrum, cfg);

    ScanTrial record;
    record.phis = cfg.phis;
    record.min_gap = spectrum.min_gap;
    record.max_eigen_residual = check.max_eigen_residual;
    record.max_e_residual = check.max_e_residual;
    record.duality_residual = check.max_duality_residual;
    record.conforming = spectrum.degenerate_blocks == 0 && check.max_eigen_residual <= tol &&
                        check.max_e_residual <= tol && check.max_duality_residual <= tol &&
                        check.gram_residual <= tol;
    record.gap_ok = spectrum.min_gap > kGapTolerance;

    conforming_count += record.conforming;
    gap_count += record.gap_ok;
    gaps.push_back(record.min_gap);
    eigen_residuals.push_back(record.max_eigen_residual);
    e_residuals.push_back(record.max_e_residual);
    dualities.push_back(record.duality_residual);
    if (!record.conforming || !record.gap_ok) report.failure_exemplars.push_back(cfg.phis);
    report.records.push_back(std::move(record));
  }

  report.summary.conforming_fraction = double(conforming_count) / double(trials);
  report.summary.gap_fraction = double(gap_count) / double(trials);
  report.summary.min_gap_q = quantile_set(gaps);
  report.summary.eigen_residual_q = quantile_set(eigen_residuals);
  report.summary.e_residual_q = quantile_set(e_residuals);
  report.summary.duality_residual_q = quantile_set(dualities);
  return report;
}

}  // namespace qst
