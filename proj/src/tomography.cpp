#include <qst/tomography.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <stdexcept>

namespace qst {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<std::pair<uint64_t, cplx>> sorted_terms(const SparseState& state) {
  std::vector<std::pair<uint64_t, cplx>> out;
  out.reserve(state.terms.size());
  for (const auto& term : state.terms) out.emplace_back(label_from_bits(term.bits), term.coeff);
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

double circular_gap(double a, double b) {
  double d = std::abs(std::remainder(a - b, kTwoPi));
  return d;
}

uint64_t word_of_phase(double phase, int t_tilde) {
  const double n = std::ldexp(1.0, t_tilde);
  double frac = phase / kTwoPi;
  frac -= std::floor(frac);
  auto word = static_cast<uint64_t>(std::llround(frac * n));
  return word & ((uint64_t(1) << t_tilde) - 1);
}

long long draw_counts(RngStream& rng, const std::vector<double>& cumulative, long long shots,
                      std::vector<long long>& counts) {
  counts.assign(cumulative.size(), 0);
  for (long long i = 0; i < shots; ++i) counts[rng.discrete_from_cumulative(cumulative)]++;
  return shots;
}

}  // namespace

uint64_t label_from_bits(const std::string& bits) {
  if (bits.empty() || bits.size() > 62) throw std::invalid_argument("bitstring length out of range");
  uint64_t label = 0;
  for (char c : bits) {
    if (c != '0' && c != '1') throw std::invalid_argument("bitstring must be over {0,1}");
    label = (label << 1) | uint64_t(c == '1');
  }
  return label;
}

std::string bits_from_label(uint64_t label, int n) {
  if (n < 1 || n > 62) throw std::invalid_argument("bitstring length out of range");
  if (n < 62 && (label >> n) != 0) throw std::invalid_argument("label does not fit in n bits");
  std::string bits(size_t(n), '0');
  for (int i = 0; i < n; ++i)
    if ((label >> i) & 1) bits[size_t(n - 1 - i)] = '1';
  return bits;
}

void SparseState::validate() const {
  if (n < 1 || n > 62) throw std::invalid_argument("sparse state: n out of range");
  if (terms.empty()) throw std::invalid_argument("sparse state: no terms");
  std::set<std::string> seen;
  double total = 0.0;
  for (const auto& term : terms) {
    if (int(term.bits.size()) != n)
      throw std::invalid_argument("sparse state: bitstring length != n");
    label_from_bits(term.bits);
    if (!seen.insert(term.bits).second)
      throw std::invalid_argument("sparse state: duplicate bitstring");
    if (std::abs(term.coeff) == 0.0)
      throw std::invalid_argument("sparse state: zero coefficient");
    total += std::norm(term.coeff);
  }
  if (std::abs(total - 1.0) > 1e-10)
    throw std::invalid_argument("sparse state: coefficients not normalized");
}

void SparseState::normalize() {
  double total = 0.0;
  for (const auto& term : terms) total += std::norm(term.coeff);
  if (total <= 0.0) throw std::invalid_argument("sparse state: nothing to normalize");
  const double scale = 1.0 / std::sqrt(total);
  for (auto& term : terms) term.coeff *= scale;
}

SparseState gen_sparse_state(int n, int K, double min_prob, RngStream& rng) {
  if (n < 1 || n > 30) throw std::invalid_argument("gen_sparse_state: n out of range");
  if (K < 1 || (uint64_t(K) > (uint64_t(1) << n)))
    throw std::invalid_argument("gen_sparse_state: K out of range");
  if (min_prob < 0.0 || double(K) * min_prob > 1.0)
    throw std::invalid_argument("gen_sparse_state: infeasible min_prob");

  std::set<uint64_t> labels;
  while (int(labels.size()) < K) labels.insert(rng.below(uint64_t(1) << n));

  std::vector<double> weights(static_cast<size_t>(K), 0.0);
  double total = 0.0;
  for (auto& w : weights) {
    double u;
    do {
      u = rng.uniform();
    } while (u <= 0.0);
    w = -std::log(u);
    total += w;
  }

  SparseState state;
  state.n = n;
  size_t i = 0;
  for (uint64_t label : labels) {
    const double p = min_prob + (1.0 - double(K) * min_prob) * weights[i] / total;
    const double theta = rng.uniform(0.0, kTwoPi);
    state.terms.push_back({bits_from_label(label, n),
                           std::sqrt(p) * cplx(std::cos(theta), std::sin(theta))});
    ++i;
  }
  state.normalize();
  return state;
}

StateVector prepare_encoded(const SparseState& truth) {
  truth.validate();
  StateVector psi(truth.n + 1);
  for (const auto& term : truth.terms)
    psi.amps[size_t(label_from_bits(term.bits)) << 1] = term.coeff;
  std::vector<int> data(size_t(truth.n));
  for (int l = 1; l <= truth.n; ++l) data[size_t(l - 1)] = l;
  apply_hadamard_layer(psi, data);
  apply_gate1(psi, Gate2x2::hadamard(), 0);
  return psi;
}

std::pair<cplx, cplx> decompose_ancilla(const EigenPair& pair) {
  const double inv_sqrt2 = std::numbers::sqrt2 / 2.0;
  return {(pair.beta0 - pair.beta1) * inv_sqrt2,
          (pair.beta0 + std::conj(pair.beta1)) * inv_sqrt2};
}

void TomographyConfig::validate() const {
  if (t < 1) throw std::invalid_argument("tomography config: t must be >= 1");
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::invalid_argument("tomography config: epsilon must be in (0,1)");
  if (min_prob_hint > 1.0)
    throw std::invalid_argument("tomography config: hint above 1");
  if (stop_patience < 1) throw std::invalid_argument("tomography config: patience must be >= 1");
  if (safety < 1) throw std::invalid_argument("tomography config: safety must be >= 1");
  if (shots_mag < 1 || shots_phase < 1)
    throw std::invalid_argument("tomography config: shot counts must be >= 1");
  if (qubit_cap < 3) throw std::invalid_argument("tomography config: qubit cap too small");
}

SupportSampler::SupportSampler(const SparseState& truth, const PhaseConfig& cfg,
                               const TomographyConfig& tcfg) {
  truth.validate();
  tcfg.validate();
  if (cfg.n != truth.n) throw std::invalid_argument("phase config does not match state size");
  n_ = truth.n;
  patience_ = tcfg.stop_patience;

  const auto terms = sorted_terms(truth);
  pairs_.reserve(terms.size());
  for (const auto& [label, coeff] : terms)
    pairs_.push_back(solve_pair(rho_block(AnsatzIndex::from_bits(label, n_), cfg)));

  // Size the register so that words of distinct bitstrings stay apart:
  // smallest t with 2 pi 2^-t <= gap / 2 over cross-label phase pairs.
  double gap = kTwoPi;
  for (size_t i = 0; i < pairs_.size(); ++i)
    for (size_t j = i + 1; j < pairs_.size(); ++j)
      for (double a : {pairs_[i].lambda1, pairs_[i].lambda2})
        for (double b : {pairs_[j].lambda1, pairs_[j].lambda2})
          gap = std::min(gap, circular_gap(a, b));

  int t_needed = 0;
  bool gap_hopeless = false;
  if (pairs_.size() > 1) {
    if (gap <= 0.0)
      gap_hopeless = true;
    else
      t_needed = std::max(0, int(std::ceil(std::log2(2.0 * kTwoPi / gap))));
  }

  const int pad = register_size(1, tcfg.epsilon) - 1;
  const int t_max = tcfg.qubit_cap - (n_ + 1) - pad;
  if (tcfg.t > t_max)
    throw ResourceError("tomography: requested precision exceeds the qubit cap");
  const int t_want = gap_hopeless ? t_max + 1 : std::max(tcfg.t, t_needed);
  t_used_ = std::min(t_want, t_max);
  t_capped_ = t_want > t_max;
  t_tilde_ = register_size(t_used_, tcfg.epsilon);

  std::vector<std::set<uint64_t>> words;
  for (const auto& pair : pairs_)
    words.push_back({word_of_phase(pair.lambda1, t_tilde_), word_of_phase(pair.lambda2, t_tilde_)});
  for (size_t i = 0; i < words.size() && !collision_; ++i)
    for (size_t j = i + 1; j < words.size() && !collision_; ++j)
      for (uint64_t w : words[i])
        if (words[j].count(w)) {
          collision_ = true;
          break;
        }

  if (tcfg.min_prob_hint > 0.0) {
    const double reps = double(tcfg.safety) * std::ceil(2.0 / tcfg.min_prob_hint);
    if (reps > 1e7) throw std::invalid_argument("tomography: hint implies an absurd budget");
    budget_ = int(reps);
  }

  prepared_ = prepare_qpe(cfg, prepare_encoded(truth), t_tilde_, tcfg.qubit_cap);
}

SupportEstimate SupportSampler::run(RngStream& rng) const {
  SupportEstimate est;
  std::vector<int> data(static_cast<size_t>(n_), 0);
  for (int l = 1; l <= n_; ++l) data[size_t(l - 1)] = l;

  auto one_rep = [&]() {
    QpeSample sample = sample_qpe(prepared_, rng);
    StateVector collapsed = sample.data_state;
    apply_hadamard_layer(collapsed, data);
    const std::vector<int> bits = measure_qubits(collapsed, data, rng).first;
    uint64_t label = 0;
    for (size_t i = 0; i < bits.size(); ++i) label |= uint64_t(bits[i]) << i;
    const std::string key = bits_from_label(label, n_);
    const bool fresh = est.found.insert(key).second;
    est.phase_table[key].push_back(sample.word);
    est.repetitions_used++;
    return fresh;
  };

  if (budget_ > 0) {
    for (int rep = 0; rep < budget_; ++rep) one_rep();
  } else {
    int streak = 0;
    while (streak < patience_) {
      if (est.repetitions_used >= 1000000)
        throw std::runtime_error("tomography: patience loop exceeded 1e6 repetitions");
      streak = one_rep() ? 0 : streak + 1;
    }
  }
  return est;
}

SupportEstimate phase1_support(const SparseState& truth, const PhaseConfig& cfg,
                               const TomographyConfig& tcfg) {
  SupportSampler sampler(truth, cfg, tcfg);
  RngStream rng = RngStream::derive(tcfg.seed, 11);
  return sampler.run(rng);
}

double worst_branch_probability(const std::vector<double>& probs,
                                const std::vector<std::pair<double, double>>& dsq) {
  if (probs.empty() || probs.size() != dsq.size())
    throw std::invalid_argument("worst_branch_probability: mismatched tables");
  double m = 1.0;
  for (size_t k = 0; k < probs.size(); ++k)
    m = std::min(m, probs[k] * std::max(dsq[k].first, dsq[k].second));
  return m;
}

std::pair<double, int> repetition_budget(const SparseState& truth, const Spectrum& spectrum) {
  truth.validate();
  if (!spectrum.conforming)
    throw std::invalid_argument("repetition_budget: spectrum does not conform");
  if (spectrum.n != truth.n)
    throw std::invalid_argument("repetition_budget: size mismatch");

  std::vector<double> probs;
  std::vector<std::pair<double, double>> dsq;
  double min_p = 1.0;
  for (const auto& term : truth.terms) {
    const double p = std::norm(term.coeff);
    min_p = std::min(min_p, p);
    const auto [d1, d2] = decompose_ancilla(spectrum.pair_for(label_from_bits(term.bits)));
    probs.push_back(p);
    dsq.emplace_back(std::norm(d1), std::norm(d2));
  }
  const double m = worst_branch_probability(probs, dsq);
  if (m < min_p / 2.0 - 1e-12)
    throw std::logic_error("repetition_budget: branch probability fell below min|c|^2 / 2");
  return {m, int(std::ceil(2.0 / min_p))};
}

bool phase_words_collide(const std::vector<double>& phases, int t_tilde) {
  if (t_tilde < 1 || t_tilde > 62) throw std::invalid_argument("phase_words_collide: bad width");
  std::set<uint64_t> seen;
  for (double phase : phases)
    if (!seen.insert(word_of_phase(phase, t_tilde)).second) return true;
  return false;
}

CoefficientEstimate phase2_coefficients(const SparseState& truth,
                                        const std::set<std::string>& support,
                                        const TomographyConfig& tcfg) {
  truth.validate();
  tcfg.validate();
  if (support.empty()) throw std::invalid_argument("phase2: empty support");

  std::map<std::string, cplx> amp;
  for (const auto& term : truth.terms) amp[term.bits] = term.coeff;
  auto amp_of = [&](const std::string& bits) {
    auto it = amp.find(bits);
    return it == amp.end() ? cplx(0.0) : it->second;
  };

  CoefficientEstimate est;
  est.support.assign(support.begin(), support.end());
  const size_t kk = est.support.size();

  // Magnitudes: computational-basis draws bucketed over the support plus an
  // off-support sink.
  std::vector<double> cumulative(kk + 1, 0.0);
  double acc = 0.0;
  for (size_t k = 0; k < kk; ++k) {
    acc += std::norm(amp_of(est.support[k]));
    cumulative[k] = acc;
  }
  cumulative[kk] = 1.0;

  RngStream rng_mag = RngStream::derive(tcfg.seed, 12);
  std::vector<long long> counts;
  draw_counts(rng_mag, cumulative, tcfg.shots_mag, counts);
  est.off_support_rate = double(counts[kk]) / double(tcfg.shots_mag);
  est.settings = 1;

  std::vector<double> mags(kk, 0.0);
  std::vector<size_t> kept;
  for (size_t k = 0; k < kk; ++k) {
    if (counts[k] == 0) {
      est.dropped.push_back(est.support[k]);
      continue;
    }
    mags[k] = std::sqrt(double(counts[k]) / double(tcfg.shots_mag));
    kept.push_back(k);
  }
  if (kept.empty()) throw std::runtime_error("phase2: no support mass observed");

  // Relative phases against the first kept string from paired interferometric
  // settings; the 2-dim rotation leaves other basis states untouched, so each
  // setting is a three-way draw (plus, minus, elsewhere).
  const size_t ref = kept.front();
  const cplx a = amp_of(est.support[ref]);
  std::vector<double> theta(kk, 0.0);
  RngStream rng_phase = RngStream::derive(tcfg.seed, 13);
  for (size_t k : kept) {
    if (k == ref) continue;
    const cplx b = amp_of(est.support[k]);
    auto run_setting = [&](cplx plus_amp, cplx minus_amp) {
      const double p_plus = 0.5 * std::norm(plus_amp);
      const double p_minus = 0.5 * std::norm(minus_amp);
      std::vector<double> cum{p_plus, p_plus + p_minus, 1.0};
      std::vector<long long> c;
      draw_counts(rng_phase, cum, tcfg.shots_phase, c);
      est.settings++;
      return 0.5 * double(c[0] - c[1]) / double(tcfg.shots_phase);
    };
    const double re = run_setting(a + b, a - b);
    const double im = run_setting(a - cplx(0.0, 1.0) * b, a + cplx(0.0, 1.0) * b);
    theta[k] = std::atan2(im, re);
  }

  est.coeffs.assign(kk, cplx(0.0));
  double total = 0.0;
  for (size_t k : kept) total += mags[k] * mags[k];
  const double scale = 1.0 / std::sqrt(total);
  for (size_t k : kept)
    est.coeffs[k] = scale * mags[k] * cplx(std::cos(theta[k]), std::sin(theta[k]));
  return est;
}

double fidelity(const SparseState& a, const SparseState& b) {
  a.validate();
  b.validate();
  if (a.n != b.n) throw std::invalid_argument("fidelity: size mismatch");
  std::map<std::string, cplx> amp;
  for (const auto& term : a.terms) amp[term.bits] = term.coeff;
  cplx overlap = 0.0;
  for (const auto& term : b.terms) {
    auto it = amp.find(term.bits);
    if (it != amp.end()) overlap += std::conj(it->second) * term.coeff;
  }
  return std::norm(overlap);
}

Report reconstruct(const SparseState& truth, const PhaseConfig& cfg,
                   const TomographyConfig& tcfg) {
  SupportSampler sampler(truth, cfg, tcfg);
  RngStream rng = RngStream::derive(tcfg.seed, 11);

  Report report;
  report.support = sampler.run(rng);
  report.repetitions_used = report.support.repetitions_used;
  report.budget = sampler.budget();
  report.t_used = sampler.t_used();
  report.t_tilde = sampler.t_tilde();
  report.t_capped = sampler.t_capped();
  report.collision_detected = sampler.collision();
  report.shots_mag = tcfg.shots_mag;
  report.shots_phase = tcfg.shots_phase;

  const auto terms = sorted_terms(truth);
  std::vector<double> probs;
  std::vector<std::pair<double, double>> dsq;
  double min_p = 1.0;
  for (size_t k = 0; k < terms.size(); ++k) {
    const double p = std::norm(terms[k].second);
    min_p = std::min(min_p, p);
    const auto [d1, d2] = decompose_ancilla(sampler.support_pairs()[k]);
    probs.push_back(p);
    dsq.emplace_back(std::norm(d1), std::norm(d2));
  }
  report.m_value = worst_branch_probability(probs, dsq);
  report.theoretical_budget = int(std::ceil(2.0 / min_p));

  CoefficientEstimate ce = phase2_coefficients(truth, report.support.found, tcfg);
  report.settings = ce.settings;
  report.off_support_rate = ce.off_support_rate;
  report.dropped = ce.dropped;

  report.estimate.n = truth.n;
  for (size_t k = 0; k < ce.support.size(); ++k)
    if (std::abs(ce.coeffs[k]) > 0.0)
      report.estimate.terms.push_back({ce.support[k], ce.coeffs[k]});
  report.fidelity = fidelity(truth, report.estimate);
  return report;
}

}  // namespace qst
