#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>
#include <vector>

#include <qst/json_io.hpp>
#include <qst/phase_estimation.hpp>
#include <qst/tomography.hpp>
#include <qst/uphi.hpp>
#include <qst/uphi_element.hpp>
#include <qst/version.hpp>

namespace {

using qst::cplx;
using qst::ordered_json;

int thread_cap() {
  const char* env = std::getenv("QST_THREADS");
  if (env == nullptr) return 1;
  const int v = std::atoi(env);
  return v >= 1 ? v : 1;
}

void emit(const ordered_json& j, const std::string& out_path) {
  if (out_path.empty()) return;
  qst::save_json(out_path, j);
  std::printf("wrote %s\n", out_path.c_str());
}

struct GenArgs {
  int n = 4;
  int k = 2;
  double min_prob = 0.0;
  uint64_t seed = 1;
  std::string out;
};

int run_gen_state(const GenArgs& a) {
  qst::RngStream rng = qst::RngStream::derive(a.seed, 0);
  const qst::SparseState state = qst::gen_sparse_state(a.n, a.k, a.min_prob, rng);
  qst::save_json(a.out, qst::sparse_state_json(state));
  double min_p = 1.0;
  for (const auto& term : state.terms) min_p = std::min(min_p, std::norm(term.coeff));
  std::printf("wrote %s: n=%d K=%d min|c|^2=%.6f seed=%llu\n", a.out.c_str(), state.n,
              state.k(), min_p, static_cast<unsigned long long>(a.seed));
  return 0;
}

struct VerifyArgs {
  int n = 3;
  int trials = 10;
  uint64_t seed = 1;
  double tol = 1e-10;
  std::string out;
};

Eigen::Matrix4cd golden_two_mode() {
  const cplx i(0.0, 1.0);
  Eigen::Matrix4cd g;
  g << 1.0, i, -1.0, i,
       i, -1.0, i, 1.0,
       -1.0, i, 1.0, i,
       i, 1.0, i, -1.0;
  return 0.5 * g;
}

int run_verify_unitary(const VerifyArgs& a) {
  const bool forced_failure = a.tol <= 0.0;
  double max_entry_diff = 0.0;
  double max_mag_dev = 0.0;
  const double scale = std::pow(2.0, -0.5 * double(a.n + 1));
  const int dim = 1 << (a.n + 1);

  for (int trial = 0; trial < a.trials; ++trial) {
    qst::RngStream rng = qst::RngStream::derive(a.seed, uint64_t(trial));
    const qst::PhaseConfig cfg = qst::random_phase_config(a.n, rng);
    const qst::UnitaryMatrix u = qst::uphi_dense(cfg);
    for (int k = 0; k < dim; ++k)
      for (int j = 0; j < dim; ++j) {
        max_mag_dev = std::max(max_mag_dev, std::abs(std::abs(u(k, j)) - scale));
        max_entry_diff =
            std::max(max_entry_diff, std::abs(qst::uphi_element_reordered(k, j, cfg) - u(k, j)));
      }
  }

  const qst::PhaseConfig flat(1, {0.0, 0.0});
  const double golden_diff =
      (qst::uphi_dense(flat) - golden_two_mode()).cwiseAbs().maxCoeff();

  const bool pass = !forced_failure && max_entry_diff < a.tol && max_mag_dev < a.tol &&
                    golden_diff < a.tol;
  std::printf("fast vs dense max entry diff: %.3e\n", max_entry_diff);
  std::printf("flat magnitude law max deviation: %.3e\n", max_mag_dev);
  std::printf("two-mode golden matrix max diff: %.3e\n", golden_diff);
  if (forced_failure)
    std::printf("tolerance %.3e is not positive: forcing a failed verification\n", a.tol);
  std::printf("verify-unitary: %s\n", pass ? "PASS" : "FAIL");

  emit({{"version", qst::kVersion},
        {"kind", "verify_unitary"},
        {"n", a.n},
        {"trials", a.trials},
        {"seed", a.seed},
        {"tol", a.tol},
        {"threads", thread_cap()},
        {"max_entry_diff", max_entry_diff},
        {"max_magnitude_deviation", max_mag_dev},
        {"golden_diff", golden_diff},
        {"forced_failure", forced_failure},
        {"pass", pass}},
       a.out);
  return pass ? 0 : 1;
}

struct ScanArgs {
  int n = 3;
  int trials = 100;
  uint64_t seed = 1;
  double tol = 1e-8;
  std::string out;
};

int run_conjecture_scan(const ScanArgs& a) {
  const qst::ScanReport report = qst::conjecture_scan(a.n, a.trials, a.seed, a.tol);
  ordered_json j = qst::scan_report_json(report);
  j["threads"] = thread_cap();
  std::printf("conforming fraction: %.4f\n", report.summary.conforming_fraction);
  std::printf("distinct-phase fraction (gap > %.1e): %.4f\n", qst::kGapTolerance,
              report.summary.gap_fraction);
  std::printf("min gap quantiles (q0/q50/q90/q100): %.3e %.3e %.3e %.3e\n",
              report.summary.min_gap_q[0], report.summary.min_gap_q[1],
              report.summary.min_gap_q[2], report.summary.min_gap_q[3]);
  std::printf("failure exemplars: %zu\n", report.failure_exemplars.size());
  emit(j, a.out);
  return report.summary.conforming_fraction == 1.0 ? 0 : 1;
}

struct TomoArgs {
  std::string state_path;
  int n = 0;
  int k = 0;
  double min_prob = 0.0;
  qst::TomographyConfig tcfg;
  double fidelity_threshold = 0.0;
  std::string out;
};

int run_tomography(const TomoArgs& a) {
  qst::SparseState truth;
  if (!a.state_path.empty()) {
    truth = qst::load_sparse_state(a.state_path);
  } else {
    qst::RngStream rng = qst::RngStream::derive(a.tcfg.seed, 0);
    truth = qst::gen_sparse_state(a.n, a.k, a.min_prob, rng);
  }

  qst::RngStream phi_rng = qst::RngStream::derive(a.tcfg.seed, 1);
  int redraws = 0;
  qst::PhaseConfig cfg(truth.n, std::vector<double>(size_t(truth.n) + 1, 0.0));
  for (;; ++redraws) {
    if (redraws > 100) throw std::runtime_error("no conforming interferometer found in 100 draws");
    cfg = qst::random_phase_config(truth.n, phi_rng);
    if (qst::full_spectrum(cfg).conforming) break;
  }

  const qst::Report report = qst::reconstruct(truth, cfg, a.tcfg);
  ordered_json j = qst::tomography_report_json(report, cfg, a.tcfg);
  j["phi_redraws"] = redraws;
  j["threads"] = thread_cap();
  j["fidelity_threshold"] = a.fidelity_threshold;

  std::printf("support size: %zu of %d\n", report.support.found.size(), truth.k());
  std::printf("repetitions: %d (budget %d)\n", report.repetitions_used, report.budget);
  std::printf("measurement settings: %d\n", report.settings);
  std::printf("register: t=%d t_tilde=%d%s\n", report.t_used, report.t_tilde,
              report.t_capped ? " (capped)" : "");
  if (report.collision_detected)
    std::printf("warning: two bitstrings share a phase word at this register width\n");
  if (!report.dropped.empty())
    std::printf("warning: %zu support string(s) dropped with zero sampled magnitude\n",
                report.dropped.size());
  std::printf("fidelity: %.6f\n", report.fidelity);
  emit(j, a.out);
  return report.fidelity >= a.fidelity_threshold ? 0 : 1;
}

struct BenchArgs {
  int n_min = 4;
  int n_max = 20;
  int reps = 25;
  uint64_t seed = 1;
  std::string format = "csv";
  std::string out;
};

struct BenchRow {
  int n;
  const char* op;
  double mean_ns;
  double stddev_ns;
};

template <typename F>
BenchRow time_op(int n, const char* op, int reps, F&& once) {
  std::vector<double> samples;
  samples.reserve(size_t(reps));
  once();  // warm caches before the measured repetitions
  for (int r = 0; r < reps; ++r) {
    const auto start = std::chrono::steady_clock::now();
    const double batch = once();
    const auto stop = std::chrono::steady_clock::now();
    samples.push_back(std::chrono::duration<double, std::nano>(stop - start).count() / batch);
  }
  double mean = 0.0;
  for (double s : samples) mean += s;
  mean /= double(samples.size());
  double var = 0.0;
  for (double s : samples) var += (s - mean) * (s - mean);
  var /= double(samples.size());
  return {n, op, mean, std::sqrt(var)};
}

int run_bench(const BenchArgs& a) {
  std::vector<BenchRow> rows;
  for (int n = a.n_min; n <= a.n_max; ++n) {
    qst::RngStream rng = qst::RngStream::derive(a.seed, uint64_t(n));
    const qst::PhaseConfig cfg = qst::random_phase_config(n, rng);
    const uint64_t dim = uint64_t(1) << (n + 1);
    qst::RngStream idx = qst::RngStream::derive(a.seed, uint64_t(n) + 1000);
    rows.push_back(time_op(n, "element", a.reps, [&]() {
      constexpr int kBatch = 256;
      cplx sink = 0.0;
      for (int b = 0; b < kBatch; ++b)
        sink += qst::uphi_element_reordered(int(idx.below(dim)), int(idx.below(dim)), cfg);
      volatile double keep = sink.real();
      (void)keep;
      return double(kBatch);
    }));
  }
  for (int n = a.n_min; n <= std::min(a.n_max, 9); ++n) {
    qst::RngStream rng = qst::RngStream::derive(a.seed, uint64_t(n) + 2000);
    const qst::PhaseConfig cfg = qst::random_phase_config(n, rng);
    qst::StateVector state = qst::new_basis_state(n + 1, 0);
    rows.push_back(time_op(n, "dense_apply", a.reps, [&]() {
      qst::apply_uphi_circuit(state, cfg);
      return 1.0;
    }));
  }

  std::string text;
  if (a.format == "csv") {
    text = "n,op,mean_ns,stddev\n";
    char line[128];
    for (const BenchRow& row : rows) {
      std::snprintf(line, sizeof(line), "%d,%s,%.1f,%.1f\n", row.n, row.op, row.mean_ns,
                    row.stddev_ns);
      text += line;
    }
    std::fputs(text.c_str(), stdout);
  } else {
    ordered_json rows_json = ordered_json::array();
    for (const BenchRow& row : rows)
      rows_json.push_back(
          {{"n", row.n}, {"op", row.op}, {"mean_ns", row.mean_ns}, {"stddev", row.stddev_ns}});
    ordered_json j{{"version", qst::kVersion},
                   {"kind", "bench"},
                   {"seed", a.seed},
                   {"reps", a.reps},
                   {"threads", thread_cap()},
                   {"rows", std::move(rows_json)}};
    text = j.dump(2) + "\n";
    std::fputs(text.c_str(), stdout);
  }
  if (!a.out.empty()) {
    std::ofstream f(a.out);
    if (!f) throw std::runtime_error("cannot open for writing: " + a.out);
    f << text;
    std::printf("wrote %s\n", a.out.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparse-state interferometric tomography toolkit"};
  app.require_subcommand(1);

  GenArgs gen;
  CLI::App* cmd_gen = app.add_subcommand("gen-state", "generate a random sparse state file");
  cmd_gen->add_option("--n", gen.n, "number of detector labels")->required()->check(CLI::Range(1, 30));
  cmd_gen->add_option("--k", gen.k, "number of basis terms")->required()->check(CLI::Range(1, 1 << 20));
  cmd_gen->add_option("--min-prob", gen.min_prob, "floor on each |c|^2")->check(CLI::Range(0.0, 1.0));
  cmd_gen->add_option("--seed", gen.seed, "rng seed");
  cmd_gen->add_option("--out", gen.out, "output JSON path")->required();

  VerifyArgs verify;
  CLI::App* cmd_verify =
      app.add_subcommand("verify-unitary", "check the fast elements against the dense circuit");
  cmd_verify->add_option("--n", verify.n, "modes per trial")->check(CLI::Range(1, 9));
  cmd_verify->add_option("--trials", verify.trials, "random phase draws")->check(CLI::Range(1, 10000));
  cmd_verify->add_option("--seed", verify.seed, "rng seed");
  cmd_verify->add_option("--tol", verify.tol, "pass tolerance; <= 0 forces a failure");
  cmd_verify->add_option("--out", verify.out, "optional JSON report path");

  ScanArgs scan;
  CLI::App* cmd_scan =
      app.add_subcommand("conjecture-scan", "sweep random phases for spectral structure");
  cmd_scan->add_option("--n", scan.n, "modes")->required()->check(CLI::Range(1, 8));
  cmd_scan->add_option("--trials", scan.trials, "random phase draws")->check(CLI::Range(1, 100000));
  cmd_scan->add_option("--seed", scan.seed, "rng seed");
  cmd_scan->add_option("--tol", scan.tol, "residual tolerance");
  cmd_scan->add_option("--out", scan.out, "optional JSON report path");

  TomoArgs tomo;
  CLI::App* cmd_tomo = app.add_subcommand("tomography", "reconstruct a sparse state end to end");
  CLI::Option* opt_state = cmd_tomo->add_option("--state", tomo.state_path, "input state JSON");
  CLI::Option* opt_n = cmd_tomo->add_option("--n", tomo.n, "labels (generated instance)")
                           ->check(CLI::Range(1, 12));
  cmd_tomo->add_option("--k", tomo.k, "terms (generated instance)")->check(CLI::Range(1, 4096));
  cmd_tomo->add_option("--min-prob", tomo.min_prob, "floor on generated |c|^2")
      ->check(CLI::Range(0.0, 1.0));
  cmd_tomo->add_option("--t", tomo.tcfg.t, "phase precision bits")->check(CLI::Range(1, 20));
  cmd_tomo->add_option("--epsilon", tomo.tcfg.epsilon, "phase estimation failure budget")
      ->check(CLI::Range(1e-6, 0.999));
  cmd_tomo->add_option("--shots-mag", tomo.tcfg.shots_mag, "magnitude shots");
  cmd_tomo->add_option("--shots-phase", tomo.tcfg.shots_phase, "shots per phase setting");
  cmd_tomo->add_option("--patience", tomo.tcfg.stop_patience,
                       "stop after this many repetitions with no new bitstring");
  cmd_tomo->add_option("--min-prob-hint", tomo.tcfg.min_prob_hint,
                       "known floor on |c_k|^2; fixes the repetition budget");
  cmd_tomo->add_option("--seed", tomo.tcfg.seed, "rng seed");
  cmd_tomo->add_option("--fidelity-threshold", tomo.fidelity_threshold,
                       "exit nonzero below this fidelity");
  cmd_tomo->add_option("--out", tomo.out, "optional JSON report path");
  opt_state->excludes(opt_n);
  opt_n->needs(cmd_tomo->get_option("--k"));

  BenchArgs bench;
  CLI::App* cmd_bench = app.add_subcommand("bench", "time the element formula and dense circuit");
  cmd_bench->add_option("--n-min", bench.n_min, "smallest n")->check(CLI::Range(1, 24));
  cmd_bench->add_option("--n-max", bench.n_max, "largest n")->check(CLI::Range(1, 24));
  cmd_bench->add_option("--reps", bench.reps, "timing repetitions")->check(CLI::Range(1, 1000));
  cmd_bench->add_option("--seed", bench.seed, "rng seed");
  cmd_bench->add_option("--format", bench.format, "output format")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd_bench->add_option("--out", bench.out, "optional output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (cmd_gen->parsed()) return run_gen_state(gen);
    if (cmd_verify->parsed()) return run_verify_unitary(verify);
    if (cmd_scan->parsed()) return run_conjecture_scan(scan);
    if (cmd_tomo->parsed()) {
      if (tomo.state_path.empty() && tomo.n == 0)
        throw std::invalid_argument("tomography needs --state or --n/--k");
      return run_tomography(tomo);
    }
    if (cmd_bench->parsed()) {
      if (bench.n_min > bench.n_max)
        throw std::invalid_argument("bench: --n-min must not exceed --n-max");
      return run_bench(bench);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
