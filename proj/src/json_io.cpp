#include <qst/json_io.hpp>

#include <fstream>
#include <stdexcept>

#include <qst/version.hpp>

namespace qst {

namespace {

ordered_json quantiles_json(const std::array<double, 4>& q) {
  return {{"q0", q[0]}, {"q50", q[1]}, {"q90", q[2]}, {"q100", q[3]}};
}

}  // namespace

ordered_json sparse_state_json(const SparseState& state) {
  ordered_json terms = ordered_json::array();
  for (const auto& term : state.terms)
    terms.push_back({{"bits", term.bits}, {"re", term.coeff.real()}, {"im", term.coeff.imag()}});
  return {{"n", state.n}, {"terms", std::move(terms)}};
}

SparseState sparse_state_from_json(const ordered_json& j) {
  SparseState state;
  state.n = j.at("n").get<int>();
  for (const auto& term : j.at("terms"))
    state.terms.push_back({term.at("bits").get<std::string>(),
                           cplx(term.at("re").get<double>(), term.at("im").get<double>())});
  state.validate();
  return state;
}

void save_json(const std::string& path, const ordered_json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << j.dump(2) << "\n";
  if (!out) throw std::runtime_error("write failed: " + path);
}

ordered_json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  ordered_json j;
  in >> j;
  return j;
}

SparseState load_sparse_state(const std::string& path) {
  return sparse_state_from_json(load_json(path));
}

ordered_json scan_report_json(const ScanReport& report) {
  ordered_json trials = ordered_json::array();
  for (const auto& rec : report.records)
    trials.push_back({{"phis", rec.phis},
                      {"conforming", rec.conforming},
                      {"gap_ok", rec.gap_ok},
                      {"min_gap", rec.min_gap},
                      {"max_eigen_residual", rec.max_eigen_residual},
                      {"max_e_residual", rec.max_e_residual},
                      {"duality_residual", rec.duality_residual}});
  return {{"version", kVersion},
          {"kind", "conjecture_scan"},
          {"n", report.n},
          {"trials", report.trials},
          {"seed", report.seed},
          {"tol", report.tol},
          {"summary",
           {{"conforming_fraction", report.summary.conforming_fraction},
            {"gap_fraction", report.summary.gap_fraction},
            {"min_gap", quantiles_json(report.summary.min_gap_q)},
            {"eigen_residual", quantiles_json(report.summary.eigen_residual_q)},
            {"e_residual", quantiles_json(report.summary.e_residual_q)},
            {"duality_residual", quantiles_json(report.summary.duality_residual_q)}}},
          {"failure_exemplars", report.failure_exemplars},
          {"records", std::move(trials)}};
}

ordered_json tomography_report_json(const Report& report, const PhaseConfig& cfg,
                                    const TomographyConfig& tcfg) {
  ordered_json table = ordered_json::object();
  for (const auto& [bits, words] : report.support.phase_table) table[bits] = words;
  ordered_json found = ordered_json::array();
  for (const auto& bits : report.support.found) found.push_back(bits);
  return {{"version", kVersion},
          {"kind", "tomography_report"},
          {"config",
           {{"n", cfg.n},
            {"phis", cfg.phis},
            {"t", tcfg.t},
            {"epsilon", tcfg.epsilon},
            {"min_prob_hint", tcfg.min_prob_hint},
            {"stop_patience", tcfg.stop_patience},
            {"safety", tcfg.safety},
            {"shots_mag", tcfg.shots_mag},
            {"shots_phase", tcfg.shots_phase},
            {"seed", tcfg.seed},
            {"qubit_cap", tcfg.qubit_cap}}},
          {"t_used", report.t_used},
          {"t_tilde", report.t_tilde},
          {"t_capped", report.t_capped},
          {"collision_detected", report.collision_detected},
          {"repetitions_used", report.repetitions_used},
          {"budget", report.budget},
          {"theoretical_budget", report.theoretical_budget},
          {"m_value", report.m_value},
          {"settings", report.settings},
          {"shots_mag", report.shots_mag},
          {"shots_phase", report.shots_phase},
          {"off_support_rate", report.off_support_rate},
          {"dropped", report.dropped},
          {"support", {{"found", std::move(found)}, {"phase_table", std::move(table)}}},
          {"estimate", sparse_state_json(report.estimate)},
          {"fidelity", report.fidelity}};
}

}  // namespace qst
