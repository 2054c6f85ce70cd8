#pragma once

#include <string>

#include <nlohmann/json.hpp>
#include <qst/eigenstructure.hpp>
#include <qst/tomography.hpp>

namespace qst {

using ordered_json = nlohmann::ordered_json;

// {"n": int, "terms": [{"bits": "0101", "re": f, "im": f}]}
ordered_json sparse_state_json(const SparseState& state);
SparseState sparse_state_from_json(const ordered_json& j);

void save_json(const std::string& path, const ordered_json& j);
ordered_json load_json(const std::string& path);

SparseState load_sparse_state(const std::string& path);

ordered_json scan_report_json(const ScanReport& report);

ordered_json tomography_report_json(const Report& report, const PhaseConfig& cfg,
                                    const TomographyConfig& tcfg);

}  // namespace qst
